"""Exit codes and output formats of the imexms command line."""
import json
import os
import subprocess
import sys
import tempfile

EXE = sys.argv[1]
CONFIGS = sys.argv[2]
failed = []


def run(*args, env=None):
    e = dict(os.environ)
    if env:
        e.update(env)
    return subprocess.run([EXE, *args], capture_output=True, text=True, env=e)


def expect(name, cond, detail=""):
    print(("ok   " if cond else "FAIL ") + name + ("" if cond else "  " + detail))
    if not cond:
        failed.append(name)


r = run("--help")
expect("help exits 0", r.returncode == 0)
expect("help lists default grids", "Default parameter grids" in r.stdout)

r = run()
expect("missing subcommand exits 1", r.returncode == 1, r.stderr)

r = run("scheme", "--family", "wbdf", "--k", "2", "--param", "1")
expect("scheme exits 0", r.returncode == 0, r.stderr)
j = json.loads(r.stdout)
expect("scheme a-vector", [float(x) for x in j["scheme"]["a"]] == [1.5, -0.5], r.stdout)
expect("scheme zero stable", j["zero_stable"] is True)

r = run("scheme", "--family", "wbdf", "--k", "7", "--param", "2")
expect("unsupported order exits 1", r.returncode == 1 and "unsupported order" in r.stderr, r.stderr)

r = run("scheme", "--family", "rk4", "--k", "2")
expect("unknown family exits 1", r.returncode == 1, r.stderr)

r = run("indicators", "--family", "euler")
j = json.loads(r.stdout)
expect("euler indicators", r.returncode == 0 and abs(j["indicators"]["intensity"] - 1) < 1e-13, r.stdout)

r = run("sweep", "--family", "mbdf", "--k", "2", "--param-grid", "2:10:9")
expect("sweep exits 0", r.returncode == 0, r.stderr)
expect("sweep has one row per parameter", len(r.stdout.strip().splitlines()) >= 10, r.stdout)

r = run("sweep", "--family", "mbdf", "--k", "2", "--param-grid", "2:10", env={"IMEX_THREADS": "1"})
expect("bad grid exits 1", r.returncode == 1, r.stderr)

a = run("sweep", "--family", "siems6", "--param-grid", "2:17:6", env={"IMEX_THREADS": "1"}).stdout
b = run("sweep", "--family", "siems6", "--param-grid", "2:17:6", env={"IMEX_THREADS": "4"}).stdout
expect("sweep deterministic across thread caps", a == b)

r = run("verify-toeplitz", "--family", "bdf", "--k", "2", "--n", "128")
j = json.loads(r.stdout)
expect("verify-toeplitz bdf2", r.returncode == 0 and j["toeplitz"]["min_eig_sym_Bhat"] >= 0.5 - 1e-8, r.stdout)

r = run("verify-toeplitz", "--family", "bdf", "--k", "2", "--n", "2000")
expect("verify-toeplitz size limit exits 1", r.returncode == 1, r.stderr)

r = run("curves", "--family", "wbdf2", "--param", "1", "--grid", "5")
lines = r.stdout.strip().splitlines()
expect("curves header", lines[0] == "theta,inv_abs_a,abs_c_over_a,re_b_over_a", lines[0] if lines else "")
expect("curves at pi", abs(float(lines[-1].split(",")[3]) - 0.5) < 1e-14, lines[-1] if lines else "")

r = run("converge", "--problem", "P1", "--family", "euler")
expect("converge euler exits 0", r.returncode == 0, r.stderr)
expect("converge euler summary", r.stdout.strip().splitlines()[-1] == "slope 1.00 PASS", r.stdout)
expect("converge csv header", r.stdout.startswith("tau,err_max,err_l2,slope\n"), r.stdout)

r = run("converge", "--problem", "P3", "--family", "bdf3", "--mu0", "0.2", "--tau-divisors", "20,40,80")
expect("bdf3 threshold message",
       "intensity 0.1429 < threshold 0.2000: stability condition not satisfied" in r.stdout, r.stdout)
expect("bdf3 run completes", r.returncode == 0, r.stderr)

r = run("converge", "--config", os.path.join(CONFIGS, "P1.json"), "--family", "siems3", "--param", "2",
        "--tau-divisors", "20,40,80")
expect("converge from config", r.returncode == 0 and "PASS" in r.stdout, r.stdout + r.stderr)

with tempfile.TemporaryDirectory() as d:
    bad = os.path.join(d, "bad.json")
    with open(bad, "w") as f:
        f.write('{\n  "dim": 1,\n  "L": {"type": "diagonal" "data": [1]}\n}\n')
    r = run("converge", "--config", bad, "--family", "euler")
    expect("config parse error exits 1 with line info", r.returncode == 1 and "line 3" in r.stderr, r.stderr)

    unstable = os.path.join(d, "unstable.json")
    with open(unstable, "w") as f:
        json.dump({"dim": 1, "L": {"type": "diagonal", "data": [1]}, "T": 10,
                   "nonlinearity": {"preset": "linear", "amplitude": -50},
                   "exact": {"preset": "exp_decay"}}, f)
    r = run("converge", "--config", unstable, "--family", "bdf2", "--taus", "0.5,0.25,0.125")
    expect("blow-up exits 2", r.returncode == 2 and "blow-up detected" in r.stderr, r.stdout + r.stderr)

    r = run("tables", "--family", "wbdf", "--out", d)
    expect("tables to directory", r.returncode == 0 and os.path.exists(os.path.join(d, "wbdf.csv")), r.stderr)
    with open(os.path.join(d, "wbdf.csv")) as f:
        rows = f.read().splitlines()
    expect("tables header", rows[0] == "family,k,param,quantity,computed,closed_form,kind,discrepancy,ok", rows[0])
    row = [x for x in rows if x.startswith("WBDF,2,1,intensity,")]
    expect("tables wbdf2 alpha=1 intensity 1/3", row and abs(float(row[0].split(",")[4]) - 1 / 3) < 1e-12, str(row))

    r = run("tables", "--family", "wbdf", "--out", os.path.join(d, "missing", "x.csv"))
    expect("tables unwritable path exits 1", r.returncode == 1, r.stderr)

r = run("tables", "--family", "gbdf", "--k", "4", "--param", "9")
bound = [x for x in r.stdout.splitlines() if ",intensity," in x and ",lower," in x]
expect("gbdf4 beta=9 intensity bound", bound and abs(float(bound[0].split(",")[5]) - 547 / 773) < 1e-12, r.stdout)

r = run("tables", "--family", "siems", "--k", "6")
params = sorted({float(x.split(",")[2]) for x in r.stdout.strip().splitlines()[1:]})
expect("siems6 grid within [2, 17]", params and params[0] >= 2 and params[-1] <= 17, str(params))

print(f"{len(failed)} failed")
sys.exit(1 if failed else 0)
