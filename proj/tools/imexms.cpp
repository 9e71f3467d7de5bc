// imexms: command-line front end for scheme construction, stability indicators,
// Toeplitz verification and convergence studies.
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "imex/error.hpp"
#include "imex/integrator.hpp"
#include "imex/kernels.hpp"
#include "imex/schemes.hpp"
#include "imex/symbolcalc.hpp"
#include "imex/tables.hpp"

namespace {

using namespace imex;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string family;
    int k = 0;
    std::string param;
    std::string param_grid;
    int n = 64;
    int grid = 8192;
    double tol = -1.0;  // negative: subcommand default
    std::string out;
    std::string config;
    std::string problem;
    std::string taus;
    std::string tau_divisors = "80,160,320,640";
    std::optional<double> mu0;
    std::optional<double> varpi;
    int points = 513;
    int threads = 0;
};

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out);
    if (!f) throw IoError(out + ": " + std::strerror(errno));
    f << text;
    if (!f) throw IoError(out + ": write failed");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) parts.push_back(item);
    return parts;
}

// "siems3" -> (SIEMS, 3); "euler" -> (BDF, 1); a plain family name keeps k from --k.
std::pair<Family, int> resolve_scheme(const std::string& name, int k_flag) {
    std::string base = name;
    int k_name = 0;
    std::size_t cut = base.size();
    while (cut > 0 && std::isdigit(static_cast<unsigned char>(base[cut - 1]))) --cut;
    if (cut < base.size() && cut > 0) {
        k_name = std::stoi(base.substr(cut));
        base = base.substr(0, cut);
    }
    std::string lower = base;
    for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    const Family f = parse_family(base);
    int k = k_flag > 0 ? k_flag : k_name;
    if (lower == "euler" && k == 0) k = 1;
    if (k_flag > 0 && k_name > 0 && k_flag != k_name)
        throw DomainError("--k " + std::to_string(k_flag) + " conflicts with scheme name '" + name + "'");
    if (k == 0) throw DomainError("the step number is required (--k or a name such as siems3)");
    return {f, k};
}

Param default_param(Family f) {
    switch (f) {
        case Family::MBDF: return Param::parse("5");
        case Family::BDF:
        case Family::Custom: return Param();
        default: return Param::parse("3");
    }
}

std::string default_sweep_grid(Family f, int k) {
    switch (f) {
        case Family::WBDF: return "1:10:37";
        case Family::MBDF: return k == 2 ? "2:10:33" : "3:10:29";
        case Family::GBDF: return "1:20:39";
        case Family::NIMEX: return k == 2 ? "6/5:5:77" : "2:10:33";
        case Family::SIEMS:
            switch (k) {
                case 4: return "6/5:10:45";
                case 5: return "7/5:10:44";
                case 6: return "2:17:61";
                case 7: return "11/5:9:69";
                case 8: return "5/2:6:57";
                default: return "1:10:37";
            }
        default: return "";
    }
}

SchemeTriad scheme_from(const Options& o, Family* fam = nullptr, int* kk = nullptr) {
    const auto [f, k] = resolve_scheme(o.family, o.k);
    if (fam) *fam = f;
    if (kk) *kk = k;
    const Param p = o.param.empty() ? default_param(f) : Param::parse(o.param);
    return make_scheme(f, k, p);
}

nlohmann::json scheme_header(const SchemeTriad& s) {
    nlohmann::json j{{"family", family_name(s.family)}, {"k", s.k}};
    if (s.param) j["param"] = format_g17(*s.param);
    if (s.warning) j["warning"] = s.warning_text;
    return j;
}

int cmd_scheme(const Options& o) {
    const SchemeTriad s = scheme_from(o);
    nlohmann::json j = scheme_header(s);
    j["scheme"] = to_json(s);
    j["zero_stable"] = zero_stable(s);
    j["violations"] = validate(s);
    try {
        const TruncationReport t = truncation_leading(s);
        j["truncation"] = {{"order", t.order}, {"coeff_u", format_g17(t.coeff_u)}, {"coeff_F", format_g17(t.coeff_F)}};
    } catch (const DomainError& e) {
        j["truncation"] = {{"error", e.what()}};
    }
    emit(o.out, j.dump(2) + "\n");
    return 0;
}

int cmd_indicators(const Options& o) {
    const SchemeTriad s = scheme_from(o);
    nlohmann::json j = scheme_header(s);
    j["indicators"] = to_json(indicators(s, o.grid));
    emit(o.out, j.dump(2) + "\n");
    return 0;
}

int cmd_sweep(const Options& o) {
    const auto [f, k] = resolve_scheme(o.family, o.k);
    if (f == Family::BDF || f == Family::Custom) throw DomainError("sweep needs a parameterized family");
    const std::string spec = o.param_grid.empty() ? default_sweep_grid(f, k) : o.param_grid;
    const SweepResult r = indicator_sweep(f, k, parse_param_grid(spec), o.grid, o.threads);
    std::ostringstream os;
    os << "param,sigma_F,sigma_E,lambda_I,intensity,warning,error\n";
    for (const auto& e : r.entries) {
        os << e.param.str() << ',';
        if (e.report)
            os << format_g17(e.report->sigma_F) << ',' << format_g17(e.report->sigma_E) << ','
               << format_g17(e.report->lambda_I) << ',' << format_g17(e.report->intensity);
        else
            os << ",,,";
        std::string err = e.error;
        for (auto& ch : err)
            if (ch == ',' || ch == '\n') ch = ';';
        os << ',' << (e.warning ? "true" : "false") << ',' << err << '\n';
    }
    emit(o.out, os.str());
    if (r.argmax_lambda)
        std::cerr << "max lambda_I " << format_g17(r.entries[*r.argmax_lambda].report->lambda_I) << " at "
                  << r.entries[*r.argmax_lambda].param.str() << '\n';
    if (r.argmax_intensity)
        std::cerr << "max intensity " << format_g17(r.entries[*r.argmax_intensity].report->intensity) << " at "
                  << r.entries[*r.argmax_intensity].param.str() << '\n';
    return 0;
}

int cmd_verify_toeplitz(const Options& o) {
    const SchemeTriad s = scheme_from(o);
    ToeplitzOptions opt;
    if (o.tol >= 0) opt.bound_tol = o.tol;
    const IndicatorReport ind = indicators(s, o.grid);
    const ToeplitzReport r = toeplitz_verify(s, o.n, ind, opt);
    nlohmann::json j = scheme_header(s);
    j["toeplitz"] = to_json(r);
    j["all_ok"] = r.all_ok();
    emit(o.out, j.dump(2) + "\n");
    return r.all_ok() ? 0 : 2;
}

int cmd_curves(const Options& o) {
    const SchemeTriad s = scheme_from(o);
    emit(o.out, curves_csv(theta_curves(s, o.points)));
    return 0;
}

int cmd_converge(const Options& o) {
    Family f;
    int k;
    const SchemeTriad s = scheme_from(o, &f, &k);
    if (!o.config.empty() && !o.problem.empty()) throw DomainError("give either --config or --problem, not both");
    ProblemSpec pb = o.config.empty() ? problem_preset(o.problem.empty() ? "P1" : o.problem) : load_problem(o.config);
    if (o.varpi) pb.varpi = *o.varpi;
    if (o.mu0) {
        pb.mu0 = *o.mu0;
        if (pb.F.kind != NonlinearityKind::None) pb.F.amplitude = *o.mu0;
    }
    pb.validate();

    std::vector<double> taus;
    if (!o.taus.empty()) {
        for (const auto& t : split(o.taus, ',')) taus.push_back(Param::parse(t).value);
    } else {
        for (const auto& d : split(o.tau_divisors, ',')) taus.push_back(pb.T / Param::parse(d).value);
    }
    const ConvergenceStudy st = convergence_study(pb, s, taus, o.threads);
    emit(o.out, convergence_csv(st));
    if (!st.stability.satisfied) std::cout << st.stability.reason << '\n';
    for (const auto& row : st.rows)
        if (row.blew_up) std::cerr << row.failure << '\n';
    const double tol = o.tol >= 0 ? o.tol : 0.2 * k;
    if (!st.slope) {
        std::cout << "slope nan FAIL\n";
        return 2;
    }
    const bool pass = std::abs(*st.slope - k) <= tol;
    char line[64];
    if (st.slope_l2) {
        std::snprintf(line, sizeof line, "energy-norm slope %.2f", *st.slope_l2);
        std::cout << line << '\n';
    }
    std::snprintf(line, sizeof line, "slope %.2f %s", *st.slope, pass ? "PASS" : "FAIL");
    std::cout << line << '\n';
    return st.unstable ? 2 : 0;
}

int cmd_tables(const Options& o) {
    if (o.family.empty()) throw DomainError("tables needs --family");
    const double tol = o.tol >= 0 ? o.tol : 1e-9;
    const bool to_dir = !o.out.empty() && std::filesystem::is_directory(o.out);
    std::string combined;
    for (const auto& name : split(o.family, ',')) {
        std::vector<std::pair<Family, int>> jobs;
        bool has_digits = std::isdigit(static_cast<unsigned char>(name.back())) != 0;
        if (o.k > 0 || has_digits) {
            jobs.push_back(resolve_scheme(name, o.k));
        } else {
            const Family f = parse_family(name);
            const FamilyInfo& info = family_info(f);
            const int lo = f == Family::BDF ? 1 : 2;
            const int hi = f == Family::WBDF || f == Family::GBDF ? 5 : f == Family::MBDF ? 3 : f == Family::NIMEX ? 3
                                                                                                  : info.k_max;
            for (int k = std::max(lo, info.k_min); k <= hi; ++k) jobs.emplace_back(f, k);
        }
        std::vector<TableRow> rows;
        for (const auto& [f, k] : jobs) {
            std::vector<Param> params;
            if (!o.param.empty())
                for (const auto& t : split(o.param, ',')) params.push_back(Param::parse(t));
            else if (!o.param_grid.empty())
                params = parse_param_grid(o.param_grid);
            else
                params = default_table_grid(f, k);
            const auto part = table_rows(f, k, params, tol, o.grid);
            rows.insert(rows.end(), part.begin(), part.end());
        }
        std::string csv = table_csv(rows);
        if (to_dir) {
            std::string file = name;
            for (auto& ch : file) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
            emit((std::filesystem::path(o.out) / (file + ".csv")).string(), csv);
        } else {
            if (!combined.empty()) csv = csv.substr(csv.find('\n') + 1);
            combined += csv;
        }
    }
    if (!to_dir) emit(o.out, combined);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"imexms: implicit-explicit multistep schemes, stability indicators and convergence studies"};
    app.require_subcommand(1, 1);
    app.footer(
        "Default parameter grids for sweep:\n"
        "  WBDF 1:10:37, MBDF 2:10:33 (k=2) or 3:10:29, GBDF 1:20:39, NIMEX 6/5:5:77 (k=2) or 2:10:33,\n"
        "  SIEMS 1:10:37 (k<=3), 6/5:10:45 (k=4), 7/5:10:44 (k=5), 2:17:61 (k=6), 11/5:9:69 (k=7), 5/2:6:57 (k=8).\n"
        "Default single parameter: 5 for MBDF, 3 for the other parameterized families.\n"
        "Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure.\n"
        "IMEX_THREADS caps the worker count of sweeps and convergence studies.");

    Options o;
    auto add_scheme_flags = [&](CLI::App* sub, bool with_param = true) {
        sub->add_option("--family", o.family, "scheme family (wbdf, mbdf, gbdf, nimex, siems, bdf, euler) or a name like siems3")
            ->required();
        sub->add_option("--k", o.k, "step number");
        if (with_param) sub->add_option("--param", o.param, "family parameter, decimal or fraction (e.g. 11/4)");
    };
    auto add_out = [&](CLI::App* sub) { sub->add_option("--out", o.out, "output file (default stdout)"); };
    auto add_grid = [&](CLI::App* sub, const char* help) { sub->add_option("--grid", o.grid, help)->check(CLI::Range(2, 1 << 24)); };

    CLI::App* scheme = app.add_subcommand("scheme", "coefficient triad, zero stability and truncation coefficients (JSON)");
    add_scheme_flags(scheme);
    add_out(scheme);

    CLI::App* ind = app.add_subcommand("indicators", "sigma_F, sigma_E, lambda_I and the controllability intensity (JSON)");
    add_scheme_flags(ind);
    add_grid(ind, "theta intervals on [0, pi] (default 8192)");
    add_out(ind);

    CLI::App* sweep = app.add_subcommand("sweep", "indicators over a parameter grid (CSV)");
    add_scheme_flags(sweep, false);
    sweep->add_option("--param-grid", o.param_grid, "lo:hi:n");
    add_grid(sweep, "theta intervals on [0, pi] (default 8192)");
    sweep->add_option("--threads", o.threads, "worker count (default IMEX_THREADS or hardware)");
    add_out(sweep);

    CLI::App* toe = app.add_subcommand("verify-toeplitz", "Toeplitz eigenvalue and norm bounds at size n (JSON)");
    add_scheme_flags(toe);
    toe->add_option("--n", o.n, "Toeplitz size (default 64, at most 512)")->check(CLI::PositiveNumber);
    add_grid(toe, "theta intervals on [0, pi] (default 8192)");
    toe->add_option("--tol", o.tol, "bound slack (default 1e-8)");
    add_out(toe);

    CLI::App* curves = app.add_subcommand("curves", "1/|a|, |c/a| and Re(b/a) on [0, pi] (CSV)");
    add_scheme_flags(curves);
    curves->add_option("--grid", o.points, "number of theta samples (default 513)")->check(CLI::Range(2, 1 << 24));
    add_out(curves);

    CLI::App* conv = app.add_subcommand("converge", "temporal convergence study on a test problem (CSV + summary)");
    add_scheme_flags(conv);
    conv->add_option("--problem", o.problem, "preset P1, P2 or P3 (default P1)");
    conv->add_option("--config", o.config, "problem config JSON");
    conv->add_option("--taus", o.taus, "comma-separated decreasing step sizes");
    conv->add_option("--tau-divisors", o.tau_divisors, "comma-separated N with tau = T/N (default 80,160,320,640)");
    conv->add_option("--mu0", o.mu0, "override mu0 (also the amplitude of a sin/linear nonlinearity)");
    conv->add_option("--varpi", o.varpi, "override varpi");
    conv->add_option("--tol", o.tol, "allowed |slope - k| (default 0.2 k)");
    conv->add_option("--threads", o.threads, "worker count");
    add_out(conv);

    CLI::App* tab = app.add_subcommand("tables", "computed indicators against the known closed forms (CSV)");
    tab->add_option("--family", o.family, "comma-separated families, or names like gbdf4")->required();
    tab->add_option("--k", o.k, "single step number");
    tab->add_option("--param", o.param, "comma-separated parameter values");
    tab->add_option("--param-grid", o.param_grid, "lo:hi:n");
    add_grid(tab, "theta intervals on [0, pi] (default 8192)");
    tab->add_option("--tol", o.tol, "tolerance for equalities and bounds (default 1e-9)");
    tab->add_option("--out", o.out, "output file, or a directory for one CSV per family");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*scheme) return cmd_scheme(o);
        if (*ind) return cmd_indicators(o);
        if (*sweep) return cmd_sweep(o);
        if (*toe) return cmd_verify_toeplitz(o);
        if (*curves) return cmd_curves(o);
        if (*conv) return cmd_converge(o);
        if (*tab) return cmd_tables(o);
    } catch (const BlowUpError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
