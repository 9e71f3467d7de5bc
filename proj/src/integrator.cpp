#include "imex/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cctype>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>

#include "imex/error.hpp"
#include "imex/parallel.hpp"
#include "imex/symbolcalc.hpp"

namespace imex {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

using Real = long double;
using LVec = std::vector<Real>;

LVec widen(const Vector& v) { return LVec(v.begin(), v.end()); }
Vector narrow(const LVec& v) { return Vector(v.begin(), v.end()); }

template <class T>
std::vector<T> apply_op(const LinearOperator& L, const std::vector<T>& x) {
    const int n = L.dim();
    std::vector<T> y(x.size());
    switch (L.kind()) {
        case OperatorKind::Diagonal:
            for (int i = 0; i < n; ++i) y[i] = static_cast<T>(L.diag_entries()[i]) * x[i];
            break;
        case OperatorKind::Laplacian1d: {
            const T inv_h2 = static_cast<T>(n + 1) * static_cast<T>(n + 1);
            for (int i = 0; i < n; ++i) {
                const T left = i > 0 ? x[i - 1] : T(0);
                const T right = i + 1 < n ? x[i + 1] : T(0);
                y[i] = inv_h2 * (2 * x[i] - left - right);
            }
            break;
        }
        case OperatorKind::Dense: {
            const DenseMatrix& m = L.dense_matrix();
            for (int i = 0; i < n; ++i) {
                T acc = 0;
                for (int j = 0; j < n; ++j) acc += static_cast<T>(m(i, j)) * x[j];
                y[i] = acc;
            }
            break;
        }
    }
    return y;
}

// Solver for (a0/tau) I + varpi b0 L, factored once per run, in extended precision.
class ImplicitSolver {
public:
    ImplicitSolver(const LinearOperator& L, Real shift, Real scale) : L_(L), shift_(shift), scale_(scale) {
        const int n = L.dim();
        switch (L.kind()) {
            case OperatorKind::Diagonal:
                for (double d : L.diag_entries())
                    if (!(std::abs(shift + scale * d) > 0)) throw NumericalError("linear_solve: singular implicit matrix");
                break;
            case OperatorKind::Laplacian1d: {
                // Thomas elimination of tridiag(-w, shift + 2w, -w); diagonally dominant for shift > 0.
                const Real w = scale * static_cast<Real>(n + 1) * static_cast<Real>(n + 1);
                off_ = -w;
                piv_.assign(n, 0);
                piv_[0] = shift + 2 * w;
                for (int i = 1; i < n; ++i) piv_[i] = shift + 2 * w - off_ * off_ / piv_[i - 1];
                for (Real v : piv_)
                    if (!(std::abs(v) > 1e-14L * w)) throw NumericalError("linear_solve: singular implicit matrix");
                break;
            }
            case OperatorKind::Dense: {
                DenseMatrix m = L.dense_matrix();
                for (auto& v : m.values()) v = static_cast<double>(scale * v);
                for (int i = 0; i < n; ++i) m(i, i) += static_cast<double>(shift);
                lu_ = std::make_unique<LuFactor>(m);
                break;
            }
        }
    }

    LVec solve(const LVec& rhs) const {
        const int n = L_.dim();
        switch (L_.kind()) {
            case OperatorKind::Diagonal: {
                LVec x(n);
                for (int i = 0; i < n; ++i) x[i] = rhs[i] / (shift_ + scale_ * L_.diag_entries()[i]);
                return x;
            }
            case OperatorKind::Laplacian1d: {
                LVec y(n);
                y[0] = rhs[0];
                for (int i = 1; i < n; ++i) y[i] = rhs[i] - off_ / piv_[i - 1] * y[i - 1];
                LVec x(n);
                x[n - 1] = y[n - 1] / piv_[n - 1];
                for (int i = n - 2; i >= 0; --i) x[i] = (y[i] - off_ * x[i + 1]) / piv_[i];
                return x;
            }
            case OperatorKind::Dense: {
                // double LU plus one extended-precision refinement step
                LVec x = widen(lu_->solve(narrow(rhs)));
                const LVec Mx = apply_op(L_, x);
                LVec r(n);
                for (int i = 0; i < n; ++i) r[i] = rhs[i] - (shift_ * x[i] + scale_ * Mx[i]);
                const Vector dx = lu_->solve(narrow(r));
                for (int i = 0; i < n; ++i) x[i] += dx[i];
                return x;
            }
        }
        return {};
    }

private:
    const LinearOperator& L_;
    Real shift_, scale_;
    Real off_ = 0;
    LVec piv_;
    std::unique_ptr<LuFactor> lu_;
};

template <class T>
T phi_of(const ExactSolution& e, T t) {
    switch (e.time) {
        case TimeProfile::ExpDecay: return std::exp(-t);
        case TimeProfile::Logistic: return T(1) / (T(1) + std::exp(t));
        case TimeProfile::SinCos: return std::sin(2 * t) + std::cos(t);
        case TimeProfile::Polynomial: return std::pow(t, e.degree);
    }
    return T(0);
}

template <class T>
T dphi_of(const ExactSolution& e, T t) {
    switch (e.time) {
        case TimeProfile::ExpDecay: return -std::exp(-t);
        case TimeProfile::Logistic: {
            const T x = std::exp(t);
            return -x / ((1 + x) * (1 + x));
        }
        case TimeProfile::SinCos: return 2 * std::cos(2 * t) - std::sin(t);
        case TimeProfile::Polynomial: return e.degree == 0 ? T(0) : e.degree * std::pow(t, e.degree - 1);
    }
    return T(0);
}

template <class T>
std::vector<T> profile_of(const ExactSolution& e, int dim) {
    std::vector<T> p(dim, T(1));
    for (int i = 0; i < dim; ++i) {
        if (e.space == SpaceProfile::Sine) p[i] = std::sin(std::numbers::pi_v<T> * (i + 1) / (dim + 1));
        if (e.space == SpaceProfile::Harmonic) p[i] = T(1) / (i + 1);
    }
    return p;
}

template <class T>
std::vector<T> nonlinearity_of(const Nonlinearity& F, const std::vector<T>& u) {
    std::vector<T> f(u.size(), T(0));
    const T amp = F.amplitude;
    switch (F.kind) {
        case NonlinearityKind::None: break;
        case NonlinearityKind::Sin:
            for (std::size_t i = 0; i < u.size(); ++i) f[i] = amp * std::sin(u[i]);
            break;
        case NonlinearityKind::Square:
            for (std::size_t i = 0; i < u.size(); ++i) f[i] = amp * u[i] * u[i];
            break;
        case NonlinearityKind::Linear:
            for (std::size_t i = 0; i < u.size(); ++i) f[i] = amp * u[i];
            break;
    }
    return f;
}

template <class T>
std::vector<T> exact_of(const ProblemSpec& pb, T t) {
    std::vector<T> p = profile_of<T>(*pb.exact, pb.dim);
    const T s = phi_of(*pb.exact, t);
    for (auto& v : p) v *= s;
    return p;
}

// g(t) = u'(t) + varpi L u(t) - F(u(t))
template <class T>
std::vector<T> forcing_of(const ProblemSpec& pb, T t) {
    const std::vector<T> p = profile_of<T>(*pb.exact, pb.dim);
    const std::vector<T> u = exact_of(pb, t);
    const std::vector<T> Lu = apply_op(pb.L, u);
    const std::vector<T> Fu = nonlinearity_of(pb.F, u);
    const T d = dphi_of(*pb.exact, t);
    const T w = pb.varpi;
    std::vector<T> g(pb.dim);
    for (int i = 0; i < pb.dim; ++i) g[i] = d * p[i] + w * Lu[i] - Fu[i];
    return g;
}

std::string lower(std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
}

NonlinearityKind parse_nonlinearity(const std::string& name) {
    const std::string n = lower(name);
    if (n == "none" || n == "zero") return NonlinearityKind::None;
    if (n == "sin") return NonlinearityKind::Sin;
    if (n == "square") return NonlinearityKind::Square;
    if (n == "linear") return NonlinearityKind::Linear;
    throw DomainError("unknown nonlinearity preset '" + name + "' (none, sin, square, linear)");
}

TimeProfile parse_time_profile(const std::string& name) {
    const std::string n = lower(name);
    if (n == "exp_decay") return TimeProfile::ExpDecay;
    if (n == "logistic") return TimeProfile::Logistic;
    if (n == "sincos") return TimeProfile::SinCos;
    if (n == "polynomial") return TimeProfile::Polynomial;
    throw DomainError("unknown exact preset '" + name + "' (exp_decay, logistic, sincos, polynomial)");
}

SpaceProfile parse_space_profile(const std::string& name) {
    const std::string n = lower(name);
    if (n == "ones") return SpaceProfile::Ones;
    if (n == "sine") return SpaceProfile::Sine;
    if (n == "harmonic") return SpaceProfile::Harmonic;
    throw DomainError("unknown spatial profile '" + name + "' (ones, sine, harmonic)");
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("config key '") + key + "': " + e.what());
    }
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw DomainError("unknown key '" + it.key() + "' in " + where);
}

}  // namespace

// ---------------------------------------------------------------- operator

LinearOperator LinearOperator::diagonal(std::vector<double> entries) {
    LinearOperator op;
    op.kind_ = OperatorKind::Diagonal;
    op.dim_ = static_cast<int>(entries.size());
    op.diag_ = std::move(entries);
    return op;
}

LinearOperator LinearOperator::dense(DenseMatrix m) {
    if (!m.square()) throw DomainError("dense operator must be square");
    LinearOperator op;
    op.kind_ = OperatorKind::Dense;
    op.dim_ = static_cast<int>(m.rows());
    op.dense_ = std::move(m);
    return op;
}

LinearOperator LinearOperator::laplacian1d(int m) {
    if (m < 2) throw DomainError("laplacian1d needs at least 2 interior points");
    LinearOperator op;
    op.kind_ = OperatorKind::Laplacian1d;
    op.dim_ = m;
    return op;
}

Vector LinearOperator::apply(const Vector& x) const { return apply_op(*this, x); }

double LinearOperator::energy(const Vector& x) const {
    const Vector y = apply(x);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

void LinearOperator::check_psd() const {
    switch (kind_) {
        case OperatorKind::Diagonal:
            for (double d : diag_)
                if (!(d >= 0.0)) throw DomainError("diagonal operator has a negative entry");
            return;
        case OperatorKind::Laplacian1d: return;
        case OperatorKind::Dense: {
            const double scale = std::max(1.0, max_abs(dense_));
            for (int i = 0; i < dim_; ++i)
                for (int j = 0; j < i; ++j)
                    if (std::abs(dense_(i, j) - dense_(j, i)) > 1e-10 * scale)
                        throw DomainError("dense operator is not symmetric");
            if (sym_eig(dense_, false, 1e-10).values.front() < -1e-10 * scale)
                throw DomainError("dense operator is not positive semidefinite");
            return;
        }
    }
}

// ---------------------------------------------------------------- data

Vector Nonlinearity::operator()(const Vector& u) const { return nonlinearity_of(*this, u); }

double ExactSolution::phi(double t) const { return phi_of(*this, t); }
double ExactSolution::dphi(double t) const { return dphi_of(*this, t); }
Vector ExactSolution::profile(int dim) const { return profile_of<double>(*this, dim); }

void ProblemSpec::validate() const {
    if (dim < 1) throw DomainError("problem dimension must be positive");
    if (L.dim() != dim) throw DomainError("operator size does not match dim");
    if (!(varpi > 0)) throw DomainError("varpi must be positive");
    if (!(mu0 >= 0 && mu0 < varpi)) throw DomainError("mu0 must satisfy 0 <= mu0 < varpi");
    if (!(T > 0)) throw DomainError("final time T must be positive");
    if (!exact && static_cast<int>(u0.size()) != dim)
        throw DomainError("problem needs an exact solution or an initial state of size dim");
    if (exact && exact->time == TimeProfile::Polynomial && exact->degree < 0)
        throw DomainError("polynomial degree must be nonnegative");
    L.check_psd();
}

Vector ProblemSpec::exact_at(double t) const {
    if (!exact) throw DomainError("problem has no exact solution");
    return exact_of(*this, t);
}

Vector ProblemSpec::forcing(double t) const {
    if (!exact) return Vector(dim, 0.0);
    return forcing_of(*this, t);
}

// ---------------------------------------------------------------- presets and config

ProblemSpec problem_preset(const std::string& name) {
    const std::string n = lower(name);
    ProblemSpec p;
    if (n == "p1") {
        p.name = "P1";
        p.dim = 1;
        p.L = LinearOperator::diagonal({1.0});
        p.exact = ExactSolution{TimeProfile::ExpDecay, SpaceProfile::Ones, 1};
    } else if (n == "p2") {
        p.name = "P2";
        p.dim = 4;
        p.L = LinearOperator::diagonal({1.0, 10.0, 100.0, 1000.0});
        p.mu0 = 0.1;
        p.F = {NonlinearityKind::Sin, 0.1};
        p.exact = ExactSolution{TimeProfile::SinCos, SpaceProfile::Harmonic, 1};
    } else if (n == "p3") {
        p.name = "P3";
        p.dim = 64;
        p.L = LinearOperator::laplacian1d(64);
        p.mu0 = 0.1;
        p.F = {NonlinearityKind::Sin, 0.1};
        p.exact = ExactSolution{TimeProfile::SinCos, SpaceProfile::Sine, 1};
    } else {
        throw DomainError("unknown problem preset '" + name + "' (P1, P2, P3)");
    }
    p.T = 1.0;
    p.validate();
    return p;
}

ProblemSpec problem_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw DomainError("problem config must be a JSON object");
    reject_unknown(j, {"name", "dim", "L", "varpi", "mu0", "mu1", "nonlinearity", "exact", "T", "u0"}, "problem");
    ProblemSpec p;
    p.name = get_or<std::string>(j, "name", "custom");
    if (!j.contains("L") || !j["L"].is_object()) throw DomainError("problem config needs an object 'L'");
    const auto& jl = j["L"];
    reject_unknown(jl, {"type", "data", "m"}, "L");
    const std::string type = lower(get_or<std::string>(jl, "type", ""));
    if (type == "diagonal") {
        p.L = LinearOperator::diagonal(get_or<std::vector<double>>(jl, "data", {}));
    } else if (type == "dense") {
        const auto rows = get_or<std::vector<std::vector<double>>>(jl, "data", {});
        DenseMatrix m(rows.size(), rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size()) throw DomainError("dense L must be square");
            for (std::size_t c = 0; c < rows.size(); ++c) m(i, c) = rows[i][c];
        }
        p.L = LinearOperator::dense(std::move(m));
    } else if (type == "laplacian1d") {
        p.L = LinearOperator::laplacian1d(get_or<int>(jl, "m", get_or<int>(j, "dim", 0)));
    } else {
        throw DomainError("L.type must be diagonal, dense or laplacian1d");
    }
    p.dim = get_or<int>(j, "dim", p.L.dim());
    p.varpi = get_or<double>(j, "varpi", 1.0);
    p.mu0 = get_or<double>(j, "mu0", 0.0);
    p.mu1 = get_or<double>(j, "mu1", 0.0);
    p.T = get_or<double>(j, "T", 1.0);
    p.u0 = get_or<std::vector<double>>(j, "u0", {});
    if (j.contains("nonlinearity")) {
        const auto& jn = j["nonlinearity"];
        reject_unknown(jn, {"preset", "amplitude"}, "nonlinearity");
        p.F.kind = parse_nonlinearity(get_or<std::string>(jn, "preset", "none"));
        p.F.amplitude = get_or<double>(jn, "amplitude", p.mu0);
    }
    if (j.contains("exact") && !j["exact"].is_null()) {
        const auto& je = j["exact"];
        reject_unknown(je, {"preset", "profile", "degree"}, "exact");
        ExactSolution e;
        e.time = parse_time_profile(get_or<std::string>(je, "preset", "exp_decay"));
        const std::string def = p.L.kind() == OperatorKind::Laplacian1d ? "sine" : "ones";
        e.space = parse_space_profile(get_or<std::string>(je, "profile", def));
        e.degree = get_or<int>(je, "degree", 1);
        p.exact = e;
    }
    p.validate();
    return p;
}

ProblemSpec load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DomainError("config parse error in '" + path + "': " + e.what());
    }
    return problem_from_json(j);
}

// ---------------------------------------------------------------- runs

StabilityCheck stability_threshold_check(const ProblemSpec& problem, const SchemeTriad& scheme) {
    StabilityCheck c;
    c.threshold = problem.mu0 / problem.varpi;
    try {
        const IndicatorReport r = indicators(scheme);
        c.intensity = r.intensity;
        c.lambda_I = r.lambda_I;
    } catch (const NumericalError& e) {
        c.reason = e.what();
        return c;
    }
    if (!(c.lambda_I > 0)) {
        c.reason = "non-dissipative composite kernel";
        return c;
    }
    c.satisfied = c.intensity > c.threshold;
    if (!c.satisfied)
        c.reason = "intensity " + fmt("%.4f", c.intensity) + " < threshold " + fmt("%.4f", c.threshold) +
                   ": stability condition not satisfied";
    return c;
}

namespace {

// Coefficients in extended precision when the triad still carries its exact construction.
IntegrationRun run_impl(const ProblemSpec& pb, const SchemeTriad& s, double tau, const RunOptions& opt) {
    if (!(tau > 0)) throw DomainError("time step must be positive");
    const int k = s.k;
    if (k < 1 || static_cast<int>(s.a.size()) != k || static_cast<int>(s.b.size()) != k + 1 ||
        static_cast<int>(s.c.size()) != k)
        throw DomainError("malformed scheme triad");
    if (!(s.a[0] > 0 && s.b[0] > 0)) throw DomainError("scheme needs a_0 > 0 and b_0 > 0");
    if (k >= 2 && !pb.exact) throw DomainError("k-step schemes with k >= 2 need a manufactured solution for startup");
    const long N = std::lround(pb.T / tau);
    if (std::abs(N * tau - pb.T) > 1e-9 * std::max(1.0, pb.T))
        throw DomainError("T / tau must be an integer step count");
    if (N < k) throw DomainError("tau * (k - 1) must be smaller than T");

    const LVec a = extended_coeffs(s.a, s.a_ext), b = extended_coeffs(s.b, s.b_ext), c = extended_coeffs(s.c, s.c_ext);
    const int d = pb.dim;
    const Real tl = tau;
    const Real w = pb.varpi;
    IntegrationRun run;
    run.scheme = s;
    run.tau = tau;
    run.N = N;

    // Ring buffers of the last k+1 states, their L-images and explicit terms F(u) + g(t).
    std::vector<LVec> u(k + 1), Lu(k + 1), Fg(k + 1);
    auto slot = [&](long m) -> std::size_t { return static_cast<std::size_t>(m % (k + 1)); };
    auto time_at = [&](long m) { return static_cast<Real>(m) * tl; };
    auto explicit_term = [&](const LVec& state, Real t) {
        LVec f = nonlinearity_of(pb.F, state);
        if (pb.exact) {
            const LVec g = forcing_of(pb, t);
            for (int i = 0; i < d; ++i) f[i] += g[i];
        }
        return f;
    };

    const bool track = pb.exact.has_value();
    const bool l2 = track && pb.L.kind() != OperatorKind::Dense;
    Real l2_sum = 0;
    for (long m = 0; m < k; ++m) {
        LVec st = pb.exact ? exact_of(pb, time_at(m)) : widen(pb.u0);
        Lu[slot(m)] = apply_op(pb.L, st);
        Fg[slot(m)] = explicit_term(st, time_at(m));
        if (opt.store_trajectory) run.trajectory.push_back(narrow(st));
        u[slot(m)] = std::move(st);
    }

    const ImplicitSolver solver(pb.L, a[0] / tl, w * b[0]);
    LVec rhs(d);
    for (long n = k; n <= N; ++n) {
        const LVec& prev = u[slot(n - 1)];
        for (int i = 0; i < d; ++i) rhs[i] = a[0] * prev[i] / tl;
        for (int j = 1; j <= k - 1; ++j) {
            const LVec& x1 = u[slot(n - j)];
            const LVec& x0 = u[slot(n - j - 1)];
            for (int i = 0; i < d; ++i) rhs[i] -= a[j] * (x1[i] - x0[i]) / tl;
        }
        for (int j = 1; j <= k; ++j) {
            const LVec& l = Lu[slot(n - j)];
            for (int i = 0; i < d; ++i) rhs[i] -= w * b[j] * l[i];
        }
        for (int j = 0; j <= k - 1; ++j) {
            const LVec& f = Fg[slot(n - j - 1)];
            for (int i = 0; i < d; ++i) rhs[i] += c[j] * f[i];
        }
        LVec next = solver.solve(rhs);
        Real norm = 0;
        for (Real v : next) norm = std::isfinite(static_cast<double>(v)) ? std::max(norm, std::abs(v)) : INFINITY;
        if (!(norm <= opt.blowup_threshold))
            throw BlowUpError("blow-up detected at step " + std::to_string(n) + " (tau = " + fmt("%.6g", tau) + ")",
                              n);
        const Real t = time_at(n);
        if (l2) {
            LVec e = exact_of(pb, t);
            for (int i = 0; i < d; ++i) e[i] = next[i] - e[i];
            const LVec Le = apply_op(pb.L, e);
            Real en = 0;
            for (int i = 0; i < d; ++i) en += e[i] * Le[i];
            l2_sum += tl * en;
        }
        Lu[slot(n)] = apply_op(pb.L, next);
        if (n < N) Fg[slot(n)] = explicit_term(next, t);
        if (opt.store_trajectory) run.trajectory.push_back(narrow(next));
        u[slot(n)] = std::move(next);
    }
    run.final_state = narrow(u[slot(N)]);
    if (track) {
        const LVec ex = exact_of(pb, time_at(N));
        Real m = 0;
        for (int i = 0; i < d; ++i) m = std::max(m, std::abs(u[slot(N)][i] - ex[i]));
        run.err_max = static_cast<double>(m);
        if (l2) run.err_l2 = static_cast<double>(std::sqrt(l2_sum));
    }
    return run;
}

}  // namespace

IntegrationRun step_run(const ProblemSpec& problem, const SchemeTriad& scheme, double tau, const RunOptions& opt) {
    problem.validate();
    IntegrationRun run = run_impl(problem, scheme, tau, opt);
    run.stability = stability_threshold_check(problem, scheme);
    return run;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("slope fit needs at least two points");
    double mx = 0, my = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0 && y[i] > 0)) throw DomainError("slope fit needs positive data");
        mx += std::log(x[i]) / n;
        my += std::log(y[i]) / n;
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    if (!(sxx > 0)) throw DomainError("slope fit needs distinct abscissae");
    return sxy / sxx;
}

ConvergenceStudy convergence_study(const ProblemSpec& problem, const SchemeTriad& scheme,
                                   const std::vector<double>& taus, int threads) {
    problem.validate();
    if (!problem.exact) throw DomainError("convergence study needs a manufactured solution");
    if (taus.size() < 3) throw DomainError("convergence study needs at least 3 step sizes");
    for (std::size_t i = 1; i < taus.size(); ++i)
        if (!(taus[i] < taus[i - 1])) throw DomainError("step sizes must be strictly decreasing");

    ConvergenceStudy st;
    st.stability = stability_threshold_check(problem, scheme);
    st.rows.resize(taus.size());
    parallel_for(taus.size(), threads, [&](std::size_t i) {
        ConvergenceRow& row = st.rows[i];
        row.tau = taus[i];
        try {
            const IntegrationRun r = run_impl(problem, scheme, taus[i], {});
            row.err_max = r.err_max;
            row.err_l2 = r.err_l2;
        } catch (const BlowUpError& e) {
            row.blew_up = true;
            row.blowup_step = e.step();
            row.failure = e.what();
        }
    });
    std::vector<double> x, y, y2;
    for (const auto& row : st.rows) {
        if (row.blew_up) {
            st.unstable = true;
            continue;
        }
        if (row.err_max && *row.err_max > 0) {
            x.push_back(row.tau);
            y.push_back(*row.err_max);
            if (row.err_l2 && *row.err_l2 > 0) y2.push_back(*row.err_l2);
        }
    }
    st.fitted = static_cast<int>(x.size());
    if (x.size() >= 2) {
        st.slope = loglog_slope(x, y);
        if (y2.size() == x.size()) st.slope_l2 = loglog_slope(x, y2);
    }
    return st;
}

std::string convergence_csv(const ConvergenceStudy& study) {
    std::ostringstream os;
    os << "tau,err_max,err_l2,slope\n";
    const ConvergenceRow* prev = nullptr;
    for (const auto& row : study.rows) {
        os << format_g17(row.tau) << ',';
        os << (row.err_max ? format_g17(*row.err_max) : std::string("nan")) << ',';
        os << (row.err_l2 ? format_g17(*row.err_l2) : std::string()) << ',';
        if (prev && prev->err_max && row.err_max && *prev->err_max > 0 && *row.err_max > 0)
            os << format_g17(std::log(*row.err_max / *prev->err_max) / std::log(row.tau / prev->tau));
        os << '\n';
        prev = row.blew_up ? nullptr : &row;
    }
    return os.str();
}

}  // namespace imex
