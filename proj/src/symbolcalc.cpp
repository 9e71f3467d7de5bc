#include "imex/symbolcalc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "imex/parallel.hpp"

namespace imex {

namespace {

using lcplx = std::complex<long double>;

constexpr double kPi = std::numbers::pi;
constexpr double kVanishTol = 1e-12;
constexpr double kThetaTol = 1e-13;

template <class T>
lcplx eval_symbol(const std::vector<T>& c, long double theta) {
    const lcplx z(std::cos(theta), std::sin(theta));
    lcplx s = 0;
    for (std::size_t i = c.size(); i-- > 0;) s = s * z + static_cast<long double>(c[i]);
    return s;
}

// Large-coefficient schemes (SIEMS6 near the top of its range reaches 5e6) lose ~1e-9 in the
// symbol when evaluated from the rounded doubles, so the exact construction is preferred.
struct ExtTriad {
    std::vector<long double> a, b, c;
    explicit ExtTriad(const SchemeTriad& s)
        : a(extended_coeffs(s.a, s.a_ext)), b(extended_coeffs(s.b, s.b_ext)), c(extended_coeffs(s.c, s.c_ext)) {}
};

struct Pointwise {
    double inv_abs_a, abs_c_over_a, re_b_over_a, abs_a;
};

Pointwise evaluate(const ExtTriad& s, double theta) {
    const lcplx a = eval_symbol(s.a, theta);
    const lcplx b = eval_symbol(s.b, theta);
    const lcplx c = eval_symbol(s.c, theta);
    const long double abs_a = std::abs(a);
    Pointwise p;
    p.abs_a = static_cast<double>(abs_a);
    p.inv_abs_a = static_cast<double>(1.0L / abs_a);
    p.abs_c_over_a = static_cast<double>(std::abs(c) / abs_a);
    p.re_b_over_a = static_cast<double>((b / a).real());
    return p;
}

void vanishing_error(double theta, double abs_a) {
    std::ostringstream os;
    os << "symbol vanishes on unit circle (|a(theta)| = " << abs_a << " at theta = " << theta << ")";
    throw NumericalError(os.str());
}

template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return fc > fd ? std::make_pair(c, fc) : std::make_pair(d, fd);
}

// Grid maximum of f, refined around every near-best local maximum.
struct Extremum {
    double value, theta;
};

template <class F>
Extremum refine_max(const std::vector<double>& grid_vals, const std::vector<double>& thetas, F&& f) {
    const std::size_t n = grid_vals.size();
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (grid_vals[i] > grid_vals[best]) best = i;
    const double bv = grid_vals[best];
    const double slack = 1e-6 * std::max(1.0, std::abs(bv));
    std::vector<std::size_t> cand;
    for (std::size_t i = 0; i < n; ++i) {
        const bool left_ok = i == 0 || grid_vals[i] >= grid_vals[i - 1];
        const bool right_ok = i + 1 == n || grid_vals[i] >= grid_vals[i + 1];
        if (left_ok && right_ok && grid_vals[i] >= bv - slack) cand.push_back(i);
    }
    std::sort(cand.begin(), cand.end(), [&](std::size_t x, std::size_t y) { return grid_vals[x] > grid_vals[y]; });
    if (cand.size() > 8) cand.resize(8);
    Extremum ext{bv, thetas[best]};
    for (std::size_t i : cand) {
        const double lo = thetas[i == 0 ? 0 : i - 1];
        const double hi = thetas[i + 1 == n ? n - 1 : i + 1];
        if (grid_vals[i] > ext.value) ext = {grid_vals[i], thetas[i]};
        const auto [t, v] = golden_max(f, lo, hi, kThetaTol);
        if (v > ext.value) ext = {v, t};
    }
    return ext;
}

double round12(double v) {
    if (std::abs(v) >= 1e3 || !std::isfinite(v)) return v;
    return std::nearbyint(v * 1e12) / 1e12;
}

IndicatorReport raw_indicators(const SchemeTriad& scheme, int grid_size) {
    const ExtTriad s(scheme);
    if (grid_size < 2) throw DomainError("indicator grid needs at least 2 intervals");
    const std::size_t n = static_cast<std::size_t>(grid_size) + 1;
    std::vector<double> th(n), F(n), E(n), I(n);
    for (std::size_t i = 0; i < n; ++i) {
        th[i] = kPi * static_cast<double>(i) / grid_size;
        const Pointwise p = evaluate(s, th[i]);
        if (!(p.abs_a >= kVanishTol)) vanishing_error(th[i], p.abs_a);
        F[i] = p.inv_abs_a;
        E[i] = p.abs_c_over_a;
        I[i] = -p.re_b_over_a;
    }
    auto safe = [&](double t) {
        const Pointwise p = evaluate(s, t);
        if (!(p.abs_a >= kVanishTol)) vanishing_error(t, p.abs_a);
        return p;
    };
    const Extremum ef = refine_max(F, th, [&](double t) { return safe(t).inv_abs_a; });
    const Extremum ee = refine_max(E, th, [&](double t) { return safe(t).abs_c_over_a; });
    const Extremum ei = refine_max(I, th, [&](double t) { return -safe(t).re_b_over_a; });
    IndicatorReport r;
    r.sigma_F = ef.value;
    r.theta_F = ef.theta;
    r.sigma_E = ee.value;
    r.theta_E = ee.theta;
    r.lambda_I = -ei.value;
    r.theta_I = ei.theta;
    r.intensity = r.lambda_I / r.sigma_E;
    r.grid_size = grid_size;
    r.refined = true;
    return r;
}

}  // namespace

std::complex<double> TrigSymbol::operator()(double theta) const {
    const lcplx v = eval_symbol(c_, theta);
    return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

TrigSymbol symbol_of(const SchemeTriad& s, Which which) {
    switch (which) {
        case Which::A: return TrigSymbol(s.a);
        case Which::B: return TrigSymbol(s.b);
        case Which::C: return TrigSymbol(s.c);
    }
    return TrigSymbol();
}

IndicatorReport indicators(const SchemeTriad& s, int grid_size) {
    IndicatorReport r = raw_indicators(s, grid_size);
    r.sigma_F = round12(r.sigma_F);
    r.sigma_E = round12(r.sigma_E);
    r.lambda_I = round12(r.lambda_I);
    r.intensity = r.lambda_I / r.sigma_E;
    return r;
}

double max_re_b_over_a(const SchemeTriad& scheme, int grid_size) {
    const ExtTriad s(scheme);
    const std::size_t n = static_cast<std::size_t>(grid_size) + 1;
    std::vector<double> th(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        th[i] = kPi * static_cast<double>(i) / grid_size;
        const Pointwise p = evaluate(s, th[i]);
        if (!(p.abs_a >= kVanishTol)) vanishing_error(th[i], p.abs_a);
        v[i] = p.re_b_over_a;
    }
    return refine_max(v, th, [&](double t) { return evaluate(s, t).re_b_over_a; }).value;
}

SweepResult indicator_sweep(Family family, int k, const std::vector<Param>& grid, int grid_size, int threads) {
    SweepResult out;
    out.family = family;
    out.k = k;
    out.entries.resize(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        SweepEntry& e = out.entries[i];
        e.param = grid[i];
        try {
            const SchemeTriad s = make_scheme(family, k, grid[i]);
            e.warning = s.warning;
            e.report = indicators(s, grid_size);
        } catch (const std::exception& ex) {
            e.error = ex.what();
        }
    });
    for (std::size_t i = 0; i < out.entries.size(); ++i) {
        const auto& r = out.entries[i].report;
        if (!r) continue;
        if (!out.argmax_lambda || r->lambda_I > out.entries[*out.argmax_lambda].report->lambda_I)
            out.argmax_lambda = i;
        if (!out.argmax_intensity || r->intensity > out.entries[*out.argmax_intensity].report->intensity)
            out.argmax_intensity = i;
    }
    return out;
}

ParamOptimum maximize_over_param(Family family, int k, double lo, double hi, Objective objective,
                                 double param_tol, int grid_size) {
    if (!(hi > lo)) throw DomainError("parameter interval must have hi > lo");
    auto f = [&](double p) {
        const IndicatorReport r = raw_indicators(make_scheme(family, k, Param(p)), grid_size);
        return objective == Objective::LambdaI ? r.lambda_I : r.intensity;
    };
    const auto [p, v] = golden_max(f, lo, hi, param_tol);
    (void)v;
    ParamOptimum opt;
    opt.param = p;
    opt.report = indicators(make_scheme(family, k, Param(p)), grid_size);
    return opt;
}

ThetaCurves theta_curves(const SchemeTriad& scheme, int n_points) {
    const ExtTriad s(scheme);
    if (n_points < 2) throw DomainError("theta curves need at least 2 points");
    ThetaCurves c;
    for (int i = 0; i < n_points; ++i) {
        const double t = (i == n_points - 1) ? kPi : kPi * i / (n_points - 1);
        const Pointwise p = evaluate(s, t);
        if (!(p.abs_a >= kVanishTol)) vanishing_error(t, p.abs_a);
        c.theta.push_back(t);
        c.inv_abs_a.push_back(p.inv_abs_a);
        c.abs_c_over_a.push_back(p.abs_c_over_a);
        c.re_b_over_a.push_back(p.re_b_over_a);
    }
    return c;
}

std::string curves_csv(const ThetaCurves& c) {
    std::ostringstream os;
    os << "theta,inv_abs_a,abs_c_over_a,re_b_over_a\n";
    for (std::size_t i = 0; i < c.theta.size(); ++i)
        os << format_g17(c.theta[i]) << ',' << format_g17(c.inv_abs_a[i]) << ','
           << format_g17(c.abs_c_over_a[i]) << ',' << format_g17(c.re_b_over_a[i]) << '\n';
    return os.str();
}

nlohmann::json to_json(const IndicatorReport& r) {
    return nlohmann::json{{"sigma_F", r.sigma_F},   {"sigma_E", r.sigma_E}, {"lambda_I", r.lambda_I},
                          {"intensity", r.intensity}, {"theta_F", r.theta_F}, {"theta_E", r.theta_E},
                          {"theta_I", r.theta_I},     {"grid_size", r.grid_size}, {"refined", r.refined}};
}

}  // namespace imex
