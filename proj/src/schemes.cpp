#include "imex/schemes.hpp"

#include <type_traits>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <regex>
#include <sstream>

namespace imex {

// ---------------------------------------------------------------------------
// Names and parameters

namespace {

const FamilyInfo kFamilies[] = {
    {Family::WBDF, 2, 5, "alpha"}, {Family::MBDF, 2, 5, "s"},     {Family::GBDF, 2, 5, "beta"},
    {Family::NIMEX, 2, 8, "delta"}, {Family::SIEMS, 2, 8, "gamma"}, {Family::BDF, 1, 6, ""},
    {Family::Custom, 1, 8, ""},
};

std::string upper(std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return s;
}

Rational pow10_q(int e) {
    Rational r = 1;
    const Rational ten = 10;
    for (int i = 0; i < std::abs(e); ++i) r *= ten;
    return e >= 0 ? r : Rational(1) / r;
}

std::optional<Rational> parse_decimal(const std::string& s) {
    static const std::regex re(R"(^\s*([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?\s*$)");
    std::smatch m;
    if (!std::regex_match(s, m, re)) return std::nullopt;
    const std::string ip = m[2].str(), fp = m[3].str();
    if (ip.empty() && fp.empty()) return std::nullopt;
    boost::multiprecision::cpp_int num = 0;
    for (char ch : ip + fp) num = num * 10 + (ch - '0');
    Rational q(num);
    int e = m[4].matched ? std::stoi(m[4].str()) : 0;
    q *= pow10_q(e - static_cast<int>(fp.size()));
    if (m[1].str() == "-") q = -q;
    return q;
}

}  // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::WBDF: return "WBDF";
        case Family::MBDF: return "MBDF";
        case Family::GBDF: return "GBDF";
        case Family::NIMEX: return "NIMEX";
        case Family::SIEMS: return "SIEMS";
        case Family::BDF: return "BDF";
        case Family::Custom: return "Custom";
    }
    return "Custom";
}

Family parse_family(const std::string& name) {
    const std::string u = upper(name);
    for (const auto& info : kFamilies)
        if (upper(family_name(info.family)) == u) return info.family;
    if (u == "EULER") return Family::BDF;
    throw DomainError("unknown scheme family '" + name + "'");
}

const FamilyInfo& family_info(Family f) {
    for (const auto& info : kFamilies)
        if (info.family == f) return info;
    return kFamilies[6];
}

Param Param::parse(const std::string& text) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        auto num = parse_decimal(text.substr(0, slash));
        auto den = parse_decimal(text.substr(slash + 1));
        if (!num || !den) throw DomainError("cannot parse parameter '" + text + "'");
        if (*den == 0) throw DomainError("parameter '" + text + "' has zero denominator");
        return Param(Rational(*num / *den));
    }
    if (auto q = parse_decimal(text)) return Param(*q);
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw DomainError("cannot parse parameter '" + text + "'");
        return Param(v);
    } catch (const std::logic_error&) {
        throw DomainError("cannot parse parameter '" + text + "'");
    }
}

std::string Param::str() const {
    if (exact) {
        const auto num = boost::multiprecision::numerator(*exact);
        const auto den = boost::multiprecision::denominator(*exact);
        if (den == 1) return num.str();
        if (den < 1000000) return num.str() + "/" + den.str();
    }
    return format_g17(value);
}

std::vector<Param> param_grid(const Param& lo, const Param& hi, int n) {
    if (n < 1) throw DomainError("parameter grid needs at least one point");
    std::vector<Param> out;
    out.reserve(n);
    if (n == 1) {
        out.push_back(lo);
        return out;
    }
    for (int i = 0; i < n; ++i) {
        if (lo.exact && hi.exact) {
            out.emplace_back(Rational(*lo.exact + (*hi.exact - *lo.exact) * i / (n - 1)));
        } else {
            out.emplace_back(lo.value + (hi.value - lo.value) * i / (n - 1));
        }
    }
    return out;
}

std::vector<Param> parse_param_grid(const std::string& spec) {
    const auto p1 = spec.find(':');
    const auto p2 = spec.find(':', p1 == std::string::npos ? p1 : p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
        throw DomainError("parameter grid must look like lo:hi:n, got '" + spec + "'");
    const Param lo = Param::parse(spec.substr(0, p1));
    const Param hi = Param::parse(spec.substr(p1 + 1, p2 - p1 - 1));
    int n = 0;
    try {
        n = std::stoi(spec.substr(p2 + 1));
    } catch (const std::logic_error&) {
        throw DomainError("parameter grid count is not an integer in '" + spec + "'");
    }
    return param_grid(lo, hi, n);
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::optional<double> zero_stability_threshold(Family f, int k) {
    switch (f) {
        case Family::WBDF: return 0.5;
        case Family::MBDF:
            if (k == 2) return 1.0;
            if (k == 3) return 2.0;
            return std::nullopt;
        case Family::GBDF:
            if (k == 2) return 0.5;
            if (k == 3) return std::sqrt(2.0) / 2.0;
            if (k == 4) return (std::sqrt(7.0) - 1.0) / 2.0;
            if (k == 5) return std::sqrt(2.0 + std::sqrt(2.5)) - 1.0;
            return std::nullopt;
        case Family::NIMEX: {
            static const double t[] = {0.5, 0.5, 0.5, (5.0 + std::sqrt(5.0)) / 10.0, 1.0, 1.32799,
                                       (2.0 + std::sqrt(2.0)) / 2.0};
            if (k >= 2 && k <= 8) return t[k - 2];
            return std::nullopt;
        }
        case Family::SIEMS: {
            static const double t[] = {0.5, 0.5, 0.5, 0.658691, 1.0, 1.37957, 1.7863};
            if (k >= 2 && k <= 8) return t[k - 2];
            return std::nullopt;
        }
        default: return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// Construction

namespace {

template <class S>
using Coeffs = std::vector<S>;

template <class S>
Coeffs<S> mul(const Coeffs<S>& x, const Coeffs<S>& y) {
    Coeffs<S> r(x.size() + y.size() - 1, S(0));
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) r[i + j] += x[i] * y[j];
    return r;
}

// (slope * z + intercept)^n, ascending
template <class S>
Coeffs<S> linear_power(const S& slope, const S& intercept, int n) {
    Coeffs<S> r{S(1)};
    for (int i = 0; i < n; ++i) r = mul(r, Coeffs<S>{intercept, slope});
    return r;
}

template <class S>
Coeffs<S> shift_up(const Coeffs<S>& x, int n) {
    Coeffs<S> r(n, S(0));
    r.insert(r.end(), x.begin(), x.end());
    return r;
}

template <class S>
std::vector<double> to_double(const Coeffs<S>& x) {
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = static_cast<double>(x[i]);
    return r;
}

template <class S>
void store(SchemeTriad& out, const Coeffs<S>& a, const Coeffs<S>& b, const Coeffs<S>& c) {
    out.a = to_double(a);
    out.b = to_double(b);
    out.c = to_double(c);
    if constexpr (!std::is_same_v<S, double>) {
        auto ext = [](const Coeffs<S>& x) {
            std::vector<long double> r(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                if constexpr (std::is_same_v<S, Rational>)
                    r[i] = x[i].template convert_to<long double>();
                else
                    r[i] = x[i];
            }
            return r;
        };
        out.a_ext = ext(a);
        out.b_ext = ext(b);
        out.c_ext = ext(c);
    }
}

// Triad from rho_tilde_a (ascending, length k) and rho_b (ascending, length k+1); c from
// rho_c = rho_b - b_0 (zeta-1)^k.
template <class S>
void assemble(SchemeTriad& out, int k, const Coeffs<S>& rt_a, Coeffs<S> rho_b) {
    rho_b.resize(k + 1, S(0));
    Coeffs<S> a(k), b(k + 1), c(k);
    for (int j = 0; j < k; ++j) a[j] = rt_a[k - 1 - j];
    for (int j = 0; j <= k; ++j) b[j] = rho_b[k - j];
    Coeffs<S> rc = rho_b;
    const Coeffs<S> dk = linear_power<S>(S(1), S(-1), k);
    for (int i = 0; i <= k; ++i) rc[i] -= b[0] * dk[i];
    for (int j = 0; j < k; ++j) c[j] = rc[k - 1 - j];
    store(out, a, b, c);
}

template <class S>
void build_generated(SchemeTriad& out, Family f, int k, const S& p) {
    Coeffs<S> rho_b;
    switch (f) {
        case Family::WBDF: rho_b = shift_up(Coeffs<S>{S(1) - p, p}, k - 1); break;
        case Family::NIMEX: rho_b = linear_power<S>(p, S(1) - p, k); break;
        case Family::SIEMS: rho_b = shift_up(linear_power<S>(p, S(1) - p, k - 1), 1); break;
        case Family::BDF: rho_b = shift_up(Coeffs<S>{S(1)}, k); break;
        default: throw DomainError("build_generated: family has no log generator");
    }
    // The generator prefactor equals rho_b for these families.
    const Coeffs<S> rt_a = log_series_expand<S>(rho_b, k);
    assemble(out, k, rt_a, rho_b);
}

template <class S>
void build_mbdf(SchemeTriad& out, int k, const S& s) {
    if (s == S(1)) throw DomainError("MBDF parameter s must differ from 1");
    Coeffs<S> rt_a(k, S(0));
    for (int j = 1; j <= k; ++j) {
        const Coeffs<S> term = shift_up(linear_power<S>(S(1), S(-1), j - 1), k - j);
        for (std::size_t i = 0; i < term.size(); ++i) rt_a[i] += term[i] / S(j);
    }
    Coeffs<S> rho_b = linear_power<S>(S(1), S(-1), k);
    for (auto& v : rho_b) v /= (s - S(1));
    rho_b[k] += S(1);
    assemble(out, k, rt_a, rho_b);
}

template <class S>
void build_gbdf(SchemeTriad& out, int k, const S& B) {
    const S B2 = B * B, B3 = B2 * B, B4 = B3 * B;
    Coeffs<S> a, b, c;
    switch (k) {
        case 2:
            a = {S(1) / S(2) + B, S(1) / S(2) - B};
            b = {B, S(1) - B, S(0)};
            c = {S(1) + B, -B};
            break;
        case 3:
            a = {(3 * B2 + 6 * B + 2) / S(6), (-6 * B2 - 6 * B + 5) / S(6), (3 * B2 - 1) / S(6)};
            b = {(B2 + B) / S(2), S(1) - B2, (B2 - B) / S(2), S(0)};
            c = {(B2 + 3 * B + 2) / S(2), -2 * B - B2, (B2 + B) / S(2)};
            break;
        case 4:
            a = {(2 * B3 + 9 * B2 + 11 * B + 3) / S(12), (-6 * B3 - 21 * B2 - 9 * B + 13) / S(12),
                 (6 * B3 + 15 * B2 - 3 * B - 5) / S(12), (-2 * B3 - 3 * B2 + B + 1) / S(12)};
            b = {(B3 + 3 * B2 + 2 * B) / S(6), (-B3 - 2 * B2 + B + 2) / S(2), (B3 + B2 - 2 * B) / S(2),
                 (B - B3) / S(6), S(0)};
            c = {(B3 + 6 * B2 + 11 * B + 6) / S(6), (-B3 - 5 * B2 - 6 * B) / S(2),
                 (B3 + 4 * B2 + 3 * B) / S(2), (-B3 - 3 * B2 - 2 * B) / S(6)};
            break;
        case 5:
            a = {(5 * B4 + 40 * B3 + 105 * B2 + 100 * B + 24) / S(120),
                 (-10 * B4 - 70 * B3 - 135 * B2 - 25 * B + 77) / S(60),
                 (15 * B4 + 90 * B3 + 120 * B2 - 45 * B - 43) / S(60),
                 (-10 * B4 - 50 * B3 - 45 * B2 + 25 * B + 17) / S(60),
                 (5 * B4 + 20 * B3 + 15 * B2 - 10 * B - 6) / S(120)};
            b = {B * (B3 + 6 * B2 + 11 * B + 6) / S(24), (-B4 - 5 * B3 - 5 * B2 + 5 * B + 6) / S(6),
                 B * (B3 + 4 * B2 + B - 6) / S(4), B * (-B3 - 3 * B2 + B + 3) / S(6),
                 B * (B3 + 2 * B2 - B - 2) / S(24), S(0)};
            c = {(B4 + 10 * B3 + 35 * B2 + 50 * B + 24) / S(24), -B * (B3 + 9 * B2 + 26 * B + 24) / S(6),
                 B * (B3 + 8 * B2 + 19 * B + 12) / S(4), -B * (B3 + 7 * B2 + 14 * B + 8) / S(6),
                 B * (B3 + 6 * B2 + 11 * B + 6) / S(24)};
            break;
        default: throw DomainError("unsupported order");
    }
    store(out, a, b, c);
}

double coefficient_scale(const SchemeTriad& s) {
    double m = 1.0;
    for (double v : s.a) m = std::max(m, std::abs(v));
    for (double v : s.b) m = std::max(m, std::abs(v));
    for (double v : s.c) m = std::max(m, std::abs(v));
    return m;
}

void cross_check_with_solver(const SchemeTriad& s) {
    std::vector<std::optional<double>> fixed(s.k + 1);
    for (int j = 0; j <= s.k; ++j)
        if (j != 1) fixed[j] = s.b[j];
    const SchemeTriad ref = solve_order_conditions(s.k, s.k, fixed);
    const double tol = 1e-10 * coefficient_scale(s);
    double worst = 0.0;
    for (int j = 0; j < s.k; ++j) {
        worst = std::max(worst, std::abs(ref.a[j] - s.a[j]));
        worst = std::max(worst, std::abs(ref.c[j] - s.c[j]));
    }
    for (int j = 0; j <= s.k; ++j) worst = std::max(worst, std::abs(ref.b[j] - s.b[j]));
    if (worst > tol) {
        std::ostringstream os;
        os << "GBDF" << s.k << " coefficients disagree with the order-condition solver by " << worst;
        throw NumericalError(os.str());
    }
}

void flag_admissibility(SchemeTriad& s) {
    std::vector<std::string> issues;
    if (!(s.a[0] > 0)) issues.push_back("a_0 <= 0");
    if (!(s.b[0] > 0)) issues.push_back("b_0 <= 0");
    if (!(s.c[0] > 0)) issues.push_back("c_0 <= 0");
    if (!zero_stable(s)) issues.push_back("root condition fails");
    if (!issues.empty()) {
        s.warning = true;
        std::string text = "parameter outside the zero-stability range:";
        for (const auto& i : issues) text += " " + i + ";";
        text.pop_back();
        s.warning_text = text;
    }
}

}  // namespace

SchemeTriad make_scheme(Family family, int k, const Param& param) {
    const FamilyInfo& info = family_info(family);
    if (family == Family::Custom) throw DomainError("custom schemes are built with make_custom");
    if (k < info.k_min || k > info.k_max) {
        std::ostringstream os;
        os << "unsupported order: " << family_name(family) << " admits k in [" << info.k_min << ","
           << info.k_max << "], got " << k;
        throw DomainError(os.str());
    }
    if (family != Family::BDF && !std::isfinite(param.value))
        throw DomainError("family parameter must be finite");

    SchemeTriad s;
    s.k = k;
    s.family = family;
    if (family != Family::BDF) s.param = param.value;

    switch (family) {
        case Family::BDF: build_generated<Rational>(s, family, k, Rational(1)); break;
        case Family::WBDF:
        case Family::NIMEX:
        case Family::SIEMS:
            if (param.exact)
                build_generated<Rational>(s, family, k, *param.exact);
            else
                build_generated<long double>(s, family, k, param.value);
            break;
        case Family::MBDF:
            if (param.exact)
                build_mbdf<Rational>(s, k, *param.exact);
            else
                build_mbdf<long double>(s, k, param.value);
            break;
        case Family::GBDF:
            if (param.exact)
                build_gbdf<Rational>(s, k, *param.exact);
            else
                build_gbdf<long double>(s, k, param.value);
            cross_check_with_solver(s);
            break;
        case Family::Custom: break;
    }
    flag_admissibility(s);
    return s;
}

SchemeTriad make_custom(std::vector<double> a, std::vector<double> b, std::vector<double> c) {
    SchemeTriad s;
    s.k = static_cast<int>(a.size());
    s.a = std::move(a);
    s.b = std::move(b);
    s.c = std::move(c);
    s.family = Family::Custom;
    if (s.k < 1 || static_cast<int>(s.b.size()) != s.k + 1 || static_cast<int>(s.c.size()) != s.k)
        throw DomainError("custom triad needs |a| = |c| = k >= 1 and |b| = k+1");
    const auto issues = validate(s, 1e-10);
    if (!issues.empty()) {
        std::string text = "invalid triad:";
        for (const auto& i : issues) text += " " + i + ";";
        throw DomainError(text);
    }
    flag_admissibility(s);
    return s;
}

std::vector<std::string> validate(const SchemeTriad& s, double tol) {
    std::vector<std::string> issues;
    const int k = s.k;
    if (static_cast<int>(s.a.size()) != k || static_cast<int>(s.b.size()) != k + 1 ||
        static_cast<int>(s.c.size()) != k) {
        issues.push_back("coefficient lengths do not match k");
        return issues;
    }
    if (!(s.a[0] > 0)) issues.push_back("a_0 must be positive");
    if (!(s.b[0] > 0)) issues.push_back("b_0 must be positive");
    if (!(s.c[0] > 0)) issues.push_back("c_0 must be positive");
    auto check_sum = [&](const std::vector<double>& v, const char* name) {
        double sum = 0.0, mag = 0.0;
        for (double x : v) {
            sum += x;
            mag += std::abs(x);
        }
        if (std::abs(sum - 1.0) > tol * std::max(1.0, mag))
            issues.push_back(std::string("sum of ") + name + " differs from 1 by " +
                             format_g17(sum - 1.0));
    };
    check_sum(s.a, "a");
    check_sum(s.b, "b");
    check_sum(s.c, "c");
    const CharacteristicTriple t = characteristic_triple(s);
    const Poly diff = t.rho_b - Poly::binomial_power(1.0, k) * s.b[0] - t.rho_c;
    double mag = 1.0;
    for (double x : t.rho_b.coeffs()) mag = std::max(mag, std::abs(x));
    for (double x : diff.coeffs())
        if (std::abs(x) > tol * mag) {
            issues.push_back("rho_c differs from rho_b - b_0 (zeta-1)^k");
            break;
        }
    return issues;
}

CharacteristicTriple characteristic_triple(const SchemeTriad& s) {
    const int k = s.k;
    std::vector<double> ra(k), rb(k + 1), rc(k);
    for (int j = 0; j < k; ++j) ra[k - 1 - j] = s.a[j];
    for (int j = 0; j <= k; ++j) rb[k - j] = s.b[j];
    for (int j = 0; j < k; ++j) rc[k - 1 - j] = s.c[j];
    CharacteristicTriple t;
    t.rho_a_reduced = Poly(ra);
    t.rho_a = Poly({-1.0, 1.0}) * t.rho_a_reduced;
    t.rho_b = Poly(rb);
    t.rho_c = Poly(rc);
    return t;
}

bool zero_stable(const SchemeTriad& s, const RootOptions& opt) {
    const CharacteristicTriple t = characteristic_triple(s);
    if (t.rho_a.is_zero() || t.rho_b.is_zero() || t.rho_c.is_zero()) return false;
    return root_condition(t.rho_a, opt) && root_condition(t.rho_b, opt) && root_condition(t.rho_c, opt);
}

// ---------------------------------------------------------------------------
// Order conditions

namespace {

Rational ipow_q(long base, int e) {
    Rational r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

std::string unknown_name(int idx, int k) {
    if (idx < k) return "a_" + std::to_string(idx);
    if (idx < 2 * k + 1) return "b_" + std::to_string(idx - k);
    return "c_" + std::to_string(idx - 2 * k - 1);
}

}  // namespace

OrderSystemAnalysis analyze_order_conditions(int k, int q, const std::vector<std::optional<double>>& fixed_b,
                                             double consistency_tol) {
    if (k < 1) throw DomainError("order conditions need k >= 1");
    if (q < 1) throw DomainError("order conditions need q >= 1");
    if (static_cast<int>(fixed_b.size()) > k + 1) throw DomainError("fixed b-vector longer than k+1");
    const int n = 3 * k + 1;
    const int ib = k, ic = 2 * k + 1;
    std::vector<std::vector<Rational>> rows;
    auto new_row = [&]() { return std::vector<Rational>(n + 1, Rational(0)); };

    {
        auto r = new_row();
        for (int j = 0; j < k; ++j) r[j] = 1;
        r[n] = 1;
        rows.push_back(std::move(r));
    }
    for (int l = 1; l <= q; ++l) {
        auto ru = new_row();
        auto rc = new_row();
        for (int j = 0; j < k; ++j) {
            const Rational d = ipow_q(-j, l) - ipow_q(-j - 1, l);
            ru[j] = d;
            rc[j] = d;
        }
        for (int j = 0; j <= k; ++j) ru[ib + j] = -Rational(l) * ipow_q(-j, l - 1);
        for (int j = 0; j < k; ++j) rc[ic + j] = -Rational(l) * ipow_q(-j - 1, l - 1);
        rows.push_back(std::move(ru));
        rows.push_back(std::move(rc));
    }
    double fixed_scale = 1.0;
    for (std::size_t j = 0; j < fixed_b.size(); ++j) {
        if (!fixed_b[j]) continue;
        if (!std::isfinite(*fixed_b[j])) throw DomainError("fixed b entry is not finite");
        auto r = new_row();
        r[ib + j] = 1;
        r[n] = Rational(*fixed_b[j]);
        fixed_scale = std::max(fixed_scale, std::abs(*fixed_b[j]));
        rows.push_back(std::move(r));
    }

    // Reduced row echelon form in exact arithmetic.
    std::vector<int> pivot_col;
    std::size_t r = 0;
    for (int col = 0; col < n && r < rows.size(); ++col) {
        std::size_t p = r;
        while (p < rows.size() && rows[p][col] == 0) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[r], rows[p]);
        const Rational piv = rows[r][col];
        for (auto& v : rows[r]) v /= piv;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][col] == 0) continue;
            const Rational f = rows[i][col];
            for (int j = col; j <= n; ++j) rows[i][j] -= f * rows[r][j];
        }
        pivot_col.push_back(col);
        ++r;
    }

    OrderSystemAnalysis out;
    out.unknowns = n;
    out.rank = static_cast<int>(r);
    out.consistent = true;
    for (std::size_t i = r; i < rows.size(); ++i) {
        const double resid = std::abs(static_cast<double>(rows[i][n]));
        if (rows[i][n] != 0 && resid > consistency_tol * fixed_scale) out.consistent = false;
    }
    std::vector<bool> is_pivot(n, false);
    for (int c : pivot_col) is_pivot[c] = true;
    out.determined.assign(n, false);
    out.particular.assign(n, 0.0);
    for (std::size_t i = 0; i < pivot_col.size(); ++i) {
        const int c = pivot_col[i];
        out.particular[c] = static_cast<double>(rows[i][n]);
        bool det = true;
        for (int j = 0; j < n; ++j)
            if (!is_pivot[j] && rows[i][j] != 0) det = false;
        out.determined[c] = det;
    }
    for (int j = 0; j < n; ++j)
        if (!is_pivot[j]) out.free_names.push_back(unknown_name(j, k));
    out.free_dofs = out.consistent ? n - out.rank : 0;
    return out;
}

SchemeTriad solve_order_conditions(int k, int q, const std::vector<std::optional<double>>& fixed_b) {
    const OrderSystemAnalysis an = analyze_order_conditions(k, q, fixed_b);
    if (!an.consistent) throw NumericalError("singular order system: the conditions are inconsistent");
    if (an.free_dofs > 0) {
        std::ostringstream os;
        os << "underdetermined order system: " << an.free_dofs << " free degrees of freedom (";
        for (std::size_t i = 0; i < an.free_names.size(); ++i)
            os << (i ? ", " : "") << an.free_names[i];
        os << ")";
        throw DomainError(os.str());
    }
    SchemeTriad s;
    s.k = k;
    s.family = Family::Custom;
    s.a.assign(an.particular.begin(), an.particular.begin() + k);
    s.b.assign(an.particular.begin() + k, an.particular.begin() + 2 * k + 1);
    s.c.assign(an.particular.begin() + 2 * k + 1, an.particular.end());
    return s;
}

OrderResiduals order_residuals(const SchemeTriad& s, int q, double shift) {
    OrderResiduals out;
    const int k = s.k;
    for (int l = 1; l <= q; ++l) {
        long double dt = 0, mag_a = 0, sb = 0, mag_b = 0, sc = 0, mag_c = 0;
        for (int j = 0; j < k; ++j) {
            const long double t = shift - j;
            const long double term = s.a[j] * (std::pow(t, l) - std::pow(t - 1, l));
            dt += term;
            mag_a += std::abs(term);
        }
        for (int j = 0; j <= k; ++j) {
            const long double term = l * s.b[j] * std::pow((long double)(shift - j), l - 1);
            sb += term;
            mag_b += std::abs(term);
        }
        for (int j = 0; j < k; ++j) {
            const long double term = l * s.c[j] * std::pow((long double)(shift - j - 1), l - 1);
            sc += term;
            mag_c += std::abs(term);
        }
        const double ru = static_cast<double>(dt - sb), rc = static_cast<double>(dt - sc);
        out.implicit_part.push_back(ru);
        out.explicit_part.push_back(rc);
        out.max_relative = std::max(out.max_relative, std::abs(ru) / static_cast<double>(std::max<long double>(1, mag_a + mag_b)));
        out.max_relative = std::max(out.max_relative, std::abs(rc) / static_cast<double>(std::max<long double>(1, mag_a + mag_c)));
    }
    return out;
}

TruncationReport truncation_leading(const SchemeTriad& s) {
    const int q = s.k;
    double sum_a = 0.0, mag = 0.0;
    for (double v : s.a) {
        sum_a += v;
        mag += std::abs(v);
    }
    const OrderResiduals res = order_residuals(s, q, 0.0);
    if (res.max_relative > 1e-8 || std::abs(sum_a - 1.0) > 1e-8 * std::max(1.0, mag))
        throw DomainError("inconsistent scheme");

    long double fact_q = 1;
    for (int i = 2; i <= q; ++i) fact_q *= i;
    const long double fact_q1 = fact_q * (q + 1);
    long double su = 0, sbq = 0, scq = 0;
    for (int j = 0; j < s.k; ++j) {
        const long double t = -j;
        su += s.a[j] * (std::pow(t, q + 1) - std::pow(t - 1, q + 1));
        scq += s.c[j] * std::pow(t - 1, q);
    }
    for (int j = 0; j <= s.k; ++j) sbq += s.b[j] * std::pow((long double)(-j), q);
    TruncationReport tr;
    tr.order = q;
    tr.coeff_u = static_cast<double>((su - (q + 1) * sbq) / fact_q1);
    tr.coeff_F = static_cast<double>((sbq - scq) / fact_q);
    return tr;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json to_json(const SchemeTriad& s) {
    auto strs = [](const std::vector<double>& v) {
        nlohmann::json arr = nlohmann::json::array();
        for (double x : v) arr.push_back(format_g17(x));
        return arr;
    };
    nlohmann::json j;
    j["family"] = family_name(s.family);
    j["k"] = s.k;
    j["param"] = s.param ? nlohmann::json(*s.param) : nlohmann::json(nullptr);
    j["a"] = strs(s.a);
    j["b"] = strs(s.b);
    j["c"] = strs(s.c);
    if (s.warning) j["warning"] = s.warning_text;
    return j;
}

SchemeTriad scheme_from_json(const nlohmann::json& j) {
    auto nums = [](const nlohmann::json& arr, const char* name) {
        if (!arr.is_array()) throw DomainError(std::string("scheme field '") + name + "' must be an array");
        std::vector<double> v;
        for (const auto& x : arr) {
            if (x.is_string())
                v.push_back(Param::parse(x.get<std::string>()).value);
            else if (x.is_number())
                v.push_back(x.get<double>());
            else
                throw DomainError(std::string("scheme field '") + name + "' has a non-numeric entry");
        }
        return v;
    };
    if (!j.contains("a") || !j.contains("b") || !j.contains("c"))
        throw DomainError("scheme JSON needs a, b and c");
    SchemeTriad s = make_custom(nums(j["a"], "a"), nums(j["b"], "b"), nums(j["c"], "c"));
    if (j.contains("family") && j["family"].is_string()) s.family = parse_family(j["family"].get<std::string>());
    if (j.contains("param") && j["param"].is_number()) s.param = j["param"].get<double>();
    if (j.contains("k") && j["k"].get<int>() != s.k) throw DomainError("scheme JSON k does not match a");
    return s;
}

std::vector<long double> extended_coeffs(const std::vector<double>& v, const std::vector<long double>& ext) {
    bool ok = ext.size() == v.size();
    for (std::size_t i = 0; ok && i < v.size(); ++i) ok = static_cast<double>(ext[i]) == v[i];
    return ok ? ext : std::vector<long double>(v.begin(), v.end());
}

}  // namespace imex
