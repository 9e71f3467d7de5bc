#include "imex/polyring.hpp"

#include <algorithm>
#include <cmath>

#include "imex/numcore.hpp"

namespace imex {

Poly::Poly(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

Poly Poly::monomial(std::size_t degree, double coeff) {
    std::vector<double> c(degree + 1, 0.0);
    c[degree] = coeff;
    return Poly(std::move(c));
}

Poly Poly::binomial_power(double root, std::size_t power) {
    Poly p({1.0});
    const Poly factor({-root, 1.0});
    for (std::size_t i = 0; i < power; ++i) p = p * factor;
    return p;
}

double Poly::operator()(double x) const {
    double s = 0.0;
    for (std::size_t i = c_.size(); i-- > 0;) s = s * x + c_[i];
    return s;
}

std::complex<double> Poly::operator()(std::complex<double> z) const {
    std::complex<double> s = 0.0;
    for (std::size_t i = c_.size(); i-- > 0;) s = s * z + c_[i];
    return s;
}

Poly Poly::operator+(const Poly& o) const {
    std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = (*this)[i] + o[i];
    return Poly(std::move(r));
}

Poly Poly::operator-(const Poly& o) const {
    std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = (*this)[i] - o[i];
    return Poly(std::move(r));
}

Poly Poly::operator*(const Poly& o) const {
    if (c_.empty() || o.c_.empty()) return Poly();
    std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return Poly(std::move(r));
}

Poly Poly::operator*(double s) const {
    std::vector<double> r = c_;
    for (double& v : r) v *= s;
    return Poly(std::move(r));
}

RootReport poly_roots(const Poly& p, const RootOptions& opt) {
    if (p.is_zero()) throw DomainError("zero polynomial");
    RootReport rep;
    const auto& c = p.coeffs();
    // Exact zero roots from vanishing low-order coefficients.
    std::size_t zeros = 0;
    while (zeros < c.size() && c[zeros] == 0.0) ++zeros;
    for (std::size_t i = 0; i < zeros; ++i) rep.roots.emplace_back(0.0, 0.0);

    const std::size_t n = c.size() - 1 - zeros;
    if (n > 0) {
        const double lead = c.back();
        ComplexMatrix comp(n, n);
        for (std::size_t j = 0; j < n; ++j) comp(0, j) = -c[c.size() - 2 - j] / lead;
        for (std::size_t i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
        auto eig = complex_eig(comp, true);
        rep.roots.insert(rep.roots.end(), eig.begin(), eig.end());
    }

    rep.on_circle.resize(rep.roots.size());
    for (std::size_t i = 0; i < rep.roots.size(); ++i) {
        const double m = std::abs(rep.roots[i]);
        rep.max_modulus = std::max(rep.max_modulus, m);
        rep.on_circle[i] = std::abs(m - 1.0) <= opt.circle_tol;
    }
    for (std::size_t i = 0; i < rep.roots.size(); ++i) {
        if (!rep.on_circle[i]) continue;
        for (std::size_t j = i + 1; j < rep.roots.size(); ++j)
            if (rep.on_circle[j] && std::abs(rep.roots[i] - rep.roots[j]) <= opt.pairing_tol)
                rep.simple_on_circle = false;
    }
    return rep;
}

bool root_condition(const Poly& p, const RootOptions& opt) {
    if (p.degree() == 0) return true;
    const RootReport rep = poly_roots(p, opt);
    return rep.max_modulus <= 1.0 + opt.circle_tol && rep.simple_on_circle;
}

Poly poly_from_roots(const std::vector<std::complex<double>>& roots, double leading) {
    std::vector<std::complex<double>> c{1.0};
    for (const auto& r : roots) {
        std::vector<std::complex<double>> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i + 1] += c[i];
            next[i] -= r * c[i];
        }
        c = std::move(next);
    }
    std::vector<double> re(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) re[i] = leading * c[i].real();
    return Poly(std::move(re));
}

Poly log_series_expand(const LogSeriesSpec& spec, int k) {
    return Poly(log_series_expand<double>(spec.prefactor, k));
}

}  // namespace imex
