#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "imex/error.hpp"

namespace imex {

using Rational = boost::multiprecision::cpp_rational;

// Real polynomial, coefficients in ascending degree.
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<double> coeffs);

    static Poly monomial(std::size_t degree, double coeff = 1.0);
    // (x - root)^power
    static Poly binomial_power(double root, std::size_t power);

    const std::vector<double>& coeffs() const noexcept { return c_; }
    double operator[](std::size_t i) const { return i < c_.size() ? c_[i] : 0.0; }
    bool is_zero() const noexcept { return c_.empty(); }
    // -1 for the zero polynomial
    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    double leading() const { return c_.empty() ? 0.0 : c_.back(); }

    double operator()(double x) const;
    std::complex<double> operator()(std::complex<double> z) const;

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator*(double s) const;

private:
    std::vector<double> c_;  // trailing exact zeros trimmed
};

struct RootOptions {
    double circle_tol = 1e-9;
    double pairing_tol = 1e-7;
};

struct RootReport {
    std::vector<std::complex<double>> roots;
    std::vector<bool> on_circle;
    bool simple_on_circle = true;
    double max_modulus = 0.0;
};

RootReport poly_roots(const Poly& p, const RootOptions& opt = {});
bool root_condition(const Poly& p, const RootOptions& opt = {});
// Monic product of (x - r_i) scaled by `leading`.
Poly poly_from_roots(const std::vector<std::complex<double>>& roots, double leading);

namespace detail {

inline Rational binom_q(int n, int k) {
    Rational r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

template <class S>
S scalar_from_rational(const Rational& q) {
    if constexpr (std::is_same_v<S, Rational>) {
        return q;
    } else {
        return static_cast<S>(q);
    }
}

}  // namespace detail

// Taylor construction of rho_tilde_a for f(z) = P(z) ln z.
// Input: P ascending in z. Output: sum_{j=1}^{k} f^{(j)}(1)/j! (zeta-1)^{j-1}, ascending in zeta.
template <class S>
std::vector<S> log_series_expand(const std::vector<S>& prefactor, int k) {
    if (k <= 0) throw DomainError("log_series_expand: step count must be positive");
    const int deg = static_cast<int>(prefactor.size()) - 1;
    // Q(w) = P(1 + w), truncated at degree k.
    std::vector<S> q(k + 1, S(0));
    for (int m = 0; m <= k; ++m)
        for (int i = m; i <= deg; ++i)
            q[m] += prefactor[i] * detail::scalar_from_rational<S>(detail::binom_q(i, m));
    // f_j = [w^j] Q(w) ln(1+w)
    std::vector<S> f(k + 1, S(0));
    for (int j = 1; j <= k; ++j)
        for (int m = 1; m <= j; ++m) {
            const Rational lm = Rational((m % 2 == 1) ? 1 : -1) / m;
            f[j] += detail::scalar_from_rational<S>(lm) * q[j - m];
        }
    std::vector<S> out(k, S(0));
    for (int j = 1; j <= k; ++j)
        for (int i = 0; i <= j - 1; ++i) {
            Rational coef = detail::binom_q(j - 1, i);
            if ((j - 1 - i) % 2 == 1) coef = -coef;
            out[i] += f[j] * detail::scalar_from_rational<S>(coef);
        }
    return out;
}

// Prefactor polynomial of a generator f(z) = prefactor(z) ln z.
struct LogSeriesSpec {
    std::vector<double> prefactor;  // ascending in z
};

Poly log_series_expand(const LogSeriesSpec& spec, int k);

}  // namespace imex
