#include "imex/numcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "imex/error.hpp"

namespace imex {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_square(const DenseMatrix& m, const char* who) {
    if (!m.square()) throw DomainError(std::string(who) + ": matrix must be square");
}

}  // namespace

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw DomainError("multiply: dimension mismatch");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Vector multiply(const DenseMatrix& a, const Vector& x) {
    if (a.cols() != x.size()) throw DomainError("multiply: dimension mismatch");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Vector multiply_transposed(const DenseMatrix& a, const Vector& x) {
    if (a.rows() != x.size()) throw DomainError("multiply_transposed: dimension mismatch");
    Vector y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += a(i, j) * xi;
    }
    return y;
}

double max_abs(const DenseMatrix& m) {
    double s = 0.0;
    for (double v : m.values()) s = std::max(s, std::abs(v));
    return s;
}

double frobenius_norm(const DenseMatrix& m) {
    double s = 0.0;
    for (double v : m.values()) s += v * v;
    return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Symmetric eigensolver

SymEigResult sym_eig(const DenseMatrix& m, bool want_vectors, double symmetry_tol) {
    require_square(m, "sym_eig");
    const std::size_t n = m.rows();
    const double scale = std::max(1.0, max_abs(m));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(m(i, j) - m(j, i)) > symmetry_tol * scale) {
                std::ostringstream os;
                os << "sym_eig: matrix is not symmetric at (" << i << "," << j
                   << "), difference " << std::abs(m(i, j) - m(j, i));
                throw DomainError(os.str());
            }

    SymEigResult out;
    if (n == 0) return out;

    DenseMatrix v = m;
    Vector d(n), e(n);

    // Reduce to tridiagonal form; v accumulates the orthogonal transform.
    for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);
    for (std::size_t i = n - 1; i > 0; --i) {
        double sc = 0.0, h = 0.0;
        for (std::size_t k = 0; k < i; ++k) sc += std::abs(d[k]);
        if (sc == 0.0) {
            e[i] = d[i - 1];
            for (std::size_t j = 0; j < i; ++j) {
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
                v(j, i) = 0.0;
            }
        } else {
            for (std::size_t k = 0; k < i; ++k) {
                d[k] /= sc;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e[i] = sc * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                v(j, i) = f;
                g = e[j] + v(j, j) * f;
                for (std::size_t k = j + 1; k < i; ++k) {
                    g += v(k, j) * d[k];
                    e[k] += v(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (std::size_t k = j; k < i; ++k) v(k, j) -= (f * e[k] + g * d[k]);
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
            }
        }
        d[i] = h;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        v(n - 1, i) = v(i, i);
        v(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
            for (std::size_t j = 0; j <= i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
                for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
            }
        }
        for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = v(n - 1, j);
        v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
    e[0] = 0.0;

    // Implicit QL on the tridiagonal (d, e).
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    double f = 0.0, tst1 = 0.0;
    const int max_iter = 60;
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t mm = l;
        while (mm < n) {
            if (std::abs(e[mm]) <= kEps * tst1) break;
            ++mm;
        }
        if (mm == n) mm = n - 1;
        if (mm > l) {
            int iter = 0;
            do {
                if (++iter > max_iter) {
                    std::ostringstream os;
                    os << "sym_eig: QL iteration did not converge for eigenvalue " << l << " of " << n
                       << " after " << max_iter << " sweeps (off-diagonal " << e[l] << ")";
                    throw NumericalError(os.str());
                }
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;
                p = d[mm];
                double c = 1.0, c2 = 1.0, c3 = 1.0;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (std::size_t ii = mm; ii-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[ii];
                    h = c * p;
                    r = std::hypot(p, e[ii]);
                    e[ii + 1] = s * r;
                    s = e[ii] / r;
                    c = p / r;
                    p = c * d[ii] - s * g;
                    d[ii + 1] = h + s * (c * g + s * d[ii]);
                    if (want_vectors) {
                        for (std::size_t k = 0; k < n; ++k) {
                            h = v(k, ii + 1);
                            v(k, ii + 1) = s * v(k, ii) + c * h;
                            v(k, ii) = c * v(k, ii) - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > kEps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
    out.values.resize(n);
    for (std::size_t j = 0; j < n; ++j) out.values[j] = d[order[j]];
    if (want_vectors) {
        out.vectors = DenseMatrix(n, n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = v(k, order[j]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// General complex eigenvalues

namespace {

using cplx = std::complex<double>;

double abs1(cplx z) { return std::abs(z.real()) + std::abs(z.imag()); }

void balance_matrix(ComplexMatrix& a) {
    const std::size_t n = a.rows();
    const double radix = 2.0, sqrdx = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += abs1(a(j, i));
                r += abs1(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix, f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                g = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

void reduce_to_hessenberg(ComplexMatrix& a) {
    const std::size_t n = a.rows();
    if (n < 3) return;
    std::vector<cplx> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) norm += std::norm(a(i, k));
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        const cplx x0 = a(k + 1, k);
        const cplx phase = (std::abs(x0) == 0.0) ? cplx(1.0, 0.0) : x0 / std::abs(x0);
        const cplx alpha = -phase * norm;
        for (std::size_t i = k + 1; i < n; ++i) v[i] = a(i, k);
        v[k + 1] -= alpha;
        double vn = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vn += std::norm(v[i]);
        vn = std::sqrt(vn);
        if (vn == 0.0) continue;
        for (std::size_t i = k + 1; i < n; ++i) v[i] /= vn;
        // Left: A <- (I - 2 v v^H) A
        for (std::size_t j = k; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * a(i, j);
            s *= 2.0;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= v[i] * s;
        }
        // Right: A <- A (I - 2 v v^H)
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
            s *= 2.0;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * std::conj(v[j]);
        }
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

}  // namespace

std::vector<std::complex<double>> complex_eig(const ComplexMatrix& m, bool balance) {
    if (!m.square()) throw DomainError("complex_eig: matrix must be square");
    const std::size_t n = m.rows();
    std::vector<cplx> eig(n);
    if (n == 0) return eig;
    ComplexMatrix h = m;
    if (balance) balance_matrix(h);
    reduce_to_hessenberg(h);

    double hnorm = 0.0;
    for (const auto& z : h.values()) hnorm = std::max(hnorm, std::abs(z));

    const int max_iter = 60;
    std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(n) - 1;
    int iter = 0;
    while (hi >= 0) {
        if (hi == 0) {
            eig[0] = h(0, 0);
            break;
        }
        std::ptrdiff_t l = hi;
        while (l > 0) {
            double s = abs1(h(l - 1, l - 1)) + abs1(h(l, l));
            if (s == 0.0) s = hnorm;
            if (abs1(h(l, l - 1)) <= kEps * s) {
                h(l, l - 1) = 0.0;
                break;
            }
            --l;
        }
        if (l == hi) {
            eig[hi] = h(hi, hi);
            --hi;
            iter = 0;
            continue;
        }
        if (++iter > max_iter) {
            std::ostringstream os;
            os << "complex_eig: QR iteration did not converge at index " << hi << " of " << n
               << " (subdiagonal " << std::abs(h(hi, hi - 1)) << ")";
            throw NumericalError(os.str());
        }

        cplx mu;
        if (iter % 10 == 0) {
            // Exceptional shift breaks cycles of the Wilkinson shift.
            mu = h(hi, hi) + cplx(std::abs(h(hi, hi - 1).real()) + std::abs(h(hi, hi - 1).imag()), 0.0);
        } else {
            const cplx a = h(hi - 1, hi - 1), b = h(hi - 1, hi), c = h(hi, hi - 1), d = h(hi, hi);
            const cplx half = 0.5 * (a - d);
            const cplx disc = std::sqrt(half * half + b * c);
            const cplx m1 = 0.5 * (a + d) + disc, m2 = 0.5 * (a + d) - disc;
            mu = (std::abs(m1 - d) < std::abs(m2 - d)) ? m1 : m2;
        }

        for (std::ptrdiff_t i = l; i <= hi; ++i) h(i, i) -= mu;
        std::vector<double> cs(hi - l);
        std::vector<cplx> sn(hi - l);
        for (std::ptrdiff_t i = l; i < hi; ++i) {
            const cplx x = h(i, i), y = h(i + 1, i);
            const double ax = std::abs(x), ay = std::abs(y);
            const double r = std::hypot(ax, ay);
            double c;
            cplx s;
            if (r == 0.0) {
                c = 1.0;
                s = 0.0;
            } else if (ax == 0.0) {
                c = 0.0;
                s = std::conj(y) / ay;
            } else {
                c = ax / r;
                s = (x / ax) * std::conj(y) / r;
            }
            cs[i - l] = c;
            sn[i - l] = s;
            for (std::ptrdiff_t j = i; j <= hi; ++j) {
                const cplx t1 = h(i, j), t2 = h(i + 1, j);
                h(i, j) = c * t1 + s * t2;
                h(i + 1, j) = -std::conj(s) * t1 + c * t2;
            }
        }
        for (std::ptrdiff_t i = l; i < hi; ++i) {
            const double c = cs[i - l];
            const cplx s = sn[i - l];
            const std::ptrdiff_t rmax = std::min(i + 2, hi);
            for (std::ptrdiff_t r = l; r <= rmax; ++r) {
                const cplx t1 = h(r, i), t2 = h(r, i + 1);
                h(r, i) = t1 * c + t2 * std::conj(s);
                h(r, i + 1) = -t1 * s + t2 * c;
            }
        }
        for (std::ptrdiff_t i = l; i <= hi; ++i) h(i, i) += mu;
    }
    return eig;
}

// ---------------------------------------------------------------------------
// Linear solves

LuFactor::LuFactor(const DenseMatrix& m, double pivot_tol) : lu_(m), perm_(m.rows()) {
    require_square(m, "LuFactor");
    const std::size_t n = m.rows();
    const double scale = max_abs(m);
    std::iota(perm_.begin(), perm_.end(), 0);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(lu_(i, k)) > best) {
                best = std::abs(lu_(i, k));
                p = i;
            }
        if (best <= pivot_tol * scale || best == 0.0) {
            std::ostringstream os;
            os << "linear_solve: singular matrix (pivot " << best << " at column " << k << ", scale "
               << scale << ")";
            throw NumericalError(os.str());
        }
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
            std::swap(perm_[k], perm_[p]);
        }
        const double piv = lu_(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = lu_(i, k) / piv;
            lu_(i, k) = f;
            if (f == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
        }
    }
}

Vector LuFactor::solve(const Vector& rhs) const {
    const std::size_t n = lu_.rows();
    if (rhs.size() != n) throw DomainError("LuFactor::solve: dimension mismatch");
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = rhs[perm_[i]];
        for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
        x[i] = s / lu_(i, i);
    }
    return x;
}

Vector linear_solve(const DenseMatrix& m, const Vector& rhs) { return LuFactor(m).solve(rhs); }

Vector forward_substitution(const DenseMatrix& lower, const Vector& rhs) {
    require_square(lower, "forward_substitution");
    const std::size_t n = lower.rows();
    if (rhs.size() != n) throw DomainError("forward_substitution: dimension mismatch");
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (lower(i, i) == 0.0) throw NumericalError("forward_substitution: zero diagonal entry");
        double s = rhs[i];
        for (std::size_t j = 0; j < i; ++j) s -= lower(i, j) * x[j];
        x[i] = s / lower(i, i);
    }
    return x;
}

DenseMatrix lower_triangular_inverse(const DenseMatrix& lower) {
    require_square(lower, "lower_triangular_inverse");
    const std::size_t n = lower.rows();
    DenseMatrix inv(n, n);
    for (std::size_t col = 0; col < n; ++col) {
        if (lower(col, col) == 0.0) throw NumericalError("lower_triangular_inverse: zero diagonal entry");
        inv(col, col) = 1.0 / lower(col, col);
        for (std::size_t i = col + 1; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = col; j < i; ++j) s -= lower(i, j) * inv(j, col);
            inv(i, col) = s / lower(i, i);
        }
    }
    return inv;
}

TridiagonalFactor::TridiagonalFactor(Vector sub, Vector diag, Vector super, double pivot_tol)
    : sub_(std::move(sub)), diag_(std::move(diag)), super_(std::move(super)) {
    const std::size_t n = diag_.size();
    if (n == 0 || sub_.size() + 1 != n || super_.size() + 1 != n)
        throw DomainError("TridiagonalFactor: inconsistent band lengths");
    double scale = 0.0;
    for (double v : diag_) scale = std::max(scale, std::abs(v));
    for (double v : sub_) scale = std::max(scale, std::abs(v));
    for (double v : super_) scale = std::max(scale, std::abs(v));
    // diag_ becomes the U pivots, sub_ the L multipliers.
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            sub_[i - 1] /= diag_[i - 1];
            diag_[i] -= sub_[i - 1] * super_[i - 1];
        }
        if (std::abs(diag_[i]) <= pivot_tol * scale) {
            std::ostringstream os;
            os << "tridiagonal solve: singular pivot " << diag_[i] << " at row " << i;
            throw NumericalError(os.str());
        }
    }
}

Vector TridiagonalFactor::solve(const Vector& rhs) const {
    const std::size_t n = diag_.size();
    if (rhs.size() != n) throw DomainError("TridiagonalFactor::solve: dimension mismatch");
    Vector x = rhs;
    for (std::size_t i = 1; i < n; ++i) x[i] -= sub_[i - 1] * x[i - 1];
    x[n - 1] /= diag_[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (x[i] - super_[i] * x[i + 1]) / diag_[i];
    return x;
}

// ---------------------------------------------------------------------------
// Power iteration

PowerIterationResult spectral_norm(const DenseMatrix& m, double tol, int max_iter, std::uint64_t seed) {
    PowerIterationResult res;
    const std::size_t n = m.cols();
    if (n == 0 || m.rows() == 0) {
        res.converged = true;
        return res;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vector v(n);
    for (auto& x : v) x = dist(rng);
    auto normalize = [](Vector& x) {
        double s = 0.0;
        for (double t : x) s += t * t;
        s = std::sqrt(s);
        if (s > 0.0)
            for (double& t : x) t /= s;
        return s;
    };
    normalize(v);
    double lambda_old = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        const Vector w = multiply(m, v);
        double lambda = 0.0;
        for (double t : w) lambda += t * t;
        res.iterations = it;
        res.value = std::sqrt(lambda);
        Vector y = multiply_transposed(m, w);
        if (normalize(y) == 0.0) {
            res.converged = true;
            return res;
        }
        v = std::move(y);
        if (it > 1 && std::abs(lambda - lambda_old) <= tol * lambda) {
            res.converged = true;
            return res;
        }
        lambda_old = lambda;
    }
    return res;
}

}  // namespace imex
