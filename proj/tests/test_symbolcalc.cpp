#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "imex/error.hpp"
#include "imex/kernels.hpp"
#include "imex/polyring.hpp"
#include "imex/symbolcalc.hpp"
#include "imex/tables.hpp"

using namespace imex;

namespace {

constexpr double kPi = std::numbers::pi;

// Closed forms of the two- and three-step weighted BDF indicators, written out independently.
struct Four {
    double sF, sE, lam, J;
};

Four wbdf2(double a) { return {1.0, (2 * a + 1) / (2 * a), (2 * a - 1) / (2 * a), (2 * a - 1) / (2 * a + 1)}; }
Four wbdf3(double a) {
    const double lam = (6 * a - 3) / (12 * a - 2), J = (2 * a - 1) / (6 * a + 1);
    return {1.0, lam / J, lam, J};
}

std::vector<double> convolve(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> z(x.size() + y.size() - 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) z[i + j] += x[i] * y[j];
    return z;
}

}  // namespace

TEST_SUITE("symbolcalc") {

TEST_CASE("symbol_of examples") {
    const SchemeTriad e = make_scheme(Family::BDF, 1);
    for (Which w : {Which::A, Which::B, Which::C}) {
        const auto v = symbol_of(e, w)(0.7);
        CHECK(std::abs(v - std::complex<double>(1.0, 0.0)) < 1e-15);
    }
    const SchemeTriad w2 = make_scheme(Family::WBDF, 2, Param(Rational(1)));
    const double th = 1.3;
    const auto c = symbol_of(w2, Which::C)(th);
    CHECK(std::abs(c - (2.0 - std::polar(1.0, th))) < 1e-15);
    CHECK(std::abs(symbol_of(w2, Which::A)(kPi) - 2.0) < 1e-15);
}

TEST_CASE("symbols are conjugate symmetric") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 2 * kPi);
    const SchemeTriad s = make_scheme(Family::SIEMS, 5, Param(2.0));
    for (int i = 0; i < 32; ++i) {
        const double th = u(rng);
        for (Which w : {Which::A, Which::B, Which::C}) {
            const auto sym = symbol_of(s, w);
            CHECK(std::abs(sym(th) - std::conj(sym(2 * kPi - th))) < 1e-12);
        }
    }
}

TEST_CASE("indicators of the Euler scheme are optimal") {
    const auto r = indicators(make_scheme(Family::BDF, 1));
    CHECK(std::abs(r.sigma_F - 1) <= 1e-13);
    CHECK(std::abs(r.sigma_E - 1) <= 1e-13);
    CHECK(std::abs(r.lambda_I - 1) <= 1e-13);
    CHECK(std::abs(r.intensity - 1) <= 1e-13);
}

TEST_CASE("WBDF2 and WBDF3 indicators match the closed forms") {
    for (double a : {1.0, 2.0, 3.0, 5.0, 10.0}) {
        const auto r2 = indicators(make_scheme(Family::WBDF, 2, Param(a)));
        const Four f2 = wbdf2(a);
        CAPTURE(a);
        CHECK(std::abs(r2.sigma_F - f2.sF) <= 1e-9);
        CHECK(std::abs(r2.sigma_E - f2.sE) <= 1e-9);
        CHECK(std::abs(r2.lambda_I - f2.lam) <= 1e-9);
        CHECK(std::abs(r2.intensity - f2.J) <= 1e-9);
        const auto r3 = indicators(make_scheme(Family::WBDF, 3, Param(a)));
        const Four f3 = wbdf3(a);
        CHECK(std::abs(r3.sigma_F - f3.sF) <= 1e-9);
        CHECK(std::abs(r3.sigma_E - f3.sE) <= 1e-9);
        CHECK(std::abs(r3.lambda_I - f3.lam) <= 1e-9);
        CHECK(std::abs(r3.intensity - f3.J) <= 1e-9);
    }
    const auto r = indicators(make_scheme(Family::WBDF, 2, Param(2.0)));
    CHECK(r.sigma_E == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(r.lambda_I == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(r.intensity == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("GBDF3 at beta = 2") {
    const auto r = indicators(make_scheme(Family::GBDF, 3, Param(2.0)));
    CHECK(std::abs(r.sigma_E - 1.5) <= 1e-9);
    CHECK(r.lambda_I >= 20.0 / 34 - 1e-9);
    CHECK(r.lambda_I <= 21.0 / 34 + 1e-9);
    CHECK(r.intensity >= 20.0 / 51 - 1e-9);
    CHECK(r.intensity <= 21.0 / 51 + 1e-9);
}

TEST_CASE("indicator report invariants") {
    const auto r = indicators(make_scheme(Family::NIMEX, 4, Param(2.0)));
    CHECK(r.intensity * r.sigma_E == doctest::Approx(r.lambda_I).epsilon(1e-15));
    CHECK(r.theta_F >= 0.0);
    CHECK(r.theta_F <= kPi);
    CHECK(r.theta_E <= kPi);
    CHECK(r.theta_I <= kPi);
    CHECK(r.grid_size == 8192);
    CHECK(r.refined);
    CHECK_THROWS_AS(indicators(make_scheme(Family::BDF, 2), 1), DomainError);
}

TEST_CASE("vanishing symbol is reported") {
    // a(theta) = 1/2 + 1/2 e^{i theta} vanishes at theta = pi.
    SchemeTriad s;
    s.k = 2;
    s.a = {0.5, 0.5};
    s.b = {1.0, 0.0, 0.0};
    s.c = {1.0, 0.0};
    CHECK_THROWS_WITH_AS(indicators(s), doctest::Contains("symbol vanishes on unit circle"), NumericalError);
}

TEST_CASE("indicator_sweep finds the MBDF2 optimum") {
    std::vector<Param> grid;
    for (int s = 2; s <= 10; ++s) grid.emplace_back(Rational(s));
    const SweepResult r = indicator_sweep(Family::MBDF, 2, grid, 8192, 2);
    REQUIRE(r.argmax_lambda);
    CHECK(r.entries[*r.argmax_lambda].param.value == 5.0);
    CHECK(r.entries[*r.argmax_lambda].report->lambda_I == doctest::Approx(2.0 / 3).epsilon(1e-9));
}

TEST_CASE("sweeps are deterministic across thread counts") {
    const auto grid = parse_param_grid("2:17:16");
    const SweepResult a = indicator_sweep(Family::SIEMS, 6, grid, 2048, 1);
    const SweepResult b = indicator_sweep(Family::SIEMS, 6, grid, 2048, 4);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) CHECK(a.entries[i].report->intensity == b.entries[i].report->intensity);
    CHECK(a.argmax_intensity == b.argmax_intensity);
    CHECK(a.entries[*a.argmax_intensity].param.value == 17.0);
}

TEST_CASE("theta_curves examples") {
    const auto e = theta_curves(make_scheme(Family::BDF, 1), 9);
    REQUIRE(e.theta.size() == 9);
    for (std::size_t i = 0; i < 9; ++i) {
        CHECK(e.inv_abs_a[i] == doctest::Approx(1.0));
        CHECK(e.abs_c_over_a[i] == doctest::Approx(1.0));
        CHECK(e.re_b_over_a[i] == doctest::Approx(1.0));
    }
    const auto w = theta_curves(make_scheme(Family::WBDF, 2, Param(Rational(1))), 5);
    CHECK(w.theta.back() == doctest::Approx(kPi));
    CHECK(w.re_b_over_a.back() == doctest::Approx(0.5).epsilon(1e-14));
    const auto b3 = theta_curves(make_scheme(Family::WBDF, 3, Param(Rational(1))), 3);
    CHECK(b3.re_b_over_a.back() == doctest::Approx(0.3).epsilon(1e-14));
    const std::string csv = curves_csv(w);
    CHECK(csv.rfind("theta,inv_abs_a,abs_c_over_a,re_b_over_a\n", 0) == 0);
}

TEST_CASE("symbol of a convolution is the product of symbols") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 2 * kPi);
    const SchemeTriad s = make_scheme(Family::GBDF, 4, Param(3.0));
    const TrigSymbol a(s.a), b(s.b), ab(convolve(s.a, s.b));
    for (int i = 0; i < 64; ++i) {
        const double th = u(rng);
        CHECK(std::abs(ab(th) - a(th) * b(th)) <= 1e-12 * std::max(1.0, std::abs(ab(th))));
    }
}

TEST_CASE("the DOC kernel symbol inverts a(theta)") {
    for (const auto& [f, k, p] : {std::tuple{Family::BDF, 2, 0.0}, {Family::SIEMS, 3, 2.0}, {Family::WBDF, 4, 2.0}}) {
        const SchemeTriad s = make_scheme(f, k, f == Family::BDF ? Param() : Param(p));
        const int n = 200;
        const DocKernelSequence d = doc_kernels(s.a, n);
        // The DOC tail decays like rho^n with rho the largest root modulus of rho_a / (zeta - 1).
        const double rho = poly_roots(characteristic_triple(s).rho_a_reduced).max_modulus;
        double tail = 0.0;
        for (int j = n - 10; j < n; ++j) tail = std::max(tail, std::abs(d.doc[j]));
        const double bound = std::max(1e-12, 100.0 * std::max(tail, std::pow(rho, n)) / (1.0 - rho));
        const TrigSymbol xi(d.doc), a(s.a);
        for (double th = 0.05; th < 2 * kPi; th += 0.37) CHECK(std::abs(xi(th) * a(th) - 1.0) <= bound);
    }
}

TEST_CASE("WBDF2 intensity increases with alpha") {
    double prev = -1.0;
    for (double a : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        const double J = indicators(make_scheme(Family::WBDF, 2, Param(a))).intensity;
        CHECK(J > prev);
        prev = J;
    }
}

TEST_CASE("closed-form equalities from the tables hold at five parameters") {
    struct Row {
        Family f;
        int k;
        std::vector<double> params;
    };
    const Row rows[] = {{Family::WBDF, 2, {1, 1.5, 2, 4, 7}},     {Family::WBDF, 3, {1, 1.5, 2, 4, 7}},
                        {Family::WBDF, 4, {1.2, 1.5, 2, 4, 7}},   {Family::SIEMS, 3, {1, 1.5, 2, 4, 7}},
                        {Family::SIEMS, 4, {1.2, 1.5, 2, 4, 7}},  {Family::SIEMS, 5, {1.4, 1.5, 2, 4, 7}},
                        {Family::NIMEX, 2, {1.2, 1.5, 2, 4, 7}},  {Family::MBDF, 2, {1.5, 2, 4, 7, 9}}};
    for (const auto& row : rows)
        for (double p : row.params) {
            const auto r = indicators(make_scheme(row.f, row.k, Param(p)));
            for (const auto& cf : closed_forms(row.f, row.k, p)) {
                if (cf.kind != BoundKind::Equal) continue;
                CAPTURE(family_name(row.f));
                CAPTURE(row.k);
                CAPTURE(p);
                CAPTURE(cf.quantity);
                CHECK(std::abs(quantity_of(r, cf.quantity) - cf.value) <= 1e-9);
            }
        }
}

TEST_CASE("maximize_over_param locates the NIMEX2 intensity peak") {
    const ParamOptimum o = maximize_over_param(Family::NIMEX, 2, 6.0, 12.0, Objective::Intensity, 1e-6, 4096);
    CHECK(o.param == doctest::Approx(8.5176).epsilon(1e-3));
    CHECK(std::abs(o.report.intensity - 0.795354) <= 1e-5);
}

}
