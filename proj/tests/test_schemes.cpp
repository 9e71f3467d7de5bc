#include <cmath>
#include <random>

#include "doctest.h"
#include "imex/error.hpp"
#include "imex/schemes.hpp"

using namespace imex;

namespace {

void check_vec(const std::vector<double>& got, const std::vector<double>& want, double tol) {
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        CAPTURE(i);
        CHECK(std::abs(got[i] - want[i]) <= tol);
    }
}

struct CatalogCase {
    Family f;
    int k;
    const char* param;
};

// One or two in-range parameters per (family, k).
const CatalogCase kCatalog[] = {
    {Family::WBDF, 2, "2"},   {Family::WBDF, 3, "3/2"}, {Family::WBDF, 4, "2"},    {Family::WBDF, 5, "3"},
    {Family::MBDF, 2, "5"},   {Family::MBDF, 3, "4"},   {Family::MBDF, 4, "6"},    {Family::MBDF, 5, "8"},
    {Family::GBDF, 2, "2"},   {Family::GBDF, 3, "2"},   {Family::GBDF, 4, "9"},    {Family::GBDF, 5, "20"},
    {Family::NIMEX, 2, "3"},  {Family::NIMEX, 3, "2"},  {Family::NIMEX, 4, "2"},   {Family::NIMEX, 5, "2"},
    {Family::NIMEX, 6, "2"},  {Family::NIMEX, 7, "3"},  {Family::NIMEX, 8, "3"},   {Family::SIEMS, 2, "2"},
    {Family::SIEMS, 3, "2"},  {Family::SIEMS, 4, "2"},  {Family::SIEMS, 5, "2"},   {Family::SIEMS, 6, "5"},
    {Family::SIEMS, 7, "4"},  {Family::SIEMS, 8, "3"},  {Family::BDF, 1, ""},      {Family::BDF, 2, ""},
    {Family::BDF, 3, ""},     {Family::BDF, 4, ""},     {Family::BDF, 5, ""},      {Family::BDF, 6, ""},
};

SchemeTriad build(const CatalogCase& c) { return make_scheme(c.f, c.k, *c.param ? Param::parse(c.param) : Param()); }

// Order-l residuals on the grid t_{n-j} = n - j, computed directly in long double.
void direct_residuals(const SchemeTriad& s, int q, double n, long double& worst) {
    const int k = s.k;
    auto t = [&](int j) { return static_cast<long double>(n - j); };
    for (int l = 1; l <= q; ++l) {
        long double da = 0, sb = 0, sc = 0, scale = 1;
        for (int j = 0; j < k; ++j) {
            const long double d = std::pow(t(j), l) - std::pow(t(j + 1), l);
            da += s.a[j] * d;
            scale = std::max(scale, std::abs(s.a[j] * d));
        }
        for (int j = 0; j <= k; ++j) sb += s.b[j] * l * std::pow(t(j), l - 1);
        for (int j = 0; j < k; ++j) sc += s.c[j] * l * std::pow(t(j + 1), l - 1);
        worst = std::max(worst, std::abs(da - sb) / scale);
        worst = std::max(worst, std::abs(da - sc) / scale);
    }
}

}  // namespace

TEST_SUITE("schemes") {

TEST_CASE("make_scheme examples") {
    const SchemeTriad w = make_scheme(Family::WBDF, 2, Param(Rational(1)));
    check_vec(w.a, {1.5, -0.5}, 1e-15);
    check_vec(w.b, {1.0, 0.0, 0.0}, 1e-15);
    check_vec(w.c, {2.0, -1.0}, 1e-15);

    const SchemeTriad m = make_scheme(Family::MBDF, 2, Param(Rational(5)));
    check_vec(m.b, {1.25, -0.5, 0.25}, 1e-15);
    check_vec(m.a, {1.5, -0.5}, 1e-15);
    check_vec(m.c, {2.0, -1.0}, 1e-15);

    const SchemeTriad g = make_scheme(Family::GBDF, 3, Param(Rational(1)));
    check_vec(g.a, {11.0 / 6, -7.0 / 6, 1.0 / 3}, 1e-15);
    check_vec(g.b, {1.0, 0.0, 0.0, 0.0}, 1e-15);
    check_vec(g.c, {3.0, -3.0, 1.0}, 1e-15);
    CHECK_FALSE(g.warning);
}

TEST_CASE("BDF-k is the beta = 1 member of GBDF and the alpha = 1 member of WBDF") {
    for (int k = 2; k <= 5; ++k) {
        const SchemeTriad b = make_scheme(Family::BDF, k);
        const SchemeTriad g = make_scheme(Family::GBDF, k, Param(Rational(1)));
        const SchemeTriad w = make_scheme(Family::WBDF, k, Param(Rational(1)));
        check_vec(g.a, b.a, 1e-13);
        check_vec(g.c, b.c, 1e-13);
        check_vec(w.a, b.a, 1e-13);
        check_vec(w.b, b.b, 1e-13);
    }
}

TEST_CASE("unsupported orders and out-of-range parameters") {
    CHECK_THROWS_WITH_AS(make_scheme(Family::WBDF, 6, Param(2.0)), doctest::Contains("unsupported order"), DomainError);
    CHECK_THROWS_WITH_AS(make_scheme(Family::GBDF, 6, Param(2.0)), doctest::Contains("unsupported order"), DomainError);
    CHECK_THROWS_AS(make_scheme(Family::BDF, 7), DomainError);
    CHECK_THROWS_AS(make_scheme(Family::SIEMS, 9, Param(3.0)), DomainError);
    const SchemeTriad low = make_scheme(Family::WBDF, 2, Param(0.3));
    CHECK(low.warning);
    CHECK_FALSE(low.warning_text.empty());
}

TEST_CASE("solve_order_conditions examples") {
    const SchemeTriad e = solve_order_conditions(1, 1, {1.0, 0.0});
    check_vec(e.a, {1.0}, 1e-14);
    check_vec(e.c, {1.0}, 1e-14);

    const SchemeTriad w = solve_order_conditions(2, 2, {3.0, -2.0, 0.0});
    check_vec(w.a, {3.5, -2.5}, 1e-13);
    check_vec(w.c, {4.0, -3.0}, 1e-13);

    const OrderSystemAnalysis an = analyze_order_conditions(3, 4);
    REQUIRE(an.consistent);
    REQUIRE(an.determined[3]);  // unknowns ordered a_0..a_2, b_0..
    CHECK(std::abs(an.particular[3]) <= 1e-10);
}

TEST_CASE("underdetermined order systems report the free parameters") {
    // k=2, q=2 has 3k - 2q = 2 free parameters once consistency is counted.
    const OrderSystemAnalysis an = analyze_order_conditions(2, 2);
    CHECK(an.consistent);
    CHECK(an.free_dofs == 2);
    CHECK_THROWS_AS(solve_order_conditions(2, 2), DomainError);
    for (int k = 1; k <= 6; ++k)
        for (int q = 1; q <= k; ++q) CHECK(analyze_order_conditions(k, q).free_dofs == 3 * k - 2 * q);
}

TEST_CASE("truncation examples") {
    const auto w = truncation_leading(make_scheme(Family::WBDF, 2, Param(Rational(1))));
    CHECK(w.order == 2);
    CHECK(w.coeff_u == doctest::Approx(-1.0 / 3).epsilon(1e-14));
    CHECK(w.coeff_F == doctest::Approx(1.0).epsilon(1e-14));
    const auto s = truncation_leading(make_scheme(Family::SIEMS, 3, Param(Rational(1))));
    CHECK(s.coeff_u == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(s.coeff_F == doctest::Approx(1.0).epsilon(1e-14));
    const auto n = truncation_leading(make_scheme(Family::NIMEX, 2, Param(Rational(1))));
    CHECK(n.coeff_u == doctest::Approx(-1.0 / 3).epsilon(1e-14));
    CHECK(n.coeff_F == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("truncation rejects an inconsistent triad") {
    // BDF2 implicit part with a first-order explicit part.
    SchemeTriad bad;
    bad.k = 2;
    bad.a = {1.5, -0.5};
    bad.b = {1.0, 0.0, 0.0};
    bad.c = {1.0, 0.0};
    CHECK_THROWS_AS(make_custom(bad.a, bad.b, bad.c), DomainError);
    CHECK_THROWS_WITH_AS(truncation_leading(bad), "inconsistent scheme", DomainError);
}

TEST_CASE("characteristic_triple examples") {
    const auto e = characteristic_triple(make_scheme(Family::BDF, 1));
    CHECK(e.rho_a.coeffs() == std::vector<double>{-1.0, 1.0});
    CHECK(e.rho_b.coeffs() == std::vector<double>{0.0, 1.0});
    CHECK(e.rho_c.coeffs() == std::vector<double>{1.0});

    const auto w = characteristic_triple(make_scheme(Family::WBDF, 2, Param(Rational(1))));
    CHECK(w.rho_b.coeffs() == std::vector<double>{0.0, 0.0, 1.0});
    CHECK(w.rho_c.coeffs() == std::vector<double>{-1.0, 2.0});

    const SchemeTriad m = make_scheme(Family::MBDF, 3, Param(Rational(5)));
    check_vec(m.c, {3.0, -3.0, 1.0}, 1e-14);
}

TEST_CASE("rho_c = rho_b - b_0 (zeta - 1)^k for every catalog scheme") {
    for (const auto& c : kCatalog) {
        const SchemeTriad s = build(c);
        const auto tri = characteristic_triple(s);
        const Poly rhs = tri.rho_b - Poly::binomial_power(1.0, s.k) * s.b[0];
        CAPTURE(family_name(c.f));
        CAPTURE(c.k);
        for (int i = 0; i <= s.k; ++i) CHECK(std::abs(tri.rho_c[i] - rhs[i]) <= 1e-12);
        CHECK(validate(s).empty());
        CHECK(s.a[0] > 0);
        CHECK(s.b[0] > 0);
        CHECK(s.c[0] > 0);
    }
}

TEST_CASE("make_scheme agrees with the order-condition solver") {
    for (const auto& c : kCatalog) {
        const SchemeTriad s = build(c);
        std::vector<std::optional<double>> fixed(s.b.begin(), s.b.end());
        const SchemeTriad sol = solve_order_conditions(s.k, s.k, fixed);
        CAPTURE(family_name(c.f));
        CAPTURE(c.k);
        check_vec(sol.a, s.a, 1e-10);
        check_vec(sol.c, s.c, 1e-10);
    }
}

TEST_CASE("order conditions hold on translated grids") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> shift(-50.0, 50.0);
    for (const auto& c : kCatalog) {
        const SchemeTriad s = build(c);
        for (int trial = 0; trial < 3; ++trial) {
            const double n = std::round(shift(rng));
            long double worst = 0;
            direct_residuals(s, s.k, n, worst);
            CAPTURE(family_name(c.f));
            CAPTURE(c.k);
            CAPTURE(n);
            CHECK(worst <= 1e-10L);
            CHECK(order_residuals(s, s.k, n).max_relative <= 1e-10);
        }
    }
}

TEST_CASE("order barrier: order k+1 forces b_0 = 0") {
    for (int k = 1; k <= 6; ++k) {
        const OrderSystemAnalysis an = analyze_order_conditions(k, k + 1);
        CAPTURE(k);
        if (!an.consistent) continue;  // no scheme at all of order k+1
        REQUIRE(an.determined[k]);
        CHECK(std::abs(an.particular[k]) <= 1e-10);
    }
}

TEST_CASE("scheme JSON round trip keeps 17 significant digits") {
    const SchemeTriad s = make_scheme(Family::SIEMS, 4, Param::parse("6/5"));
    const nlohmann::json j = to_json(s);
    CHECK(j["family"] == "SIEMS");
    CHECK(j["a"][0].is_string());
    const SchemeTriad r = scheme_from_json(j);
    CHECK(r.a == s.a);
    CHECK(r.b == s.b);
    CHECK(r.c == s.c);
    CHECK(format_g17(0.1) == "0.10000000000000001");
}

TEST_CASE("parameter parsing") {
    CHECK(*Param::parse("11/4").exact == Rational(11, 4));
    CHECK(*Param::parse("2.5").exact == Rational(5, 2));
    CHECK(Param::parse("1e-3").value == doctest::Approx(1e-3));
    CHECK_THROWS_AS(Param::parse("abc"), DomainError);
    CHECK_THROWS_AS(Param::parse("1/0"), DomainError);
    const auto g = parse_param_grid("1:2:5");
    REQUIRE(g.size() == 5);
    CHECK(*g[1].exact == Rational(5, 4));
    CHECK_THROWS_AS(parse_param_grid("1:2"), DomainError);
    CHECK(parse_family("euler") == Family::BDF);
    CHECK(parse_family("siems") == Family::SIEMS);
    CHECK_THROWS_AS(parse_family("rk4"), DomainError);
}

}
