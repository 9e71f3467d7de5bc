#include <cmath>
#include <random>

#include "doctest.h"
#include "imex/error.hpp"
#include "imex/kernels.hpp"

using namespace imex;

namespace {

SchemeTriad bdf2() { return make_scheme(Family::BDF, 2); }

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("DOC kernels of Euler and BDF2") {
    const auto e = doc_kernels({1.0}, 6);
    CHECK(e.doc == std::vector<double>{1, 0, 0, 0, 0, 0});

    // Hand recursion: doc_j = (2/3) (1/3)^j.
    const auto d = doc_kernels({1.5, -0.5}, 12);
    for (int j = 0; j < 12; ++j) CHECK(d.doc[j] == doctest::Approx(2.0 / 3 * std::pow(1.0 / 3, j)).epsilon(1e-14));
    CHECK(d.doc[0] == 1.0 / 1.5);
}

TEST_CASE("DOC kernels reject bad input") {
    CHECK_THROWS_AS(doc_kernels({0.0, 1.0}, 4), DomainError);
    CHECK_THROWS_AS(doc_kernels({-1.0}, 4), DomainError);
    CHECK_THROWS_AS(doc_kernels({1.0}, 0), DomainError);
}

TEST_CASE("orthogonality identity for catalog a-vectors") {
    for (const auto& [f, k, p] : {std::tuple{Family::WBDF, 5, 3.0}, {Family::GBDF, 5, 20.0}, {Family::SIEMS, 8, 3.0},
                                  {Family::NIMEX, 6, 2.0}, {Family::MBDF, 3, 5.0}}) {
        const SchemeTriad s = make_scheme(f, k, Param(p));
        const auto d = doc_kernels(s.a, 64);
        CAPTURE(family_name(f));
        CHECK(orthogonality_residual(d) <= 1e-12);
    }
}

TEST_CASE("composite kernel examples") {
    const auto e = composite_kernels(make_scheme(Family::BDF, 1), 5);
    CHECK(e.b_hat == std::vector<double>{1, 0, 0, 0, 0});
    CHECK(e.c_hat == std::vector<double>{1, 0, 0, 0, 0});

    const auto b = composite_kernels(bdf2(), 10);
    const auto d = doc_kernels({1.5, -0.5}, 10);
    for (int j = 0; j < 10; ++j) CHECK(b.b_hat[j] == doctest::Approx(d.doc[j]).epsilon(1e-15));
    CHECK(b.c_hat[0] == doctest::Approx(4.0 / 3).epsilon(1e-15));
}

TEST_CASE("A times the DOC inverse is the identity and Toeplitz factors commute") {
    const SchemeTriad s = make_scheme(Family::SIEMS, 4, Param(2.0));
    for (int n : {16, 128, 512}) {
        const DenseMatrix A = lower_toeplitz(s.a, n);
        const DenseMatrix Ainv = lower_toeplitz(doc_kernels(s.a, n).doc, n);
        DenseMatrix P = multiply(A, Ainv);
        for (int i = 0; i < n; ++i) P(i, i) -= 1.0;
        CHECK(max_abs(P) <= 1e-11);
        const DenseMatrix B = lower_toeplitz(s.b, n);
        const DenseMatrix AB = multiply(Ainv, B), BA = multiply(B, Ainv);
        double diff = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) diff = std::max(diff, std::abs(AB(i, j) - BA(i, j)));
        CHECK(diff <= 1e-10);
    }
}

TEST_CASE("toeplitz_verify examples") {
    const SchemeTriad e = make_scheme(Family::BDF, 1);
    const auto re = toeplitz_verify(e, 16, indicators(e));
    CHECK(re.min_eig_sym_Bhat == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(re.specnorm_Ainv == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(re.specnorm_AinvC == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(re.all_ok());

    const SchemeTriad b = bdf2();
    const auto rb = toeplitz_verify(b, 128, indicators(b));
    CHECK(rb.min_eig_sym_Bhat >= 0.5 - 1e-8);
    CHECK(rb.specnorm_Ainv <= 1.0 + 1e-8);
    CHECK(rb.all_ok());
    CHECK(rb.spectrum.size() == 128);
    const auto j = to_json(rb);
    CHECK(j.contains("min_eig_sym_Bhat"));
}

TEST_CASE("toeplitz_verify size limits") {
    const SchemeTriad s = make_scheme(Family::WBDF, 3, Param(2.0));
    const auto ind = indicators(s);
    CHECK_THROWS_AS(toeplitz_verify(s, 3, ind), DomainError);
    CHECK_THROWS_AS(toeplitz_verify(s, 513, ind), DomainError);
    ToeplitzOptions opt;
    opt.max_n = 1024;
    CHECK_NOTHROW(toeplitz_verify(s, 4, ind, opt));
}

TEST_CASE("minimum eigenvalue is non-increasing in n") {
    for (const auto& [f, k, p] : {std::tuple{Family::BDF, 2, 0.0}, {Family::SIEMS, 3, 2.0}, {Family::GBDF, 4, 9.0}}) {
        const SchemeTriad s = make_scheme(f, k, f == Family::BDF ? Param() : Param(p));
        const auto ind = indicators(s);
        double prev = 1e300;
        for (int n : {16, 32, 64, 128, 256}) {
            const double m = toeplitz_verify(s, n, ind).min_eig_sym_Bhat;
            CAPTURE(n);
            CHECK(m <= prev + 1e-12);
            prev = m;
        }
    }
}

TEST_CASE("equal-distribution gap shrinks with n") {
    for (const auto& [f, k, p] : {std::tuple{Family::BDF, 2, 0.0}, {Family::SIEMS, 3, 2.0}, {Family::WBDF, 5, 3.0},
                                  {Family::NIMEX, 3, 2.0}}) {
        const SchemeTriad s = make_scheme(f, k, f == Family::BDF ? Param() : Param(p));
        const auto ind = indicators(s);
        CAPTURE(family_name(f));
        CHECK(toeplitz_verify(s, 256, ind).equal_distribution_gap < toeplitz_verify(s, 32, ind).equal_distribution_gap);
    }
}

TEST_CASE("quadratic form of the composite implicit kernel is bounded below") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g;
    for (const auto& [f, k, p] : {std::tuple{Family::WBDF, 3, 2.0}, {Family::SIEMS, 6, 5.0}, {Family::GBDF, 5, 20.0}}) {
        const SchemeTriad s = make_scheme(f, k, Param(p));
        const double lam = indicators(s).lambda_I;
        const int n = 96;
        const auto bh = composite_kernels(s, n).b_hat;
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> w(n);
            double w2 = 0.0;
            for (auto& x : w) x = g(rng), w2 += x * x;
            double q = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j <= i; ++j) q += w[i] * bh[i - j] * w[j];
            CAPTURE(family_name(f));
            CHECK(q >= lam * w2 - 1e-8 * w2);
        }
    }
}

}
