#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "nfield/kernel.hpp"
#include "nfield/numerics.hpp"
#include "nfield/quadrature.hpp"

using namespace nf;
using cd = std::complex<double>;

TEST_CASE("find_roots: linear crossing") {
    RootFindOptions opt;
    opt.grid_n = 16;
    const RootList r = find_roots([](double x) { return x - 0.5; }, {0.0, 1.0}, opt);
    REQUIRE(r.size() == 1);
    CHECK(r[0].kind == RootKind::simple);
    CHECK(r[0].x == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("find_roots: double root flagged tangent") {
    RootFindOptions opt;
    opt.grid_n = 1000;
    opt.f_tol = 1e-8;
    const RootList r =
        find_roots([](double x) { return (x - 0.5) * (x - 0.5); }, {0.0, 1.0}, opt);
    REQUIRE(r.size() == 1);
    CHECK(r[0].kind == RootKind::tangent);
    CHECK(r[0].x == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("find_roots: threshold equation for the exponential kernel") {
    // W_p(2a;4) = 0.4 with S=0.5, s=1 has the single root a = 0.6633
    const PeriodizedKernel pk(Kernel(Exponential{0.5, 1.0}), 4.0);
    const RootList r = find_roots(
        [&pk](double a) { return pk.antiderivative(2.0 * a) - 0.4; }, {1e-6, 2.0});
    REQUIRE(r.size() == 1);
    CHECK(std::abs(r[0].x - 0.6633) <= 1e-3);
}

TEST_CASE("find_roots: multiple crossings and sign symmetry") {
    const auto f = [](double x) { return std::sin(x); };
    const auto g = [](double x) { return -std::sin(x); };
    RootFindOptions opt;
    opt.grid_n = 256;
    const RootList rf = find_roots(f, {0.5, 10.0}, opt);
    const RootList rg = find_roots(g, {0.5, 10.0}, opt);
    REQUIRE(rf.size() == 3);
    CHECK(rf[0].x == doctest::Approx(M_PI).epsilon(1e-9));
    CHECK(rf[1].x == doctest::Approx(2 * M_PI).epsilon(1e-9));
    CHECK(rf[2].x == doctest::Approx(3 * M_PI).epsilon(1e-9));
    REQUIRE(rg.size() == rf.size());
    for (std::size_t i = 0; i < rf.size(); ++i) {
        CHECK(rf[i].x == doctest::Approx(rg[i].x).epsilon(1e-12));
        CHECK(rf[i].kind == rg[i].kind);
    }
}

TEST_CASE("find_roots: exact zero on a grid point") {
    RootFindOptions opt;
    opt.grid_n = 16; // 0.5 is the 8th node, exactly representable
    const RootList r = find_roots([](double x) { return x - 0.5; }, {0.0, 1.0}, opt);
    REQUIRE(r.size() == 1);
    CHECK(r[0].x == 0.5);
    CHECK(r[0].kind == RootKind::simple);
}

TEST_CASE("find_roots: near-tangent pair merges only within f_tol") {
    // (x-0.5)^2 - 1e-8: two roots 2e-4 apart, enclosed extremum -1e-8
    const auto f = [](double x) { return (x - 0.5) * (x - 0.5) - 1e-8; };
    RootFindOptions tight;
    tight.f_tol = 1e-9;
    const RootList two = find_roots(f, {0.0, 1.0}, tight);
    REQUIRE(two.size() == 2);
    CHECK(two[0].kind == RootKind::simple);
    CHECK(two[1].kind == RootKind::simple);

    RootFindOptions loose;
    loose.f_tol = 1e-7;
    const RootList one = find_roots(f, {0.0, 1.0}, loose);
    REQUIRE(one.size() == 1);
    CHECK(one[0].kind == RootKind::tangent);
    CHECK(one[0].x == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("find_roots: error paths") {
    CHECK_THROWS_AS(find_roots([](double) { return 1.0; }, {1.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(find_roots([](double) { return 1.0; }, {2.0, 1.0}),
                    std::invalid_argument);
    RootFindOptions bad;
    bad.grid_n = 4;
    CHECK_THROWS_AS(find_roots([](double) { return 1.0; }, {0.0, 1.0}, bad),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        find_roots([](double x) { return 1.0 / (x - 0.5); }, {0.0, 1.0}),
        NumericalError);
    // the error names the abscissa
    try {
        find_roots([](double x) { return x > 0.25 ? NAN : 1.0; }, {0.0, 1.0});
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("x = ") != std::string::npos);
    }
}

TEST_CASE("eig_hermitian_2x2: identity") {
    const HermEig2 e = eig_hermitian_2x2({cd(1, 0), cd(0, 0), cd(0, 0), cd(1, 0)});
    CHECK(e.lambda1 == 1.0);
    CHECK(e.lambda2 == 1.0);
    CHECK(e.w1[0] == cd(1, 0));
    CHECK(e.w1[1] == cd(0, 0));
    CHECK(e.w2[0] == cd(0, 0));
    CHECK(e.w2[1] == cd(1, 0));
}

TEST_CASE("eig_hermitian_2x2: [[2, i], [-i, 2]]") {
    const HermEig2 e = eig_hermitian_2x2({cd(2, 0), cd(0, 1), cd(0, -1), cd(2, 0)});
    CHECK(e.lambda1 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e.lambda2 == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("eig_hermitian_2x2: random matrices satisfy the eigen residual") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double d = dist(rng);
        const cd off(dist(rng), dist(rng));
        const Matrix2c m{cd(d, 0), std::conj(off), off, cd(d, 0)};
        const HermEig2 e = eig_hermitian_2x2(m);
        CHECK(e.lambda1 <= e.lambda2);

        const double tol = 1e-12 * (std::abs(e.lambda1) + std::abs(e.lambda2) + 1.0);
        const auto residual = [&](const std::array<cd, 2>& w, double lambda) {
            const cd r1 = m.m11 * w[0] + m.m12 * w[1] - lambda * w[0];
            const cd r2 = m.m21 * w[0] + m.m22 * w[1] - lambda * w[1];
            return std::max(std::abs(r1), std::abs(r2));
        };
        CHECK(residual(e.w1, e.lambda1) <= tol);
        CHECK(residual(e.w2, e.lambda2) <= tol);

        // unit norm, leading phase convention
        CHECK(std::abs(std::norm(e.w1[0]) + std::norm(e.w1[1]) - 1.0) < 1e-14);
        CHECK(e.w1[0].imag() == 0.0);
        CHECK(e.w1[0].real() > 0.0);
        CHECK(e.w2[0].imag() == 0.0);
        CHECK(e.w2[0].real() > 0.0);

        // trace and determinant identities
        CHECK(std::abs(e.lambda1 + e.lambda2 - 2.0 * d) <=
              1e-12 * std::max(1.0, std::abs(2.0 * d)));
        const double det = d * d - std::norm(off);
        CHECK(std::abs(e.lambda1 * e.lambda2 - det) <= 1e-12 * std::max(1.0, std::abs(det)));
    }
}

TEST_CASE("eig_hermitian_2x2: structure violations throw") {
    CHECK_THROWS_AS(eig_hermitian_2x2({cd(1, 0), cd(1, 0), cd(0.5, 0), cd(1, 0)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(eig_hermitian_2x2({cd(1, 1e-3), cd(0, 0), cd(0, 0), cd(1, 0)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(eig_hermitian_2x2({cd(1, 0), cd(0, 0), cd(0, 0), cd(2, 0)}),
                    std::invalid_argument);
}

TEST_CASE("eig_dense: small exact cases") {
    {
        const std::vector<double> m{2, 0, 0, 3};
        auto ev = eig_dense(m, 2);
        std::sort(ev.begin(), ev.end(),
                  [](const cd& a, const cd& b) { return a.real() < b.real(); });
        CHECK(ev[0].real() == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(ev[1].real() == doctest::Approx(3.0).epsilon(1e-12));
    }
    {
        const std::vector<double> m{0, 1, 1, 0};
        auto ev = eig_dense(m, 2);
        std::sort(ev.begin(), ev.end(),
                  [](const cd& a, const cd& b) { return a.real() < b.real(); });
        CHECK(ev[0].real() == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(ev[1].real() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("eig_dense: symmetric random matrix, real spectrum summing to trace") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const int n = 24;
    std::vector<double> m(static_cast<std::size_t>(n) * n);
    double trace = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double v = dist(rng);
            m[static_cast<std::size_t>(i) * n + j] = v;
            m[static_cast<std::size_t>(j) * n + i] = v;
            if (i == j) trace += v;
        }
    const auto ev = eig_dense(m, n);
    double sum = 0.0;
    for (const cd& e : ev) {
        CHECK(std::abs(e.imag()) < 1e-10);
        sum += e.real();
    }
    CHECK(sum == doctest::Approx(trace).epsilon(1e-10));
}

TEST_CASE("eig_dense: contract violations") {
    CHECK_THROWS_AS(eig_dense(std::vector<double>{}, 0), std::invalid_argument);
    CHECK_THROWS_AS(eig_dense(std::vector<double>{1, 2, 3}, 2), std::invalid_argument);
    std::vector<double> big(513 * 513, 0.0);
    CHECK_THROWS_AS(eig_dense(big, 513), std::invalid_argument);
    CHECK_THROWS_AS(eig_dense(std::vector<double>{1, NAN, 0, 1}, 2),
                    std::invalid_argument);
}

TEST_CASE("integrate: smoke checks against closed forms") {
    CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, 30.0, 1e-13) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-13) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::sqrt(std::abs(x)); }, -1.0, 1.0, 1e-10) ==
          doctest::Approx(4.0 / 3.0).epsilon(1e-9));
    CHECK_THROWS_AS(integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, 1e-10),
                    NumericalError);
}
