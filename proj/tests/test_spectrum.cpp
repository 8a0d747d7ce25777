#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "nfield/bifurcation.hpp"
#include "nfield/spectrum.hpp"

using namespace nf;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

const Kernel kExp{Exponential{0.5, 1.0}};
const Kernel kHat{WizardHat{4.0, 2.0, 1.5, 1.0}};

BumpSolution solution_at(const Kernel& k, double T, double h, std::size_t index) {
    const PeriodizedKernel pk(k, T);
    const RootList roots = find_candidates(pk, h);
    REQUIRE(index < roots.size());
    return make_solution(pk, h, roots[index].x);
}

// Independent symbol oracle: truncated Fourier series of the A_k blocks,
// built from raw kernel evaluations.
SymbolMatrix brute_symbol(const BumpSolution& sol, double theta, int K = 60) {
    const Kernel& k = sol.pk.kernel();
    const double T = sol.pk.period();
    const double a = sol.a;
    cd p11{0, 0}, p12{0, 0}, p21{0, 0};
    for (int n = -K; n <= K; ++n) {
        const cd z{std::cos(n * theta), std::sin(n * theta)};
        p11 += k(n * T) * z;
        p12 += k(-2.0 * a + n * T) * z;
        p21 += k(2.0 * a + n * T) * z;
    }
    const double inv_du = 1.0 / sol.regularity;
    SymbolMatrix m;
    m.theta = theta;
    m.phi11 = p11 * inv_du;
    m.phi22 = m.phi11;
    m.phi12 = p12 * inv_du;
    m.phi21 = p21 * inv_du;
    return m;
}

} // namespace

TEST_CASE("symbol: closed form against the truncated-series oracle") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> td(0.0, 2.0 * kPi);
    for (const auto& [k, T, idx] : {std::tuple{kExp, 4.0, 0UL}, {kHat, 3.5, 1UL}}) {
        const BumpSolution sol = solution_at(k, T, 0.4, idx);
        for (int i = 0; i < 24; ++i) {
            const double theta = i == 0 ? 1.3 : td(rng);
            const SymbolMatrix got = symbol(sol, theta);
            const SymbolMatrix want = brute_symbol(sol, theta);
            CHECK(std::abs(got.phi11 - want.phi11) <= 1e-10);
            CHECK(std::abs(got.phi12 - want.phi12) <= 1e-10);
            CHECK(std::abs(got.phi21 - want.phi21) <= 1e-10);
        }
    }
}

TEST_CASE("symbol: Hermitian structure and conjugation symmetry") {
    const BumpSolution sol = solution_at(kHat, 3.5, 0.4, 1);
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> td(-2.0 * kPi, 2.0 * kPi);
    for (int i = 0; i < 200; ++i) {
        const double theta = td(rng);
        const SymbolMatrix m = symbol(sol, theta);
        CHECK(std::abs(m.phi12 - std::conj(m.phi21)) <= kHermTol);
        CHECK(std::abs(m.phi11.imag()) <= kHermTol);
        CHECK(m.phi11 == m.phi22);
        const SymbolMatrix r = symbol(sol, -theta);
        CHECK(std::abs(std::conj(m.phi11) - r.phi11) <= 1e-12);
        CHECK(std::abs(std::conj(m.phi12) - r.phi12) <= 1e-12);
        CHECK(std::abs(std::conj(m.phi21) - r.phi21) <= 1e-12);
    }
}

TEST_CASE("branches at theta = 0: translation eigenvalue and Eq.-(20) pair") {
    // exponential kernel: omega_p(2a) > 0, so lambda1(0) = 1
    const BumpSolution se = solution_at(kExp, 4.0, 0.4, 0);
    const auto [l1e, l2e] = branches(se, 0.0);
    CHECK(std::abs(l1e - 1.0) <= 1e-12);
    const double wp2a_e = se.pk.periodized(2.0 * se.a);
    CHECK(l2e == doctest::Approx(1.0 + 2.0 * wp2a_e / se.regularity).epsilon(1e-12));

    // middle wizard-hat branch: omega_p(2a) < 0 flips the ordering, but the
    // eigenvalue set at theta = 0 is still {1, 1 + 2 omega_p(2a)/|u'|}
    const BumpSolution sw = solution_at(kHat, 3.5, 0.4, 1);
    const double wp2a_w = sw.pk.periodized(2.0 * sw.a);
    REQUIRE(wp2a_w < 0.0);
    const auto [l1w, l2w] = branches(sw, 0.0);
    CHECK(std::abs(l2w - 1.0) <= 1e-12);
    CHECK(l1w == doctest::Approx(1.0 + 2.0 * wp2a_w / sw.regularity).epsilon(1e-12));
}

TEST_CASE("branches: reflection symmetry lambda(theta) = lambda(2pi - theta)") {
    const BumpSolution sol = solution_at(kHat, 3.2, 0.4, 2);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> td(0.0, kPi);
    for (int i = 0; i < 100; ++i) {
        const double theta = td(rng);
        const auto [a1, a2] = branches(sol, theta);
        const auto [b1, b2] = branches(sol, 2.0 * kPi - theta);
        CHECK(std::abs(a1 - b1) <= 1e-12);
        CHECK(std::abs(a2 - b2) <= 1e-12);
    }
}

TEST_CASE("branches: exponential-kernel limits at large T") {
    // a -> -0.5 ln|2h - 1| and lambda2(0) -> 1/h - 1
    const BumpSolution sol = solution_at(kExp, 40.0, 0.4, 0);
    CHECK(std::abs(sol.a - 0.8047) <= 1e-3);
    const auto [l1, l2] = branches(sol, 0.0);
    CHECK(std::abs(l1 - 1.0) <= 1e-9);
    CHECK(std::abs(l2 - 1.5) <= 1e-3);
}

TEST_CASE("spectrum_intervals reproduces the reference interval pairs") {
    SpectrumOptions opt;
    opt.n_theta = 4096;
    {
        const SpectrumReport rep = spectrum_intervals(solution_at(kHat, 3.2, 0.4, 1), opt);
        REQUIRE(rep.intervals.size() == 2);
        CHECK(std::abs(rep.intervals[0].lo - 0.8020) <= 2e-3);
        CHECK(std::abs(rep.intervals[0].hi - 0.9692) <= 2e-3);
        CHECK(std::abs(rep.intervals[1].lo - 0.9978) <= 2e-3);
        CHECK(std::abs(rep.intervals[1].hi - 1.0022) <= 2e-3);
        CHECK(rep.verdict == Verdict::unstable);
    }
    {
        const SpectrumReport rep = spectrum_intervals(solution_at(kHat, 1.5, 0.4, 0), opt);
        REQUIRE(rep.intervals.size() == 2);
        CHECK(std::abs(rep.intervals[0].lo - 1.0) <= 2e-3);
        CHECK(std::abs(rep.intervals[0].hi - 1.0684) <= 2e-3);
        CHECK(std::abs(rep.intervals[1].lo - 1.8449) <= 2e-3);
        CHECK(std::abs(rep.intervals[1].hi - 2.6479) <= 2e-3);
        CHECK(rep.verdict == Verdict::unstable);
    }
    {
        // T = 3.5243: the branch ranges touch and the spectrum is connected
        // again. At the 4-decimal rounded T the residual gap is ~1.2e-6, so
        // report with a merge tolerance wide enough to close it.
        SpectrumOptions wide = opt;
        wide.merge_tol = 1e-5;
        const SpectrumReport rep =
            spectrum_intervals(solution_at(kHat, 3.5243, 0.4, 1), wide);
        REQUIRE(rep.intervals.size() == 1);
        CHECK(std::abs(rep.intervals[0].lo - 0.8007) <= 2e-3);
        CHECK(std::abs(rep.intervals[0].hi - 1.0) <= 1e-6);
        CHECK(rep.verdict == Verdict::marginally_stable);
        CHECK(rep.min_l2 - rep.max_l1 <= 2e-6); // the measured gap itself
    }
}

TEST_CASE("spectrum_intervals: the translation eigenvalue 1 is always covered") {
    SpectrumOptions opt;
    opt.n_theta = 512;
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> Sd(0.2, 2.0), sd(0.3, 3.0), Td(0.8, 12.0),
        fd(0.1, 0.9);
    for (int trial = 0; trial < 12; ++trial) {
        const Kernel k{Exponential{Sd(rng), sd(rng)}};
        const PeriodizedKernel pk(k, Td(rng));
        const double h = fd(rng) * pk.h0();
        const RootList roots = find_candidates(pk, h);
        REQUIRE(roots.size() == 1);
        const SpectrumReport rep =
            spectrum_intervals(make_solution(pk, h, roots[0].x), opt);
        bool covered = false;
        for (const Interval& iv : rep.intervals)
            covered = covered || iv.contains(1.0, opt.merge_tol);
        CHECK(covered);
        CHECK(rep.min_l1 <= rep.max_l1);
        CHECK(rep.min_l2 <= rep.max_l2);
        for (std::size_t j = 0; j < rep.thetas.size(); ++j)
            CHECK(rep.lambda1[j] <= rep.lambda2[j]);
    }
}

TEST_CASE("sign criterion: omega_p(2a;T) > 0 implies instability") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> Sd(0.2, 2.0), sd(0.3, 3.0), Td(0.8, 12.0),
        fd(0.1, 0.9);
    SpectrumOptions opt;
    opt.n_theta = 256;
    for (int trial = 0; trial < 12; ++trial) {
        const Kernel k{Exponential{Sd(rng), sd(rng)}};
        const PeriodizedKernel pk(k, Td(rng));
        const double h = fd(rng) * pk.h0();
        const BumpSolution sol =
            make_solution(pk, h, find_candidates(pk, h)[0].x);
        if (pk.periodized(2.0 * sol.a) > 1e-6)
            CHECK(spectrum_intervals(sol, opt).verdict == Verdict::unstable);
    }
}

TEST_CASE("circulant: q = 0 reproduces the closed-form eigenvalue pair") {
    const BumpSolution sol = solution_at(kExp, 4.0, 0.4, 0);
    const CirculantApprox ca = circulant(sol, 0);
    REQUIRE(ca.dim == 2);
    const double w0 = sol.pk.periodized(0.0);
    const double w2a = sol.pk.periodized(2.0 * sol.a);
    std::vector<double> ev{ca.eigenvalues[0].real(), ca.eigenvalues[1].real()};
    std::sort(ev.begin(), ev.end());
    CHECK(ev[0] == doctest::Approx((w0 - w2a) / (w0 - w2a)).epsilon(1e-10));
    CHECK(ev[1] == doctest::Approx((w0 + w2a) / (w0 - w2a)).epsilon(1e-10));
}

TEST_CASE("circulant eigenvalues equal the symbol at roots of unity") {
    for (const auto& [k, T, idx] : {std::tuple{kExp, 4.0, 0UL}, {kHat, 3.5, 1UL}}) {
        const BumpSolution sol = solution_at(k, T, 0.4, idx);
        for (const int q : {0, 1, 2, 5, 19, 49}) {
            const CirculantApprox ca = circulant(sol, q);
            REQUIRE(ca.eigenvalues.size() == ca.reference.size());
            std::vector<double> ev;
            for (const cd& e : ca.eigenvalues) {
                CHECK(std::abs(e.imag()) <= 1e-8);
                ev.push_back(e.real());
            }
            std::sort(ev.begin(), ev.end());
            for (std::size_t i = 0; i < ev.size(); ++i)
                CHECK(std::abs(ev[i] - ca.reference[i]) <= 1e-8);
        }
    }
}

TEST_CASE("circulant L(2) matches the eigenvalue multiset at z^2 = 1") {
    const BumpSolution sol = solution_at(kExp, 4.0, 0.4, 0);
    const CirculantApprox ca = circulant(sol, 1);
    std::vector<double> ev;
    for (const cd& e : ca.eigenvalues) ev.push_back(e.real());
    std::sort(ev.begin(), ev.end());
    std::vector<double> want;
    for (const double theta : {0.0, kPi}) {
        const auto [l1, l2] = branches(sol, theta);
        want.push_back(l1);
        want.push_back(l2);
    }
    std::sort(want.begin(), want.end());
    for (std::size_t i = 0; i < want.size(); ++i)
        CHECK(std::abs(ev[i] - want[i]) <= 1e-8);
}

TEST_CASE("eigenfunction at theta = 0 is the translation mode u_p'") {
    for (const auto& [k, T, idx] : {std::tuple{kExp, 4.0, 0UL}, {kHat, 3.5, 1UL}}) {
        const BumpSolution sol = solution_at(k, T, 0.4, idx);
        // the eigenvalue 1 sits on branch 1 when omega_p(2a) > 0, else branch 2
        const int branch = sol.pk.periodized(2.0 * sol.a) > 0.0 ? 1 : 2;
        std::vector<double> xs;
        for (int i = 0; i < 160; ++i) xs.push_back(-T + 2.0 * T * i / 159.0);
        const std::vector<cd> v = eigenfunction(sol, 0.0, branch, xs);

        // oracle: centered difference of u_p
        double dot = 0.0, nv = 0.0, nu = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            CHECK(std::abs(v[i].imag()) <= 1e-12);
            const double delta = 1e-6;
            const double du =
                (sol.u(xs[i] + delta) - sol.u(xs[i] - delta)) / (2.0 * delta);
            dot += v[i].real() * du;
            nv += v[i].real() * v[i].real();
            nu += du * du;
        }
        const double cosine = std::abs(dot) / std::sqrt(nv * nu);
        CHECK(cosine >= 1.0 - 1e-6);
    }
}

TEST_CASE("eigenfunction: operator application reproduces lambda v") {
    // residual oracle: apply the linearization sum to v at the lattice points
    const BumpSolution sol = solution_at(kHat, 3.5, 0.4, 1);
    const Kernel& k = sol.pk.kernel();
    const double T = sol.pk.period();
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> td(0.0, kPi);
    for (int trial = 0; trial < 6; ++trial) {
        const double theta = td(rng);
        const int branch = 1 + (trial % 2);
        const HermEig2 e = eig_hermitian_2x2(symbol(sol, theta).mat());
        const double lambda = branch == 1 ? e.lambda1 : e.lambda2;
        if (std::abs(lambda) < 1e-6) continue;

        std::vector<double> xs;
        for (int i = 0; i < 64; ++i) xs.push_back(-1.5 * T + 3.0 * T * i / 63.0);
        const std::vector<cd> v = eigenfunction(sol, theta, branch, xs);

        const int K = 40;
        std::vector<double> lattice;
        for (int n = -K; n <= K; ++n) {
            lattice.push_back(-sol.a + n * T);
            lattice.push_back(sol.a + n * T);
        }
        const std::vector<cd> vl = eigenfunction(sol, theta, branch, lattice);

        double sup_v = 0.0, sup_res = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            cd acc{0, 0};
            for (int n = -K; n <= K; ++n) {
                acc += k(xs[i] + sol.a - n * T) * vl[static_cast<std::size_t>(2 * (n + K))];
                acc += k(xs[i] - sol.a - n * T) * vl[static_cast<std::size_t>(2 * (n + K) + 1)];
            }
            acc /= sol.regularity;
            sup_res = std::max(sup_res, std::abs(acc - lambda * v[i]));
            sup_v = std::max(sup_v, std::abs(v[i]));
        }
        CHECK(sup_res <= 1e-6 * (1.0 + std::abs(lambda)) * sup_v);
    }
}

TEST_CASE("eigenfunction: rational angle gives a periodic eigenfunction") {
    const BumpSolution sol = solution_at(kExp, 4.0, 0.4, 0);
    const int q = 3;
    const double theta = 2.0 * kPi / (1 + q); // z^{1+q} = 1
    const std::vector<double> xs{0.3, 1.1, 2.7};
    std::vector<double> shifted;
    for (double x : xs) shifted.push_back(x + (1 + q) * sol.pk.period());
    const auto v0 = eigenfunction(sol, theta, 2, xs);
    const auto v1 = eigenfunction(sol, theta, 2, shifted);
    for (std::size_t i = 0; i < xs.size(); ++i)
        CHECK(std::abs(v0[i] - v1[i]) <= 1e-9 * (1.0 + std::abs(v0[i])));
}

TEST_CASE("regularity gate: non-regular solutions are rejected") {
    const PeriodizedKernel pk(kHat, 3.5);
    const BumpSolution degenerate = make_solution(pk, 0.4, 1e-10);
    REQUIRE_FALSE(degenerate.regular());
    CHECK_THROWS_AS(symbol(degenerate, 0.3), NotRegularError);
    CHECK_THROWS_AS(spectrum_intervals(degenerate), NotRegularError);
    CHECK_THROWS_AS(circulant(degenerate, 3), NotRegularError);
    CHECK_THROWS_AS(eigenfunction(degenerate, 0.3, 1, std::vector<double>{0.0}),
                    NotRegularError);
}

TEST_CASE("argument validation") {
    const BumpSolution sol = solution_at(kExp, 4.0, 0.4, 0);
    CHECK_THROWS_AS(circulant(sol, -1), std::invalid_argument);
    CHECK_THROWS_AS(circulant(sol, 256), std::invalid_argument);
    CHECK_THROWS_AS(eigenfunction(sol, 0.0, 3, std::vector<double>{0.0}),
                    std::invalid_argument);
    SpectrumOptions opt;
    opt.n_theta = 32;
    CHECK_THROWS_AS(spectrum_intervals(sol, opt), std::invalid_argument);
}

TEST_CASE("classify matches the reference verdicts") {
    CHECK(classify(solution_at(kExp, 4.0, 0.4, 0)) == Verdict::unstable);
    CHECK(classify(solution_at(kHat, 1.5, 0.4, 0)) == Verdict::unstable);
    CHECK(classify(solution_at(kHat, 3.5, 0.4, 0)) == Verdict::unstable);
    CHECK(classify(solution_at(kHat, 3.5, 0.4, 1)) == Verdict::marginally_stable);
    CHECK(classify(solution_at(kHat, 3.5, 0.4, 2)) == Verdict::unstable);
}

TEST_CASE("stiff kernels: s*T beyond the cosh overflow guard stays finite") {
    // s*T = 600 forces the scaled scalar path; cosh(600) would overflow
    const Kernel stiff{Exponential{1.0, 200.0}};
    const PeriodizedKernel pk(stiff, 3.0);
    const double h = 0.5 * pk.h0();
    const RootList roots = find_candidates(pk, h);
    REQUIRE(roots.size() == 1);
    const BumpSolution sol = make_solution(pk, h, roots[0].x);
    SpectrumOptions opt;
    opt.n_theta = 128;
    const SpectrumReport rep = spectrum_intervals(sol, opt);
    for (double v : rep.lambda1) CHECK(std::isfinite(v));
    for (double v : rep.lambda2) CHECK(std::isfinite(v));
    const auto [l1, l2] = branches(sol, 0.0);
    CHECK(std::abs(l1 - 1.0) <= 1e-9);
    CHECK(std::isfinite(l2));
}

TEST_CASE("series-path symbol: oscillatory kernel branches are sane") {
    const Kernel osc{OscillatoryDecay{0.5}};
    const PeriodizedKernel pk(osc, 5.0);
    const double h = 0.5 * pk.h0();
    const RootList roots = find_candidates(pk, h);
    REQUIRE_FALSE(roots.empty());
    const BumpSolution sol = make_solution(pk, h, roots[0].x);
    if (sol.regular()) {
        // translation eigenvalue present at theta = 0
        const auto [l1, l2] = branches(sol, 0.0);
        const bool has_one = std::abs(l1 - 1.0) <= 1e-9 || std::abs(l2 - 1.0) <= 1e-9;
        CHECK(has_one);
        // and the series symbol agrees with the brute oracle
        const SymbolMatrix got = symbol(sol, 0.9);
        const SymbolMatrix want = brute_symbol(sol, 0.9, 80);
        CHECK(std::abs(got.phi11 - want.phi11) <= 1e-9);
        CHECK(std::abs(got.phi21 - want.phi21) <= 1e-9);
    }
}
