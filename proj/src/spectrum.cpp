#include "nfield/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nfield/batch.hpp"
#include "nfield/kernel.hpp"

namespace nf {
namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

void require_regular(const BumpSolution& sol, const char* op) {
    if (!sol.regular())
        throw NotRegularError(std::string(op) +
                              ": solution is not regular (|u'_p(a)| = " +
                              std::to_string(sol.regularity) + ")");
}

// One exponential component of the closed-form symbol, written with
// non-positive exponents only so large s*T cannot overflow:
//   alpha = (1 - E2) / den,  den = 1 + E2 - 2 E cos(theta),  E = e^{-sT}
//   beta  = ((e^{-s(T-2a)} - e^{-s(T+2a)}) e^{-i theta}
//            + e^{-2as} - e^{-2s(T-a)}) / den
struct ClosedComponent {
    double S;
    double E, E2;
    double b_cos;   // e^{-s(T-2a)} - e^{-s(T+2a)}
    double b_const; // e^{-2as} - e^{-2s(T-a)}
    double a_num;   // 1 - E2
};

ClosedComponent closed_component(double S, double s, double T, double a) {
    ClosedComponent c;
    c.S = S;
    c.E = std::exp(-s * T);
    c.E2 = c.E * c.E;
    c.a_num = 1.0 - c.E2;
    c.b_cos = std::exp(-s * (T - 2.0 * a)) - std::exp(-s * (T + 2.0 * a));
    c.b_const = std::exp(-2.0 * a * s) - std::exp(-2.0 * s * (T - a));
    return c;
}

SymbolMatrix closed_symbol(const BumpSolution& sol, double theta) {
    const batch::ExpFamily fam = sol.pk.kernel().exp_family();
    const double T = sol.pk.period();
    const double inv_du = 1.0 / sol.regularity;
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    double a11 = 0.0;
    cd b{0.0, 0.0};
    for (int i = 0; i < fam.ncomp; ++i) {
        const ClosedComponent c = closed_component(fam.S[i], fam.s[i], T, sol.a);
        const double den = 1.0 + c.E2 - 2.0 * c.E * ct;
        a11 += c.S * c.a_num / den;
        b += c.S * (c.b_cos * cd{ct, -st} + c.b_const) / den;
    }
    SymbolMatrix m;
    m.theta = theta;
    m.phi11 = m.phi22 = a11 * inv_du;
    m.phi21 = b * inv_du;
    m.phi12 = std::conj(m.phi21);
    return m;
}

SymbolMatrix series_symbol(const BumpSolution& sol, double theta) {
    const Kernel& k = sol.pk.kernel();
    const double T = sol.pk.period();
    const double a = sol.a;
    const double inv_du = 1.0 / sol.regularity;
    const int K = lattice_truncation(k.envelope(), T, sol.pk.series_tol());

    // phi11 = sum_k w(kT) e^{ik theta}: real by evenness
    double a11 = 0.0;
    cd p21{0.0, 0.0};
    for (int n = K; n >= 1; --n) {
        a11 += k(n * T) * 2.0 * std::cos(n * theta);
        const cd zp{std::cos(n * theta), std::sin(n * theta)};
        p21 += k(2.0 * a + n * T) * zp + k(2.0 * a - n * T) * std::conj(zp);
    }
    a11 += k(0.0);
    p21 += k(2.0 * a);

    SymbolMatrix m;
    m.theta = theta;
    m.phi11 = m.phi22 = a11 * inv_du;
    m.phi21 = p21 * inv_du;
    m.phi12 = std::conj(m.phi21);
    return m;
}

double golden_extremum(const std::function<double(double)>& f, double lo,
                       double hi, bool maximize, double x_tol) {
    constexpr double invphi = 0.6180339887498949;
    const double sign = maximize ? -1.0 : 1.0;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = sign * f(x1), f2 = sign * f(x2);
    while (b - a > x_tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = sign * f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = sign * f(x2);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

const char* verdict_name(Verdict v) {
    return v == Verdict::unstable ? "unstable" : "marginally_stable";
}

SymbolMatrix symbol(const BumpSolution& sol, double theta) {
    require_regular(sol, "symbol");
    if (sol.pk.kernel().closed_form()) return closed_symbol(sol, theta);
    return series_symbol(sol, theta);
}

std::pair<double, double> branches(const BumpSolution& sol, double theta) {
    const HermEig2 e = eig_hermitian_2x2(symbol(sol, theta).mat());
    return {e.lambda1, e.lambda2};
}

SpectrumReport spectrum_intervals(const BumpSolution& sol, const SpectrumOptions& opt) {
    require_regular(sol, "spectrum_intervals");
    if (opt.n_theta < 64)
        throw std::invalid_argument("spectrum_intervals: n_theta must be >= 64");
    const int n = opt.n_theta;
    const double T = sol.pk.period();

    SpectrumReport rep;
    rep.thetas.resize(n);
    rep.lambda1.resize(n);
    rep.lambda2.resize(n);
    for (int j = 0; j < n; ++j) rep.thetas[j] = kPi * j / (n - 1);
    rep.thetas.back() = kPi;

    const Kernel& k = sol.pk.kernel();
    double max_sT = 0.0;
    if (k.closed_form()) {
        const batch::ExpFamily fam = k.exp_family();
        for (int c = 0; c < fam.ncomp; ++c) max_sT = std::max(max_sT, fam.s[c] * T);
    }
    if (k.closed_form() && max_sT < 500.0) {
        batch::BranchConsts bc;
        const batch::ExpFamily fam = k.exp_family();
        const double inv_du = 1.0 / sol.regularity;
        bc.ncomp = fam.ncomp;
        for (int c = 0; c < fam.ncomp; ++c) {
            const double s = fam.s[c];
            bc.cosh_sT[c] = std::cosh(s * T);
            bc.diag[c] = fam.S[c] * std::sinh(s * T) * inv_du;
            bc.off_cos[c] = fam.S[c] * std::sinh(2.0 * sol.a * s) * inv_du;
            bc.off_const[c] = fam.S[c] * std::sinh(s * (T - 2.0 * sol.a)) * inv_du;
        }
        batch::symbol_branches_v(bc, rep.thetas.data(), rep.lambda1.data(),
                                 rep.lambda2.data(), static_cast<std::size_t>(n));
    } else {
        for (int j = 0; j < n; ++j) {
            const auto [l1, l2] = branches(sol, rep.thetas[j]);
            rep.lambda1[j] = l1;
            rep.lambda2[j] = l2;
        }
    }
    for (int j = 0; j < n; ++j)
        if (!std::isfinite(rep.lambda1[j]) || !std::isfinite(rep.lambda2[j]))
            throw NumericalError("spectrum_intervals: non-finite branch value at theta = " +
                                 std::to_string(rep.thetas[j]));

    // refine the four extrema: golden-section near the sampled arg-extremum
    auto refine = [&](const std::vector<double>& vals, bool maximize, int which) {
        const auto it = maximize ? std::max_element(vals.begin(), vals.end())
                                 : std::min_element(vals.begin(), vals.end());
        const int j = static_cast<int>(it - vals.begin());
        const double lo = rep.thetas[std::max(0, j - 1)];
        const double hi = rep.thetas[std::min(n - 1, j + 1)];
        const double th = golden_extremum(
            [&](double t) {
                const auto [l1, l2] = branches(sol, t);
                return which == 1 ? l1 : l2;
            },
            lo, hi, maximize, 1e-12);
        const auto [l1, l2] = branches(sol, th);
        const double cand = which == 1 ? l1 : l2;
        return maximize ? std::max(*it, cand) : std::min(*it, cand);
    };
    rep.min_l1 = refine(rep.lambda1, false, 1);
    rep.max_l1 = refine(rep.lambda1, true, 1);
    rep.min_l2 = refine(rep.lambda2, false, 2);
    rep.max_l2 = refine(rep.lambda2, true, 2);

    Interval i1{rep.min_l1, rep.max_l1};
    Interval i2{rep.min_l2, rep.max_l2};
    if (i2.lo < i1.lo) std::swap(i1, i2);
    if (i2.lo - i1.hi < opt.merge_tol)
        rep.intervals = {Interval{i1.lo, std::max(i1.hi, i2.hi)}};
    else
        rep.intervals = {i1, i2};

    rep.max_lambda = std::max(rep.max_l1, rep.max_l2);
    rep.verdict = rep.max_lambda > 1.0 + opt.stab_tol ? Verdict::unstable
                                                      : Verdict::marginally_stable;
    return rep;
}

CirculantApprox circulant(const BumpSolution& sol, int q) {
    require_regular(sol, "circulant");
    if (q < 0 || q > 255)
        throw std::invalid_argument("circulant: q must lie in [0, 255]");
    const int N = q + 1;
    const double T = sol.pk.period();
    const double inv_du = 1.0 / sol.regularity;
    const PeriodizedKernel pkN(sol.pk.kernel(), N * T, sol.pk.series_tol());

    CirculantApprox ca;
    ca.q = q;
    ca.dim = 2 * N;
    // blocks B_n from the (1+q)T-periodization
    std::vector<std::array<double, 4>> blocks(static_cast<std::size_t>(N));
    for (int nn = 0; nn < N; ++nn) {
        const double x = nn * T;
        blocks[static_cast<std::size_t>(nn)] = {
            pkN.periodized(x) * inv_du,
            pkN.periodized(-2.0 * sol.a + x) * inv_du,
            pkN.periodized(2.0 * sol.a + x) * inv_du,
            pkN.periodized(x) * inv_du,
        };
    }
    ca.matrix.assign(static_cast<std::size_t>(ca.dim) * ca.dim, 0.0);
    const auto at = [&](int r, int c) -> double& {
        return ca.matrix[static_cast<std::size_t>(r) * ca.dim + c];
    };
    for (int bi = 0; bi < N; ++bi) {
        for (int bj = 0; bj < N; ++bj) {
            const auto& B = blocks[static_cast<std::size_t>(((bj - bi) % N + N) % N)];
            at(2 * bi, 2 * bj) = B[0];
            at(2 * bi, 2 * bj + 1) = B[1];
            at(2 * bi + 1, 2 * bj) = B[2];
            at(2 * bi + 1, 2 * bj + 1) = B[3];
        }
    }
    ca.eigenvalues = eig_dense(ca.matrix, ca.dim);

    ca.reference.reserve(static_cast<std::size_t>(2 * N));
    for (int j = 0; j < N; ++j) {
        const auto [l1, l2] = branches(sol, 2.0 * kPi * j / N);
        ca.reference.push_back(l1);
        ca.reference.push_back(l2);
    }
    std::sort(ca.reference.begin(), ca.reference.end());
    return ca;
}

std::vector<cd> eigenfunction(const BumpSolution& sol, double theta, int branch,
                              std::span<const double> xs) {
    require_regular(sol, "eigenfunction");
    if (branch != 1 && branch != 2)
        throw std::invalid_argument("eigenfunction: branch must be 1 or 2");

    const HermEig2 e = eig_hermitian_2x2(symbol(sol, theta).mat());
    const double lambda = branch == 1 ? e.lambda1 : e.lambda2;
    const auto& w = branch == 1 ? e.w1 : e.w2;
    if (std::abs(lambda) <= 1e-12)
        throw NumericalError("eigenfunction: eigenvalue is zero within 1e-12");

    const Kernel& k = sol.pk.kernel();
    const double T = sol.pk.period();
    double x_max = 0.0;
    for (double x : xs) x_max = std::max(x_max, std::abs(x));
    const int shift = static_cast<int>(std::ceil((x_max + sol.a) / T)) + 1;
    const int K = lattice_truncation(k.envelope(), T, sol.pk.series_tol()) + shift;

    const double scale = 1.0 / (lambda * sol.regularity);
    std::vector<cd> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        cd acc{0.0, 0.0};
        // far-to-near so the decayed terms are not absorbed
        for (int kk = K; kk >= 1; --kk) {
            const cd phase{std::cos(kk * theta), -std::sin(kk * theta)};
            acc += phase * (k(x + sol.a - kk * T) * w[0] + k(x - sol.a - kk * T) * w[1]);
            acc += std::conj(phase) *
                   (k(x + sol.a + kk * T) * w[0] + k(x - sol.a + kk * T) * w[1]);
        }
        acc += k(x + sol.a) * w[0] + k(x - sol.a) * w[1];
        out[i] = acc * scale;
    }
    return out;
}

Verdict classify(const BumpSolution& sol, int n_theta) {
    SpectrumOptions opt;
    opt.n_theta = n_theta;
    return spectrum_intervals(sol, opt).verdict;
}

} // namespace nf
