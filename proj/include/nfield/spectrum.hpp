#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "nfield/existence.hpp"
#include "nfield/numerics.hpp"

namespace nf {

// Operation requires a regular solution (|u'_p(a)| > reg_tol); the Frechet
// derivative does not exist otherwise.
struct NotRegularError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kStabTol = 1e-9;
inline constexpr double kMergeTol = 1e-6;

// Symbol of the block Laurent linearization at angle theta:
// Phi(e^{i theta}) = (1/|u'_p(a)|) sum_k A_k e^{i k theta},
// A_k = [[w(kT), w(-2a+kT)], [w(2a+kT), w(kT)]].
struct SymbolMatrix {
    std::complex<double> phi11, phi12, phi21, phi22;
    double theta = 0.0;
    Matrix2c mat() const { return {phi11, phi12, phi21, phi22}; }
};

SymbolMatrix symbol(const BumpSolution& sol, double theta);

// Eigenvalue branches lambda1 <= lambda2 of Phi(e^{i theta}).
std::pair<double, double> branches(const BumpSolution& sol, double theta);

enum class Verdict { unstable, marginally_stable };
const char* verdict_name(Verdict v);

struct SpectrumOptions {
    int n_theta = 4096;
    double merge_tol = kMergeTol;
    double stab_tol = kStabTol;
};

struct SpectrumReport {
    std::vector<double> thetas;  // uniform on [0, pi], endpoints included
    std::vector<double> lambda1; // sampled branches
    std::vector<double> lambda2;
    double min_l1 = 0.0, max_l1 = 0.0; // refined branch extrema
    double min_l2 = 0.0, max_l2 = 0.0;
    std::vector<Interval> intervals; // merged closure of both branch ranges
    Verdict verdict = Verdict::marginally_stable;
    double max_lambda = 0.0;
};

// Samples both branches over [0, pi], refines the extrema by golden-section
// around the sampled extremes, and merges the two branch ranges into
// disjoint closed intervals (gaps below merge_tol close). Unstable iff
// max_lambda > 1 + stab_tol.
SpectrumReport spectrum_intervals(const BumpSolution& sol,
                                  const SpectrumOptions& opt = {});

// Finite block-circulant section L(1+q) built from the (1+q)T-periodization.
struct CirculantApprox {
    int q = 0;
    int dim = 0;                 // 2(1+q)
    std::vector<double> matrix;  // row-major dim x dim
    std::vector<std::complex<double>> eigenvalues; // via eig_dense, unordered
    std::vector<double> reference; // branches at theta = 2 pi j/(1+q), sorted
};

CirculantApprox circulant(const BumpSolution& sol, int q);

// Eigenfunction v(x) of the linearization for the branch eigenvalue at
// theta: v_k = e^{-i k theta} w, then
// v(x) = (1/lambda)(1/|u'|) sum_k [w(x+a-kT) v_k^(1) + w(x-a-kT) v_k^(2)].
// branch is 1 or 2. Throws NumericalError when |lambda| <= 1e-12.
std::vector<std::complex<double>> eigenfunction(const BumpSolution& sol,
                                                double theta, int branch,
                                                std::span<const double> xs);

Verdict classify(const BumpSolution& sol, int n_theta = 4096);

} // namespace nf
