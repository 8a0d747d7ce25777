#pragma once

#include <vector>

#include "nfield/kernel.hpp"
#include "nfield/numerics.hpp"

namespace nf {

inline constexpr double kRegTol = 1e-8;
inline constexpr double kThresholdFTol = 1e-9;

// Candidate 1-bump periodic stationary solution: u_p(x) = W_p(x+a) - W_p(x-a)
// with half-width a solving W_p(2a;T) = h.
struct BumpSolution {
    PeriodizedKernel pk;
    double h;
    double a;
    double regularity; // |u'_p(a)| = omega_p(0;T) - omega_p(2a;T)

    double u(double x) const;
    void u_many(std::span<const double> x, std::span<double> out) const;
    // omega_p(0;T) - omega_p(2a;T); equals |u'_p(a)| for a genuine solution
    double derivative_at_a() const { return regularity; }
    bool regular(double reg_tol = kRegTol) const { return regularity > reg_tol; }
};

struct VerificationReport {
    bool condition1 = false; // u_p(a) = h
    bool condition2 = false; // u_p > h on (0, a)
    bool condition3 = false; // u_p < h on (a, T/2]
    bool is_regular = false;
    double worst_margin = 0.0; // min |u_p - h| on the grids away from a
    bool accepted() const {
        return condition1 && condition2 && condition3 && is_regular;
    }
};

// All roots a in (0, T/2) of W_p(2a;T) = h. The endpoints a = 0 and
// a = T/2 correspond to the constant solutions and stay excluded behind a
// guard of 1e-8 * T. Tangent roots are flagged, not dropped.
RootList find_candidates(const PeriodizedKernel& pk, double h,
                         const RootFindOptions& opt = {});

BumpSolution make_solution(const PeriodizedKernel& pk, double h, double a);

// Grid check of the three existence conditions plus the regularity flag.
// grid_n >= 64 points per side; worst_margin excludes |x - a| <= 2 x_tol.
VerificationReport verify(const BumpSolution& sol, int grid_n = 4096,
                          double f_tol = kThresholdFTol, double x_tol = 1e-10,
                          double reg_tol = kRegTol);

struct CandidateResult {
    BumpSolution sol;
    RootKind kind;
    VerificationReport report;
};

struct SolveResult {
    std::vector<CandidateResult> candidates; // ascending in a
    bool h_in_range = true;                  // h in (0, h0); outside is a warning only
};

SolveResult solve_all(const PeriodizedKernel& pk, double h,
                      const RootFindOptions& opt = {}, int verify_grid_n = 4096,
                      double reg_tol = kRegTol);

} // namespace nf
