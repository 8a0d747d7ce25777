#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace nf {

// Failure of a numerical procedure (non-finite values, budget exhausted,
// certified bound infeasible). Contract violations use std::invalid_argument.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
    bool contains(double x, double tol = 0.0) const {
        return x >= lo - tol && x <= hi + tol;
    }
};

enum class RootKind { simple, tangent };

struct Root {
    double x;
    RootKind kind;
};

// Roots in strictly increasing order.
using RootList = std::vector<Root>;

struct RootFindOptions {
    int grid_n = 2048;
    double x_tol = 1e-10;
    double f_tol = 1e-9;
};

// Grid scan plus bisection on [domain.lo, domain.hi].
//
// Every sign change is refined by bisection to a bracket of width <= x_tol
// and reported as a simple root. Tangencies are reported, not dropped:
// grid points with |f| <= f_tol and no sign change in the two adjacent
// cells are refined to the local extremum of |f| and flagged tangent, and
// a pair of adjacent simple roots whose enclosed extremum stays within
// f_tol collapses to a single tangent root at that extremum.
//
// Throws std::invalid_argument for a degenerate domain or bad options and
// NumericalError (naming the abscissa) when f evaluates non-finite.
RootList find_roots(const std::function<double(double)>& f, Interval domain,
                    const RootFindOptions& opt = {});

// Complex 2x2 matrix in row-major order.
struct Matrix2c {
    std::complex<double> m11, m12, m21, m22;
};

struct HermEig2 {
    double lambda1 = 0.0; // lambda1 <= lambda2
    double lambda2 = 0.0;
    std::array<std::complex<double>, 2> w1{}, w2{}; // unit norm, first nonzero
                                                    // component real positive
};

inline constexpr double kHermTol = 1e-10;

// Analytic eigendecomposition of an equal-diagonal Hermitian 2x2 matrix:
// lambda_{1,2} = m11 -/+ |m12|. Throws std::invalid_argument when the
// matrix fails the Hermitian / equal-diagonal structure beyond herm_tol.
HermEig2 eig_hermitian_2x2(const Matrix2c& m, double herm_tol = kHermTol);

// Eigenvalues of a dense real square matrix (row-major), dimension <= 512.
// Unordered. Cross-check oracle only; backed by a standard dense solver.
std::vector<std::complex<double>> eig_dense(std::span<const double> row_major,
                                            int n);

} // namespace nf
