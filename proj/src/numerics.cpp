#include "nfield/numerics.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace nf {
namespace {

int sgn(double v) { return (v > 0.0) - (v < 0.0); }

void check_finite(double fx, double x) {
    if (!std::isfinite(fx))
        throw NumericalError("find_roots: f non-finite at x = " + std::to_string(x));
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double flo, double x_tol) {
    // invariant: f(lo), f(hi) have opposite (nonzero) signs
    while (hi - lo > x_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        check_finite(fm, mid);
        if (fm == 0.0) return mid;
        if (sgn(fm) == sgn(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Golden-section extremum of phi on [lo, hi] (minimizes phi).
double golden_min(const std::function<double(double)>& phi, double lo,
                  double hi, double x_tol) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = phi(x1), f2 = phi(x2);
    while (b - a > x_tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = phi(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = phi(x2);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

RootList find_roots(const std::function<double(double)>& f, Interval domain,
                    const RootFindOptions& opt) {
    if (!(std::isfinite(domain.lo) && std::isfinite(domain.hi)))
        throw std::invalid_argument("find_roots: domain must be finite");
    if (domain.lo >= domain.hi)
        throw std::invalid_argument("find_roots: degenerate domain (lo >= hi)");
    if (opt.grid_n < 8)
        throw std::invalid_argument("find_roots: grid_n must be >= 8");
    if (!(opt.x_tol > 0.0) || !(opt.f_tol > 0.0))
        throw std::invalid_argument("find_roots: tolerances must be > 0");

    const int n = opt.grid_n;
    const double h = (domain.hi - domain.lo) / n;
    std::vector<double> xs(n + 1), fs(n + 1);
    for (int i = 0; i <= n; ++i) {
        xs[i] = (i == n) ? domain.hi : domain.lo + i * h;
        fs[i] = f(xs[i]);
        check_finite(fs[i], xs[i]);
    }

    RootList out;

    // sign changes and exact zeros
    std::vector<int> simple_cells; // cell index of each simple root, -1 for grid zeros
    for (int i = 0; i <= n; ++i) {
        if (fs[i] == 0.0) {
            // classify by the nearest nonzero neighbours
            int l = i - 1, r = i + 1;
            while (l > 0 && fs[l] == 0.0) --l;
            while (r < n && fs[r] == 0.0) ++r;
            const bool crossing =
                l >= 0 && r <= n && fs[l] != 0.0 && fs[r] != 0.0 && sgn(fs[l]) != sgn(fs[r]);
            if (i == 0 || fs[i - 1] != 0.0) // report each zero plateau once
                out.push_back({xs[i], crossing ? RootKind::simple : RootKind::tangent});
            continue;
        }
        if (i < n && fs[i + 1] != 0.0 && sgn(fs[i]) != sgn(fs[i + 1])) {
            out.push_back({bisect(f, xs[i], xs[i + 1], fs[i], opt.x_tol), RootKind::simple});
            simple_cells.push_back(i);
        }
    }

    // tangent candidates: |f| small on a grid run with no adjacent sign change
    auto cell_has_crossing = [&](int c) {
        return c >= 0 && c < n && sgn(fs[c]) * sgn(fs[c + 1]) < 0;
    };
    int i = 0;
    while (i <= n) {
        const bool small = fs[i] != 0.0 && std::abs(fs[i]) <= opt.f_tol &&
                           !cell_has_crossing(i - 1) && !cell_has_crossing(i);
        if (!small) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 <= n && fs[j + 1] != 0.0 && std::abs(fs[j + 1]) <= opt.f_tol &&
               !cell_has_crossing(j) && !cell_has_crossing(j + 1))
            ++j;
        const double lo = xs[std::max(0, i - 1)];
        const double hi = xs[std::min(n, j + 1)];
        const double xt = golden_min([&](double x) { return std::abs(f(x)); }, lo, hi,
                                     opt.x_tol);
        const double ft = f(xt);
        check_finite(ft, xt);
        if (std::abs(ft) <= opt.f_tol) out.push_back({xt, RootKind::tangent});
        i = j + 1;
    }

    std::sort(out.begin(), out.end(), [](const Root& a, const Root& b) { return a.x < b.x; });

    // absorb tangent findings that sit on the low-|f| flank of a crossing:
    // if |f| never rises above f_tol between a tangent root and a simple
    // neighbour, the tangent is part of that crossing, not a new root
    const auto valley = [&](double a, double b) {
        const double xt =
            golden_min([&](double x) { return -std::abs(f(x)); }, a, b, opt.x_tol);
        return std::abs(f(xt));
    };
    for (std::size_t k = 0; k < out.size();) {
        bool drop = false;
        if (out[k].kind == RootKind::tangent) {
            if (k > 0 && out[k - 1].kind == RootKind::simple &&
                valley(out[k - 1].x, out[k].x) <= opt.f_tol)
                drop = true;
            if (!drop && k + 1 < out.size() && out[k + 1].kind == RootKind::simple &&
                valley(out[k].x, out[k + 1].x) <= opt.f_tol)
                drop = true;
        }
        if (drop)
            out.erase(out.begin() + static_cast<std::ptrdiff_t>(k));
        else
            ++k;
    }

    // collapse consecutive simple pairs whose enclosed extremum stays within
    // f_tol, absorbing any tangent findings caught between them
    for (std::size_t k = 0; k + 1 < out.size();) {
        if (out[k].kind != RootKind::simple) {
            ++k;
            continue;
        }
        std::size_t next = k + 1;
        while (next < out.size() && out[next].kind == RootKind::tangent) ++next;
        if (next >= out.size() || out[next].x - out[k].x <= opt.x_tol) {
            ++k;
            continue;
        }
        const double xt = golden_min([&](double x) { return -std::abs(f(x)); },
                                     out[k].x, out[next].x, opt.x_tol);
        if (std::abs(f(xt)) <= opt.f_tol) {
            out[k] = {xt, RootKind::tangent};
            out.erase(out.begin() + static_cast<std::ptrdiff_t>(k) + 1,
                      out.begin() + static_cast<std::ptrdiff_t>(next) + 1);
        } else {
            ++k;
        }
    }

    // dedupe: identical roots within x_tol, and spurious tangent findings
    // that collide with a simple root one cell away
    for (std::size_t k = 0; k + 1 < out.size();) {
        const double gap = out[k + 1].x - out[k].x;
        const bool identical = gap <= opt.x_tol;
        const bool mixed = out[k].kind != out[k + 1].kind;
        if (identical || (mixed && gap <= std::max(opt.x_tol, h))) {
            const std::size_t drop =
                (mixed && out[k].kind == RootKind::tangent) ? k : k + 1;
            out.erase(out.begin() + static_cast<std::ptrdiff_t>(drop));
        } else {
            ++k;
        }
    }
    return out;
}

HermEig2 eig_hermitian_2x2(const Matrix2c& m, double herm_tol) {
    const double herm_defect = std::abs(m.m12 - std::conj(m.m21));
    const double imag_defect = std::abs(m.m11.imag()) + std::abs(m.m22.imag());
    const double diag_defect = std::abs(m.m11 - m.m22);
    if (herm_defect > herm_tol || imag_defect > herm_tol || diag_defect > herm_tol)
        throw std::invalid_argument(
            "eig_hermitian_2x2: matrix not equal-diagonal Hermitian within tolerance "
            "(defects: " +
            std::to_string(herm_defect) + ", " + std::to_string(imag_defect) + ", " +
            std::to_string(diag_defect) + ")");

    const double d = m.m11.real();
    const double off = std::abs(m.m12);
    HermEig2 e;
    e.lambda1 = d - off;
    e.lambda2 = d + off;
    constexpr double inv_sqrt2 = 0.7071067811865476;
    if (off == 0.0) {
        e.w1 = {std::complex<double>(1.0, 0.0), std::complex<double>(0.0, 0.0)};
        e.w2 = {std::complex<double>(0.0, 0.0), std::complex<double>(1.0, 0.0)};
        return e;
    }
    const std::complex<double> phase = m.m21 / std::abs(m.m21);
    e.w1 = {std::complex<double>(inv_sqrt2, 0.0), -phase * inv_sqrt2};
    e.w2 = {std::complex<double>(inv_sqrt2, 0.0), phase * inv_sqrt2};
    return e;
}

std::vector<std::complex<double>> eig_dense(std::span<const double> row_major, int n) {
    if (n <= 0) throw std::invalid_argument("eig_dense: dimension must be positive");
    if (n > 512) throw std::invalid_argument("eig_dense: dimension exceeds 512");
    if (row_major.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
        throw std::invalid_argument("eig_dense: data size does not match dimension");
    for (double v : row_major)
        if (!std::isfinite(v)) throw std::invalid_argument("eig_dense: non-finite entry");

    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = row_major[static_cast<std::size_t>(i) * n + j];
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eig_dense: eigenvalue iteration failed");
    std::vector<std::complex<double>> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    return out;
}

} // namespace nf
