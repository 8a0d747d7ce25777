#include "nfield/existence.hpp"

#include <cmath>
#include <vector>

namespace nf {

double BumpSolution::u(double x) const {
    return pk.antiderivative(x + a) - pk.antiderivative(x - a);
}

void BumpSolution::u_many(std::span<const double> x, std::span<double> out) const {
    if (x.size() != out.size())
        throw std::invalid_argument("u_many: size mismatch");
    std::vector<double> shifted(x.size()), right(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) shifted[i] = x[i] + a;
    pk.antiderivative_many(shifted, out);
    for (std::size_t i = 0; i < x.size(); ++i) shifted[i] = x[i] - a;
    pk.antiderivative_many(shifted, right);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] -= right[i];
}

RootList find_candidates(const PeriodizedKernel& pk, double h,
                         const RootFindOptions& opt) {
    if (!std::isfinite(h)) throw std::invalid_argument("find_candidates: h must be finite");
    const double T = pk.period();
    const double guard = 1e-8 * T;
    const Interval domain{guard, 0.5 * T - guard};
    return find_roots([&pk, h](double a) { return pk.antiderivative(2.0 * a) - h; },
                      domain, opt);
}

BumpSolution make_solution(const PeriodizedKernel& pk, double h, double a) {
    if (!(a > 0.0) || !(a < 0.5 * pk.period()))
        throw std::invalid_argument("make_solution: a must lie in (0, T/2)");
    const double reg = pk.periodized(0.0) - pk.periodized(2.0 * a);
    return BumpSolution{pk, h, a, reg};
}

VerificationReport verify(const BumpSolution& sol, int grid_n, double f_tol,
                          double x_tol, double reg_tol) {
    if (grid_n < 64) throw std::invalid_argument("verify: grid_n must be >= 64");
    const double T = sol.pk.period();
    const double a = sol.a;
    const double h = sol.h;

    VerificationReport rep;
    rep.condition1 = std::abs(sol.u(a) - h) <= f_tol;
    rep.is_regular = sol.regular(reg_tol);

    // condition (2) on (0, a), condition (3) on (a, T/2]
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(2 * grid_n));
    for (int j = 1; j <= grid_n; ++j)
        xs.push_back(a * j / (grid_n + 1.0));
    const std::size_t n_inner = xs.size();
    for (int j = 1; j <= grid_n; ++j)
        xs.push_back(a + (0.5 * T - a) * j / grid_n);

    std::vector<double> us(xs.size());
    sol.u_many(xs, us);

    bool c2 = true, c3 = true;
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = us[i] - h;
        if (i < n_inner) {
            if (!(d > 0.0)) c2 = false;
        } else {
            if (!(d < 0.0)) c3 = false;
        }
        if (std::abs(xs[i] - a) > 2.0 * x_tol)
            margin = std::min(margin, std::abs(d));
    }
    rep.condition2 = c2;
    rep.condition3 = c3;
    rep.worst_margin = margin;
    return rep;
}

SolveResult solve_all(const PeriodizedKernel& pk, double h,
                      const RootFindOptions& opt, int verify_grid_n, double reg_tol) {
    SolveResult res;
    res.h_in_range = h > 0.0 && h < pk.h0();
    for (const Root& r : find_candidates(pk, h, opt)) {
        BumpSolution sol = make_solution(pk, h, r.x);
        VerificationReport rep =
            verify(sol, verify_grid_n, opt.f_tol, opt.x_tol, reg_tol);
        res.candidates.push_back({std::move(sol), r.kind, rep});
    }
    return res;
}

} // namespace nf
