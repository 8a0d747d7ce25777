#include "nfield/bifurcation.hpp"

#include <algorithm>
#include <cmath>

namespace nf {
namespace {

int candidate_count(const Kernel& k, double h, double T) {
    const PeriodizedKernel pk(k, T);
    return static_cast<int>(find_candidates(pk, h).size());
}

struct MiddleBranch {
    bool present = false;
    Verdict verdict = Verdict::marginally_stable;
    double min_l2 = 0.0;
};

MiddleBranch middle_branch(const Kernel& k, double h, double T, int n_theta) {
    const PeriodizedKernel pk(k, T);
    const SolveResult sr = solve_all(pk, h);
    MiddleBranch mb;
    if (sr.candidates.size() < 3) return mb;
    const CandidateResult& mid = sr.candidates[1];
    if (!mid.report.accepted()) return mb;
    SpectrumOptions opt;
    opt.n_theta = n_theta;
    const SpectrumReport rep = spectrum_intervals(mid.sol, opt);
    mb.present = true;
    mb.verdict = rep.verdict;
    mb.min_l2 = rep.min_l2;
    return mb;
}

double golden_extremize(const std::function<double(double)>& f, double lo, double hi,
                        bool maximize) {
    constexpr double invphi = 0.6180339887498949;
    const double sign = maximize ? -1.0 : 1.0;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = sign * f(x1), f2 = sign * f(x2);
    while (b - a > 1e-12 * std::max(1.0, std::abs(b))) {
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

// Confirm a fold at T_hat: near the fold the threshold-equation residual has
// a small extremum; rerunning the root search with f_tol matched to that
// residual must flag a tangent root.
void confirm_fold_witness(const Kernel& k, double h, double T_hat, double lo,
                          double hi) {
    const PeriodizedKernel pk_lo(k, lo);
    const PeriodizedKernel pk_hi(k, hi);
    const RootList r_lo = find_candidates(pk_lo, h);
    const RootList r_hi = find_candidates(pk_hi, h);
    const RootList& more = r_lo.size() > r_hi.size() ? r_lo : r_hi;
    const RootList& fewer = r_lo.size() > r_hi.size() ? r_hi : r_lo;

    // the emerging pair: roots of the richer side with no close partner
    std::vector<double> unmatched;
    for (const Root& r : more) {
        double best = std::numeric_limits<double>::infinity();
        for (const Root& f : fewer) best = std::min(best, std::abs(f.x - r.x));
        unmatched.push_back(best);
    }
    double w_lo = pk_hi.period() * 1e-8, w_hi = 0.5 * pk_hi.period();
    if (more.size() == fewer.size() + 2) {
        std::vector<std::size_t> idx(more.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return unmatched[a] > unmatched[b]; });
        const double p1 = more[idx[0]].x, p2 = more[idx[1]].x;
        const double pad = 4.0 * std::abs(p2 - p1) + 1e-3 * pk_hi.period();
        w_lo = std::min(p1, p2) - pad;
        w_hi = std::max(p1, p2) + pad;
    }

    const PeriodizedKernel pk(k, T_hat);
    const auto g = [&pk, h](double a) { return pk.antiderivative(2.0 * a) - h; };
    const double s_lo = std::max(w_lo, 1e-8 * T_hat);
    const double s_hi = std::min(w_hi, 0.5 * T_hat * (1.0 - 1e-8));

    // residual at the stationary point of g (the near-tangent extremum);
    // minimizing |g| would land on a crossing once the pair has split
    const double a_min = golden_extremize(g, s_lo, s_hi, false);
    const double a_max = golden_extremize(g, s_lo, s_hi, true);
    const double a_ext = std::abs(g(a_min)) <= std::abs(g(a_max)) ? a_min : a_max;
    const double res = std::abs(g(a_ext));

    RootFindOptions opt;
    opt.grid_n = 1 << 16; // resolve the sub-cell valley around the tangency
    opt.f_tol = std::max(opt.f_tol, 2.0 * res);
    const RootList witness = find_candidates(pk, h, opt);
    for (const Root& r : witness)
        if (r.kind == RootKind::tangent && r.x >= w_lo && r.x <= w_hi) return;
    throw NumericalError("locate_critical: fold at T = " + std::to_string(T_hat) +
                         " lacks a tangency witness");
}

} // namespace

std::vector<SweepRecord> sweep(const Kernel& k, double h, double T_lo, double T_hi,
                               int n_T, int n_theta) {
    if (!(T_lo > 0.0) || !(T_hi >= T_lo))
        throw std::invalid_argument("sweep: need 0 < T_lo <= T_hi");
    if (T_lo == T_hi) n_T = 1;
    if (n_T < 1 || (n_T < 2 && T_lo != T_hi))
        throw std::invalid_argument("sweep: n_T must be >= 2 for a nonempty range");

    std::vector<SweepRecord> records;
    records.reserve(static_cast<std::size_t>(n_T));
    for (int i = 0; i < n_T; ++i) {
        const double T =
            n_T == 1 ? T_lo : T_lo + (T_hi - T_lo) * static_cast<double>(i) / (n_T - 1);
        SweepRecord rec;
        rec.T = T;
        try {
            const PeriodizedKernel pk(k, T);
            const SolveResult sr = solve_all(pk, h);
            for (const CandidateResult& c : sr.candidates) {
                BranchRecord br;
                br.a = c.sol.a;
                br.kind = c.kind;
                br.regular = c.report.is_regular;
                br.accepted = c.report.accepted();
                if (br.accepted && br.regular) {
                    SpectrumOptions opt;
                    opt.n_theta = n_theta;
                    const SpectrumReport rep = spectrum_intervals(c.sol, opt);
                    br.min_l1 = rep.min_l1;
                    br.max_l1 = rep.max_l1;
                    br.min_l2 = rep.min_l2;
                    br.max_l2 = rep.max_l2;
                    br.verdict = rep.verdict;
                    br.has_spectrum = true;
                }
                rec.branches.push_back(br);
            }
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
        records.push_back(std::move(rec));
    }
    return records;
}

double locate_critical(const Kernel& k, double h, Interval bracket,
                       CriticalEvent event, double tol, int n_theta) {
    if (!(bracket.lo > 0.0) || !(bracket.lo < bracket.hi))
        throw std::invalid_argument("locate_critical: bad bracket");
    if (!(tol > 0.0)) throw std::invalid_argument("locate_critical: tol must be > 0");

    const auto state = [&](double T) -> int {
        switch (event) {
            case CriticalEvent::fold:
                return candidate_count(k, h, T);
            case CriticalEvent::stability: {
                const MiddleBranch mb = middle_branch(k, h, T, n_theta);
                if (!mb.present)
                    throw NumericalError(
                        "locate_critical: no regular middle branch at T = " +
                        std::to_string(T));
                return mb.verdict == Verdict::unstable ? 1 : 0;
            }
            case CriticalEvent::lambda2_dip: {
                const MiddleBranch mb = middle_branch(k, h, T, n_theta);
                if (!mb.present)
                    throw NumericalError(
                        "locate_critical: no regular middle branch at T = " +
                        std::to_string(T));
                return mb.min_l2 < 1.0 - kStabTol ? 1 : 0;
            }
        }
        return 0;
    };

    double lo = bracket.lo, hi = bracket.hi;
    const int s_lo = state(lo);
    if (s_lo == state(hi))
        throw InvalidBracketError("locate_critical: no event change across [" +
                                  std::to_string(lo) + ", " + std::to_string(hi) + "]");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (state(mid) == s_lo)
            lo = mid;
        else
            hi = mid;
    }
    const double T_hat = 0.5 * (lo + hi);
    if (event == CriticalEvent::fold) confirm_fold_witness(k, h, T_hat, lo, hi);
    return T_hat;
}

CriticalPeriods find_critical(const Kernel& k, double h, double T_lo, double T_hi,
                              int n_scan, double tol, int n_theta) {
    if (!(T_lo > 0.0) || !(T_lo < T_hi))
        throw std::invalid_argument("find_critical: need 0 < T_lo < T_hi");
    if (n_scan < 2) throw std::invalid_argument("find_critical: n_scan must be >= 2");

    struct Scan {
        double T;
        int count;
        bool has_middle = false;
        Verdict verdict = Verdict::marginally_stable;
        bool dipped = false;
    };
    std::vector<Scan> scans;
    scans.reserve(static_cast<std::size_t>(n_scan));
    for (int i = 0; i < n_scan; ++i) {
        Scan s;
        s.T = T_lo + (T_hi - T_lo) * static_cast<double>(i) / (n_scan - 1);
        s.count = candidate_count(k, h, s.T);
        const MiddleBranch mb = middle_branch(k, h, s.T, n_theta);
        s.has_middle = mb.present;
        if (mb.present) {
            s.verdict = mb.verdict;
            s.dipped = mb.min_l2 < 1.0 - kStabTol;
        }
        scans.push_back(s);
    }

    CriticalPeriods out;
    for (std::size_t i = 0; i + 1 < scans.size(); ++i) {
        const Scan& a = scans[i];
        const Scan& b = scans[i + 1];
        const Interval br{a.T, b.T};
        if (a.count != b.count) {
            const double T = locate_critical(k, h, br, CriticalEvent::fold, tol, n_theta);
            if (!out.T1)
                out.T1 = T;
            else
                out.extra_events.emplace_back(T, "fold");
        }
        if (a.has_middle && b.has_middle && a.verdict != b.verdict) {
            const double T =
                locate_critical(k, h, br, CriticalEvent::stability, tol, n_theta);
            if (!out.T2)
                out.T2 = T;
            else
                out.extra_events.emplace_back(T, "stability");
        }
        if (a.has_middle && b.has_middle && a.dipped != b.dipped) {
            const double T =
                locate_critical(k, h, br, CriticalEvent::lambda2_dip, tol, n_theta);
            out.extra_events.emplace_back(T, "middle-branch min lambda2 crosses 1");
        }
    }
    std::sort(out.extra_events.begin(), out.extra_events.end());
    return out;
}

} // namespace nf
