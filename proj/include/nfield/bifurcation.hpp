#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nfield/spectrum.hpp"

namespace nf {

// locate_critical received a bracket without an event change.
struct InvalidBracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BranchRecord {
    double a = 0.0;
    RootKind kind = RootKind::simple;
    bool regular = false;
    bool accepted = false;
    // spectrum data, present only for accepted regular candidates
    double min_l1 = 0.0, max_l1 = 0.0, min_l2 = 0.0, max_l2 = 0.0;
    Verdict verdict = Verdict::marginally_stable;
    bool has_spectrum = false;
};

struct SweepRecord {
    double T = 0.0;
    std::vector<BranchRecord> branches; // ascending in a
    std::optional<std::string> error;   // set when this record failed
};

// One record per T on the uniform grid [T_lo, T_hi]; failures are captured
// per record without aborting the sweep.
std::vector<SweepRecord> sweep(const Kernel& k, double h, double T_lo, double T_hi,
                               int n_T, int n_theta = 4096);

enum class CriticalEvent {
    fold,        // candidate count changes (tangency of W_p(2a;T) = h)
    stability,   // middle-branch verdict changes
    lambda2_dip, // middle-branch min_theta lambda2 drops below 1
};

// Bisects T until the bracket width is <= tol. The event predicate must
// differ at the bracket endpoints, otherwise InvalidBracketError. For fold
// events the result is confirmed by a tangency witness: find_candidates at
// the located T, run with f_tol matched to the residual extremum, must
// report a tangent-flagged root.
double locate_critical(const Kernel& k, double h, Interval bracket,
                       CriticalEvent event, double tol = 1e-4, int n_theta = 2048);

struct CriticalPeriods {
    std::optional<double> T1; // first fold
    std::optional<double> T2; // first stability change
    std::vector<std::pair<double, std::string>> extra_events;
};

// Scans [T_lo, T_hi] on n_scan points, brackets every event change and
// refines each by locate_critical.
CriticalPeriods find_critical(const Kernel& k, double h, double T_lo, double T_hi,
                              int n_scan = 64, double tol = 1e-4,
                              int n_theta = 2048);

} // namespace nf
