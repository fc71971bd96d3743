#pragma once

#include <cmath>
#include <utility>

#include "ucond/errors.hpp"
#include "ucond/report.hpp"
#include "ucond/scenario.hpp"
#include "ucond/trace.hpp"

namespace ucond {

struct RunResult {
    Trace trace;
    RunSummary summary;
};

/// Cold start (every capacitor discharged) to t_end. Deterministic.
/// Throws NotImplementedError for descriptor-only topologies, ConfigError on
/// invalid scenarios and RunError when a step fails after every dt halving.
[[nodiscard]] RunResult run(const Scenario& scenario);

/// Bisects a bracket [lo, hi] across which pred changes value. Returns a
/// time within tol after the change (pred there equals pred(hi)).
/// Throws ContractViolation if pred(lo) == pred(hi).
template <class Pred>
[[nodiscard]] double locate_event(double lo, double hi, Pred&& pred, double tol) {
    if (!(hi > lo) || !(tol > 0.0)) throw ContractViolation("locate_event: empty bracket or tolerance");
    const bool at_lo = static_cast<bool>(pred(lo));
    const bool at_hi = static_cast<bool>(pred(hi));
    if (at_lo == at_hi) throw ContractViolation("locate_event: predicate does not change across bracket");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (static_cast<bool>(pred(mid)) == at_lo) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

/// Time from the first SYNC_STARTUP entry to the ACTIVE transition.
/// Throws MeasurementError if either is missing.
[[nodiscard]] double startup_duration(const Trace& trace);

}  // namespace ucond
