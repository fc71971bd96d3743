#include "ucond/generator.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ucond/errors.hpp"

namespace ucond {

void validate(const ThreePhaseSource& src) {
    if (!(src.v_ll_peak > 0.0)) throw ConfigError("source.v_ll_peak must be > 0");
    if (!(src.freq > 0.0)) throw ConfigError("source.freq must be > 0");
    if (!(src.r_phase >= 0.0)) throw ConfigError("source.r_phase must be >= 0");
    if (!(src.l_phase >= 0.0)) throw ConfigError("source.l_phase must be >= 0");
    if (!std::isfinite(src.phase0)) throw ConfigError("source.phase0 must be finite");
}

Phases emf_potentials(const ThreePhaseSource& src, double t) {
    constexpr double kShift = 2.0 * std::numbers::pi / 3.0;
    const double amp = src.v_ll_peak / std::numbers::sqrt3;
    const double theta = 2.0 * std::numbers::pi * src.freq * t + src.phase0;
    const double e1 = amp * std::sin(theta);
    const double e2 = amp * std::sin(theta - kShift);
    // Third phase closes the balanced set exactly.
    return {e1, e2, -(e1 + e2)};
}

double line_to_line(const ThreePhaseSource& src, double t, int i, int j) {
    if (i < 1 || i > 3 || j < 1 || j > 3) {
        throw InputError("phase index out of range: (" + std::to_string(i) + ", " +
                         std::to_string(j) + ")");
    }
    if (i == j) throw InputError("line_to_line needs two distinct phases");
    const Phases e = emf_potentials(src, t);
    return e[static_cast<std::size_t>(i - 1)] - e[static_cast<std::size_t>(j - 1)];
}

}  // namespace ucond
