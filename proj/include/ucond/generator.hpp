#pragma once

#include <array>

namespace ucond {

using Phases = std::array<double, 3>;

/// Balanced 3-phase micro-generator: sinusoidal EMFs behind a series R-L
/// per phase. v_ll_peak is the peak line-to-line EMF.
struct ThreePhaseSource {
    double v_ll_peak = 3.3;
    double freq = 50e3;
    double r_phase = 1.0;
    double l_phase = 1.0e-6;
    double phase0 = 0.0;

    [[nodiscard]] double period() const { return 1.0 / freq; }
};

/// Throws ConfigError when a field is out of range.
void validate(const ThreePhaseSource& src);

/// Phase EMFs e1..e3 at time t, 120 degrees apart, summing to zero.
[[nodiscard]] Phases emf_potentials(const ThreePhaseSource& src, double t);

/// e_i(t) - e_j(t) for 1-based phase indices. Throws InputError on a bad or
/// degenerate pair.
[[nodiscard]] double line_to_line(const ThreePhaseSource& src, double t, int i, int j);

}  // namespace ucond
