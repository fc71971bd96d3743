#pragma once

#include <cstdint>
#include <limits>

namespace ucond {

/// Second-stage boost regulator (MAX1676-class), behavioral PFM model.
struct BoostParams {
    double l_boost = 22e-6;
    double c_out = 47e-6;
    double f_sw = 500e3;
    double v_out_set = 5.0;
    double v_in_min = 0.8;
    double i_quiescent = 16e-6;
    double r_switch = 0.3;
    double r_diode_eq = 0.4;
    /// Half-width of the PFM regulation band; negative selects 1 % of v_out_set.
    double v_band = -1.0;
    /// On-phase is cut short once the inductor reaches this current.
    double i_peak = 1.0;
    /// Extra duty per unit relative output error, so a burst can build current.
    double duty_gain = 10.0;
    /// Time for the internal reference to slew from 0 to v_out_set after the
    /// input comes out of undervoltage. 0 disables the soft start.
    double soft_start = 2e-3;

    [[nodiscard]] double band() const { return v_band < 0.0 ? 0.01 * v_out_set : v_band; }
    [[nodiscard]] double period() const { return 1.0 / f_sw; }
};

void validate(const BoostParams& p);

enum class BoostMode : std::uint8_t { Idle = 0, Switching = 1, Undervoltage = 2 };

/// Energy that crossed each boundary of the boost stage, in joules.
struct BoostEnergy {
    double in = 0.0;          ///< v_in * (i_l + i_q) at the input port
    double out = 0.0;         ///< delivered to the load resistor
    double conduction = 0.0;  ///< i_l^2 through r_switch / r_diode_eq
    double quiescent = 0.0;   ///< v_in * i_q
};

struct BoostState {
    double i_l = 0.0;
    double v_out = 0.0;
    BoostMode mode = BoostMode::Idle;
    bool switch_on = false;
    bool diode_conducting = false;

    // PFM timing, on the stage's own clock.
    double clock = 0.0;
    double period_start = 0.0;
    double on_end = 0.0;
    bool peak_tripped = false;

    // Soft-start reference; armed when the input leaves undervoltage.
    bool ref_armed = false;
    double v_ref = 0.0;

    // Bookkeeping for duty-cycle measurements.
    double time_switching = 0.0;
    double time_on = 0.0;
    BoostEnergy energy;

    [[nodiscard]] double stored_energy(const BoostParams& p) const {
        return 0.5 * p.l_boost * i_l * i_l + 0.5 * p.c_out * v_out * v_out;
    }
};

/// Steady-state duty with conduction losses folded in, clamped to [0, 0.9].
[[nodiscard]] double boost_duty(const BoostParams& p, double v_in, double i_l);

/// Per-period duty: boost_duty plus duty_gain times the relative shortfall
/// of v_out below v_target, clamped to [0, 0.9].
[[nodiscard]] double boost_period_duty(const BoostParams& p, double v_in, double i_l,
                                       double v_out, double v_target);

/// Regulation target in force: the soft-start reference once armed.
[[nodiscard]] double boost_target(const BoostParams& p, const BoostState& s);

/// Decides mode and switch state for the step that starts now.
void boost_control(const BoostParams& p, BoostState& s, double v_in);

/// Time (on the stage clock) of the next scheduled switch edge, or +inf.
[[nodiscard]] double boost_next_edge(const BoostParams& p, const BoostState& s);

/// Trapezoidal companion of the inductor branch for one step:
/// i_l(new) = g * v_ab + j, with v_ab = v_in - v_end at the end of the step
/// and v_end ground while the switch is on, v_out while the diode conducts.
/// The branch carries the step average (i_l + i_l(new)) / 2 = g_avg * v_ab + j_avg,
/// which keeps the inductor free of numerical damping.
struct BoostCompanion {
    bool connected = false;
    bool to_output = false;
    double g = 0.0;
    double j = 0.0;
    double g_avg = 0.0;
    double j_avg = 0.0;
    double r = 0.0;
};

/// v_ab0: branch voltage at the start of the step, for the topology in s.
[[nodiscard]] BoostCompanion boost_companion(const BoostParams& p, const BoostState& s, double dt,
                                             double v_ab0);

/// Input-port standby current. The full i_quiescent is drawn while the
/// regulator is powered; in undervoltage it falls off linearly with v_in so
/// a dead rail is not pulled negative.
[[nodiscard]] double boost_quiescent_current(const BoostParams& p, const BoostState& s, double v_in);

/// Commits a solved step: stores the new electrical state, advances the
/// clock and accumulates energies. i_l_avg is the branch current over the step.
void boost_commit(const BoostParams& p, BoostState& s, double v_in, double i_l_new, double i_l_avg,
                  double v_out_new, double r_load, double dt);

/// Stand-alone step from an ideal input source. Throws InputError when
/// r_load <= 0.
[[nodiscard]] BoostState boost_step(const BoostParams& p, const BoostState& s, double v_in,
                                    double r_load, double dt);

struct BoostWindow {
    BoostEnergy begin;
    BoostEnergy end;
    double duration = 0.0;
    /// L and C energy at the window edges; left at zero the ratio is raw.
    double stored_begin = 0.0;
    double stored_end = 0.0;
};

/// E_out / (E_in - stored-energy change) over the window. Throws
/// MeasurementError on a window shorter than 100 switching periods or with
/// no input energy.
[[nodiscard]] double boost_efficiency(const BoostParams& p, const BoostWindow& w);

}  // namespace ucond
