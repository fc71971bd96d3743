#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <utility>

#include "ucond/generator.hpp"
#include "ucond/power_stage.hpp"

namespace ucond {

/// Self-supplied comparators, one per power switch.
struct ComparatorBank {
    double v_supply_min = 1.0;
    double hysteresis = 5e-3;
    double prop_delay = 100e-9;
};

/// Active-diode decisions for the six switches.
///
/// The high side of the most positive phase turns on once that phase sits
/// more than `hysteresis` above the positive rail, and stays on until it
/// falls `hysteresis` below it; the low side mirrors this against the
/// negative rail. Ties pick the lowest phase index. Everything is off while
/// v_dda < v_supply_min. `previous` supplies the hysteresis memory.
[[nodiscard]] Gates comparator_commands(const ComparatorBank& bank, double v_dda,
                                        const Phases& phase_v, std::pair<double, double> rails,
                                        const Gates& previous = {});

/// Start-up circuit parameters (C1, M4 threshold, leakage, M7 charge current).
struct StartupParams {
    double c1 = 100e-12;
    double r_leak = 100e6;
    double i_charge = 2e-6;
    double v_th_m4 = 0.5;
    double u12_min = 1.0;
    double latch_tol = 1e-3;  ///< phi_c at or below this counts as GND
};

struct StartupCircuitState {
    bool engaged = false;
    bool latched_off = false;
    double v_c1 = 0.0;
    double phi_c = 0.0;
    double last_v_dda = 0.0;
};

struct ReferenceGenerator {
    double i_ref_target = 2e-6;
    double tau_establish = 2e-6;
    double v_enable = 1.0;
    double i_ref = 0.0;
    bool established = false;
};

/// Conductance ramp that connects the bulk capacitor's gndc terminal to GND.
struct GndcSequencer {
    std::optional<double> activated_at;
    double ramp_duration = 200e-6;
    double g_max = 10.0;
    /// The ramp pauses while v_dda is below this level, so charging the
    /// output capacitor never starves the comparators. 0 disables the hold.
    double v_hold = 1.2;
    /// Time spent paused so far; the ramp clock runs t - activated_at - held.
    double held = 0.0;
};

enum class ControlMode : std::uint8_t { Idle = 0, SyncStartup = 1, Active = 2 };

[[nodiscard]] const char* mode_name(ControlMode m);

[[nodiscard]] bool startup_engage_condition(const StartupCircuitState& s, const StartupParams& p,
                                            double phi_phase2, const ReferenceGenerator& ref,
                                            double u12);

[[nodiscard]] bool startup_release_condition(double v_dda, const ReferenceGenerator& ref,
                                             double v_supply_min = 1.0);

/// Advances C1 and phi_c. Before the reference is up, C1 only follows V_DDA
/// and phi_c drifts by leakage toward the mean phase potential; afterwards
/// M7 charges C1 toward V_DDA and the circuit latches off once phi_c hits GND.
[[nodiscard]] StartupCircuitState c1_dynamics_step(const StartupCircuitState& s,
                                                   const StartupParams& p,
                                                   const ReferenceGenerator& ref, double v_dda,
                                                   const Phases& phase_v, double dt);

/// First-order relaxation of I_REF toward its target while V_DDA is above
/// v_enable, decay toward zero otherwise.
[[nodiscard]] ReferenceGenerator reference_step(const ReferenceGenerator& ref, double v_dda,
                                                double dt);

[[nodiscard]] double gndc_conductance(const GndcSequencer& seq, double t);

/// Accumulates hold time for a step of length dt that saw v_dda.
[[nodiscard]] GndcSequencer gndc_hold_step(const GndcSequencer& seq, double t, double dt,
                                           double v_dda);

struct ControlParams {
    ComparatorBank comparators;
    StartupParams startup;
    ReferenceGenerator reference;
    GndcSequencer gndc;
    bool startup_enabled = true;
    bool gndc_sequencer_enabled = true;
};

/// Runtime composition of comparators, start-up circuit, reference and gndc
/// sequencer for one scenario. Owns the comparator propagation-delay line
/// and the dead-time arbitration.
class Controller {
public:
    Controller(const ControlParams& params, const ThreePhaseSource& source);

    /// Gate commands for the step that starts at t.
    Gates decide(double t, const PowerStageState& ps);

    /// Slow dynamics and mode transitions after a step of length dt ending at t.
    void advance(double t, double dt, const PowerStageState& ps);

    /// Discrete decisions as a bit pattern; a change across a step marks an event.
    [[nodiscard]] std::uint32_t signature(double t, const PowerStageState& ps) const;

    /// Next time a delayed comparator command takes effect, if any is pending.
    [[nodiscard]] std::optional<double> next_edge(double t) const;

    [[nodiscard]] double gndc_conductance(double t) const;
    [[nodiscard]] ControlMode mode() const { return mode_; }
    [[nodiscard]] const StartupCircuitState& startup() const { return startup_; }
    [[nodiscard]] const ReferenceGenerator& reference() const { return ref_; }
    [[nodiscard]] std::optional<double> active_since() const { return active_since_; }

private:
    [[nodiscard]] bool engage_now(double t, const PowerStageState& ps) const;
    [[nodiscard]] Gates arbitrate(Gates wanted);

    ControlParams params_;
    ThreePhaseSource source_;
    StartupCircuitState startup_;
    ReferenceGenerator ref_;
    GndcSequencer gndc_;
    ControlMode mode_ = ControlMode::Idle;
    std::optional<double> active_since_;

    Gates raw_{};
    Gates applied_{};
    std::deque<std::pair<double, Gates>> delay_line_;
};

}  // namespace ucond
