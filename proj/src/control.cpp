#include "ucond/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ucond {

namespace {

constexpr double kTimeEps = 1e-15;

std::size_t argmax_lowest(const Phases& v) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < 3; ++k) {
        if (v[k] > v[best]) best = k;
    }
    return best;
}

std::size_t argmin_lowest(const Phases& v) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < 3; ++k) {
        if (v[k] < v[best]) best = k;
    }
    return best;
}

}  // namespace

const char* mode_name(ControlMode m) {
    switch (m) {
        case ControlMode::Idle: return "IDLE";
        case ControlMode::SyncStartup: return "SYNC_STARTUP";
        case ControlMode::Active: return "ACTIVE";
    }
    return "?";
}

Gates comparator_commands(const ComparatorBank& bank, double v_dda, const Phases& phase_v,
                          std::pair<double, double> rails, const Gates& previous) {
    Gates out{};
    if (v_dda < bank.v_supply_min) return out;

    const std::size_t hi = argmax_lowest(phase_v);
    const std::size_t lo = argmin_lowest(phase_v);
    // All three equal: nothing to rectify, and one leg must never get both sides.
    if (hi == lo) return out;

    // Turning on is reserved for the extreme phase; a switch already on stays
    // on until its own polarity reverses, so commutation overlaps.
    for (std::size_t k = 0; k < 3; ++k) {
        const double above = phase_v[k] - rails.first;
        const double below = rails.second - phase_v[k];
        out[high_side(k)] = previous[high_side(k)] ? above > -bank.hysteresis
                                                   : (k == hi && above > bank.hysteresis);
        out[low_side(k)] = previous[low_side(k)] ? below > -bank.hysteresis
                                                 : (k == lo && below > bank.hysteresis);
    }
    return out;
}

bool startup_engage_condition(const StartupCircuitState& s, const StartupParams& p,
                              double phi_phase2, const ReferenceGenerator& ref, double u12) {
    return !s.latched_off && !ref.established && (s.phi_c - phi_phase2 > p.v_th_m4) &&
           u12 >= p.u12_min;
}

bool startup_release_condition(double v_dda, const ReferenceGenerator& ref, double v_supply_min) {
    return v_dda >= v_supply_min && ref.established;
}

StartupCircuitState c1_dynamics_step(const StartupCircuitState& s, const StartupParams& p,
                                     const ReferenceGenerator& ref, double v_dda,
                                     const Phases& phase_v, double dt) {
    StartupCircuitState n = s;

    // M7 only conducts once the bias current exists.
    if (ref.established && !s.latched_off && s.v_c1 < v_dda) {
        n.v_c1 = std::min(s.v_c1 + p.i_charge / p.c1 * dt, v_dda);
    }
    // C1 hangs from V_DDA: its floating plate follows the rail minus its own charge.
    n.phi_c = s.phi_c + (v_dda - s.last_v_dda) - (n.v_c1 - s.v_c1);

    if (std::isfinite(p.r_leak) && p.r_leak > 0.0) {
        const double target = (phase_v[0] + phase_v[1] + phase_v[2]) / 3.0;
        n.phi_c += (target - n.phi_c) * -std::expm1(-dt / (p.r_leak * p.c1));
    }
    const auto [lo, hi] = std::minmax({phase_v[0], phase_v[1], phase_v[2]});
    n.phi_c = std::clamp(n.phi_c, lo, hi);
    n.last_v_dda = v_dda;

    if (ref.established && !n.latched_off && n.phi_c <= p.latch_tol) {
        n.latched_off = true;
    }
    if (n.latched_off) n.engaged = false;
    return n;
}

ReferenceGenerator reference_step(const ReferenceGenerator& ref, double v_dda, double dt) {
    ReferenceGenerator n = ref;
    const double a = -std::expm1(-dt / ref.tau_establish);
    if (v_dda >= ref.v_enable) {
        n.i_ref += (ref.i_ref_target - ref.i_ref) * a;
    } else {
        n.i_ref -= ref.i_ref * a;
    }
    n.i_ref = std::min(n.i_ref, ref.i_ref_target);
    n.established = n.i_ref >= 0.9 * ref.i_ref_target;
    return n;
}

double gndc_conductance(const GndcSequencer& seq, double t) {
    if (!seq.activated_at) return 0.0;
    const double since = t - *seq.activated_at - seq.held;
    if (since <= 0.0) return 0.0;
    if (since >= seq.ramp_duration) return seq.g_max;
    return seq.g_max * since / seq.ramp_duration;
}

GndcSequencer gndc_hold_step(const GndcSequencer& seq, double t, double dt, double v_dda) {
    GndcSequencer n = seq;
    if (!seq.activated_at || !(v_dda < seq.v_hold)) return n;
    const double t0 = t - dt;
    if (t0 < *seq.activated_at) return n;
    if (t0 - *seq.activated_at - seq.held >= seq.ramp_duration) return n;
    n.held += dt;
    return n;
}

Controller::Controller(const ControlParams& params, const ThreePhaseSource& source)
    : params_(params), source_(source), ref_(params.reference), gndc_(params.gndc) {
    ref_.i_ref = 0.0;
    ref_.established = false;
    gndc_.activated_at.reset();
}

bool Controller::engage_now(double t, const PowerStageState& ps) const {
    if (!params_.startup_enabled || mode_ == ControlMode::Active) return false;
    const double u12 = line_to_line(source_, t, 1, 2);
    // Once M4 conducts it holds through the rest of the U12 >= 1 V window;
    // otherwise pulling phase 2 down would reopen it at once.
    if (startup_.engaged && !startup_.latched_off && !ref_.established && u12 >= params_.startup.u12_min) {
        return true;
    }
    return startup_engage_condition(startup_, params_.startup, ps.phase_potential(1), ref_, u12);
}

Gates Controller::arbitrate(Gates wanted) {
    // One step of dead time whenever a leg hands over between its two sides.
    for (std::size_t k = 0; k < 3; ++k) {
        const bool hi = wanted[high_side(k)];
        const bool lo = wanted[low_side(k)];
        if ((hi && lo) || (hi && applied_[low_side(k)]) || (lo && applied_[high_side(k)])) {
            wanted[high_side(k)] = false;
            wanted[low_side(k)] = false;
        }
    }
    applied_ = wanted;
    return wanted;
}

Gates Controller::decide(double t, const PowerStageState& ps) {
    Gates wanted{};
    if (mode_ == ControlMode::Active) {
        const Gates raw = comparator_commands(params_.comparators, ps.v_dda,
                                              ps.phase_potentials(), {ps.v_dda, 0.0}, raw_);
        if (raw != raw_) {
            raw_ = raw;
            delay_line_.emplace_back(t + params_.comparators.prop_delay, raw);
        }
        while (delay_line_.size() > 1 && delay_line_[1].first <= t + kTimeEps) {
            delay_line_.pop_front();
        }
        if (!delay_line_.empty() && delay_line_.front().first <= t + kTimeEps) {
            wanted = delay_line_.front().second;
        } else if (!delay_line_.empty()) {
            wanted = Gates{};
        }
        // Loss of supply silences the comparators at once.
        if (ps.v_dda < params_.comparators.v_supply_min) wanted = Gates{};
    } else {
        startup_.engaged = engage_now(t, ps);
        mode_ = startup_.engaged ? ControlMode::SyncStartup : ControlMode::Idle;
        if (startup_.engaged) {
            wanted[static_cast<std::size_t>(SwitchId::P1)] = true;
            wanted[static_cast<std::size_t>(SwitchId::N2)] = true;
        }
    }
    return arbitrate(wanted);
}

void Controller::advance(double t, double dt, const PowerStageState& ps) {
    ref_ = reference_step(ref_, ps.v_dda, dt);
    gndc_ = gndc_hold_step(gndc_, t, dt, ps.v_dda);
    startup_ = c1_dynamics_step(startup_, params_.startup, ref_, ps.v_dda, ps.phase_potentials(), dt);
    if (mode_ != ControlMode::Active &&
        startup_release_condition(ps.v_dda, ref_, params_.comparators.v_supply_min)) {
        mode_ = ControlMode::Active;
        active_since_ = t;
        startup_.engaged = false;
        if (params_.gndc_sequencer_enabled) gndc_.activated_at = t;
    }
}

std::uint32_t Controller::signature(double t, const PowerStageState& ps) const {
    std::uint32_t sig = ps.v_dda >= params_.comparators.v_supply_min ? 1u : 0u;
    if (mode_ == ControlMode::Active) {
        const Gates raw = comparator_commands(params_.comparators, ps.v_dda,
                                              ps.phase_potentials(), {ps.v_dda, 0.0}, raw_);
        for (std::size_t k = 0; k < kSwitchCount; ++k) {
            if (raw[k]) sig |= 1u << (k + 1);
        }
    } else if (engage_now(t, ps)) {
        sig |= 1u << 8;
    }
    for (std::size_t k = 0; k < kSwitchCount; ++k) {
        if (ps.body_conducting[k]) sig |= 1u << (k + 9);
    }
    return sig;
}

std::optional<double> Controller::next_edge(double t) const {
    for (const auto& [when, gates] : delay_line_) {
        if (when > t + kTimeEps) return when;
    }
    return std::nullopt;
}

double Controller::gndc_conductance(double t) const {
    if (!params_.gndc_sequencer_enabled) return gndc_.g_max;
    return ucond::gndc_conductance(gndc_, t);
}

}  // namespace ucond
