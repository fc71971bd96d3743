#include "ucond/boost.hpp"

#include <algorithm>
#include <cmath>

#include "ucond/errors.hpp"

namespace ucond {

namespace {

// Edge comparisons on the stage clock tolerate accumulated rounding.
double edge_eps(const BoostParams& p) { return 1e-6 * p.period(); }

void start_period(const BoostParams& p, BoostState& s, double v_in) {
    s.on_end = s.period_start +
               boost_period_duty(p, v_in, s.i_l, s.v_out, boost_target(p, s)) * p.period();
    s.peak_tripped = false;
}

}  // namespace

void validate(const BoostParams& p) {
    if (!(p.l_boost > 0.0)) throw ConfigError("boost.l must be > 0");
    if (!(p.c_out > 0.0)) throw ConfigError("boost.c_out must be > 0");
    if (!(p.f_sw > 0.0)) throw ConfigError("boost.f_sw must be > 0");
    if (!(p.v_out_set >= 2.0 && p.v_out_set <= 5.5)) {
        throw ConfigError("boost.v_out_set must lie in [2.0, 5.5] V");
    }
    if (!(p.v_in_min > 0.0)) throw ConfigError("boost.v_in_min must be > 0");
    if (!(p.i_quiescent >= 0.0)) throw ConfigError("boost.i_quiescent must be >= 0");
    if (!(p.r_switch >= 0.0)) throw ConfigError("boost.r_switch must be >= 0");
    if (!(p.r_diode_eq >= 0.0)) throw ConfigError("boost.r_diode_eq must be >= 0");
    if (!(p.i_peak > 0.0)) throw ConfigError("boost.i_peak must be > 0");
    if (!(p.duty_gain >= 0.0)) throw ConfigError("boost.duty_gain must be >= 0");
    if (!(p.soft_start >= 0.0)) throw ConfigError("boost.soft_start must be >= 0");
    if (!(p.band() >= 0.0 && p.band() < p.v_out_set)) throw ConfigError("boost.v_band out of range");
}

double boost_duty(const BoostParams& p, double v_in, double i_l) {
    const double ideal = 1.0 - v_in / p.v_out_set;
    const double d0 = std::clamp(ideal, 0.0, 0.9);
    const double drop = std::max(i_l, 0.0) * (d0 * p.r_switch + (1.0 - d0) * p.r_diode_eq);
    return std::clamp(1.0 - (v_in - drop) / p.v_out_set, 0.0, 0.9);
}

double boost_period_duty(const BoostParams& p, double v_in, double i_l, double v_out,
                         double v_target) {
    const double err = std::max(v_target - p.band() - v_out, 0.0) / p.v_out_set;
    return std::clamp(boost_duty(p, v_in, i_l) + p.duty_gain * err, 0.0, 0.9);
}

double boost_target(const BoostParams& p, const BoostState& s) {
    if (p.soft_start <= 0.0 || !s.ref_armed) return p.v_out_set;
    return std::min(s.v_ref, p.v_out_set);
}

void boost_control(const BoostParams& p, BoostState& s, double v_in) {
    if (v_in < p.v_in_min) {
        s.mode = BoostMode::Undervoltage;
        s.switch_on = false;
        s.ref_armed = false;
        return;
    }
    if (s.mode == BoostMode::Undervoltage) s.mode = BoostMode::Idle;
    if (!s.ref_armed) {
        s.ref_armed = true;
        s.v_ref = std::max(s.v_out, 0.0);
    }

    const double target = boost_target(p, s);
    const double band = p.band();
    if (s.mode == BoostMode::Switching && s.v_out > target + band) {
        s.mode = BoostMode::Idle;
    } else if (s.mode != BoostMode::Switching && s.v_out < target - band) {
        s.mode = BoostMode::Switching;
        s.period_start = s.clock;
        start_period(p, s, v_in);
    }
    if (s.mode != BoostMode::Switching) {
        s.switch_on = false;
        return;
    }

    const double eps = edge_eps(p);
    if (s.clock >= s.period_start + p.period() - eps) {
        const double periods = std::floor((s.clock - s.period_start + eps) / p.period());
        s.period_start += periods * p.period();
        start_period(p, s, v_in);
    }
    if (s.i_l >= p.i_peak) s.peak_tripped = true;
    s.switch_on = !s.peak_tripped && s.clock < s.on_end - eps;
}

double boost_next_edge(const BoostParams& p, const BoostState& s) {
    if (s.mode != BoostMode::Switching) return std::numeric_limits<double>::infinity();
    if (s.switch_on) return s.on_end;
    return s.period_start + p.period();
}

BoostCompanion boost_companion(const BoostParams& p, const BoostState& s, double dt, double v_ab0) {
    BoostCompanion c;
    if (!s.switch_on && !s.diode_conducting) return c;
    c.connected = true;
    c.to_output = !s.switch_on;
    c.r = s.switch_on ? p.r_switch : p.r_diode_eq;
    const double z = p.l_boost / dt;
    const double den = z + 0.5 * c.r;
    c.g = 0.5 / den;
    c.j = (s.i_l * (z - 0.5 * c.r) + 0.5 * v_ab0) / den;
    c.g_avg = 0.5 * c.g;
    c.j_avg = 0.5 * (c.j + s.i_l);
    return c;
}

double boost_quiescent_current(const BoostParams& p, const BoostState& s, double v_in) {
    if (s.mode != BoostMode::Undervoltage) return p.i_quiescent;
    return p.i_quiescent * std::clamp(v_in / p.v_in_min, 0.0, 1.0);
}

void boost_commit(const BoostParams& p, BoostState& s, double v_in, double i_l_new, double i_l_avg,
                  double v_out_new, double r_load, double dt) {
    const double r = s.switch_on ? p.r_switch : p.r_diode_eq;
    const double i_q = boost_quiescent_current(p, s, v_in);
    s.energy.in += v_in * (i_l_avg + i_q) * dt;
    s.energy.out += v_out_new * v_out_new / r_load * dt;
    s.energy.conduction += i_l_avg * i_l_avg * r * dt;
    s.energy.quiescent += v_in * i_q * dt;
    if (s.mode == BoostMode::Switching) s.time_switching += dt;
    if (s.switch_on) s.time_on += dt;
    s.i_l = i_l_new;
    s.v_out = v_out_new;
    s.clock += dt;
    if (s.ref_armed && p.soft_start > 0.0 && s.v_ref < p.v_out_set) {
        s.v_ref = std::min(s.v_ref + p.v_out_set / p.soft_start * dt, p.v_out_set);
    }
}

BoostState boost_step(const BoostParams& p, const BoostState& s, double v_in, double r_load,
                      double dt) {
    if (!(r_load > 0.0)) throw InputError("boost_step: r_load must be > 0");
    if (!(dt > 0.0)) throw InputError("boost_step: dt must be > 0");

    BoostState ns = s;
    boost_control(p, ns, v_in);

    const double cdt = p.c_out / dt;
    const double a = cdt + 1.0 / r_load;
    double i1 = 0.0;
    double i_avg = 0.0;
    double v1 = 0.0;
    if (ns.switch_on) {
        const BoostCompanion c = boost_companion(p, ns, dt, v_in);
        i1 = c.g * v_in + c.j;
        i_avg = c.g_avg * v_in + c.j_avg;
        v1 = cdt * s.v_out / a;
        ns.diode_conducting = false;
    } else {
        // Try the diode path; fall back to blocking when it would reverse.
        BoostState trial = ns;
        trial.diode_conducting = true;
        const BoostCompanion c = boost_companion(p, trial, dt, v_in - s.v_out);
        v1 = (cdt * s.v_out + c.g_avg * v_in + c.j_avg) / (a + c.g_avg);
        i1 = c.g * (v_in - v1) + c.j;
        if (i1 > 0.0) {
            ns.diode_conducting = true;
            i_avg = c.g_avg * (v_in - v1) + c.j_avg;
        } else {
            ns.diode_conducting = false;
            i1 = 0.0;
            v1 = cdt * s.v_out / a;
        }
    }
    boost_commit(p, ns, v_in, i1, i_avg, v1, r_load, dt);
    return ns;
}

double boost_efficiency(const BoostParams& p, const BoostWindow& w) {
    if (w.duration < 100.0 * p.period() * (1.0 - 1e-9)) {
        throw MeasurementError("boost efficiency window shorter than 100 switching periods");
    }
    const double e_in = w.end.in - w.begin.in;
    if (!(e_in > 0.0)) throw MeasurementError("boost efficiency undefined: no input energy");
    const double e_net = e_in - (w.stored_end - w.stored_begin);
    if (!(e_net > 0.0)) throw MeasurementError("boost efficiency undefined: input went into storage");
    return (w.end.out - w.begin.out) / e_net;
}

}  // namespace ucond
