#include "ucond/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ucond/control.hpp"
#include "ucond/power_stage.hpp"

namespace ucond {

namespace {

const std::vector<std::string>& channel_names() {
    static const std::vector<std::string> kNames = {
        "e1", "e2", "e3", "i1", "i2", "i3", "x1", "x2", "x3",
        "v_dda", "v_cout", "v_gndc", "v_out", "i_l", "boost_mode", "mode",
        "g_P1", "g_P2", "g_P3", "g_N1", "g_N2", "g_N3", "g_gndc",
        "i_ref", "phi_c", "v_c1",
        "e_source", "e_rect_in", "e_load", "e_port", "e_loss_phase", "e_loss_switch", "e_loss_gndc",
        "e_loss_boost", "e_stored", "e_residual", "w_rect", "w_boost"};
    return kNames;
}

constexpr std::uint32_t kBoostDiodeBit = 1u << 20;

struct Stepped {
    PowerStageState ps;
    BoostState bs;
};

class Runner {
public:
    explicit Runner(const Scenario& sc)
        : sc_(sc), net_(sc.rectifier), ctrl_(params_for(sc), sc.source()) {
        if (sc_.boost_enabled) net_.load = LoadPlacement::BoostOutput;
        trace_ = Trace(channel_names());
        trace_.source_period = sc_.source().period();
        trace_.has_boost = sc_.boost_enabled;
        trace_.boost_period = sc_.boost.period();
    }

    RunResult execute() {
        const EngineConfig& cfg = sc_.engine;
        if (cfg.t_end <= 0.0) return finish();

        record(0.0, Gates{}, 0.0);
        std::uint64_t steps = 0;
        const double min_h = 1e-6 * cfg.dt;
        while (t_ < cfg.t_end - min_h) {
            if (sc_.boost_enabled) boost_control(sc_.boost, bs_, ps_.v_cout);
            const Gates gates = ctrl_.decide(t_, ps_);
            note_mode(t_);

            double h = std::min(cfg.dt, cfg.t_end - t_);
            if (const auto e = ctrl_.next_edge(t_); e && *e - t_ > min_h) h = std::min(h, *e - t_);
            if (sc_.boost_enabled) {
                const double e = boost_next_edge(sc_.boost, bs_) - bs_.clock;
                if (e > min_h) h = std::min(h, e);
            }

            Stepped next = step_controlled(gates, h);
            ps_ = next.ps;
            bs_ = next.bs;
            t_ += h_taken_;
            ctrl_.advance(t_, h_taken_, ps_);
            note_mode(t_);

            ++steps;
            if (steps % static_cast<std::uint64_t>(cfg.record_decimation) == 0 ||
                t_ >= cfg.t_end - min_h) {
                record(t_, gates, ctrl_.gndc_conductance(t_));
            }
        }
        return finish();
    }

private:
    static ControlParams params_for(const Scenario& sc) {
        ControlParams p = sc.control;
        p.gndc.g_max = sc.rectifier.g_max;
        return p;
    }

    StepInputs inputs(const Gates& gates, double t_next) const {
        StepInputs in;
        in.emf = emf_potentials(sc_.source(), t_next);
        in.gates = gates;
        in.g_gndc = ctrl_.gndc_conductance(t_next);
        in.boost = sc_.boost_enabled ? &sc_.boost : nullptr;
        return in;
    }

    Stepped attempt(const Gates& gates, double h) const {
        Stepped out{ps_, bs_};
        out.ps = step_network(net_, ps_, inputs(gates, t_ + h), h,
                              sc_.boost_enabled ? &out.bs : nullptr);
        return out;
    }

    std::uint32_t signature(double t, const Stepped& s) const {
        std::uint32_t sig = ctrl_.signature(t, s.ps);
        if (sc_.boost_enabled && s.bs.diode_conducting) sig |= kBoostDiodeBit;
        return sig;
    }

    // Takes a step of at most h, shortened to land just past the first
    // change of any discrete decision.
    Stepped step_localized(const Gates& gates, double h) {
        const Stepped start{ps_, bs_};
        const std::uint32_t sig0 = signature(t_, start);
        Stepped full = attempt(gates, h);
        h_taken_ = h;
        if (signature(t_ + h, full) == sig0 || h <= sc_.engine.event_tol) return full;

        const double hit = locate_event(
            0.0, h,
            [&](double tau) {
                if (tau <= 0.0) return false;
                if (tau == h) return true;
                return signature(t_ + tau, attempt(gates, tau)) != sig0;
            },
            sc_.engine.event_tol);
        if (hit >= h) return full;
        h_taken_ = hit;
        return attempt(gates, hit);
    }

    Stepped step_with_retry(const Gates& gates, double h) {
        for (int k = 0;; ++k) {
            try {
                return step_localized(gates, h);
            } catch (const StepError& e) {
                if (k >= sc_.engine.max_halvings) fail(e.what());
                h *= 0.5;
            } catch (const SingularSystemError& e) {
                fail(e.what());
            }
        }
    }

    double current_jump(const Stepped& s) const {
        double d = 0.0;
        for (std::size_t k = 0; k < 3; ++k) d = std::max(d, std::abs(s.ps.i_phase[k] - ps_.i_phase[k]));
        if (sc_.boost_enabled) d = std::max(d, std::abs(s.bs.i_l - bs_.i_l));
        return d;
    }

    // Backward Euler damps an inductor by L*di^2/2 per step; fast
    // commutations get finer steps so that stays negligible.
    Stepped step_controlled(const Gates& gates, double h) {
        for (int k = 0;; ++k) {
            Stepped s = step_with_retry(gates, h);
            if (k >= sc_.engine.max_halvings || current_jump(s) <= sc_.engine.di_max) return s;
            h = 0.5 * h_taken_;
        }
    }

    [[noreturn]] void fail(const std::string& why) const {
        std::ostringstream msg;
        msg.precision(9);
        msg << "step failed at t=" << t_ << " s: " << why << " (mode " << mode_name(ctrl_.mode())
            << ", v_dda=" << ps_.v_dda << " V, v_cout=" << ps_.v_cout << " V";
        if (sc_.boost_enabled) msg << ", v_out=" << bs_.v_out << " V, i_l=" << bs_.i_l << " A";
        msg << ")";
        throw RunError(msg.str());
    }

    void note_mode(double t) {
        const ControlMode m = ctrl_.mode();
        if (trace_.mode_events.empty() ? m != ControlMode::Idle : trace_.mode_events.back().mode != m) {
            trace_.mode_events.push_back({t, m});
        }
    }

    double stored() const {
        double w = stored_energy(net_, ps_);
        if (sc_.boost_enabled) w += bs_.stored_energy(sc_.boost);
        return w;
    }

    void record(double t, const Gates& gates, double g_gndc) {
        const EnergyLedger& e = ps_.energy;
        const Phases emf = emf_potentials(sc_.source(), t);
        const double w = stored();
        const double residual = e.source - e.load - e.phase_loss - e.switch_loss - e.gndc_loss -
                                e.boost_loss - w;
        row_.assign({emf[0], emf[1], emf[2], ps_.i_phase[0], ps_.i_phase[1], ps_.i_phase[2],
                     ps_.phase_potential(0), ps_.phase_potential(1), ps_.phase_potential(2),
                     ps_.v_dda, ps_.v_cout, ps_.node_v[kGndc],
                     sc_.boost_enabled ? bs_.v_out : 0.0, sc_.boost_enabled ? bs_.i_l : 0.0,
                     static_cast<double>(bs_.mode), static_cast<double>(ctrl_.mode()),
                     gates[0] ? 1.0 : 0.0, gates[1] ? 1.0 : 0.0, gates[2] ? 1.0 : 0.0,
                     gates[3] ? 1.0 : 0.0, gates[4] ? 1.0 : 0.0, gates[5] ? 1.0 : 0.0, g_gndc,
                     ctrl_.reference().i_ref, ctrl_.startup().phi_c, ctrl_.startup().v_c1,
                     e.source, e.rect_in, e.load, e.port, e.phase_loss, e.switch_loss, e.gndc_loss,
                     e.boost_loss, w, residual, rectifier_stored_energy(net_, ps_),
                     sc_.boost_enabled ? bs_.stored_energy(sc_.boost) : 0.0});
        trace_.append(t, row_);
    }

    RunResult finish() {
        RunResult out;
        RunSummary& s = out.summary;
        if (trace_.size() >= 2) {
            const Window w = align_window(trace_, steady_state_window(trace_));
            try {
                s = efficiency_report(trace_, w);
            } catch (const MeasurementError& e) {
                s.window = w;
                s.eff_rect = s.eff_boost = s.eff_cascade = std::numeric_limits<double>::quiet_NaN();
                s.warnings.emplace_back(e.what());
            }
        } else {
            s.eff_rect = s.eff_boost = s.eff_cascade = std::numeric_limits<double>::quiet_NaN();
        }
        s.reached_active = ctrl_.mode() == ControlMode::Active;
        s.active_at = ctrl_.active_since();
        try {
            s.startup_duration = startup_duration(trace_);
        } catch (const MeasurementError&) {
            s.startup_duration.reset();
        }
        if (sc_.boost_enabled) s.regulated_at = regulation_time(trace_, sc_.boost.v_out_set);
        out.trace = std::move(trace_);
        return out;
    }

    const Scenario& sc_;
    RectifierNetwork net_;
    Controller ctrl_;
    PowerStageState ps_;
    BoostState bs_;
    Trace trace_;
    double t_ = 0.0;
    double h_taken_ = 0.0;
    std::vector<double> row_;
};

}  // namespace

RunResult run(const Scenario& scenario) {
    if (!is_simulated(scenario.topology)) {
        throw NotImplementedError(
            "topology " + std::string(topology_name(scenario.topology)) +
            " is a descriptor only: its high-frequency CMOS-leg control is out of scope; "
            "simulate FULL_WAVE or DUAL_STAGE");
    }
    validate(scenario);
    Runner runner(scenario);
    return runner.execute();
}

double startup_duration(const Trace& trace) {
    const auto& ev = trace.mode_events;
    const auto sync = std::find_if(ev.begin(), ev.end(),
                                   [](const ModeEvent& e) { return e.mode == ControlMode::SyncStartup; });
    if (sync == ev.end()) throw MeasurementError("start-up circuit never engaged");
    const auto active = std::find_if(sync, ev.end(),
                                     [](const ModeEvent& e) { return e.mode == ControlMode::Active; });
    if (active == ev.end()) throw MeasurementError("no SYNC_STARTUP -> ACTIVE transition in trace");
    return active->t - sync->t;
}

}  // namespace ucond
