#include "ucond/power_stage.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ucond/errors.hpp"

namespace ucond {

namespace {

constexpr int kGround = -1;
// Phase branches with no R and no L still need a finite impedance.
constexpr double kMinBranchImpedance = 1e-9;
constexpr double kDiodeTolerance = 1e-9;

struct Stamper {
    LinearSystem& sys;

    void conductance(int a, int b, double g) {
        if (a != kGround) sys.g(a, a) += g;
        if (b != kGround) sys.g(b, b) += g;
        if (a != kGround && b != kGround) {
            sys.g(a, b) -= g;
            sys.g(b, a) -= g;
        }
    }
    /// Current source pushing `i` from node a to node b through the source.
    void current(int a, int b, double i) {
        if (a != kGround) sys.rhs[a] -= i;
        if (b != kGround) sys.rhs[b] += i;
    }
};

struct PhaseBranch {
    double g;
    double z;  // L / dt
};

PhaseBranch phase_branch(const ThreePhaseSource& src, double dt) {
    const double z = src.l_phase / dt;
    return {1.0 / std::max(src.r_phase + z, kMinBranchImpedance), z};
}

// Anode / cathode of each switch's body diode (and channel terminals).
std::pair<int, int> switch_terminals(std::size_t index) {
    const int phase_node = static_cast<int>(kX1 + index % 3);
    if (index < 3) return {phase_node, kVdda};
    return {kGround, phase_node};
}

double node_voltage(const SystemVector& v, int node) { return node == kGround ? 0.0 : v[node]; }

// Boost inductor branch voltage at the start of a step, for topology b.
double boost_branch_v0(const PowerStageState& st, const BoostState& b) {
    const auto& v = st.node_v;
    return v[kVdda] - (b.switch_on ? v[kGndc] : v[kVout]);
}

int load_node_a(const RectifierNetwork&) { return kVdda; }

int load_node_b(const RectifierNetwork& net) {
    return net.load == LoadPlacement::GndcSide ? static_cast<int>(kGndc) : kGround;
}

}  // namespace

std::string_view switch_name(std::size_t index) {
    static constexpr std::array<std::string_view, kSwitchCount> kNames = {"P1", "P2", "P3",
                                                                          "N1", "N2", "N3"};
    return kNames.at(index);
}

std::string_view node_name(std::size_t node) {
    static constexpr std::array<std::string_view, kNodeCount> kNames = {
        "neutral", "phase1", "phase2", "phase3", "vdda", "gndc", "vout"};
    return kNames.at(node);
}

void validate(const RectifierNetwork& net) {
    validate(net.source);
    for (std::size_t k = 0; k < kSwitchCount; ++k) {
        const SwitchModel& sw = net.switches[k];
        const std::string name(switch_name(k));
        if (!(sw.r_on > 0.0 && sw.r_off > 100.0 * sw.r_on)) {
            throw ConfigError("switch " + name + ": need 0 < r_on << r_off");
        }
        if (!(sw.body_vf >= 0.0)) throw ConfigError("switch " + name + ": body_vf must be >= 0");
        if (!(sw.body_rd > 0.0)) throw ConfigError("switch " + name + ": body_rd must be > 0");
    }
    if (!(net.c_vdda > 0.0)) throw ConfigError("rectifier.c_vdda must be > 0");
    if (!(net.c_out > 0.0)) throw ConfigError("rectifier.c_out must be > 0");
    if (!(net.r_load > 0.0)) throw ConfigError("load.r_load must be > 0");
    if (!(net.g_max > 0.0)) throw ConfigError("gndc.g_max must be > 0");
}

SystemVector LinearSystem::solve() const {
    for (int n = 0; n < kNodeCount; ++n) {
        if (!(g(n, n) > 0.0)) {
            throw SingularSystemError("floating node '" + std::string(node_name(n)) +
                                      "' has no conductive path");
        }
    }
    // Jacobi row scaling keeps the 1e-7 S leakages and 1e2 S companions
    // on comparable footing for the pivoting LU.
    SystemVector scale = g.diagonal().cwiseInverse();
    const SystemMatrix scaled = scale.asDiagonal() * g;
    Eigen::PartialPivLU<SystemMatrix> lu(scaled);
    const double det = lu.determinant();
    if (!std::isfinite(det) || std::abs(det) < 1e-300) {
        throw SingularSystemError("nodal matrix is singular");
    }
    SystemVector v = lu.solve(scale.asDiagonal() * rhs);
    for (int n = 0; n < kNodeCount; ++n) {
        if (!std::isfinite(v[n])) {
            throw SingularSystemError("non-finite potential at node '" +
                                      std::string(node_name(n)) + "'");
        }
    }
    return v;
}

LinearSystem stamp_network(const RectifierNetwork& net, const PowerStageState& state,
                           const StepInputs& in, double dt, const BoostState* boost) {
    LinearSystem sys;
    Stamper st{sys};

    const PhaseBranch ph = phase_branch(net.source, dt);
    for (std::size_t k = 0; k < 3; ++k) {
        const int x = static_cast<int>(kX1 + k);
        st.conductance(kNeutral, x, ph.g);
        st.current(kNeutral, x, ph.g * (in.emf[k] + ph.z * state.i_phase[k]));
    }

    for (std::size_t k = 0; k < kSwitchCount; ++k) {
        const SwitchModel& sw = net.switches[k];
        const auto [a, c] = switch_terminals(k);
        st.conductance(a, c, in.gates[k] ? 1.0 / sw.r_on : 1.0 / sw.r_off);
        if (state.body_conducting[k]) {
            const double gd = 1.0 / sw.body_rd;
            st.conductance(a, c, gd);
            st.current(c, a, gd * sw.body_vf);
        }
    }

    const double leak = 1.0 / net.switches[0].r_off;
    const double gv = net.c_vdda / dt;
    st.conductance(kVdda, kGround, gv);
    st.current(kGround, kVdda, gv * state.v_dda);

    const double go = net.c_out / dt;
    st.conductance(kVdda, kGndc, go);
    st.current(kGndc, kVdda, go * state.v_cout);
    st.conductance(kGndc, kGround, in.g_gndc + leak);

    if (net.load == LoadPlacement::BoostOutput) {
        st.conductance(kVout, kGndc, 1.0 / net.r_load);
    } else {
        st.conductance(load_node_a(net), load_node_b(net), 1.0 / net.r_load);
    }
    st.conductance(kVout, kGround, leak);

    if (in.boost != nullptr && boost != nullptr) {
        const BoostParams& bp = *in.boost;
        // The boost stage is referenced to gndc, like everything below the rectifier.
        const double gb = bp.c_out / dt;
        st.conductance(kVout, kGndc, gb);
        st.current(kGndc, kVout, gb * boost->v_out);

        if (boost->mode == BoostMode::Undervoltage) {
            st.conductance(kVdda, kGndc, bp.i_quiescent / bp.v_in_min);
        } else {
            st.current(kVdda, kGndc, bp.i_quiescent);
        }
        const BoostCompanion c = boost_companion(bp, *boost, dt, boost_branch_v0(state, *boost));
        if (c.connected) {
            const int end = c.to_output ? static_cast<int>(kVout) : static_cast<int>(kGndc);
            st.conductance(kVdda, end, c.g_avg);
            st.current(kVdda, end, c.j_avg);
        }
    }
    return sys;
}

PowerStageState step_network(const RectifierNetwork& net, const PowerStageState& state,
                             const StepInputs& in, double dt, BoostState* boost) {
    if (!(dt > 0.0)) throw InputError("step_network: dt must be > 0");
    const bool with_boost = in.boost != nullptr && boost != nullptr;

    PowerStageState trial = state;
    trial.gate = in.gates;
    BoostState boost_trial;
    if (with_boost) {
        boost_trial = *boost;
        if (boost_trial.switch_on) boost_trial.diode_conducting = false;
    }

    SystemVector v;
    bool consistent = false;
    for (int iter = 0; iter < kMaxConductionIterations; ++iter) {
        v = stamp_network(net, trial, in, dt, with_boost ? &boost_trial : nullptr).solve();

        // Violation > 0 means the assumed state contradicts the solution.
        std::array<double, kSwitchCount + 1> violation{};
        for (std::size_t k = 0; k < kSwitchCount; ++k) {
            const auto [a, c] = switch_terminals(k);
            const double vac = node_voltage(v, a) - node_voltage(v, c);
            const double vf = net.switches[k].body_vf;
            violation[k] = trial.body_conducting[k] ? (vf - vac) : (vac - vf);
        }
        if (with_boost && !boost_trial.switch_on) {
            BoostState probe = boost_trial;
            probe.diode_conducting = true;
            const BoostCompanion c = boost_companion(*in.boost, probe, dt, boost_branch_v0(state, probe));
            const double i_fwd = c.g * (v[kVdda] - v[kVout]) + c.j;
            violation[kSwitchCount] = boost_trial.diode_conducting ? -i_fwd : i_fwd;
            // Scale to volts so it competes fairly with the body diodes.
            violation[kSwitchCount] /= c.g;
        } else {
            violation[kSwitchCount] = -1.0;
        }

        const auto worst = std::max_element(violation.begin(), violation.end());
        if (*worst <= kDiodeTolerance) {
            consistent = true;
            break;
        }
        auto flip = [&](std::size_t k) {
            if (k < kSwitchCount) {
                trial.body_conducting[k] = !trial.body_conducting[k];
            } else {
                boost_trial.diode_conducting = !boost_trial.diode_conducting;
            }
        };
        if (iter < 10) {
            for (std::size_t k = 0; k < violation.size(); ++k) {
                if (violation[k] > kDiodeTolerance) flip(k);
            }
        } else {
            flip(static_cast<std::size_t>(worst - violation.begin()));
        }
    }
    if (!consistent) {
        throw StepError("diode conduction states did not converge in " +
                        std::to_string(kMaxConductionIterations) + " iterations");
    }

    // Commit the solved step and book the energy that moved during it.
    PowerStageState next = trial;
    next.node_v = v;
    EnergyLedger& e = next.energy;

    const PhaseBranch ph = phase_branch(net.source, dt);
    for (std::size_t k = 0; k < 3; ++k) {
        const double i = ph.g * (v[kNeutral] + in.emf[k] - v[kX1 + k]) + ph.g * ph.z * state.i_phase[k];
        next.i_phase[k] = i;
        e.source += in.emf[k] * i * dt;
        e.rect_in += (v[kX1 + k] - v[kNeutral]) * i * dt;
        e.phase_loss += net.source.r_phase * i * i * dt;
    }
    for (std::size_t k = 0; k < kSwitchCount; ++k) {
        const SwitchModel& sw = net.switches[k];
        const auto [a, c] = switch_terminals(k);
        const double vac = node_voltage(v, a) - node_voltage(v, c);
        const double g_ch = in.gates[k] ? 1.0 / sw.r_on : 1.0 / sw.r_off;
        double p = g_ch * vac * vac;
        if (next.body_conducting[k]) p += (vac - sw.body_vf) / sw.body_rd * vac;
        e.switch_loss += p * dt;
    }
    const double leak = 1.0 / net.switches[0].r_off;
    e.switch_loss += leak * v[kVout] * v[kVout] * dt;
    e.gndc_loss += (in.g_gndc + leak) * v[kGndc] * v[kGndc] * dt;

    next.v_dda = v[kVdda];
    next.v_cout = v[kVdda] - v[kGndc];

    if (net.load == LoadPlacement::BoostOutput) {
        const double vl = v[kVout] - v[kGndc];
        e.load += vl * vl / net.r_load * dt;
    } else {
        const double vl = v[load_node_a(net)] - node_voltage(v, load_node_b(net));
        e.load += vl * vl / net.r_load * dt;
    }

    if (with_boost) {
        const BoostCompanion c = boost_companion(*in.boost, boost_trial, dt, boost_branch_v0(state, boost_trial));
        double i_l = 0.0;
        double i_avg = 0.0;
        if (c.connected) {
            const double v_ab = v[kVdda] - (c.to_output ? v[kVout] : v[kGndc]);
            i_l = c.g * v_ab + c.j;
            i_avg = c.g_avg * v_ab + c.j_avg;
        }
        const BoostEnergy before = boost_trial.energy;
        // The boost load is booked by the network ledger above.
        boost_commit(*in.boost, boost_trial, v[kVdda] - v[kGndc], i_l, i_avg, v[kVout] - v[kGndc],
                     net.r_load, dt);
        const BoostEnergy& after = boost_trial.energy;
        e.port += after.in - before.in;
        e.boost_loss += (after.conduction - before.conduction) + (after.quiescent - before.quiescent);
        *boost = boost_trial;
    }
    return next;
}

double rectifier_stored_energy(const RectifierNetwork& net, const PowerStageState& s) {
    return 0.5 * net.c_vdda * s.v_dda * s.v_dda + 0.5 * net.c_out * s.v_cout * s.v_cout;
}

double stored_energy(const RectifierNetwork& net, const PowerStageState& s) {
    double w = rectifier_stored_energy(net, s);
    for (double i : s.i_phase) w += 0.5 * net.source.l_phase * i * i;
    return w;
}

double body_diode_rectification_floor(double body_vf, double v_supply_min) {
    if (!(body_vf >= 0.0) || !(v_supply_min >= 0.0)) {
        throw InputError("body_diode_rectification_floor: arguments must be >= 0");
    }
    return 2.0 * body_vf + v_supply_min;
}

}  // namespace ucond
