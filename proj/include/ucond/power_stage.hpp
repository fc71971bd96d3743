#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

#include "ucond/boost.hpp"
#include "ucond/generator.hpp"

namespace ucond {

/// Rectifier MOSFET with its intrinsic body diode. The diode is piecewise
/// linear: open below body_vf, body_vf + i * body_rd above.
struct SwitchModel {
    double r_on = 1.0;
    double r_off = 10e6;
    double v_th = 0.5;  ///< gate threshold; informational only
    double body_vf = 0.6;
    double body_rd = 10.0;
};

/// Switch order: P1 P2 P3 (high side, phase -> V_DDA), N1 N2 N3 (low side, GND -> phase).
enum class SwitchId : std::uint8_t { P1 = 0, P2, P3, N1, N2, N3 };
inline constexpr std::size_t kSwitchCount = 6;
using Gates = std::array<bool, kSwitchCount>;

[[nodiscard]] constexpr std::size_t high_side(std::size_t phase) { return phase; }
[[nodiscard]] constexpr std::size_t low_side(std::size_t phase) { return phase + 3; }
[[nodiscard]] std::string_view switch_name(std::size_t index);

/// Where the resistive load is attached.
enum class LoadPlacement : std::uint8_t {
    GndcSide,     ///< across the bulk capacitor, V_DDA -> gndc
    Rail,         ///< directly V_DDA -> GND
    BoostOutput,  ///< boost output -> GND (cascade runs)
};

/// Node order of the assembled system. GND is the reference and not a node.
enum Node : std::uint8_t { kNeutral = 0, kX1, kX2, kX3, kVdda, kGndc, kVout, kNodeCount };
[[nodiscard]] std::string_view node_name(std::size_t node);

struct RectifierNetwork {
    ThreePhaseSource source;
    std::array<SwitchModel, kSwitchCount> switches{};
    double c_vdda = 10e-9;
    double c_out = 1e-6;
    double r_load = 100.0;
    LoadPlacement load = LoadPlacement::GndcSide;
    double g_max = 10.0;
};

void validate(const RectifierNetwork& net);

/// Energy accumulators, joules since t = 0.
struct EnergyLedger {
    double source = 0.0;      ///< delivered by the EMFs
    double rect_in = 0.0;     ///< into the rectifier terminals (source minus winding R and L)
    double load = 0.0;        ///< into r_load, wherever it sits
    double port = 0.0;        ///< into the boost input port (incl. quiescent)
    double phase_loss = 0.0;  ///< phase resistances
    double switch_loss = 0.0; ///< channels, body diodes and r_off leakage
    double gndc_loss = 0.0;   ///< gndc connection conductance
    double boost_loss = 0.0;  ///< boost conduction + quiescent
};

struct PowerStageState {
    Phases i_phase{};  ///< source -> phase node
    double v_dda = 0.0;
    double v_cout = 0.0;  ///< across the bulk capacitor (V_DDA - gndc)
    Gates gate{};
    std::array<bool, kSwitchCount> body_conducting{};
    Eigen::Matrix<double, kNodeCount, 1> node_v = Eigen::Matrix<double, kNodeCount, 1>::Zero();
    EnergyLedger energy;

    [[nodiscard]] double phase_potential(std::size_t k) const { return node_v[kX1 + k]; }
    [[nodiscard]] Phases phase_potentials() const {
        return {node_v[kX1], node_v[kX2], node_v[kX3]};
    }
};

/// Per-step drive of the network. boost is null for rectifier-only runs.
struct StepInputs {
    Phases emf{};
    Gates gates{};
    double g_gndc = 0.0;
    const BoostParams* boost = nullptr;
};

using SystemMatrix = Eigen::Matrix<double, kNodeCount, kNodeCount>;
using SystemVector = Eigen::Matrix<double, kNodeCount, 1>;

struct LinearSystem {
    SystemMatrix g = SystemMatrix::Zero();
    SystemVector rhs = SystemVector::Zero();

    /// Throws SingularSystemError naming the first node without a path.
    [[nodiscard]] SystemVector solve() const;
};

/// Assembles the backward-Euler nodal system for the conduction
/// configuration currently stored in state (body diodes) and boost
/// (switch / diode).
[[nodiscard]] LinearSystem stamp_network(const RectifierNetwork& net, const PowerStageState& state,
                                         const StepInputs& in, double dt,
                                         const BoostState* boost = nullptr);

inline constexpr int kMaxConductionIterations = 50;

/// Advances one backward-Euler step, iterating diode conduction states to a
/// consistent set. Throws StepError when no consistent set is found.
/// boost (when in.boost is set) has its electrical state and energies
/// advanced in place; its control decisions must already be made.
[[nodiscard]] PowerStageState step_network(const RectifierNetwork& net,
                                           const PowerStageState& state, const StepInputs& in,
                                           double dt, BoostState* boost = nullptr);

/// Stored energy in every L and C of the network (boost output excluded).
[[nodiscard]] double stored_energy(const RectifierNetwork& net, const PowerStageState& s);

/// Energy held in the rectifier's own capacitors (c_vdda and c_out).
[[nodiscard]] double rectifier_stored_energy(const RectifierNetwork& net, const PowerStageState& s);

/// Smallest peak line-to-line EMF that can self-start through body diodes
/// alone: two diode drops plus the control supply floor.
[[nodiscard]] double body_diode_rectification_floor(double body_vf, double v_supply_min);

}  // namespace ucond
