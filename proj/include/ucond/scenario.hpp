#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ucond/boost.hpp"
#include "ucond/control.hpp"
#include "ucond/power_stage.hpp"

namespace ucond {

struct EngineConfig {
    double dt = 10e-9;
    double t_end = 2e-3;
    double event_tol = 1e-9;
    int record_decimation = 10;
    int max_halvings = 8;
    /// A step moving any inductor current by more than this is retried at half size.
    double di_max = 5e-3;
};

void validate(const EngineConfig& cfg);

enum class Topology : std::uint8_t { FullWave, DualStage, QuasiSingle, SingleStage };

[[nodiscard]] std::string_view topology_name(Topology t);
[[nodiscard]] bool is_simulated(Topology t);

struct TopologyDescriptor {
    Topology tag;
    std::string_view title;
    std::string_view summary;
    bool simulated;
};

[[nodiscard]] const std::vector<TopologyDescriptor>& describe_topologies();

struct Scenario {
    RectifierNetwork rectifier;
    ControlParams control;
    BoostParams boost;
    EngineConfig engine;
    Topology topology = Topology::FullWave;
    bool boost_enabled = false;

    [[nodiscard]] const ThreePhaseSource& source() const { return rectifier.source; }
};

/// Checks every module invariant. Throws ConfigError naming the failure.
void validate(const Scenario& s);

/// Defaults for every key; rectifier-only, 2 ms, no-load-ish 100 ohm.
[[nodiscard]] Scenario default_scenario();

/// JSON object (nested sections or dotted keys, SI units). Unknown keys are
/// rejected; an empty document yields the defaults. Parse errors carry
/// line and column.
[[nodiscard]] Scenario parse_scenario(std::string_view text);
[[nodiscard]] Scenario load_scenario(const std::string& path);

/// Flat numeric key access ("source.v_ll_peak", "features.boost", ...).
/// Booleans read as 0/1. Throws ConfigError for unknown keys.
void set_key(Scenario& s, std::string_view key, double value);
[[nodiscard]] double get_key(const Scenario& s, std::string_view key);
[[nodiscard]] std::vector<std::string> scenario_keys();

}  // namespace ucond
