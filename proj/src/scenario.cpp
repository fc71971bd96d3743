#include "ucond/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "ucond/errors.hpp"

namespace ucond {

namespace {

using Json = nlohmann::json;

struct KeyEntry {
    std::string_view name;
    std::function<double(const Scenario&)> get;
    std::function<void(Scenario&, double)> set;
    bool boolean = false;
};

template <class Access>
KeyEntry real_key(std::string_view name, Access access) {
    return {name,
            [access](const Scenario& s) { return access(const_cast<Scenario&>(s)); },
            [access](Scenario& s, double v) { access(s) = v; },
            false};
}

template <class Access>
KeyEntry bool_key(std::string_view name, Access access) {
    return {name,
            [access](const Scenario& s) { return access(const_cast<Scenario&>(s)) ? 1.0 : 0.0; },
            [access](Scenario& s, double v) { access(s) = v != 0.0; },
            true};
}

void set_all_switches(Scenario& s, double SwitchModel::*field, double v) {
    for (SwitchModel& sw : s.rectifier.switches) sw.*field = v;
}

KeyEntry switch_key(std::string_view name, double SwitchModel::*field) {
    return {name,
            [field](const Scenario& s) { return s.rectifier.switches[0].*field; },
            [field](Scenario& s, double v) { set_all_switches(s, field, v); },
            false};
}

const std::vector<KeyEntry>& key_table() {
    static const std::vector<KeyEntry> table = [] {
        std::vector<KeyEntry> t;
        t.push_back(real_key("source.v_ll_peak", [](Scenario& s) -> double& { return s.rectifier.source.v_ll_peak; }));
        t.push_back(real_key("source.freq", [](Scenario& s) -> double& { return s.rectifier.source.freq; }));
        t.push_back(real_key("source.r_phase", [](Scenario& s) -> double& { return s.rectifier.source.r_phase; }));
        t.push_back(real_key("source.l_phase", [](Scenario& s) -> double& { return s.rectifier.source.l_phase; }));
        t.push_back(real_key("source.phase0", [](Scenario& s) -> double& { return s.rectifier.source.phase0; }));

        t.push_back(switch_key("switch.r_on", &SwitchModel::r_on));
        t.push_back(switch_key("switch.r_off", &SwitchModel::r_off));
        t.push_back(switch_key("switch.v_th", &SwitchModel::v_th));
        t.push_back(switch_key("switch.body_vf", &SwitchModel::body_vf));
        t.push_back(switch_key("switch.body_rd", &SwitchModel::body_rd));

        t.push_back(real_key("rectifier.c_vdda", [](Scenario& s) -> double& { return s.rectifier.c_vdda; }));
        t.push_back(real_key("rectifier.c_out", [](Scenario& s) -> double& { return s.rectifier.c_out; }));

        t.push_back(real_key("load.r_load", [](Scenario& s) -> double& { return s.rectifier.r_load; }));
        t.push_back({"load.on_rail",
                     [](const Scenario& s) { return s.rectifier.load == LoadPlacement::Rail ? 1.0 : 0.0; },
                     [](Scenario& s, double v) {
                         s.rectifier.load = v != 0.0 ? LoadPlacement::Rail : LoadPlacement::GndcSide;
                     },
                     true});

        t.push_back(real_key("comparator.v_supply_min", [](Scenario& s) -> double& { return s.control.comparators.v_supply_min; }));
        t.push_back(real_key("comparator.hysteresis", [](Scenario& s) -> double& { return s.control.comparators.hysteresis; }));
        t.push_back(real_key("comparator.prop_delay", [](Scenario& s) -> double& { return s.control.comparators.prop_delay; }));

        t.push_back(real_key("startup.c1", [](Scenario& s) -> double& { return s.control.startup.c1; }));
        t.push_back(real_key("startup.r_leak", [](Scenario& s) -> double& { return s.control.startup.r_leak; }));
        t.push_back(real_key("startup.i_charge", [](Scenario& s) -> double& { return s.control.startup.i_charge; }));
        t.push_back(real_key("startup.v_th_m4", [](Scenario& s) -> double& { return s.control.startup.v_th_m4; }));
        t.push_back(real_key("startup.u12_min", [](Scenario& s) -> double& { return s.control.startup.u12_min; }));
        t.push_back(real_key("startup.latch_tol", [](Scenario& s) -> double& { return s.control.startup.latch_tol; }));

        t.push_back(real_key("reference.i_target", [](Scenario& s) -> double& { return s.control.reference.i_ref_target; }));
        t.push_back(real_key("reference.tau", [](Scenario& s) -> double& { return s.control.reference.tau_establish; }));
        t.push_back(real_key("reference.v_enable", [](Scenario& s) -> double& { return s.control.reference.v_enable; }));

        t.push_back(real_key("gndc.ramp_duration", [](Scenario& s) -> double& { return s.control.gndc.ramp_duration; }));
        t.push_back(real_key("gndc.v_hold", [](Scenario& s) -> double& { return s.control.gndc.v_hold; }));
        t.push_back({"gndc.g_max",
                     [](const Scenario& s) { return s.control.gndc.g_max; },
                     [](Scenario& s, double v) {
                         s.control.gndc.g_max = v;
                         s.rectifier.g_max = v;
                     },
                     false});

        t.push_back(real_key("boost.l", [](Scenario& s) -> double& { return s.boost.l_boost; }));
        t.push_back(real_key("boost.c_out", [](Scenario& s) -> double& { return s.boost.c_out; }));
        t.push_back(real_key("boost.f_sw", [](Scenario& s) -> double& { return s.boost.f_sw; }));
        t.push_back(real_key("boost.v_out_set", [](Scenario& s) -> double& { return s.boost.v_out_set; }));
        t.push_back(real_key("boost.v_in_min", [](Scenario& s) -> double& { return s.boost.v_in_min; }));
        t.push_back(real_key("boost.i_quiescent", [](Scenario& s) -> double& { return s.boost.i_quiescent; }));
        t.push_back(real_key("boost.r_switch", [](Scenario& s) -> double& { return s.boost.r_switch; }));
        t.push_back(real_key("boost.r_diode_eq", [](Scenario& s) -> double& { return s.boost.r_diode_eq; }));
        t.push_back(real_key("boost.v_band", [](Scenario& s) -> double& { return s.boost.v_band; }));
        t.push_back(real_key("boost.i_peak", [](Scenario& s) -> double& { return s.boost.i_peak; }));
        t.push_back(real_key("boost.duty_gain", [](Scenario& s) -> double& { return s.boost.duty_gain; }));
        t.push_back(real_key("boost.soft_start", [](Scenario& s) -> double& { return s.boost.soft_start; }));

        t.push_back(real_key("engine.dt", [](Scenario& s) -> double& { return s.engine.dt; }));
        t.push_back(real_key("engine.t_end", [](Scenario& s) -> double& { return s.engine.t_end; }));
        t.push_back(real_key("engine.event_tol", [](Scenario& s) -> double& { return s.engine.event_tol; }));
        t.push_back({"engine.record_decimation",
                     [](const Scenario& s) { return static_cast<double>(s.engine.record_decimation); },
                     [](Scenario& s, double v) {
                         if (v != std::floor(v)) throw ConfigError("engine.record_decimation must be an integer");
                         s.engine.record_decimation = static_cast<int>(v);
                     },
                     false});
        t.push_back({"engine.max_halvings",
                     [](const Scenario& s) { return static_cast<double>(s.engine.max_halvings); },
                     [](Scenario& s, double v) {
                         if (v != std::floor(v)) throw ConfigError("engine.max_halvings must be an integer");
                         s.engine.max_halvings = static_cast<int>(v);
                     },
                     false});

        t.push_back(real_key("engine.di_max", [](Scenario& s) -> double& { return s.engine.di_max; }));

        t.push_back(bool_key("features.startup_circuit", [](Scenario& s) -> bool& { return s.control.startup_enabled; }));
        t.push_back(bool_key("features.gndc_sequencer", [](Scenario& s) -> bool& { return s.control.gndc_sequencer_enabled; }));
        t.push_back({"features.boost",
                     [](const Scenario& s) { return s.boost_enabled ? 1.0 : 0.0; },
                     [](Scenario& s, double v) {
                         s.boost_enabled = v != 0.0;
                         if (is_simulated(s.topology)) {
                             s.topology = s.boost_enabled ? Topology::DualStage : Topology::FullWave;
                         }
                     },
                     true});
        return t;
    }();
    return table;
}

const KeyEntry& find_key(std::string_view key) {
    const auto& table = key_table();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const KeyEntry& e) { return e.name == key; });
    if (it == table.end()) throw ConfigError("unknown scenario key '" + std::string(key) + "'");
    return *it;
}

Topology parse_topology(const std::string& tag) {
    for (const auto& d : describe_topologies()) {
        if (topology_name(d.tag) == tag) return d.tag;
    }
    throw ConfigError("unknown topology '" + tag +
                      "' (expected FULL_WAVE, DUAL_STAGE, QUASI_SINGLE or SINGLE_STAGE)");
}

std::string position_of(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

struct Collected {
    std::optional<Topology> topology;
    std::optional<bool> boost;
};

void apply_tree(Scenario& s, const Json& node, const std::string& prefix, Collected& seen) {
    for (const auto& [name, value] : node.items()) {
        const std::string key = prefix.empty() ? name : prefix + "." + name;
        if (value.is_object()) {
            apply_tree(s, value, key, seen);
            continue;
        }
        if (key == "topology") {
            if (!value.is_string()) throw ConfigError("topology must be a string");
            seen.topology = parse_topology(value.get<std::string>());
            continue;
        }
        const KeyEntry& entry = find_key(key);
        double v = 0.0;
        if (value.is_boolean()) {
            v = value.get<bool>() ? 1.0 : 0.0;
        } else if (value.is_number()) {
            v = value.get<double>();
        } else {
            throw ConfigError("key '" + key + "' expects a " +
                              (entry.boolean ? "boolean" : "number"));
        }
        if (key == "features.boost") {
            seen.boost = v != 0.0;
        } else {
            entry.set(s, v);
        }
    }
}

}  // namespace

void validate(const EngineConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw ConfigError("engine.dt must be > 0");
    if (!(cfg.t_end >= 0.0)) throw ConfigError("engine.t_end must be >= 0");
    if (!(cfg.event_tol > 0.0 && cfg.event_tol <= cfg.dt)) {
        throw ConfigError("engine.event_tol must satisfy 0 < event_tol <= dt");
    }
    if (cfg.record_decimation < 1) throw ConfigError("engine.record_decimation must be >= 1");
    if (cfg.max_halvings < 0) throw ConfigError("engine.max_halvings must be >= 0");
    if (!(cfg.di_max > 0.0)) throw ConfigError("engine.di_max must be > 0");
}

std::string_view topology_name(Topology t) {
    switch (t) {
        case Topology::FullWave: return "FULL_WAVE";
        case Topology::DualStage: return "DUAL_STAGE";
        case Topology::QuasiSingle: return "QUASI_SINGLE";
        case Topology::SingleStage: return "SINGLE_STAGE";
    }
    return "?";
}

bool is_simulated(Topology t) { return t == Topology::FullWave || t == Topology::DualStage; }

const std::vector<TopologyDescriptor>& describe_topologies() {
    static const std::vector<TopologyDescriptor> kList = {
        {Topology::FullWave, "MOSFET full-wave 3-phase rectifier",
         "Six comparator-driven MOSFETs (P1..P3 high side, N1..N3 low side). Rectifies without "
         "threshold but cannot boost or regulate.",
         true},
        {Topology::DualStage, "Dual-stage cascade: active rectifier + boost",
         "Full-wave active rectifier feeding a storage capacitor, followed by an independent "
         "PFM boost regulator. The two stages are decoupled and tuned separately.",
         true},
        {Topology::QuasiSingle, "Quasi-single-stage: rectifier as switch-gear + HF boost chopper",
         "Middle storage capacitor removed; the boost chopper switches at high frequency using "
         "the generator phase inductances. Heavy stress on the chopper, all devices rated for "
         "the output voltage. Descriptor only: not simulated.",
         false},
        {Topology::SingleStage, "Single-stage AC-DC boost rectifier",
         "All six MOSFETs switched well above the generator frequency to rectify and step up "
         "at once. Needs CMOS-leg transition management at high frequency. Descriptor only: "
         "not simulated.",
         false},
    };
    return kList;
}

void validate(const Scenario& s) {
    validate(s.rectifier);
    validate(s.engine);

    const ComparatorBank& cb = s.control.comparators;
    if (!(cb.v_supply_min > 0.0)) throw ConfigError("comparator.v_supply_min must be > 0");
    if (!(cb.hysteresis >= 0.0)) throw ConfigError("comparator.hysteresis must be >= 0");
    if (!(cb.prop_delay >= 0.0)) throw ConfigError("comparator.prop_delay must be >= 0");

    const StartupParams& sp = s.control.startup;
    if (!(sp.c1 > 0.0)) throw ConfigError("startup.c1 must be > 0");
    if (!(sp.r_leak > 0.0)) throw ConfigError("startup.r_leak must be > 0");
    if (!(sp.i_charge >= 0.0)) throw ConfigError("startup.i_charge must be >= 0");
    if (!(sp.v_th_m4 >= 0.0)) throw ConfigError("startup.v_th_m4 must be >= 0");
    if (!(sp.u12_min >= 0.0)) throw ConfigError("startup.u12_min must be >= 0");

    const ReferenceGenerator& rg = s.control.reference;
    if (!(rg.i_ref_target > 0.0)) throw ConfigError("reference.i_target must be > 0");
    if (!(rg.tau_establish > 0.0)) throw ConfigError("reference.tau must be > 0");

    if (!(s.control.gndc.ramp_duration > 0.0)) throw ConfigError("gndc.ramp_duration must be > 0");
    if (!(s.control.gndc.g_max > 0.0)) throw ConfigError("gndc.g_max must be > 0");
    if (!(s.control.gndc.v_hold >= 0.0)) throw ConfigError("gndc.v_hold must be >= 0");

    if (s.boost_enabled) {
        validate(s.boost);
        if (s.engine.dt > s.boost.period() / 20.0 * (1.0 + 1e-12)) {
            throw ConfigError("engine.dt must not exceed 1/(20 f_sw) when the boost stage is enabled");
        }
    }
    if (s.topology == Topology::FullWave && s.boost_enabled) {
        throw ConfigError("topology FULL_WAVE conflicts with features.boost = true");
    }
    if (s.topology == Topology::DualStage && !s.boost_enabled) {
        throw ConfigError("topology DUAL_STAGE requires features.boost = true");
    }
}

Scenario default_scenario() {
    Scenario s;
    s.control.gndc.ramp_duration = 10.0 * s.rectifier.source.period();
    return s;
}

Scenario parse_scenario(std::string_view text) {
    Scenario s = default_scenario();
    const bool blank = std::all_of(text.begin(), text.end(),
                                   [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    if (blank) return s;

    Json doc;
    try {
        doc = Json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const Json::parse_error& e) {
        const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        throw ConfigError("scenario parse error at " + position_of(text, byte) + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("scenario root must be a JSON object");

    Collected seen;
    const double default_freq = s.rectifier.source.freq;
    const bool ramp_given =
        (doc.contains("gndc") && doc["gndc"].is_object() && doc["gndc"].contains("ramp_duration")) ||
        doc.contains("gndc.ramp_duration");
    apply_tree(s, doc, "", seen);

    // The ramp default follows the source period unless set explicitly.
    if (!ramp_given && s.rectifier.source.freq != default_freq) {
        s.control.gndc.ramp_duration = 10.0 * s.rectifier.source.period();
    }
    if (seen.topology) s.topology = *seen.topology;
    if (seen.boost) {
        s.boost_enabled = *seen.boost;
    } else {
        s.boost_enabled = s.topology == Topology::DualStage;
    }
    validate(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

void set_key(Scenario& s, std::string_view key, double value) {
    if (!std::isfinite(value)) throw ConfigError("value for '" + std::string(key) + "' must be finite");
    find_key(key).set(s, value);
}

double get_key(const Scenario& s, std::string_view key) { return find_key(key).get(s); }

std::vector<std::string> scenario_keys() {
    std::vector<std::string> out;
    for (const auto& e : key_table()) out.emplace_back(e.name);
    out.emplace_back("topology");
    return out;
}

}  // namespace ucond
