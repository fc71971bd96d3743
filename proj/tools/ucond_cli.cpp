// Command-line front end over the C API.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ucond/ucond.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRun = 1;
constexpr int kExitConfig = 2;

struct ScenarioDeleter {
    void operator()(ucond_scenario* s) const { ucond_scenario_free(s); }
};
struct ResultDeleter {
    void operator()(ucond_result* r) const { ucond_result_free(r); }
};
struct SweepDeleter {
    void operator()(ucond_sweep* s) const { ucond_sweep_free(s); }
};
using ScenarioPtr = std::unique_ptr<ucond_scenario, ScenarioDeleter>;
using ResultPtr = std::unique_ptr<ucond_result, ResultDeleter>;
using SweepPtr = std::unique_ptr<ucond_sweep, SweepDeleter>;

int report(ucond_status st, const std::string& what) {
    std::cerr << "ucond: " << what << ": " << ucond_status_name(st) << ": " << ucond_last_error() << '\n';
    return ucond_exit_code(st);
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// key=value overrides; value is a number, true/false, or a topology name.
int apply_overrides(ucond_scenario* s, const std::vector<std::string>& sets) {
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::cerr << "ucond: --set expects key=value, got '" << kv << "'\n";
            return kExitConfig;
        }
        const std::string key = kv.substr(0, eq);
        const std::string text = kv.substr(eq + 1);
        ucond_status st = UCOND_OK;
        if (key == "topology") {
            st = ucond_scenario_set_topology(s, text.c_str());
        } else if (text == "true" || text == "false") {
            st = ucond_scenario_set(s, key.c_str(), text == "true" ? 1.0 : 0.0);
        } else {
            double v = 0.0;
            std::size_t used = 0;
            try {
                v = std::stod(text, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != text.size() || text.empty()) {
                std::cerr << "ucond: --set " << key << ": '" << text << "' is not a number\n";
                return kExitConfig;
            }
            st = ucond_scenario_set(s, key.c_str(), v);
        }
        if (st != UCOND_OK) return report(st, "--set " + key);
    }
    return kExitOk;
}

int load(const std::string& path, const std::vector<std::string>& sets, ScenarioPtr& out) {
    ucond_scenario* raw = nullptr;
    ucond_status st = ucond_scenario_load(path.c_str(), &raw);
    if (st != UCOND_OK) return report(st, path);
    out.reset(raw);
    if (int rc = apply_overrides(out.get(), sets); rc != kExitOk) return rc;
    st = ucond_scenario_validate(out.get());
    if (st != UCOND_OK) return report(st, path);
    return kExitOk;
}

int ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        std::cerr << "ucond: cannot create '" << dir << "': " << ec.message() << '\n';
        return kExitRun;
    }
    return kExitOk;
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (item.find_first_not_of(" \t", used) != std::string::npos) {
            throw std::invalid_argument("bad number '" + item + "'");
        }
        out.push_back(v);
    }
    return out;
}

int cmd_run(const std::string& file, const std::vector<std::string>& sets, const std::string& out_dir,
            const std::string& channels) {
    ScenarioPtr sc;
    if (int rc = load(file, sets, sc); rc != kExitOk) return rc;

    ucond_result* raw = nullptr;
    const ucond_status st = ucond_run(sc.get(), &raw);
    if (st != UCOND_OK) return report(st, "run");
    ResultPtr res(raw);

    for (size_t i = 0; i < ucond_result_metric_count(res.get()); ++i) {
        const char* name = nullptr;
        double v = 0.0;
        ucond_result_metric_at(res.get(), i, &name, &v);
        std::cout << name << " = " << fmt(v) << '\n';
    }
    for (size_t i = 0; i < ucond_result_event_count(res.get()); ++i) {
        double t = 0.0;
        const char* mode = nullptr;
        ucond_result_event(res.get(), i, &t, &mode);
        std::cout << "event t=" << fmt(t) << " -> " << mode << '\n';
    }
    for (size_t i = 0; i < ucond_result_warning_count(res.get()); ++i) {
        std::cout << "warning: " << ucond_result_warning(res.get(), i) << '\n';
    }

    if (!out_dir.empty()) {
        if (int rc = ensure_dir(out_dir); rc != kExitOk) return rc;
        const std::string trace = (fs::path(out_dir) / "trace.csv").string();
        const std::string summary = (fs::path(out_dir) / "summary.csv").string();
        ucond_status e = ucond_result_export_trace_csv(res.get(), trace.c_str(), channels.c_str());
        if (e != UCOND_OK) return report(e, trace);
        e = ucond_result_export_summary_csv(res.get(), summary.c_str());
        if (e != UCOND_OK) return report(e, summary);
        std::cout << "wrote " << trace << " and " << summary << '\n';
    }

    return kExitOk;
}

int cmd_sweep(const std::string& file, const std::vector<std::string>& sets, const std::string& axis,
              const std::string& values_text, unsigned threads, const std::string& out_dir,
              const std::string& channels) {
    ScenarioPtr sc;
    if (int rc = load(file, sets, sc); rc != kExitOk) return rc;

    std::vector<double> values;
    try {
        values = parse_values(values_text);
    } catch (const std::exception& e) {
        std::cerr << "ucond: --values: " << e.what() << '\n';
        return kExitConfig;
    }
    if (values.empty()) {
        std::cerr << "ucond: --values is empty\n";
        return kExitConfig;
    }
    double probe = 0.0;
    if (ucond_scenario_get(sc.get(), axis.c_str(), &probe) != UCOND_OK) {
        return report(UCOND_E_CONFIG, "--axis " + axis);
    }

    const unsigned flags = out_dir.empty() ? 0u : UCOND_SWEEP_KEEP_TRACES;
    ucond_sweep* raw = nullptr;
    const ucond_status st = ucond_sweep_run(sc.get(), axis.c_str(), values.data(), values.size(), threads,
                                            flags, &raw);
    if (st != UCOND_OK) return report(st, "sweep");
    SweepPtr sw(raw);

    static const char* kShown[] = {"reached_active", "eff_rect", "eff_boost", "eff_cascade", "vdda_mean",
                                   "vout_mean"};
    std::cout << axis;
    for (const char* n : kShown) std::cout << '\t' << n;
    std::cout << '\n';
    bool any_failed = false;
    const size_t rows = ucond_sweep_row_count(sw.get());
    for (size_t r = 0; r < rows; ++r) {
        double v = 0.0;
        ucond_sweep_row_value(sw.get(), r, &v);
        std::cout << fmt(v);
        if (ucond_sweep_row_status(sw.get(), r) != UCOND_OK) {
            any_failed = true;
            std::cout << "\tfailed: " << ucond_sweep_row_error(sw.get(), r) << '\n';
            continue;
        }
        for (const char* n : kShown) {
            double m = 0.0;
            ucond_sweep_metric(sw.get(), r, n, &m);
            std::cout << '\t' << fmt(m);
        }
        std::cout << '\n';
    }

    if (!out_dir.empty()) {
        if (int rc = ensure_dir(out_dir); rc != kExitOk) return rc;
        const std::string table = (fs::path(out_dir) / "sweep.csv").string();
        if (ucond_status e = ucond_sweep_export_csv(sw.get(), table.c_str()); e != UCOND_OK) {
            return report(e, table);
        }
        for (size_t r = 0; r < rows; ++r) {
            if (ucond_sweep_row_status(sw.get(), r) != UCOND_OK) continue;
            const std::string trace = (fs::path(out_dir) / ("trace_" + std::to_string(r) + ".csv")).string();
            if (ucond_status e = ucond_sweep_export_trace_csv(sw.get(), r, trace.c_str(), channels.c_str());
                e != UCOND_OK) {
                return report(e, trace);
            }
        }
        std::cout << "wrote " << table << " and " << rows << " trace file(s)\n";
    }
    return any_failed ? kExitRun : kExitOk;
}

int cmd_describe() {
    for (size_t i = 0; i < ucond_topology_count(); ++i) {
        const char* name = nullptr;
        const char* title = nullptr;
        const char* summary = nullptr;
        int simulated = 0;
        ucond_topology_info(i, &name, &title, &summary, &simulated);
        std::cout << name << (simulated ? "  [simulated]" : "  [descriptor only]") << '\n'
                  << "  " << title << '\n'
                  << "  " << summary << "\n\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Behavioral transient simulator for a self-supplied 3-phase MOSFET rectifier and boost cascade"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ucond_version()));

    std::string file;
    std::string out_dir;
    std::string channels;
    std::vector<std::string> sets;

    auto* run = app.add_subcommand("run", "Simulate one scenario and print its summary");
    run->add_option("scenario", file, "Scenario JSON file")->required();
    run->add_option("--out", out_dir, "Directory for trace.csv and summary.csv");
    run->add_option("--channels", channels, "Comma-separated trace channels to export (default all)");
    run->add_option("--set", sets, "Override a scenario key: key=value (repeatable)");

    std::string axis;
    std::string values;
    unsigned threads = 0;
    auto* sweep = app.add_subcommand("sweep", "Run one simulation per value of a scenario key");
    sweep->add_option("scenario", file, "Scenario JSON file")->required();
    sweep->add_option("--axis", axis, "Scenario key to vary, e.g. source.v_ll_peak")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required();
    sweep->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
    sweep->add_option("--out", out_dir, "Directory for sweep.csv and one trace CSV per row");
    sweep->add_option("--channels", channels, "Comma-separated trace channels to export (default all)");
    sweep->add_option("--set", sets, "Override a scenario key: key=value (repeatable)");

    auto* describe = app.add_subcommand("describe-topologies", "List the converter topologies");

    auto* keys = app.add_subcommand("keys", "List scenario keys with their default values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    if (*run) return cmd_run(file, sets, out_dir, channels);
    if (*sweep) return cmd_sweep(file, sets, axis, values, threads, out_dir, channels);
    if (*describe) return cmd_describe();
    if (*keys) {
        ucond_scenario* raw = nullptr;
        if (ucond_status st = ucond_scenario_default(&raw); st != UCOND_OK) return report(st, "defaults");
        ScenarioPtr sc(raw);
        std::cout << "topology = " << ucond_scenario_topology(sc.get()) << '\n';
        for (size_t i = 0; i < ucond_scenario_key_count(); ++i) {
            const char* k = ucond_scenario_key_name(i);
            double v = 0.0;
            ucond_scenario_get(sc.get(), k, &v);
            std::cout << k << " = " << fmt(v) << '\n';
        }
        return kExitOk;
    }
    return kExitConfig;
}
