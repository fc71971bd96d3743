// Exercises the shared library through its C header only, plus the CLI.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ucond/ucond.h"

namespace fs = std::filesystem;

namespace {

struct ScenarioHandle {
    ucond_scenario* p = nullptr;
    ~ScenarioHandle() { ucond_scenario_free(p); }
};

struct ResultHandle {
    ucond_result* p = nullptr;
    ~ResultHandle() { ucond_result_free(p); }
};

struct SweepHandle {
    ucond_sweep* p = nullptr;
    ~SweepHandle() { ucond_sweep_free(p); }
};

fs::path workdir() {
    const fs::path d = fs::temp_directory_path() / "ucond_capi";
    fs::create_directories(d);
    return d;
}

int cli(const std::string& args) {
    const std::string cmd = std::string("\"") + UCOND_CLI_PATH + "\" " + args + " > \"" +
                            (workdir() / "cli.log").string() + "\" 2>&1";
    const int raw = std::system(cmd.c_str());
#if defined(_WIN32)
    return raw;
#else
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
#endif
}

std::string write_file(const std::string& name, const std::string& text) {
    const fs::path p = workdir() / name;
    std::ofstream(p) << text;
    return p.string();
}

}  // namespace

TEST_CASE("version and status helpers") {
    CHECK(std::string(ucond_version()).size() > 0);
    CHECK(std::string(ucond_status_name(UCOND_E_CONFIG)) == "configuration error");
    CHECK(ucond_exit_code(UCOND_OK) == 0);
    CHECK(ucond_exit_code(UCOND_E_CONFIG) == 2);
    CHECK(ucond_exit_code(UCOND_E_NOT_IMPLEMENTED) == 2);
    CHECK(ucond_exit_code(UCOND_E_RUN) == 1);
}

TEST_CASE("null arguments are reported, not dereferenced") {
    CHECK(ucond_scenario_default(nullptr) == UCOND_E_NULL);
    CHECK(ucond_run(nullptr, nullptr) == UCOND_E_NULL);
    CHECK(std::string(ucond_last_error()).size() > 0);
    ucond_scenario_free(nullptr);
    ucond_result_free(nullptr);
    ucond_sweep_free(nullptr);
}

TEST_CASE("scenario keys round-trip through set and get") {
    ScenarioHandle s;
    REQUIRE(ucond_scenario_default(&s.p) == UCOND_OK);
    REQUIRE(ucond_scenario_key_count() > 30);
    for (size_t i = 0; i < ucond_scenario_key_count(); ++i) {
        const char* key = ucond_scenario_key_name(i);
        REQUIRE(key != nullptr);
        double v = 0.0;
        CHECK(ucond_scenario_get(s.p, key, &v) == UCOND_OK);
        CHECK(ucond_scenario_set(s.p, key, v) == UCOND_OK);
    }
    CHECK(ucond_scenario_key_name(ucond_scenario_key_count()) == nullptr);
    double v = 0.0;
    CHECK(ucond_scenario_get(s.p, "source.nope", &v) == UCOND_E_CONFIG);
    CHECK(ucond_scenario_set(s.p, "load.r_load", -1.0) == UCOND_OK);
    CHECK(ucond_scenario_validate(s.p) == UCOND_E_CONFIG);
}

TEST_CASE("parse failures carry a position") {
    ScenarioHandle s;
    CHECK(ucond_scenario_parse("{\"source\": [", &s.p) == UCOND_E_CONFIG);
    CHECK(s.p == nullptr);
    CHECK(std::string(ucond_last_error()).find("line") != std::string::npos);
}

TEST_CASE("descriptor-only topology returns E_NOT_IMPLEMENTED") {
    ScenarioHandle s;
    REQUIRE(ucond_scenario_default(&s.p) == UCOND_OK);
    REQUIRE(ucond_scenario_set_topology(s.p, "QUASI_SINGLE") == UCOND_OK);
    CHECK(std::string(ucond_scenario_topology(s.p)) == "QUASI_SINGLE");
    ResultHandle r;
    CHECK(ucond_run(s.p, &r.p) == UCOND_E_NOT_IMPLEMENTED);
    CHECK(r.p == nullptr);
    CHECK(ucond_scenario_set_topology(s.p, "BOGUS") == UCOND_E_CONFIG);
}

TEST_CASE("a run exposes metrics, channels, events and exports") {
    ScenarioHandle s;
    REQUIRE(ucond_scenario_default(&s.p) == UCOND_OK);
    REQUIRE(ucond_scenario_set(s.p, "engine.t_end", 1e-3) == UCOND_OK);
    REQUIRE(ucond_scenario_set(s.p, "load.r_load", 50.0) == UCOND_OK);
    ResultHandle r;
    REQUIRE(ucond_run(s.p, &r.p) == UCOND_OK);

    double eff = 0.0;
    REQUIRE(ucond_result_metric(r.p, "eff_rect", &eff) == UCOND_OK);
    CHECK(eff > 0.5);
    CHECK(eff < 1.0);
    CHECK(ucond_result_metric(r.p, "nope", &eff) == UCOND_E_MEASUREMENT);
    const char* name = nullptr;
    CHECK(ucond_result_metric_at(r.p, 0, &name, &eff) == UCOND_OK);
    CHECK(ucond_result_metric_at(r.p, ucond_result_metric_count(r.p), &name, &eff) == UCOND_E_RANGE);

    const double* t = nullptr;
    size_t n = 0;
    REQUIRE(ucond_result_channel(r.p, "time", &t, &n) == UCOND_OK);
    CHECK(n == ucond_result_sample_count(r.p));
    const double* v = nullptr;
    size_t m = 0;
    REQUIRE(ucond_result_channel(r.p, "v_dda", &v, &m) == UCOND_OK);
    CHECK(m == n);
    CHECK(v[n - 1] > 1.0);
    CHECK(ucond_result_channel(r.p, "v_nope", &v, &m) == UCOND_E_MEASUREMENT);

    REQUIRE(ucond_result_event_count(r.p) >= 1);
    double te = 0.0;
    const char* mode = nullptr;
    REQUIRE(ucond_result_event(r.p, 0, &te, &mode) == UCOND_OK);
    CHECK(std::string(mode) == "SYNC_STARTUP");

    const std::string trace = (workdir() / "trace.csv").string();
    CHECK(ucond_result_export_trace_csv(r.p, trace.c_str(), "v_dda,v_out") == UCOND_OK);
    std::ifstream in(trace);
    std::string header;
    std::getline(in, header);
    CHECK(header == "time,v_dda,v_out");
    CHECK(ucond_result_export_summary_csv(r.p, (workdir() / "summary.csv").string().c_str()) == UCOND_OK);
    CHECK(ucond_result_export_trace_csv(r.p, "/nonexistent/dir/x.csv", nullptr) == UCOND_E_IO);
}

TEST_CASE("sweeps keep failing rows and expose per-row status") {
    ScenarioHandle s;
    REQUIRE(ucond_scenario_default(&s.p) == UCOND_OK);
    REQUIRE(ucond_scenario_set(s.p, "engine.t_end", 0.3e-3) == UCOND_OK);
    const std::vector<double> values = {50.0, -1.0, 100.0};
    SweepHandle sw;
    REQUIRE(ucond_sweep_run(s.p, "load.r_load", values.data(), values.size(), 2, UCOND_SWEEP_KEEP_TRACES,
                            &sw.p) == UCOND_OK);
    REQUIRE(ucond_sweep_row_count(sw.p) == 3);
    CHECK(ucond_sweep_row_status(sw.p, 0) == UCOND_OK);
    CHECK(ucond_sweep_row_status(sw.p, 1) == UCOND_E_CONFIG);
    CHECK(std::string(ucond_sweep_row_error(sw.p, 1)).size() > 0);
    CHECK(ucond_sweep_row_status(sw.p, 2) == UCOND_OK);
    double x = 0.0;
    CHECK(ucond_sweep_row_value(sw.p, 2, &x) == UCOND_OK);
    CHECK(x == 100.0);
    CHECK(ucond_sweep_metric(sw.p, 0, "eff_rect", &x) == UCOND_OK);
    CHECK(ucond_sweep_metric(sw.p, 1, "eff_rect", &x) != UCOND_OK);
    CHECK(ucond_sweep_export_csv(sw.p, (workdir() / "sweep.csv").string().c_str()) == UCOND_OK);
    CHECK(ucond_sweep_export_trace_csv(sw.p, 0, (workdir() / "t0.csv").string().c_str(), nullptr) == UCOND_OK);
    CHECK(ucond_sweep_export_trace_csv(sw.p, 1, (workdir() / "t1.csv").string().c_str(), nullptr) != UCOND_OK);

    SweepHandle bad;
    CHECK(ucond_sweep_run(s.p, "no.axis", values.data(), values.size(), 1, 0, &bad.p) == UCOND_E_CONFIG);
    CHECK(ucond_sweep_run(s.p, "load.r_load", values.data(), 0, 1, 0, &bad.p) == UCOND_E_INPUT);
}

TEST_CASE("topology taxonomy") {
    REQUIRE(ucond_topology_count() == 4);
    int simulated = 0;
    for (size_t i = 0; i < ucond_topology_count(); ++i) {
        const char *name = nullptr, *title = nullptr, *summary = nullptr;
        int sim = 0;
        REQUIRE(ucond_topology_info(i, &name, &title, &summary, &sim) == UCOND_OK);
        CHECK(std::string(summary).size() > 0);
        simulated += sim;
    }
    CHECK(simulated == 2);
    const char* name = nullptr;
    CHECK(ucond_topology_info(4, &name, nullptr, nullptr, nullptr) == UCOND_E_RANGE);
}

TEST_CASE("CLI exit codes") {
    const std::string good = write_file("good.json", R"({"engine": {"t_end": 0.3e-3}})");
    const std::string bad = write_file("bad.json", R"({"load": {"r_load": -3}})");
    const std::string quasi = write_file("quasi.json", R"({"topology": "QUASI_SINGLE"})");
    const std::string out = (workdir() / "cli_out").string();
    CHECK(cli("run \"" + good + "\" --out \"" + out + "\"") == 0);
    CHECK(fs::exists(fs::path(out) / "trace.csv"));
    CHECK(fs::exists(fs::path(out) / "summary.csv"));
    CHECK(cli("run \"" + bad + "\"") == 2);
    CHECK(cli("run \"" + quasi + "\"") == 2);
    CHECK(cli("run \"" + (workdir() / "missing.json").string() + "\"") == 2);
    CHECK(cli("describe-topologies") == 0);
    CHECK(cli("keys") == 0);
    CHECK(cli("sweep \"" + good + "\" --axis load.r_load --values 50,100 --out \"" + out + "\"") == 0);
    CHECK(cli("sweep \"" + good + "\" --axis load.r_load --values 50,-1 --out \"" + out + "\"") == 1);
    CHECK(cli("sweep \"" + good + "\" --axis bogus --values 1") == 2);
    CHECK(cli("run \"" + good + "\" --set engine.dt=-1") == 2);
}
