#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracle_values.hpp"
#include "ucond/engine.hpp"

using namespace ucond;

namespace {

Scenario short_run(double t_end = 0.3e-3) {
    Scenario s = default_scenario();
    s.engine.t_end = t_end;
    return s;
}

double cycle_mean(const Trace& tr, std::string_view ch, double t0, double t1) {
    const auto& v = tr.channel(ch);
    const auto& t = tr.time();
    double acc = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (t[i - 1] < t0 || t[i] > t1) continue;
        acc += 0.5 * (v[i] + v[i - 1]) * (t[i] - t[i - 1]);
    }
    return acc / (t1 - t0);
}

}  // namespace

TEST_SUITE("sim-engine") {

TEST_CASE("t_end = 0 yields an empty trace and zero energies") {
    Scenario s = short_run(0.0);
    const RunResult r = run(s);
    CHECK(r.trace.empty());
    CHECK(r.summary.e_source == 0.0);
    CHECK(r.summary.e_rect_out == 0.0);
}

TEST_CASE("identical scenarios give bit-identical traces") {
    Scenario s = short_run();
    s.rectifier.source.phase0 = 0.4;
    const RunResult a = run(s);
    const RunResult b = run(s);
    REQUIRE(a.trace.size() == b.trace.size());
    CHECK(a.trace.time() == b.trace.time());
    for (const auto& name : a.trace.names()) CHECK(a.trace.channel(name) == b.trace.channel(name));
    CHECK(a.summary.active_at == b.summary.active_at);
}

TEST_CASE("cold start at 3.3 V into a 200 ohm cascade regulates within 5 ms") {
    Scenario s = default_scenario();
    s.boost_enabled = true;
    s.topology = Topology::DualStage;
    s.rectifier.load = LoadPlacement::BoostOutput;
    s.rectifier.r_load = 200.0;
    s.engine.t_end = 5e-3;
    const RunResult r = run(s);
    CHECK(r.summary.reached_active);
    REQUIRE(r.summary.regulated_at.has_value());
    CHECK(*r.summary.regulated_at < 5e-3);
}

TEST_CASE("locate_event on a linear ramp") {
    const double tol = 1e-9;
    const double t = locate_event(0.0, 1e-6, [](double x) { return 2e6 * x > 0.7; }, tol);
    CHECK(t >= oracle::kRampCrossing);
    CHECK(t - oracle::kRampCrossing <= tol);
}

TEST_CASE("locate_event rejects a bracket without a change") {
    CHECK_THROWS_AS((void)locate_event(0.0, 1.0, [](double) { return true; }, 1e-3), ContractViolation);
    CHECK_THROWS_AS((void)locate_event(1.0, 0.0, [](double x) { return x > 0.5; }, 1e-3), ContractViolation);
}

TEST_CASE("locate_event finds a 50 kHz zero crossing within 1 ns") {
    ThreePhaseSource src;
    src.phase0 = 0.3;
    const double t = locate_event(
        5e-6, 12e-6, [&](double x) { return emf_potentials(src, x)[0] < 0.0; }, 1e-9);
    CHECK(std::abs(t - oracle::kE1FallingZero) <= 1e-9);
}

TEST_CASE("start-up duration is missing when the run never engages") {
    Scenario s = short_run();
    s.control.startup_enabled = false;
    s.rectifier.source.v_ll_peak = 1.5;
    const RunResult r = run(s);
    CHECK_FALSE(r.summary.reached_active);
    CHECK_THROWS_AS((void)startup_duration(r.trace), MeasurementError);
}

TEST_CASE("heavy load on a directly connected 1 uF output never reaches ACTIVE") {
    Scenario s = short_run(1e-3);
    s.rectifier.source.v_ll_peak = 2.0;
    s.rectifier.r_load = 5.0;
    s.rectifier.c_out = 1e-6;
    s.control.gndc_sequencer_enabled = false;
    const RunResult r = run(s);
    CHECK_FALSE(r.summary.reached_active);
    CHECK_THROWS_AS((void)startup_duration(r.trace), MeasurementError);
}

TEST_CASE("mode sequence is IDLE/SYNC_STARTUP then ACTIVE with no way back") {
    Scenario s = short_run(0.5e-3);
    s.rectifier.source.v_ll_peak = 2.0;
    const RunResult r = run(s);
    REQUIRE_FALSE(r.trace.mode_events.empty());
    bool active = false;
    for (const auto& ev : r.trace.mode_events) {
        if (active) CHECK(ev.mode == ControlMode::Active);
        active = active || ev.mode == ControlMode::Active;
    }
    CHECK(active);
    CHECK(r.trace.mode_events.front().mode == ControlMode::SyncStartup);
}

TEST_CASE("body diodes alone settle V_DDA to peak U12 minus two drops") {
    Scenario s = short_run(1e-3);
    s.control.startup_enabled = false;
    s.control.comparators.v_supply_min = 100.0;  // comparators never valid
    s.rectifier.r_load = 1e9;
    const RunResult r = run(s);
    const double expected = s.rectifier.source.v_ll_peak - 2.0 * s.rectifier.switches[0].body_vf;
    const double t1 = r.trace.time().back();
    const double got = cycle_mean(r.trace, "v_dda", t1 - 10 * s.rectifier.source.period(), t1);
    CHECK(got == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("a passive network does not boost") {
    Scenario s = short_run(1e-3);
    s.rectifier.source.l_phase = 0.0;
    s.control.gndc.ramp_duration = 20e-6;
    const RunResult r = run(s);
    const double t1 = r.trace.time().back();
    const double p = s.rectifier.source.period();
    const auto& tr = r.trace;
    for (int k = 1; k <= 10; ++k) {
        const double m = cycle_mean(tr, "v_dda", t1 - (k + 1) * p, t1 - k * p);
        CHECK(m <= s.rectifier.source.v_ll_peak);
    }
}

TEST_CASE("trace channels share a strictly increasing time grid") {
    const RunResult r = run(short_run());
    const auto& t = r.trace.time();
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] > t[i - 1]);
    for (const auto& n : r.trace.names()) CHECK(r.trace.channel(n).size() == t.size());
}

TEST_CASE("descriptor-only topologies refuse to run") {
    Scenario s = short_run();
    s.topology = Topology::SingleStage;
    CHECK_THROWS_AS((void)run(s), NotImplementedError);
    s.topology = Topology::QuasiSingle;
    CHECK_THROWS_AS((void)run(s), NotImplementedError);
}

}
