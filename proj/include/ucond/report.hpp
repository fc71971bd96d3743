#pragma once

#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ucond/scenario.hpp"
#include "ucond/trace.hpp"

namespace ucond {

struct Window {
    double t0 = 0.0;
    double t1 = 0.0;
};

struct RunSummary {
    Window window;

    // Joules moved inside the window.
    double e_source = 0.0;
    double e_rect_in = 0.0;  ///< at the rectifier input terminals
    double e_rect_out = 0.0;
    double e_boost_out = 0.0;
    double e_loss_phase = 0.0;
    double e_loss_switch = 0.0;
    double e_loss_gndc = 0.0;
    double e_loss_boost = 0.0;
    double e_stored_delta = 0.0;
    double e_residual = 0.0;

    // NaN where a stage is absent or the ratio is undefined.
    double eff_rect = 0.0;
    double eff_boost = 0.0;
    double eff_cascade = 0.0;

    bool reached_active = false;
    std::optional<double> active_at;
    std::optional<double> startup_duration;

    double vdda_mean = 0.0;
    double vdda_ripple = 0.0;
    double vout_mean = 0.0;
    double vout_ripple = 0.0;
    double vcout_final = 0.0;
    std::optional<double> regulated_at;

    std::vector<std::string> warnings;
};

/// Last quarter of the recorded run.
[[nodiscard]] Window steady_state_window(const Trace& trace);

/// Trims a window so that energy parked in the storage elements cancels out:
/// to the span between the first and last PFM burst start when the boost
/// runs in bursts, otherwise to a whole number of source periods ending at
/// t1. The window is returned unchanged when neither fits 10 source periods.
[[nodiscard]] Window align_window(const Trace& trace, Window window);

/// Energies, efficiencies and rail statistics over a window of the trace.
/// Throws MeasurementError when the window is outside the trace, spans
/// fewer than 10 source periods, or saw no source energy.
[[nodiscard]] RunSummary efficiency_report(const Trace& trace, Window window);

/// First recorded time after which boost v_out stays within tol * v_set of
/// v_set to the end of the trace; empty when the last sample is outside.
[[nodiscard]] std::optional<double> regulation_time(const Trace& trace, double v_set, double tol = 0.02);

/// Scalar view of a summary, in a fixed order (used for CSV rows and the C API).
[[nodiscard]] std::vector<std::pair<std::string, double>> summary_metrics(const RunSummary& s);

/// Shortest decimal text that parses back to exactly the same double.
[[nodiscard]] std::string format_double(double v);

/// Header row of channel names ("time" first), then one row per sample.
/// An empty selection exports every channel.
void export_csv(const Trace& trace, const std::string& path,
                const std::vector<std::string>& channels = {});

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Numeric CSV reader matching export_csv (RFC-4180 quoted headers).
[[nodiscard]] CsvTable read_csv(const std::string& path);

struct SweepRow {
    double value = 0.0;
    std::optional<RunSummary> summary;
    std::string error;
    std::exception_ptr cause;  ///< set with error
    std::optional<Trace> trace;  ///< only with keep_traces
};

/// One run per value of `axis`, in input order. Individual failures land in
/// their row. threads = 0 uses the hardware concurrency.
[[nodiscard]] std::vector<SweepRow> sweep(const Scenario& base, std::string_view axis,
                                          const std::vector<double>& values, unsigned threads = 0,
                                          bool keep_traces = false);

void export_sweep_csv(const std::vector<SweepRow>& rows, std::string_view axis,
                      const std::string& path);
void export_summary_csv(const RunSummary& summary, const std::string& path);

}  // namespace ucond
