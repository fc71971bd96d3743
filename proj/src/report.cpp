#include "ucond/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <atomic>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "ucond/boost.hpp"
#include "ucond/engine.hpp"
#include "ucond/errors.hpp"

namespace ucond {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Trapezoidal time average of a channel over samples [i0, i1].
double time_average(const std::vector<double>& t, const std::vector<double>& y, std::size_t i0,
                    std::size_t i1) {
    if (i1 <= i0) return y[i0];
    double area = 0.0;
    for (std::size_t i = i0; i < i1; ++i) area += 0.5 * (y[i] + y[i + 1]) * (t[i + 1] - t[i]);
    return area / (t[i1] - t[i0]);
}

double ratio_or_nan(double num, double den) { return den > 0.0 ? num / den : kNaN; }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    return out;
}

}  // namespace

Window steady_state_window(const Trace& trace) {
    if (trace.empty()) return {};
    const double t_last = trace.time().back();
    return {0.75 * t_last, t_last};
}

Window align_window(const Trace& trace, Window window) {
    const double min_span = 10.0 * trace.source_period * (1.0 - 1e-9);
    if (trace.has_boost && trace.has("boost_mode")) {
        const auto& t = trace.time();
        const auto& mode = trace.channel("boost_mode");
        std::optional<double> first;
        std::optional<double> last;
        for (std::size_t i = trace.index_at_or_after(window.t0); i < t.size() && t[i] <= window.t1;
             ++i) {
            if (i == 0) continue;
            const bool starts = mode[i] == static_cast<double>(BoostMode::Switching) &&
                                mode[i - 1] == static_cast<double>(BoostMode::Idle);
            if (!starts) continue;
            if (!first) first = t[i - 1];
            last = t[i - 1];
        }
        if (first && last && *last - *first >= min_span) return {*first, *last};
    }
    if (trace.source_period > 0.0) {
        const double periods = std::floor((window.t1 - window.t0) / trace.source_period + 1e-9);
        const Window w{window.t1 - periods * trace.source_period, window.t1};
        if (w.t1 - w.t0 >= min_span) return w;
    }
    return window;
}

RunSummary efficiency_report(const Trace& trace, Window window) {
    if (trace.size() < 2) throw MeasurementError("trace too short for an efficiency window");
    const auto& t = trace.time();
    if (window.t0 < t.front() || window.t1 > t.back() || !(window.t1 > window.t0)) {
        throw MeasurementError("efficiency window lies outside the trace");
    }
    if (window.t1 - window.t0 < 10.0 * trace.source_period * (1.0 - 1e-9)) {
        throw MeasurementError("efficiency window must cover at least 10 source periods");
    }
    const std::size_t i0 = trace.index_at_or_after(window.t0);
    std::size_t i1 = trace.index_at_or_after(window.t1);
    if (i1 >= trace.size() || t[i1] > window.t1) --i1;
    if (i1 <= i0) throw MeasurementError("efficiency window holds no samples");

    auto delta = [&](std::string_view ch) {
        const auto& c = trace.channel(ch);
        return c[i1] - c[i0];
    };

    RunSummary s;
    s.window = {t[i0], t[i1]};
    s.e_source = delta("e_source");
    s.e_rect_in = delta("e_rect_in");
    s.e_loss_phase = delta("e_loss_phase");
    s.e_loss_switch = delta("e_loss_switch");
    s.e_loss_gndc = delta("e_loss_gndc");
    s.e_loss_boost = delta("e_loss_boost");
    s.e_stored_delta = delta("e_stored");
    s.e_residual = delta("e_residual");
    const double e_load = delta("e_load");
    const double e_port = delta("e_port");
    if (!(s.e_source > 0.0) || !(s.e_rect_in > 0.0)) {
        throw MeasurementError("efficiency undefined: no input energy in window");
    }
    // Stage efficiencies are taken at the converter terminals, so the
    // generator's own winding loss is not charged to the rectifier. Energy a
    // stage parks in its own L/C over the window is netted out of its input.
    const double dw_rect = trace.has("w_rect") ? delta("w_rect") : 0.0;
    const double dw_boost = trace.has("w_boost") ? delta("w_boost") : 0.0;
    if (trace.has_boost) {
        s.e_rect_out = e_port;
        s.e_boost_out = e_load;
        s.eff_rect = e_port / (s.e_rect_in - dw_rect);
        s.eff_boost = ratio_or_nan(e_load, e_port - dw_boost);
        s.eff_cascade = e_load / (s.e_rect_in - dw_rect - dw_boost);
    } else {
        s.e_rect_out = e_load;
        s.eff_rect = e_load / (s.e_rect_in - dw_rect);
        s.eff_boost = kNaN;
        s.eff_cascade = kNaN;
    }

    const auto& vdda = trace.channel("v_dda");
    const auto& vout = trace.channel("v_out");
    s.vdda_mean = time_average(t, vdda, i0, i1);
    s.vout_mean = time_average(t, vout, i0, i1);
    const auto [dmin, dmax] = std::minmax_element(vdda.begin() + static_cast<std::ptrdiff_t>(i0),
                                                  vdda.begin() + static_cast<std::ptrdiff_t>(i1) + 1);
    s.vdda_ripple = *dmax - *dmin;
    const auto [omin, omax] = std::minmax_element(vout.begin() + static_cast<std::ptrdiff_t>(i0),
                                                  vout.begin() + static_cast<std::ptrdiff_t>(i1) + 1);
    s.vout_ripple = *omax - *omin;
    s.vcout_final = trace.channel("v_cout").back();

    // Drift check: first vs last source period of the window.
    const double period = trace.source_period;
    const std::size_t a1 = trace.index_at_or_after(t[i0] + period);
    const std::size_t b0 = trace.index_at_or_after(t[i1] - period);
    if (a1 < i1 && b0 > i0) {
        const double first = time_average(t, vdda, i0, a1);
        const double last = time_average(t, vdda, b0, i1);
        const double ref = std::max(std::abs(first), std::abs(last));
        if (ref > 0.0 && std::abs(last - first) > 0.01 * ref) {
            std::ostringstream msg;
            msg << "v_dda drifts " << 100.0 * std::abs(last - first) / ref
                << " % across the steady-state window";
            s.warnings.push_back(msg.str());
        }
    }
    return s;
}

std::optional<double> regulation_time(const Trace& trace, double v_set, double tol) {
    if (!trace.has_boost || trace.empty()) return std::nullopt;
    const auto& v = trace.channel("v_out");
    const double band = tol * v_set;
    std::size_t i = v.size();
    while (i > 0 && std::abs(v[i - 1] - v_set) <= band) --i;
    if (i == v.size()) return std::nullopt;
    return trace.time()[i];
}

std::vector<std::pair<std::string, double>> summary_metrics(const RunSummary& s) {
    return {
        {"window_t0", s.window.t0},
        {"window_t1", s.window.t1},
        {"e_source", s.e_source},
        {"e_rect_in", s.e_rect_in},
        {"e_rect_out", s.e_rect_out},
        {"e_boost_out", s.e_boost_out},
        {"e_loss_phase", s.e_loss_phase},
        {"e_loss_switch", s.e_loss_switch},
        {"e_loss_gndc", s.e_loss_gndc},
        {"e_loss_boost", s.e_loss_boost},
        {"e_stored_delta", s.e_stored_delta},
        {"e_residual", s.e_residual},
        {"eff_rect", s.eff_rect},
        {"eff_boost", s.eff_boost},
        {"eff_cascade", s.eff_cascade},
        {"reached_active", s.reached_active ? 1.0 : 0.0},
        {"active_at", s.active_at.value_or(kNaN)},
        {"startup_duration", s.startup_duration.value_or(kNaN)},
        {"vdda_mean", s.vdda_mean},
        {"vdda_ripple", s.vdda_ripple},
        {"vout_mean", s.vout_mean},
        {"vout_ripple", s.vout_ripple},
        {"vcout_final", s.vcout_final},
        {"regulated_at", s.regulated_at.value_or(kNaN)},
    };
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void export_csv(const Trace& trace, const std::string& path, const std::vector<std::string>& channels) {
    const std::vector<std::string>& names = channels.empty() ? trace.names() : channels;
    std::vector<const std::vector<double>*> cols;
    cols.reserve(names.size());
    for (const auto& n : names) cols.push_back(&trace.channel(n));

    std::ofstream out = open_for_write(path);
    out << "time";
    for (const auto& n : names) out << ',' << csv_field(n);
    out << '\n';
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out << format_double(trace.time()[i]);
        for (const auto* c : cols) out << ',' << format_double((*c)[i]);
        out << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) return table;
    table.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto& f : split_csv_line(line)) {
            double v = 0.0;
            if (f == "nan") {
                v = kNaN;
            } else if (f == "inf" || f == "-inf") {
                v = f[0] == '-' ? -std::numeric_limits<double>::infinity()
                                : std::numeric_limits<double>::infinity();
            } else {
                const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
                if (res.ec != std::errc{} || res.ptr != f.data() + f.size()) {
                    throw IoError("non-numeric CSV field '" + f + "' in '" + path + "'");
                }
            }
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<SweepRow> sweep(const Scenario& base, std::string_view axis,
                            const std::vector<double>& values, unsigned threads, bool keep_traces) {
    if (values.empty()) throw InputError("sweep needs at least one value");
    (void)get_key(base, axis);  // rejects unknown axes up front

    std::vector<SweepRow> rows(values.size());
    auto run_one = [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.value = values[i];
        try {
            Scenario sc = base;
            set_key(sc, axis, values[i]);
            RunResult r = run(sc);
            row.summary = std::move(r.summary);
            if (keep_traces) row.trace = std::move(r.trace);
        } catch (const std::exception& e) {
            row.error = e.what();
            row.cause = std::current_exception();
        }
    };

    unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(values.size()));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < values.size(); i = next++) run_one(i);
        });
    }
    for (auto& th : pool) th.join();
    return rows;
}

void export_sweep_csv(const std::vector<SweepRow>& rows, std::string_view axis, const std::string& path) {
    std::ofstream out = open_for_write(path);
    const auto names = summary_metrics(RunSummary{});
    out << csv_field(std::string(axis)) << ",ok";
    for (const auto& [n, v] : names) out << ',' << n;
    out << ",error\n";
    for (const auto& row : rows) {
        out << format_double(row.value) << ',' << (row.summary ? 1 : 0);
        if (row.summary) {
            for (const auto& [n, v] : summary_metrics(*row.summary)) out << ',' << format_double(v);
        } else {
            for (std::size_t k = 0; k < names.size(); ++k) out << ",nan";
        }
        out << ',' << csv_field(row.error) << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

void export_summary_csv(const RunSummary& summary, const std::string& path) {
    std::ofstream out = open_for_write(path);
    out << "metric,value\n";
    for (const auto& [n, v] : summary_metrics(summary)) out << n << ',' << format_double(v) << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace ucond
