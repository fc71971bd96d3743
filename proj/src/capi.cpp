#include "ucond/ucond.h"

#include <exception>
#include <new>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ucond/engine.hpp"
#include "ucond/errors.hpp"
#include "ucond/report.hpp"
#include "ucond/scenario.hpp"

struct ucond_scenario {
    ucond::Scenario value;
};

struct ucond_result {
    ucond::RunResult run;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::string> event_modes;
};

struct ucond_sweep {
    std::string axis;
    std::vector<ucond::SweepRow> rows;
    std::vector<ucond_status> status;
    std::vector<std::vector<std::pair<std::string, double>>> metrics;
};

namespace {

thread_local std::string g_last_error;

ucond_status fail(ucond_status st, std::string msg) {
    g_last_error = std::move(msg);
    return st;
}

// Maps the in-flight exception onto a status; call from a catch block.
ucond_status classify(const std::exception_ptr& ep, std::string* msg) {
    try {
        std::rethrow_exception(ep);
    } catch (const ucond::InputError& e) {
        *msg = e.what();
        return UCOND_E_INPUT;
    } catch (const ucond::ConfigError& e) {
        *msg = e.what();
        return UCOND_E_CONFIG;
    } catch (const ucond::NotImplementedError& e) {
        *msg = e.what();
        return UCOND_E_NOT_IMPLEMENTED;
    } catch (const ucond::SingularSystemError& e) {
        *msg = e.what();
        return UCOND_E_SINGULAR;
    } catch (const ucond::StepError& e) {
        *msg = e.what();
        return UCOND_E_STEP;
    } catch (const ucond::RunError& e) {
        *msg = e.what();
        return UCOND_E_RUN;
    } catch (const ucond::MeasurementError& e) {
        *msg = e.what();
        return UCOND_E_MEASUREMENT;
    } catch (const ucond::ContractViolation& e) {
        *msg = e.what();
        return UCOND_E_CONTRACT;
    } catch (const ucond::IoError& e) {
        *msg = e.what();
        return UCOND_E_IO;
    } catch (const std::bad_alloc&) {
        *msg = "out of memory";
        return UCOND_E_INTERNAL;
    } catch (const std::exception& e) {
        *msg = e.what();
        return UCOND_E_INTERNAL;
    } catch (...) {
        *msg = "unknown error";
        return UCOND_E_INTERNAL;
    }
}

template <class F>
ucond_status guarded(F&& f) {
    try {
        f();
        return UCOND_OK;
    } catch (...) {
        std::string msg;
        const ucond_status st = classify(std::current_exception(), &msg);
        return fail(st, std::move(msg));
    }
}

const std::vector<std::string>& key_names() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> all = ucond::scenario_keys();
        std::erase(all, "topology");  // string-valued, see set_topology
        return all;
    }();
    return keys;
}

std::vector<std::string> split_channels(const char* text) {
    std::vector<std::string> out;
    if (text == nullptr) return out;
    std::string_view rest(text);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        std::string_view item = rest.substr(0, comma);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (!item.empty()) out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

bool lookup(const std::vector<std::pair<std::string, double>>& metrics, const char* name, double* value) {
    for (const auto& [n, v] : metrics) {
        if (n == name) {
            *value = v;
            return true;
        }
    }
    return false;
}

}  // namespace

extern "C" {

const char* ucond_version(void) { return "1.0.0"; }

const char* ucond_last_error(void) { return g_last_error.c_str(); }

const char* ucond_status_name(ucond_status status) {
    switch (status) {
        case UCOND_OK: return "ok";
        case UCOND_E_NULL: return "null argument";
        case UCOND_E_INPUT: return "input error";
        case UCOND_E_CONFIG: return "configuration error";
        case UCOND_E_NOT_IMPLEMENTED: return "not implemented";
        case UCOND_E_SINGULAR: return "singular system";
        case UCOND_E_STEP: return "step error";
        case UCOND_E_RUN: return "run error";
        case UCOND_E_MEASUREMENT: return "measurement error";
        case UCOND_E_CONTRACT: return "contract violation";
        case UCOND_E_IO: return "i/o error";
        case UCOND_E_RANGE: return "index out of range";
        case UCOND_E_INTERNAL: return "internal error";
    }
    return "unknown status";
}

int ucond_exit_code(ucond_status status) {
    if (status == UCOND_OK) return 0;
    if (status == UCOND_E_CONFIG || status == UCOND_E_NOT_IMPLEMENTED) return 2;
    return 1;
}

ucond_status ucond_scenario_default(ucond_scenario** out) {
    if (out == nullptr) return fail(UCOND_E_NULL, "out is NULL");
    *out = nullptr;
    return guarded([&] { *out = new ucond_scenario{ucond::default_scenario()}; });
}

ucond_status ucond_scenario_parse(const char* json_text, ucond_scenario** out) {
    if (json_text == nullptr || out == nullptr) return fail(UCOND_E_NULL, "json_text or out is NULL");
    *out = nullptr;
    return guarded([&] { *out = new ucond_scenario{ucond::parse_scenario(json_text)}; });
}

ucond_status ucond_scenario_load(const char* path, ucond_scenario** out) {
    if (path == nullptr || out == nullptr) return fail(UCOND_E_NULL, "path or out is NULL");
    *out = nullptr;
    return guarded([&] { *out = new ucond_scenario{ucond::load_scenario(path)}; });
}

ucond_status ucond_scenario_clone(const ucond_scenario* s, ucond_scenario** out) {
    if (s == nullptr || out == nullptr) return fail(UCOND_E_NULL, "scenario or out is NULL");
    *out = nullptr;
    return guarded([&] { *out = new ucond_scenario{s->value}; });
}

void ucond_scenario_free(ucond_scenario* s) { delete s; }

ucond_status ucond_scenario_set(ucond_scenario* s, const char* key, double value) {
    if (s == nullptr || key == nullptr) return fail(UCOND_E_NULL, "scenario or key is NULL");
    return guarded([&] { ucond::set_key(s->value, key, value); });
}

ucond_status ucond_scenario_get(const ucond_scenario* s, const char* key, double* value) {
    if (s == nullptr || key == nullptr || value == nullptr) return fail(UCOND_E_NULL, "NULL argument");
    return guarded([&] { *value = ucond::get_key(s->value, key); });
}

ucond_status ucond_scenario_set_topology(ucond_scenario* s, const char* name) {
    if (s == nullptr || name == nullptr) return fail(UCOND_E_NULL, "scenario or name is NULL");
    for (const auto& d : ucond::describe_topologies()) {
        if (ucond::topology_name(d.tag) == name) {
            s->value.topology = d.tag;
            s->value.boost_enabled = d.tag == ucond::Topology::DualStage;
            return UCOND_OK;
        }
    }
    return fail(UCOND_E_CONFIG, std::string("unknown topology '") + name + "'");
}

const char* ucond_scenario_topology(const ucond_scenario* s) {
    if (s == nullptr) return nullptr;
    return ucond::topology_name(s->value.topology).data();
}

ucond_status ucond_scenario_validate(const ucond_scenario* s) {
    if (s == nullptr) return fail(UCOND_E_NULL, "scenario is NULL");
    return guarded([&] { ucond::validate(s->value); });
}

size_t ucond_scenario_key_count(void) { return key_names().size(); }

const char* ucond_scenario_key_name(size_t index) {
    const auto& keys = key_names();
    return index < keys.size() ? keys[index].c_str() : nullptr;
}

ucond_status ucond_run(const ucond_scenario* s, ucond_result** out) {
    if (s == nullptr || out == nullptr) return fail(UCOND_E_NULL, "scenario or out is NULL");
    *out = nullptr;
    return guarded([&] {
        auto* r = new ucond_result{ucond::run(s->value), {}, {}};
        r->metrics = ucond::summary_metrics(r->run.summary);
        for (const auto& ev : r->run.trace.mode_events) r->event_modes.emplace_back(ucond::mode_name(ev.mode));
        *out = r;
    });
}

void ucond_result_free(ucond_result* r) { delete r; }

size_t ucond_result_metric_count(const ucond_result* r) { return r == nullptr ? 0 : r->metrics.size(); }

ucond_status ucond_result_metric_at(const ucond_result* r, size_t index, const char** name, double* value) {
    if (r == nullptr) return fail(UCOND_E_NULL, "result is NULL");
    if (index >= r->metrics.size()) return fail(UCOND_E_RANGE, "metric index out of range");
    if (name != nullptr) *name = r->metrics[index].first.c_str();
    if (value != nullptr) *value = r->metrics[index].second;
    return UCOND_OK;
}

ucond_status ucond_result_metric(const ucond_result* r, const char* name, double* value) {
    if (r == nullptr || name == nullptr || value == nullptr) return fail(UCOND_E_NULL, "NULL argument");
    if (!lookup(r->metrics, name, value)) {
        return fail(UCOND_E_MEASUREMENT, std::string("unknown metric '") + name + "'");
    }
    return UCOND_OK;
}

size_t ucond_result_sample_count(const ucond_result* r) { return r == nullptr ? 0 : r->run.trace.size(); }

size_t ucond_result_channel_count(const ucond_result* r) {
    return r == nullptr ? 0 : r->run.trace.names().size();
}

const char* ucond_result_channel_name(const ucond_result* r, size_t index) {
    if (r == nullptr || index >= r->run.trace.names().size()) return nullptr;
    return r->run.trace.names()[index].c_str();
}

ucond_status ucond_result_channel(const ucond_result* r, const char* name, const double** data, size_t* length) {
    if (r == nullptr || name == nullptr || data == nullptr) return fail(UCOND_E_NULL, "NULL argument");
    return guarded([&] {
        const auto& col = std::string_view(name) == "time" ? r->run.trace.time() : r->run.trace.channel(name);
        *data = col.data();
        if (length != nullptr) *length = col.size();
    });
}

size_t ucond_result_event_count(const ucond_result* r) { return r == nullptr ? 0 : r->event_modes.size(); }

ucond_status ucond_result_event(const ucond_result* r, size_t index, double* t, const char** mode) {
    if (r == nullptr) return fail(UCOND_E_NULL, "result is NULL");
    if (index >= r->event_modes.size()) return fail(UCOND_E_RANGE, "event index out of range");
    if (t != nullptr) *t = r->run.trace.mode_events[index].t;
    if (mode != nullptr) *mode = r->event_modes[index].c_str();
    return UCOND_OK;
}

size_t ucond_result_warning_count(const ucond_result* r) {
    return r == nullptr ? 0 : r->run.summary.warnings.size();
}

const char* ucond_result_warning(const ucond_result* r, size_t index) {
    if (r == nullptr || index >= r->run.summary.warnings.size()) return nullptr;
    return r->run.summary.warnings[index].c_str();
}

ucond_status ucond_result_export_trace_csv(const ucond_result* r, const char* path, const char* channels) {
    if (r == nullptr || path == nullptr) return fail(UCOND_E_NULL, "result or path is NULL");
    return guarded([&] {
        std::vector<std::string> sel = split_channels(channels);
        std::erase(sel, "time");  // always the first column
        ucond::export_csv(r->run.trace, path, sel);
    });
}

ucond_status ucond_result_export_summary_csv(const ucond_result* r, const char* path) {
    if (r == nullptr || path == nullptr) return fail(UCOND_E_NULL, "result or path is NULL");
    return guarded([&] { ucond::export_summary_csv(r->run.summary, path); });
}

ucond_status ucond_sweep_run(const ucond_scenario* base, const char* axis, const double* values, size_t count,
                             unsigned threads, unsigned flags, ucond_sweep** out) {
    if (base == nullptr || axis == nullptr || out == nullptr || (values == nullptr && count > 0)) {
        return fail(UCOND_E_NULL, "NULL argument");
    }
    *out = nullptr;
    return guarded([&] {
        auto* sw = new ucond_sweep{};
        try {
            sw->axis = axis;
            sw->rows = ucond::sweep(base->value, axis, std::vector<double>(values, values + count), threads,
                                     (flags & UCOND_SWEEP_KEEP_TRACES) != 0);
            for (const auto& row : sw->rows) {
                if (row.summary) {
                    sw->status.push_back(UCOND_OK);
                    sw->metrics.push_back(ucond::summary_metrics(*row.summary));
                } else {
                    std::string ignored;
                    sw->status.push_back(row.cause ? classify(row.cause, &ignored) : UCOND_E_INTERNAL);
                    sw->metrics.emplace_back();
                }
            }
        } catch (...) {
            delete sw;
            throw;
        }
        *out = sw;
    });
}

void ucond_sweep_free(ucond_sweep* sw) { delete sw; }

size_t ucond_sweep_row_count(const ucond_sweep* sw) { return sw == nullptr ? 0 : sw->rows.size(); }

ucond_status ucond_sweep_row_value(const ucond_sweep* sw, size_t row, double* value) {
    if (sw == nullptr || value == nullptr) return fail(UCOND_E_NULL, "NULL argument");
    if (row >= sw->rows.size()) return fail(UCOND_E_RANGE, "row out of range");
    *value = sw->rows[row].value;
    return UCOND_OK;
}

ucond_status ucond_sweep_row_status(const ucond_sweep* sw, size_t row) {
    if (sw == nullptr) return fail(UCOND_E_NULL, "sweep is NULL");
    if (row >= sw->rows.size()) return fail(UCOND_E_RANGE, "row out of range");
    return sw->status[row];
}

const char* ucond_sweep_row_error(const ucond_sweep* sw, size_t row) {
    if (sw == nullptr || row >= sw->rows.size() || sw->rows[row].summary) return nullptr;
    return sw->rows[row].error.c_str();
}

ucond_status ucond_sweep_metric(const ucond_sweep* sw, size_t row, const char* name, double* value) {
    if (sw == nullptr || name == nullptr || value == nullptr) return fail(UCOND_E_NULL, "NULL argument");
    if (row >= sw->rows.size()) return fail(UCOND_E_RANGE, "row out of range");
    if (sw->status[row] != UCOND_OK) return fail(sw->status[row], sw->rows[row].error);
    if (!lookup(sw->metrics[row], name, value)) {
        return fail(UCOND_E_MEASUREMENT, std::string("unknown metric '") + name + "'");
    }
    return UCOND_OK;
}

ucond_status ucond_sweep_export_csv(const ucond_sweep* sw, const char* path) {
    if (sw == nullptr || path == nullptr) return fail(UCOND_E_NULL, "sweep or path is NULL");
    return guarded([&] { ucond::export_sweep_csv(sw->rows, sw->axis, path); });
}

ucond_status ucond_sweep_export_trace_csv(const ucond_sweep* sw, size_t row, const char* path,
                                          const char* channels) {
    if (sw == nullptr || path == nullptr) return fail(UCOND_E_NULL, "sweep or path is NULL");
    if (row >= sw->rows.size()) return fail(UCOND_E_RANGE, "row out of range");
    if (!sw->rows[row].trace) return fail(UCOND_E_MEASUREMENT, "no trace kept for this row");
    return guarded([&] {
        std::vector<std::string> sel = split_channels(channels);
        std::erase(sel, "time");
        ucond::export_csv(*sw->rows[row].trace, path, sel);
    });
}

size_t ucond_topology_count(void) { return ucond::describe_topologies().size(); }

ucond_status ucond_topology_info(size_t index, const char** name, const char** title, const char** summary,
                                 int* simulated) {
    const auto& list = ucond::describe_topologies();
    if (index >= list.size()) return fail(UCOND_E_RANGE, "topology index out of range");
    const auto& d = list[index];
    // string_views here point at literals, so data() is NUL-terminated.
    if (name != nullptr) *name = ucond::topology_name(d.tag).data();
    if (title != nullptr) *title = d.title.data();
    if (summary != nullptr) *summary = d.summary.data();
    if (simulated != nullptr) *simulated = d.simulated ? 1 : 0;
    return UCOND_OK;
}

}  // extern "C"
