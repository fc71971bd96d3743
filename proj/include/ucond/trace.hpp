#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ucond/control.hpp"

namespace ucond {

struct ModeEvent {
    double t = 0.0;
    ControlMode mode = ControlMode::Idle;
};

/// Time series of every observable on a shared, strictly increasing grid.
/// Energy channels are cumulative joules since t = 0.
class Trace {
public:
    Trace() = default;
    explicit Trace(std::vector<std::string> channel_names);

    void append(double t, const std::vector<double>& values);

    [[nodiscard]] std::size_t size() const { return time_.size(); }
    [[nodiscard]] bool empty() const { return time_.empty(); }
    [[nodiscard]] const std::vector<double>& time() const { return time_; }
    [[nodiscard]] const std::vector<std::string>& names() const { return names_; }
    [[nodiscard]] bool has(std::string_view name) const;
    /// Throws MeasurementError for an unknown channel.
    [[nodiscard]] const std::vector<double>& channel(std::string_view name) const;

    /// First sample index with time >= t (size() if none).
    [[nodiscard]] std::size_t index_at_or_after(double t) const;

    std::vector<ModeEvent> mode_events;
    double source_period = 0.0;
    bool has_boost = false;
    double boost_period = 0.0;

private:
    std::vector<double> time_;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
};

}  // namespace ucond
