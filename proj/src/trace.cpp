#include "ucond/trace.hpp"

#include <algorithm>

#include "ucond/errors.hpp"

namespace ucond {

Trace::Trace(std::vector<std::string> channel_names)
    : names_(std::move(channel_names)), columns_(names_.size()) {}

void Trace::append(double t, const std::vector<double>& values) {
    if (values.size() != names_.size()) throw InputError("trace row width does not match channels");
    if (!time_.empty() && !(t > time_.back())) throw InputError("trace time must strictly increase");
    time_.push_back(t);
    for (std::size_t c = 0; c < values.size(); ++c) columns_[c].push_back(values[c]);
}

bool Trace::has(std::string_view name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const std::vector<double>& Trace::channel(std::string_view name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw MeasurementError("unknown trace channel '" + std::string(name) + "'");
    return columns_[static_cast<std::size_t>(it - names_.begin())];
}

std::size_t Trace::index_at_or_after(double t) const {
    return static_cast<std::size_t>(std::lower_bound(time_.begin(), time_.end(), t) - time_.begin());
}

}  // namespace ucond
