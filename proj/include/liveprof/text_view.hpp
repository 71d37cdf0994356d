#pragma once

#include "liveprof/profile.hpp"
#include "liveprof/session.hpp"

#include <string>

namespace liveprof {

/// "name: N rows × M cols"
[[nodiscard]] std::string shape_line(const std::string& name, const Table& table);

/// One row per column: name, type, missing %, and a type-specific summary.
[[nodiscard]] std::string profile_text(const TableProfile& profile);

/// Horizontal ASCII bar chart for a plot statement.
[[nodiscard]] std::string plot_text(const Table& table, const PlotRequest& plot, std::size_t width = 40);

}  // namespace liveprof
