#pragma once

#include "liveprof/csv.hpp"
#include "liveprof/profile_json.hpp"

#include <filesystem>
#include <string>

namespace liveprof {

/// Binding name used when a CSV file is loaded on its own: the file stem with
/// characters outside [A-Za-z0-9_] replaced by '_'.
[[nodiscard]] std::string table_name_for(const std::filesystem::path& csv_path);

/// Loads one CSV into a fresh session and returns the snapshot payload a
/// live subscriber would receive right after `load "<csv>" as <name>`.
/// Throws the session's error (IoError, CsvError) on failure.
[[nodiscard]] Json report_json(const std::filesystem::path& csv_path, const CsvOptions& options = {});

/// Static, script-free HTML page rendering the fields of a profiles payload.
[[nodiscard]] std::string render_html(const Json& payload);

}  // namespace liveprof
