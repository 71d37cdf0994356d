#pragma once

// Canonical profile serialization. Key order is fixed and floats use the
// shortest representation that round-trips, so equal profiles always produce
// byte-identical text. This is the golden-file and wire format.

#include "liveprof/profile.hpp"

#include <json.hpp>

#include <span>
#include <string>

namespace liveprof {

using Json = nlohmann::ordered_json;

[[nodiscard]] Json to_json(const Histogram& h);
[[nodiscard]] Json to_json(const ColumnProfile& p);
[[nodiscard]] Json to_json(const TableProfile& p);

/// The `profiles` message body shared by live broadcasts, HTTP snapshots and
/// JSON reports: {"type","epoch","order","profiles"}.
[[nodiscard]] Json profiles_message(std::uint64_t epoch, std::span<const std::string> order,
                                    std::span<const Json> profiles);

/// Compact single-line dump.
[[nodiscard]] std::string dump_canonical(const Json& j);

}  // namespace liveprof
