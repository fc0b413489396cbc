// JSON reports. Every number is written with 17 significant digits and
// anything that depends on wall-clock time lives under a key named "timing",
// so two runs can be compared after mask_timing.

#ifndef MMOT_REPORT_HPP_
#define MMOT_REPORT_HPP_

#include <string>

#include <json.hpp>

#include "mmot/core.hpp"

namespace mmot {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchema = 1;

/// Pretty-printed JSON, two-space indent, doubles as %.17g, NaN and
/// infinities as null. Ends with a newline.
std::string dump_json(const Json& j);

/// Copy of `j` with every object member named "timing" removed, recursively.
Json mask_timing(const Json& j);

Json config_to_json(const SinkhornConfig& config);
Json report_to_json(const SolveReport& report);

/// {"schema": 1, "command": command}
Json report_header(const std::string& command);

}  // namespace mmot

#endif  // MMOT_REPORT_HPP_
