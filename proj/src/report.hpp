#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "extended_value.hpp"

namespace hardy {

// All reports use ordered JSON so that key order -- and therefore the byte
// stream -- is deterministic for identical inputs.
using Json = nlohmann::ordered_json;

// Serializes a possibly-infinite quantity. Finite values carry "value" as a
// number plus "abs_error"; infinite ones carry the string "inf" and the
// divergence site. A float sentinel for infinity never appears.
Json extended_to_json(const ExtendedValue& x);

// Same, for plain doubles that are finite by construction.
Json measured_to_json(double value, double abs_error);

// Tri-state finiteness verdict: "finite", "infinite", or "undetermined"
// (the latter when a computation could not settle the question).
const char* finiteness_name(const ExtendedValue& x);

// One CSV record under RFC 4180: fields joined by commas, quoted when they
// contain commas, quotes, or newlines (quotes doubled), terminated by \r\n.
std::string csv_row(const std::vector<std::string>& fields);

// Formats a double with enough digits to round-trip, trimming the noise of
// printf's fixed precision. Deterministic for a given value.
std::string format_double(double x);

// The canonical serialization of a report document: 2-space indentation and
// a trailing newline. All modes that emit JSON go through this, so identical
// documents are identical bytes.
std::string render_json(const Json& doc);

// Report skeleton shared by the analyze and verify modes: tool block with
// name/version, echo of the effective configuration, then mode-specific
// sections appended by the caller. Timings are added at the very end under
// a dedicated key so consumers can compare reports net of them.
Json report_skeleton(const std::string& mode, const Json& config_echo);

inline constexpr const char* kToolName = "hardy-lab";
inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace hardy
