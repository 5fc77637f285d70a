#include "report.hpp"

#include <cmath>
#include <cstdio>

namespace hardy {

Json extended_to_json(const ExtendedValue& x) {
  Json j = Json::object();
  if (!x.finite()) {
    j["value"] = "inf";
    j["divergence_site"] = divergence_site_name(x.site);
  } else {
    j["value"] = x.value;
    j["abs_error"] = x.abs_error;
  }
  return j;
}

Json measured_to_json(double value, double abs_error) {
  Json j = Json::object();
  j["value"] = value;
  j["abs_error"] = abs_error;
  return j;
}

const char* finiteness_name(const ExtendedValue& x) {
  if (std::isnan(x.value)) return "undetermined";
  if (!x.finite()) return "infinite";
  return "finite";
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    const std::string& f = fields[i];
    bool needs_quotes = f.find_first_of(",\"\r\n") != std::string::npos;
    if (needs_quotes) {
      out += '"';
      for (char c : f) {
        if (c == '"') out += '"';
        out += c;
      }
      out += '"';
    } else {
      out += f;
    }
  }
  out += "\r\n";
  return out;
}

std::string format_double(double x) {
  if (x == static_cast<long long>(x) && std::fabs(x) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(x));
    return buf;
  }
  // Shortest representation that round-trips: try increasing precision.
  for (int prec = 6; prec <= 17; ++prec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == x) return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string render_json(const Json& doc) { return doc.dump(2) + "\n"; }

Json report_skeleton(const std::string& mode, const Json& config_echo) {
  Json doc = Json::object();
  doc["tool"] = Json::object();
  doc["tool"]["name"] = kToolName;
  doc["tool"]["version"] = kToolVersion;
  doc["mode"] = mode;
  doc["config"] = config_echo;
  return doc;
}

}  // namespace hardy
