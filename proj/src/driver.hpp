#pragma once

#include <string>

namespace hardy {

// Process-level statuses shared by the C API and the CLI.
enum ExitStatus : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitTolerance = 3,
  kExitVerification = 4,
  kExitWindow = 5,
};

struct RunOutput {
  int status = kExitOk;
  std::string output;  // JSON document, or CSV stream for sweep
  std::string error;   // diagnostic accompanying a non-zero status
};

// Parses a JSON configuration string (empty string means all defaults),
// dispatches on its "mode" -- "analyze", "sweep" or "verify", with
// `mode_override` taking precedence when non-empty -- and renders the
// report. Never throws; every failure maps to a status:
//   0 success, 1 internal error, 2 configuration or instance error,
//   3 quadrature tolerance not reached, 4 a verification check failed,
//   5 the window is too small to resolve the requested quantity.
RunOutput run_from_json(const std::string& config_json,
                        const std::string& mode_override = "");

}  // namespace hardy
