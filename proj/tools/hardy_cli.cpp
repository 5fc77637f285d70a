// Command-line front end. Talks to the library exclusively through the
// C interface in hardy/hardy.h; configuration assembly (file + flag
// overrides) happens here so the library sees one JSON document.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hardy/hardy.h"

namespace {

using Json = nlohmann::ordered_json;

struct FlagValues {
  std::string config_path;
  std::optional<double> p, q, window_lo, window_hi, tol, theta, sigma, epsilon;
  std::optional<long long> cells, seed;
  std::string format;
};

void add_common_flags(CLI::App* app, FlagValues& f) {
  app->add_option("--config", f.config_path,
                  "JSON configuration file (flags override its keys)");
  app->add_option("--p", f.p, "outer exponent p >= 1");
  app->add_option("--q", f.q, "inner exponent q > 0");
  app->add_option("--window-lo", f.window_lo, "lower end of the window");
  app->add_option("--window-hi", f.window_hi, "upper end of the window");
  app->add_option("--cells", f.cells, "search grid cells");
  app->add_option("--tol", f.tol, "quadrature relative tolerance");
  app->add_option("--seed", f.seed, "search seed");
  app->add_option("--theta", f.theta,
                  "family parameter (0 selects the default)");
  app->add_option("--sigma", f.sigma, "level ratio for p = 1 decompositions");
  app->add_option("--epsilon", f.epsilon, "pointwise-bound parameter in (0,1)");
  app->add_option("--format", f.format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

int merge_and_run(const FlagValues& f, const std::string& mode) {
  Json cfg = Json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) {
      std::cerr << "error: cannot open config file: " << f.config_path << "\n";
      return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      cfg = Json::parse(buf.str());
    } catch (const std::exception& e) {
      std::cerr << "error: config file is not valid JSON: " << e.what()
                << "\n";
      return 2;
    }
    if (!cfg.is_object()) {
      std::cerr << "error: config file must hold a JSON object\n";
      return 2;
    }
  }
  if (f.p) cfg["p"] = *f.p;
  if (f.q) cfg["q"] = *f.q;
  if (f.window_lo) cfg["window_lo"] = *f.window_lo;
  if (f.window_hi) cfg["window_hi"] = *f.window_hi;
  if (f.cells) cfg["cells"] = *f.cells;
  if (f.tol) cfg["rel_tol"] = *f.tol;
  if (f.seed) cfg["seed"] = *f.seed;
  if (f.theta) cfg["theta"] = *f.theta;
  if (f.sigma) cfg["sigma"] = *f.sigma;
  if (f.epsilon) cfg["epsilon"] = *f.epsilon;
  if (!f.format.empty()) cfg["format"] = f.format;

  hardy_analysis* result = hardy_run(cfg.dump().c_str(), mode.c_str());
  if (result == nullptr) {
    std::cerr << "error: " << hardy_last_error() << "\n";
    return 1;
  }
  const char* output = hardy_result_output(result);
  if (output[0] != '\0') std::fputs(output, stdout);
  int status = hardy_result_status(result);
  if (status != 0) {
    const char* msg = hardy_result_error(result);
    if (msg[0] != '\0') std::cerr << "error: " << msg << "\n";
  }
  hardy_free(result);
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("hardy-lab ") + hardy_version() +
               " -- two-weight Hardy inequality laboratory"};
  app.require_subcommand(0, 1);

  FlagValues root_flags;
  add_common_flags(&app, root_flags);
  std::string root_mode;
  app.add_option("--mode", root_mode, "analyze, sweep or verify")
      ->check(CLI::IsMember({"analyze", "sweep", "verify"}));

  CLI::App* analyze = app.add_subcommand(
      "analyze", "criterion, lower-bound constructions and brute-force search "
                 "for one instance");
  CLI::App* sweep = app.add_subcommand(
      "sweep", "grid of power-weight instances, one row per (a, b, p, q)");
  CLI::App* verify = app.add_subcommand(
      "verify", "built-in verification corpus; non-zero exit when any check "
                "fails");
  FlagValues analyze_flags, sweep_flags, verify_flags;
  add_common_flags(analyze, analyze_flags);
  add_common_flags(sweep, sweep_flags);
  add_common_flags(verify, verify_flags);

  CLI11_PARSE(app, argc, argv);

  if (analyze->parsed()) return merge_and_run(analyze_flags, "analyze");
  if (sweep->parsed()) return merge_and_run(sweep_flags, "sweep");
  if (verify->parsed()) return merge_and_run(verify_flags, "verify");
  return merge_and_run(root_flags, root_mode);
}
