#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "extended_value.hpp"
#include "functionals.hpp"
#include "step_function.hpp"
#include "weight.hpp"

namespace hardy {

// Parameters of the brute-force ratio maximizer. Deterministic given `seed`;
// restarts run sequentially and merge by taking the best ratio, so the result
// does not depend on any execution schedule.
struct SearchConfig {
  std::size_t n_cells = 256;  // log-spaced cells over the window
  Window window{1e-4, 1e4};
  int restarts = 8;         // random starts beyond the construction seeds
  int max_iters = 60;       // coordinate-ascent sweeps per start
  double ascent_tol = 1e-9; // relative per-sweep improvement floor
  std::uint64_t seed = 42;
};

struct SearchResult {
  // Best ratio found: a certified lower bound on the least admissible
  // constant, and an estimate of it. Infinite when no finite constant can
  // work (with `witness` explaining why); zero when the output functional
  // vanishes identically.
  ExtendedValue C_est;
  StepFunction argmax_f{std::vector<double>{1.0, 2.0},
                        std::vector<double>{0.0}};
  int iterations = 0;  // accepted ascent sweeps across all starts
  // Objective value after each sweep, one row per start (construction seeds
  // first, then the random restarts). Non-decreasing within each row.
  std::vector<std::vector<double>> restart_history;
  // Exact ratio of every construction seed before any ascent. C_est never
  // falls below any of these.
  std::vector<double> seed_ratios;
  std::string witness;
};

SearchResult best_constant_search(const HardyInstance& inst,
                                  const SearchConfig& cfg = {});

// Direct maximization of (integral of f up to t) / (p-energy of f)^{1/p}
// over step functions supported in (0, t), compared against V(t).
struct SupremumCheck {
  double oracle_sup = 0.0;
  double V_t = 0.0;
  double rel_gap = 0.0;
};

SupremumCheck supremum_identity_check(const Weight& v, const Exponents& e,
                                      double t, const SearchConfig& cfg = {});

// Bundles the criterion value, the extremal-construction lower bound, and the
// brute-force estimate; classifies finiteness two ways and flags disagreement.
struct EquivalenceAudit {
  FunctionalResult functional;
  double C_lower = 0.0;   // best finite construction ratio (0 if none applies)
  ExtendedValue C_est;    // brute-force estimate on the base window
  double est_over_A = 0.0;    // C_est / A when A is finite positive, else 0
  double lower_over_A = 0.0;  // C_lower / A when A is finite positive, else 0
  bool criterion_finite = false;
  // Stability of C_est under window widening: three nested windows, each
  // widened by 100x on both sides; stable means every estimate is finite and
  // consecutive growth stays below 1.1.
  bool oracle_stable = false;
  std::array<double, 3> window_estimates{};
  double max_growth = 0.0;
  bool finiteness_agrees = false;
};

EquivalenceAudit equivalence_audit(const HardyInstance& inst,
                                   const SearchConfig& cfg = {});

}  // namespace hardy
