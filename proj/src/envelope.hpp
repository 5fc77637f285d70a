#pragma once

#include <functional>
#include <vector>

#include "extended_value.hpp"
#include "weight.hpp"

namespace hardy {

enum class Direction { NonDecreasing, NonIncreasing };

// Monotone interpolant through positive abscissae. Interpolation is log-log
// between positive samples (exact for power segments) and log-linear where a
// sample is zero; outside the sampled range the end values are held.
// Construction rejects samples that violate the declared direction beyond
// rounding noise and clamps the rest to exact monotonicity.
class MonotoneEnvelope {
 public:
  MonotoneEnvelope(std::vector<double> ts, std::vector<double> ys,
                   Direction dir);
  // Same, but with an exact evaluator; samples stay as the refinement grid
  // while lookups between them use the closed form instead of interpolating.
  MonotoneEnvelope(std::vector<double> ts, std::vector<double> ys,
                   Direction dir, std::function<double(double)> exact);

  double operator()(double t) const;
  Direction direction() const { return dir_; }
  const std::vector<double>& abscissae() const { return ts_; }
  const std::vector<double>& ordinates() const { return ys_; }
  double lo() const { return ts_.front(); }
  double hi() const { return ts_.back(); }

 private:
  std::vector<double> ts_, ys_;
  Direction dir_;
  std::function<double(double)> exact_;
};

// Left-endpoint Riemann-Stieltjes integral of g against dF over [lo, hi],
// 0 < lo < hi < inf. Partitions refine at geometric midpoints; halting uses
// Richardson-extrapolated differences of consecutive left sums (plain left
// sums converge only first order, which would never meet the tolerance).
// Flat stretches of F contribute nothing even where g blows up.
ExtendedValue stieltjes_integrate(const std::function<double(double)>& g,
                                  const MonotoneEnvelope& F, double lo,
                                  double hi, double rel_tol = 1e-8,
                                  std::vector<double> initial_points = {});

// Essential supremum over (0, t). Exact per power piece.
double ess_sup(const PowerExpr& f, double t);

// Grid fallback for arbitrary callables; refines around the incumbent.
double ess_sup(const std::function<double(double)>& f, double t,
               int n_grid = 4096);

}  // namespace hardy
