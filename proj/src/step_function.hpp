#pragma once

#include <vector>

#include "weight.hpp"

namespace hardy {

// Nonnegative step function with compact support in (0, inf): n+1 strictly
// increasing positive edges carrying n constant cell values, zero outside.
// Cumulatives and weighted p-energies are exact sums of closed forms.
class StepFunction {
 public:
  StepFunction(std::vector<double> edges, std::vector<double> values);

  double operator()(double t) const;  // value on (edge_i, edge_{i+1}]
  double cumulative(double t) const;  // integral over (0, t)
  double total_mass() const { return cum_.back(); }

  // integral of f(t)^p * g(t) dt; cells with zero value contribute nothing
  // even where g is infinite.
  double power_energy(const PowerExpr& g, double p) const;

  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& values() const { return values_; }
  size_t cells() const { return values_.size(); }

  StepFunction scaled(double s) const;

 private:
  std::vector<double> edges_;
  std::vector<double> values_;
  std::vector<double> cum_;  // cumulative mass at each edge
};

}  // namespace hardy
