#include "step_function.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace hardy {

StepFunction::StepFunction(std::vector<double> edges,
                           std::vector<double> values)
    : edges_(std::move(edges)), values_(std::move(values)) {
  if (edges_.size() < 2 || values_.size() + 1 != edges_.size()) {
    fail(ErrorCode::ConfigError, "step function needs n+1 edges for n cells");
  }
  for (size_t i = 0; i < edges_.size(); ++i) {
    if (!(edges_[i] > 0.0) || !std::isfinite(edges_[i])) {
      fail(ErrorCode::ConfigError, "step edges must be positive finite");
    }
    if (i > 0 && !(edges_[i] > edges_[i - 1])) {
      fail(ErrorCode::ConfigError, "step edges must be strictly increasing");
    }
  }
  for (double v : values_) {
    if (std::isnan(v) || v < 0.0 || !std::isfinite(v)) {
      fail(ErrorCode::ConfigError, "step values must be finite and >= 0");
    }
  }
  cum_.resize(edges_.size());
  cum_[0] = 0.0;
  for (size_t i = 0; i < values_.size(); ++i) {
    cum_[i + 1] = cum_[i] + values_[i] * (edges_[i + 1] - edges_[i]);
  }
}

double StepFunction::operator()(double t) const {
  if (!(t > 0.0)) fail(ErrorCode::NonPositiveArgument, "step needs t > 0");
  if (t <= edges_.front() || t > edges_.back()) return 0.0;
  size_t hi = std::lower_bound(edges_.begin(), edges_.end(), t) - edges_.begin();
  return values_[hi - 1];
}

double StepFunction::cumulative(double t) const {
  if (!(t > 0.0)) fail(ErrorCode::NonPositiveArgument, "cumulative needs t > 0");
  if (t <= edges_.front()) return 0.0;
  if (t >= edges_.back()) return cum_.back();
  size_t hi = std::lower_bound(edges_.begin(), edges_.end(), t) - edges_.begin();
  return cum_[hi - 1] + values_[hi - 1] * (t - edges_[hi - 1]);
}

double StepFunction::power_energy(const PowerExpr& g, double p) const {
  double total = 0.0;
  for (size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] == 0.0) continue;
    ExtendedValue cell = g.integral(edges_[i], edges_[i + 1]);
    if (!cell.finite()) return kInf;
    total += std::pow(values_[i], p) * cell.value;
  }
  return total;
}

StepFunction StepFunction::scaled(double s) const {
  if (std::isnan(s) || s < 0.0) {
    fail(ErrorCode::ConfigError, "scale factor must be >= 0");
  }
  std::vector<double> vals = values_;
  for (double& v : vals) v *= s;
  return StepFunction(edges_, std::move(vals));
}

}  // namespace hardy
