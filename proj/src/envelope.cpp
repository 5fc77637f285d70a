#include "envelope.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace hardy {

MonotoneEnvelope::MonotoneEnvelope(std::vector<double> ts,
                                   std::vector<double> ys, Direction dir)
    : MonotoneEnvelope(std::move(ts), std::move(ys), dir, nullptr) {}

MonotoneEnvelope::MonotoneEnvelope(std::vector<double> ts,
                                   std::vector<double> ys, Direction dir,
                                   std::function<double(double)> exact)
    : ts_(std::move(ts)), ys_(std::move(ys)), dir_(dir),
      exact_(std::move(exact)) {
  if (ts_.size() != ys_.size() || ts_.size() < 2) {
    fail(ErrorCode::ConfigError, "envelope needs >= 2 matching samples");
  }
  double peak = 0.0;
  for (size_t i = 0; i < ts_.size(); ++i) {
    if (!(ts_[i] > 0.0) || !std::isfinite(ts_[i])) {
      fail(ErrorCode::ConfigError, "envelope abscissae must be positive finite");
    }
    if (i > 0 && !(ts_[i] > ts_[i - 1])) {
      fail(ErrorCode::ConfigError, "envelope abscissae must be strictly increasing");
    }
    if (std::isnan(ys_[i]) || ys_[i] < 0.0 || !std::isfinite(ys_[i])) {
      fail(ErrorCode::ConfigError, "envelope values must be finite and >= 0");
    }
    peak = std::max(peak, ys_[i]);
  }
  double slack = 1e-9 * peak;
  double run = ys_[0];
  for (size_t i = 1; i < ys_.size(); ++i) {
    double jump = dir_ == Direction::NonDecreasing ? run - ys_[i]
                                                   : ys_[i] - run;
    if (jump > slack) {
      fail(ErrorCode::MonotonicityViolated,
           "sample " + std::to_string(i) + " moves against the declared "
           "direction by " + std::to_string(jump));
    }
    // clamp rounding noise so downstream differences keep their sign
    if (dir_ == Direction::NonDecreasing) {
      run = std::max(run, ys_[i]);
    } else {
      run = std::min(run, ys_[i]);
    }
    ys_[i] = run;
  }
}

double MonotoneEnvelope::operator()(double t) const {
  if (!(t > 0.0)) fail(ErrorCode::NonPositiveArgument, "envelope needs t > 0");
  if (t <= ts_.front()) return ys_.front();
  if (t >= ts_.back()) return ys_.back();
  if (exact_) return exact_(t);
  size_t hi = std::upper_bound(ts_.begin(), ts_.end(), t) - ts_.begin();
  size_t lo = hi - 1;
  double y0 = ys_[lo], y1 = ys_[hi];
  if (y0 == y1) return y0;
  double u = std::log(t / ts_[lo]) / std::log(ts_[hi] / ts_[lo]);
  if (y0 > 0.0 && y1 > 0.0) {
    return std::exp(std::log(y0) + u * std::log(y1 / y0));
  }
  // one side is exactly zero: log-linear ramp
  return y0 + u * (y1 - y0);
}

ExtendedValue stieltjes_integrate(const std::function<double(double)>& g,
                                  const MonotoneEnvelope& F, double lo,
                                  double hi, double rel_tol,
                                  std::vector<double> initial_points) {
  if (F.direction() != Direction::NonDecreasing) {
    fail(ErrorCode::NotMonotone, "Stieltjes integrator must be non-decreasing");
  }
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) {
    fail(ErrorCode::NonPositiveArgument, "Stieltjes range needs 0 < lo < hi < inf");
  }
  if (!(rel_tol > 0.0)) fail(ErrorCode::ConfigError, "rel_tol must be positive");

  std::vector<double> pts;
  pts.push_back(lo);
  for (double t : F.abscissae()) {
    if (t > lo && t < hi) pts.push_back(t);
  }
  for (double t : initial_points) {
    if (t > lo && t < hi) pts.push_back(t);
  }
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  constexpr size_t kMaxPoints = 1u << 21;
  constexpr int kMaxLevels = 20;
  auto left_sum = [&](const std::vector<double>& xs,
                      bool& hit_infinity) -> double {
    double s = 0.0;
    hit_infinity = false;
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
      double dF = F(xs[i + 1]) - F(xs[i]);
      if (dF <= 0.0) continue;  // flat stretch carries no mass
      double gv = g(xs[i]);
      if (std::isnan(gv)) fail(ErrorCode::Internal, "Stieltjes integrand NaN");
      if (!std::isfinite(gv)) {
        hit_infinity = true;
        return kInf;
      }
      s += gv * dF;
    }
    return s;
  };

  bool inf_hit = false;
  double S_prev = left_sum(pts, inf_hit);
  if (inf_hit) return ExtendedValue::infinite(DivergenceSite::Interior);
  double R_prev = S_prev;
  bool have_R = false;
  for (int level = 0; level < kMaxLevels; ++level) {
    std::vector<double> finer;
    finer.reserve(pts.size() * 2);
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
      finer.push_back(pts[i]);
      double mid = std::sqrt(pts[i] * pts[i + 1]);
      if (mid > pts[i] && mid < pts[i + 1]) finer.push_back(mid);
    }
    finer.push_back(pts.back());
    pts.swap(finer);
    double S = left_sum(pts, inf_hit);
    if (inf_hit) return ExtendedValue::infinite(DivergenceSite::Interior);
    double R = 2.0 * S - S_prev;
    if (have_R || level > 0) {
      double diff = std::abs(R - R_prev);
      double scale = std::max(std::abs(R), 1e-290);
      if (diff <= rel_tol * scale) {
        return ExtendedValue::finite_value(R, diff + 8e-16 * scale);
      }
    }
    S_prev = S;
    R_prev = R;
    have_R = true;
    if (pts.size() > kMaxPoints) break;
  }
  fail(ErrorCode::ToleranceNotReached,
       "Stieltjes refinement exhausted without meeting tolerance");
}

double ess_sup(const PowerExpr& f, double t) {
  if (!(t > 0.0)) fail(ErrorCode::NonPositiveArgument, "ess_sup needs t > 0");
  return f.sup(0.0, t);
}

double ess_sup(const std::function<double(double)>& f, double t, int n_grid) {
  if (!(t > 0.0)) fail(ErrorCode::NonPositiveArgument, "ess_sup needs t > 0");
  if (n_grid < 8) n_grid = 8;
  double lo = t * 1e-12, hi = t;
  double best = 0.0, best_t = std::sqrt(lo * hi);
  for (int round = 0; round < 4; ++round) {
    int n = round == 0 ? n_grid : 64;
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i <= n; ++i) {
      double x = std::exp(llo + (lhi - llo) * i / n);
      x = std::min(x, t);
      double v = f(x);
      if (v > best) {
        best = v;
        best_t = x;
      }
    }
    if (!std::isfinite(best)) return best;
    double l = std::log(best_t);
    double half = (lhi - llo) / n;
    lo = std::exp(l - 2 * half);
    hi = std::min(t, std::exp(l + 2 * half));
    if (!(hi > lo)) break;
  }
  return best;
}

}  // namespace hardy
