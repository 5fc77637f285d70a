#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>

#include "errors.hpp"

namespace hardy {

namespace {

constexpr double kTinyScale = 1e-290;
// shells still carrying this growth rate when the budget runs out -> divergent
constexpr double kExhaustGrowthFloor = 0.999;
constexpr int kMaxShells = 64;
constexpr int kMaxCoreIntervals = 4000;

// Gauss 7 / Kronrod 15 on [-1, 1].
constexpr double kKronrodX[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
constexpr double kKronrodW[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kGaussW[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct PanelResult {
  double value = 0.0;  // K15 estimate
  double err = 0.0;    // |K15 - G7| based estimate
  bool finite = true;
};

PanelResult gk15(const Integrand& f, double a, double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double k15 = 0.0, g7 = 0.0;
  for (int i = 0; i < 8; ++i) {
    double fv;
    if (i == 7) {
      fv = f(c);
      if (!std::isfinite(fv)) return {0, 0, false};
      k15 += kKronrodW[7] * fv;
      g7 += kGaussW[3] * fv;
      continue;
    }
    double f1 = f(c - h * kKronrodX[i]);
    double f2 = f(c + h * kKronrodX[i]);
    if (!std::isfinite(f1) || !std::isfinite(f2)) return {0, 0, false};
    k15 += kKronrodW[i] * (f1 + f2);
    if (i % 2 == 1) g7 += kGaussW[i / 2] * (f1 + f2);
  }
  PanelResult r;
  r.value = k15 * h;
  // Plain |K15-G7| is conservative near singular ends, where the sharpened
  // QUADPACK exponent would understate the error.
  r.err = std::abs(k15 - g7) * std::abs(h) +
          4 * std::numeric_limits<double>::epsilon() * std::abs(r.value);
  return r;
}

struct Segment {
  double a, b, value, err;
  bool operator<(const Segment& o) const { return err < o.err; }
};

struct CoreResult {
  double value = 0.0;
  double err = 0.0;
  bool finite = true;
  bool converged = true;
};

// Adaptive refinement of the smooth middle part.
CoreResult adaptive_core(const Integrand& f, double a, double b,
                         double rel_tol, double scale_hint) {
  CoreResult out;
  if (!(b > a)) return out;
  PanelResult first = gk15(f, a, b);
  if (!first.finite) return {0, 0, false, false};
  std::priority_queue<Segment> heap;
  heap.push({a, b, first.value, first.err});
  double total = first.value, total_err = first.err;
  int n = 1;
  while (n < kMaxCoreIntervals) {
    double scale = std::max({std::abs(total), scale_hint, kTinyScale});
    if (total_err <= 0.25 * rel_tol * scale) break;
    Segment worst = heap.top();
    heap.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // interval at rounding resolution; keep its estimate
      total_err -= worst.err * 0.5;
      heap.push({worst.a, worst.b, worst.value, worst.err * 0.5});
      ++n;
      continue;
    }
    PanelResult l = gk15(f, worst.a, mid);
    PanelResult r = gk15(f, mid, worst.b);
    if (!l.finite || !r.finite) return {0, 0, false, false};
    total += l.value + r.value - worst.value;
    total_err += l.err + r.err - worst.err;
    heap.push({worst.a, mid, l.value, l.err});
    heap.push({mid, worst.b, r.value, r.err});
    ++n;
  }
  out.value = total;
  out.err = std::max(total_err, 0.0);
  double scale = std::max({std::abs(total), scale_hint, kTinyScale});
  out.converged = out.err <= rel_tol * scale;
  return out;
}

struct ShellResult {
  double value = 0.0;
  double err = 0.0;
  bool divergent = false;
  bool converged = true;
};

// Sums f over dyadic shells approaching `endpoint` from inside; `inner` is
// the boundary with the core region. Extrapolates the geometric tail once
// the shell ratio stabilises below 1. Growing shells alone do not certify
// divergence -- integrable mass concentrated at a finite distance from the
// endpoint produces long stretches of geometric growth before the shells
// start contracting -- so divergence is declared only when the shell budget
// (or floating-point resolution) is exhausted while the shells still grow.
ShellResult shell_sum(const Integrand& f, double endpoint, double inner,
                      double rel_tol, double scale_hint) {
  ShellResult out;
  double h = std::abs(inner - endpoint);
  if (!(h > 0.0)) return out;
  double sign = inner > endpoint ? 1.0 : -1.0;
  double partial = 0.0, err = 0.0, prev = 0.0;
  bool have_prev = false;
  std::deque<double> ratios;
  int tiny_streak = 0;
  for (int j = 0; j < kMaxShells; ++j) {
    double w = h * std::ldexp(1.0, -j);
    if (std::abs(endpoint) > 0.0 && w < std::abs(endpoint) * 0x1p-36) {
      // stop before node rounding distorts the shell values: past this width
      // the panel sums (and hence the growth ratios) are quantization noise
      break;
    }
    double outer_t = endpoint + sign * w;
    double inner_t = endpoint + sign * 0.5 * w;
    if (inner_t == endpoint || inner_t == outer_t) {
      // below floating-point resolution; whatever is left is unresolvable
      break;
    }
    double lo = std::min(inner_t, outer_t), hi = std::max(inner_t, outer_t);
    PanelResult s = gk15(f, lo, hi);
    if (!s.finite) {
      out.divergent = true;
      return out;
    }
    partial += s.value;
    err += s.err;
    double scale = std::max({std::abs(partial), scale_hint, kTinyScale});
    if (have_prev && prev != 0.0 && s.value != 0.0 &&
        (s.value > 0) == (prev > 0)) {
      ratios.push_back(s.value / prev);
      if (ratios.size() > 4) ratios.pop_front();
    } else if (s.value != prev) {
      ratios.clear();
    }
    if (std::abs(s.value) <= 0.01 * rel_tol * scale) {
      ++tiny_streak;
      if (tiny_streak >= 3) {
        err += 8 * std::abs(s.value);
        out.value = partial;
        out.err = err;
        return out;
      }
    } else {
      tiny_streak = 0;
    }
    if (ratios.size() == 4 && ratios.back() > 0.0 && ratios.back() < 1.0) {
      double mx = *std::max_element(ratios.begin(), ratios.end());
      double mn = *std::min_element(ratios.begin(), ratios.end());
      double spread = mx / mn - 1.0;
      if (spread < 2e-3) {
        double rho = ratios.back();
        double tail = s.value * rho / (1.0 - rho);
        double tail_err = std::abs(tail) * std::min(1.0, 4.0 * spread) +
                          8 * std::numeric_limits<double>::epsilon() *
                              std::abs(tail);
        if (tail_err <= 0.25 * rel_tol * scale) {
          out.value = partial + tail;
          out.err = err + tail_err;
          return out;
        }
      }
    }
    prev = s.value;
    have_prev = true;
  }
  double scale = std::max({std::abs(partial), scale_hint, kTinyScale});
  bool residual = have_prev && std::abs(prev) > 4 * rel_tol * scale;
  double growth = 0.0;
  for (double rho : ratios) growth = std::max(growth, rho);
  if (residual && growth >= kExhaustGrowthFloor) {
    out.divergent = true;
    return out;
  }
  out.value = partial;
  out.err = err + (have_prev ? 8 * std::abs(prev) : 0.0);
  out.converged = !residual || err <= 4 * rel_tol * scale;
  return out;
}

ExtendedValue integrate_finite_segment(const Integrand& f, double a, double b,
                                       double rel_tol, DivergenceSite lo_site,
                                       DivergenceSite hi_site) {
  double width = b - a;
  double mid_lo = a + 0.25 * width;
  double mid_hi = b - 0.25 * width;
  CoreResult core = adaptive_core(f, mid_lo, mid_hi, rel_tol, 0.0);
  if (!core.finite) return ExtendedValue::infinite(DivergenceSite::Interior);
  double scale = std::abs(core.value);
  ShellResult left = shell_sum(f, a, mid_lo, rel_tol, scale);
  if (left.divergent) return ExtendedValue::infinite(lo_site);
  scale = std::max(scale, std::abs(core.value + left.value));
  ShellResult right = shell_sum(f, b, mid_hi, rel_tol, scale);
  if (right.divergent) return ExtendedValue::infinite(hi_site);
  double value = core.value + left.value + right.value;
  double err = core.err + left.err + right.err;
  if (!std::isfinite(value)) return ExtendedValue::infinite(DivergenceSite::Interior);
  bool ok = core.converged && left.converged && right.converged;
  double final_scale = std::max(std::abs(value), kTinyScale);
  if (!ok && err > 16 * rel_tol * final_scale) {
    fail(ErrorCode::ToleranceNotReached,
         "refinement budget exhausted on (" + std::to_string(a) + ", " +
             std::to_string(b) + ")");
  }
  return ExtendedValue::finite_value(value, err);
}

ExtendedValue integrate_segment(const Integrand& f, double a, double b,
                                double rel_tol, DivergenceSite lo_site,
                                DivergenceSite hi_site) {
  if (b == kInf) {
    // t = u/(1-u) maps (a, inf) to (a/(1+a), 1)
    auto g = [&f](double u) {
      double om = 1.0 - u;
      return f(u / om) / (om * om);
    };
    double ua = a / (1.0 + a);
    return integrate_finite_segment(g, ua, 1.0, rel_tol, lo_site, hi_site);
  }
  return integrate_finite_segment(f, a, b, rel_tol, lo_site, hi_site);
}

}  // namespace

ExtendedValue integrate_split(const Integrand& f, double lo, double hi,
                              double rel_tol,
                              std::vector<double> interior_points) {
  if (!(lo >= 0.0) || !(hi > lo)) {
    fail(ErrorCode::NonPositiveArgument, "integration needs 0 <= lo < hi");
  }
  if (!(rel_tol > 0.0)) fail(ErrorCode::ConfigError, "rel_tol must be positive");
  std::sort(interior_points.begin(), interior_points.end());
  std::vector<double> knots;
  knots.push_back(lo);
  for (double t : interior_points) {
    if (t > knots.back() && t < hi) knots.push_back(t);
  }
  knots.push_back(hi);
  double total = 0.0, err = 0.0;
  for (size_t i = 0; i + 1 < knots.size(); ++i) {
    double a = knots[i], b = knots[i + 1];
    DivergenceSite lo_site =
        a == 0.0 ? DivergenceSite::AtZero : DivergenceSite::Interior;
    DivergenceSite hi_site =
        b == kInf ? DivergenceSite::AtInfinity : DivergenceSite::Interior;
    ExtendedValue part = integrate_segment(f, a, b, rel_tol, lo_site, hi_site);
    if (!part.finite()) return part;
    total += part.value;
    err += part.abs_error;
  }
  return ExtendedValue::finite_value(total, err);
}

ExtendedValue integrate(const Integrand& f, double lo, double hi,
                        double rel_tol) {
  return integrate_split(f, lo, hi, rel_tol, {});
}

}  // namespace hardy
