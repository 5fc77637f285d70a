#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "envelope.hpp"
#include "errors.hpp"
#include "extremals.hpp"

namespace hardy {

namespace {

std::vector<double> oracle_edges(const HardyInstance& inst, Window win,
                                 std::size_t n_cells) {
  if (!(win.lo > 0.0) || !(win.hi > win.lo) || !std::isfinite(win.hi)) {
    fail(ErrorCode::ConfigError, "search window must satisfy 0 < lo < hi < inf");
  }
  if (n_cells < 2) fail(ErrorCode::ConfigError, "need at least two cells");
  std::vector<double> edges;
  const double llo = std::log(win.lo), lhi = std::log(win.hi);
  for (std::size_t i = 0; i <= n_cells; ++i) {
    edges.push_back(std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                       static_cast<double>(n_cells)));
  }
  edges.front() = win.lo;
  edges.back() = win.hi;
  for (double b : inst.v.breakpoints()) {
    if (b > win.lo && b < win.hi) edges.push_back(b);
  }
  for (double b : inst.w.breakpoints()) {
    if (b > win.lo && b < win.hi) edges.push_back(b);
  }
  std::sort(edges.begin(), edges.end());
  std::vector<double> dedup;
  for (double x : edges) {
    if (dedup.empty() || x > dedup.back() * (1.0 + 1e-12)) dedup.push_back(x);
  }
  return dedup;
}

// Portable uniform draw in [0, 1); avoids distribution objects so that the
// stream is pinned by the engine alone.
double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double golden_max(const std::function<double(double)>& f, double a, double b,
                  int iters) {
  constexpr double kGr = 0.6180339887498949;
  double c = b - kGr * (b - a), d = a + kGr * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + kGr * (b - a);
      fd = f(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - kGr * (b - a);
      fc = f(c);
    }
  }
  return fc > fd ? c : d;
}

// Discretized ratio with the left-endpoint surrogate for the output
// functional: cumulative masses frozen at cell left edges. The surrogate
// never exceeds the true ratio of the same step function, so ascent values
// remain certified lower bounds; final candidates are re-scored exactly.
class RatioSearch {
 public:
  RatioSearch(const HardyInstance& inst, std::vector<double> edges)
      : p_(inst.e.p), q_(inst.e.q), edges_(std::move(edges)) {
    n_ = edges_.size() - 1;
    dx_.resize(n_);
    vm_.resize(n_);
    wm_.resize(n_);
    const PowerExpr& vx = inst.v.expr();
    const PowerExpr& wx = inst.w.expr();
    for (std::size_t i = 0; i < n_; ++i) {
      dx_[i] = edges_[i + 1] - edges_[i];
      const ExtendedValue vi = vx.integral(edges_[i], edges_[i + 1]);
      vm_[i] = vi.finite() ? vi.value : kInf;
      wm_[i] = wx.integral(edges_[i], edges_[i + 1]).value;
    }
    wtail_ = wx.integral(edges_.back(), kInf).value;
    swt_.assign(n_ + 1, 0.0);
    swt_[n_] = wtail_;
    for (std::size_t i = n_; i-- > 0;) swt_[i] = swt_[i + 1] + wm_[i];
    pinned_.assign(n_, false);
    for (std::size_t i = 0; i < n_; ++i) {
      pinned_[i] = !(swt_[i + 1] > 0.0) || !std::isfinite(vm_[i]);
    }
  }

  std::size_t cells() const { return n_; }
  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& widths() const { return dx_; }
  const std::vector<double>& v_masses() const { return vm_; }
  const std::vector<double>& w_suffix() const { return swt_; }
  bool pinned(std::size_t i) const { return pinned_[i]; }

  void clamp_pinned(std::vector<double>& x) const {
    for (std::size_t i = 0; i < n_; ++i) {
      if (pinned_[i] || !(x[i] > 0.0)) x[i] = 0.0;
    }
  }

  double energy(const std::vector<double>& x) const {
    double d = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (x[i] > 0.0) d += vm_[i] * std::pow(x[i], p_);
    }
    return d;
  }

  // Ratio value of the surrogate objective.
  double surrogate(const std::vector<double>& x) const {
    double d = energy(x);
    if (!(d > 0.0)) return 0.0;
    double num = 0.0, prefix = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (wm_[i] > 0.0 && prefix > 0.0) num += wm_[i] * std::pow(prefix, q_);
      prefix += x[i] * dx_[i];
    }
    if (wtail_ > 0.0 && prefix > 0.0) num += wtail_ * std::pow(prefix, q_);
    if (!(num > 0.0)) return 0.0;
    return std::pow(num, 1.0 / q_) / std::pow(d, 1.0 / p_);
  }

  void normalize(std::vector<double>& x) const {
    const double d = energy(x);
    if (!(d > 0.0) || !std::isfinite(d)) return;
    const double scale = std::pow(d, -1.0 / p_);
    for (double& xi : x) xi *= scale;
  }

  // One ascending pass of per-cell maximization; returns the surrogate value
  // afterwards. Never decreases the objective.
  double sweep(std::vector<double>& x) {
    // snapshot prefix masses; cells ahead of the running index still carry
    // their pre-sweep values, which is exactly what the line functions need
    std::vector<double> P(n_ + 1, 0.0);
    for (std::size_t i = 0; i < n_; ++i) P[i + 1] = P[i] + x[i] * dx_[i];
    const bool fast1 = q_ == 1.0, fast2 = q_ == 2.0;
    std::vector<double> Q1, Q2;
    if (fast1 || fast2) {
      Q1.assign(n_ + 1, wtail_ * P[n_]);
      for (std::size_t i = n_; i-- > 0;) Q1[i] = Q1[i + 1] + wm_[i] * P[i];
    }
    if (fast2) {
      Q2.assign(n_ + 1, wtail_ * P[n_] * P[n_]);
      for (std::size_t i = n_; i-- > 0;)
        Q2[i] = Q2[i + 1] + wm_[i] * P[i] * P[i];
    }
    double d_cur = energy(x);
    double pre = 0.0;     // output terms of cells up to and including j
    double f_cur = 0.0;   // cumulative mass strictly below cell j, updated
    double x_scale = 1.0;
    for (double xi : x) x_scale = std::max(x_scale, xi);
    for (std::size_t j = 0; j < n_; ++j) {
      if (pinned_[j]) {
        // rebuild running quantities and move on
        f_cur += x[j] * dx_[j];
        if (j + 1 < n_ && wm_[j + 1] > 0.0 && f_cur > 0.0) {
          pre += wm_[j + 1] * std::pow(f_cur, q_);
        }
        continue;
      }
      const double d_rest = std::max(d_cur - vm_[j] * std::pow(x[j], p_), 0.0);
      const double off = P[j + 1];
      auto objective_at = [&](double xc) {
        const double u = xc * dx_[j];
        const double z = f_cur + u - off;
        double num;
        if (fast1) {
          num = pre + z * swt_[j + 1] + Q1[j + 1];
        } else if (fast2) {
          num = pre + z * z * swt_[j + 1] + 2.0 * z * Q1[j + 1] + Q2[j + 1];
        } else {
          num = pre;
          for (std::size_t i = j + 1; i < n_; ++i) {
            const double fi = z + P[i];
            if (wm_[i] > 0.0 && fi > 0.0) num += wm_[i] * std::pow(fi, q_);
          }
          const double ft = z + P[n_];
          if (wtail_ > 0.0 && ft > 0.0) num += wtail_ * std::pow(ft, q_);
        }
        const double den = d_rest + (xc > 0.0 ? vm_[j] * std::pow(xc, p_) : 0.0);
        if (!(num > 0.0) || !(den > 0.0)) return -kInf;
        return std::log(num) / q_ - std::log(den) / p_;
      };
      auto objective = [&](double s) { return objective_at(std::exp(s)); };
      const double s0 = std::log(x[j] > 0.0 ? x[j] : 1e-3 * x_scale);
      const double s_best = golden_max(objective, s0 - 4.0, s0 + 4.0, 28);
      const double cand = objective(s_best);
      const double keep = objective_at(x[j]);
      if (cand > keep) {
        x[j] = std::exp(s_best);
        x_scale = std::max(x_scale, x[j]);
      }
      d_cur = d_rest + vm_[j] * std::pow(x[j], p_);
      f_cur += x[j] * dx_[j];
      if (j + 1 < n_ && wm_[j + 1] > 0.0 && f_cur > 0.0) {
        pre += wm_[j + 1] * std::pow(f_cur, q_);
      }
    }
    normalize(x);
    return surrogate(x);
  }

  StepFunction step(const std::vector<double>& x) const {
    return StepFunction(edges_, x);
  }

 private:
  double p_, q_;
  std::vector<double> edges_, dx_, vm_, wm_, swt_;
  std::vector<bool> pinned_;
  double wtail_ = 0.0;
  std::size_t n_ = 0;
};

SearchResult degenerate_result(ExtendedValue value, std::string witness) {
  SearchResult out;
  out.C_est = value;
  out.witness = std::move(witness);
  return out;
}

}  // namespace

SearchResult best_constant_search(const HardyInstance& inst,
                                  const SearchConfig& cfg) {
  const Exponents& e = inst.e;
  const Window& win = cfg.window;
  if (cfg.restarts < 0 || cfg.max_iters < 0) {
    fail(ErrorCode::ConfigError, "restarts and max_iters must be nonnegative");
  }

  if (inst.w.expr().almost_everywhere_zero()) {
    return degenerate_result(
        ExtendedValue::finite_value(0.0),
        "w vanishes almost everywhere; the output functional is identically zero");
  }
  {
    const ExtendedValue wtot = inst.w.expr().integral(win.lo, kInf);
    if (!wtot.finite()) {
      return degenerate_result(
          ExtendedValue::infinite(wtot.site),
          "the mass of w past the window start diverges; every test function "
          "with mass there has an infinite output functional");
    }
  }

  RatioSearch ev(inst, oracle_edges(inst, win, cfg.n_cells));
  const std::size_t n = ev.cells();
  const auto& edges = ev.edges();
  const auto& swt = ev.w_suffix();

  // exact left-primitive values at the grid edges, used both for the
  // degeneracy scan and for placing the saturating seed
  std::vector<double> V_edge(n + 1, 0.0);
  const PowerExpr recip = inst.v.expr().reciprocal();
  if (e.p > 1.0) {
    const PowerExpr gv = inst.v.expr().pow(1.0 - e.p_prime());
    ExtendedValue prefix = gv.integral(0.0, edges[0]);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i > 0) prefix = prefix + gv.integral(edges[i - 1], edges[i]);
      if (!prefix.finite()) {
        if (swt[i] > 0.0) {
          return degenerate_result(
              ExtendedValue::infinite(prefix.site),
              "the inner primitive of v^{1-p'} diverges below t = " +
                  std::to_string(edges[i]) + " while w still has mass beyond");
        }
        V_edge[i] = kInf;
      } else {
        V_edge[i] = std::pow(prefix.value, 1.0 / e.p_prime());
      }
    }
  } else {
    const SupProfile prof(recip, win.hi);
    for (std::size_t i = 0; i <= n; ++i) {
      const double t = std::min(edges[i], win.hi);
      if (t > prof.infinite_from()) {
        if (swt[i] > 0.0) {
          return degenerate_result(
              ExtendedValue::infinite(prof.infinite_from() == 0.0
                                          ? DivergenceSite::AtZero
                                          : DivergenceSite::Interior),
              "the essential supremum of 1/v is infinite below t = " +
                  std::to_string(edges[i]) + " while w still has mass beyond");
        }
        V_edge[i] = kInf;
      } else {
        V_edge[i] = prof(t);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!ev.pinned(i) && !(ev.v_masses()[i] > 0.0)) {
      return degenerate_result(
          ExtendedValue::infinite(DivergenceSite::Interior),
          "v vanishes on a cell with w mass downstream; arbitrarily cheap "
          "test functions give unbounded ratios");
    }
  }
  bool any_free = false;
  for (std::size_t i = 0; i < n; ++i) any_free = any_free || !ev.pinned(i);
  if (!any_free) {
    return degenerate_result(
        ExtendedValue::finite_value(0.0),
        "no cell can contribute: every admissible test function has zero "
        "output or infinite energy");
  }

  // --- construction seeds -------------------------------------------------
  std::vector<std::vector<double>> starts;

  {  // saturating step truncated at the best grid edge of V * W^{1/q}
    double best = 0.0;
    std::size_t best_i = 0;
    for (std::size_t i = 1; i <= n; ++i) {
      if (!(swt[i] > 0.0) || !std::isfinite(V_edge[i])) continue;
      const double score = V_edge[i] * std::pow(swt[i], 1.0 / e.q);
      // ties broken toward wide support: on instances whose profile product
      // is flat, a wide saturating step scores far better than a narrow one
      if (score >= best) {
        best = score;
        best_i = i;
      }
    }
    if (best_i > 0) {
      std::vector<double> x(n, 0.0);
      const PowerExpr density =
          e.p > 1.0 ? inst.v.expr().pow(1.0 - e.p_prime()) : recip;
      for (std::size_t k = 0; k < best_i; ++k) {
        const ExtendedValue cell = density.integral(edges[k], edges[k + 1]);
        x[k] = cell.finite() ? cell.value / ev.widths()[k] : 0.0;
      }
      ev.clamp_pinned(x);
      starts.push_back(std::move(x));
    }
  }
  if (e.p > e.q && e.p > 1.0) {  // resampled theta-family test function
    try {
      const StepFunction th = theta_test_function(
          inst.v, inst.w, e, e.r() / e.p_prime() + 1.0, win,
          std::min<std::size_t>(cfg.n_cells, 512));
      std::vector<double> x(n, 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        x[k] = th(std::sqrt(edges[k] * edges[k + 1]));
      }
      ev.clamp_pinned(x);
      starts.push_back(std::move(x));
    } catch (const Error&) {
    }
  }
  if (e.p == 1.0 && e.q < 1.0) {  // resampled chain test function
    try {
      const SigmaDecomposition dec =
          sigma_levels(inst.v, inst.w, e, 2.0, win, 1e-6);
      const StepFunction h = build_h(dec);
      const SupProfile prof(recip, win.hi);
      const double sexp = e.q / (1.0 - e.q), zeta = 1.0 / (1.0 - e.q);
      std::vector<double> x(n, 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        const double mid = std::sqrt(edges[k] * edges[k + 1]);
        const double hv = h(mid);
        if (!(hv > 0.0)) continue;
        const double wt = inst.w.expr().integral(mid, kInf).value;
        if (!(wt > 0.0) || mid > prof.infinite_from()) continue;
        x[k] = hv * recip.eval(mid) * std::pow(prof(mid), sexp) *
               std::pow(wt, zeta);
      }
      ev.clamp_pinned(x);
      starts.push_back(std::move(x));
    } catch (const Error&) {
    }
  }
  const std::size_t n_seeds = starts.size();

  for (int rs = 0; rs < cfg.restarts; ++rs) {
    std::mt19937_64 rng(cfg.seed + 1000003ULL * static_cast<std::uint64_t>(rs + 1));
    std::vector<double> x(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = std::pow(10.0, -3.0 + 6.0 * u01(rng));
    }
    ev.clamp_pinned(x);
    starts.push_back(std::move(x));
  }

  SearchResult out;
  out.restart_history.resize(starts.size());

  // exact ratios of the raw seeds (the search result must dominate them)
  std::vector<StepFunction> candidates;
  std::vector<double> candidate_values;
  DivergenceSite inf_site = DivergenceSite::None;
  bool found_infinite = false;
  auto score_exact = [&](const StepFunction& f) {
    bool nonzero = false;
    for (double xv : f.values()) nonzero = nonzero || xv > 0.0;
    if (!nonzero) return 0.0;
    const ExtendedValue r = rayleigh_ratio(f, inst);
    if (!r.finite()) {
      found_infinite = true;
      inf_site = r.site;
      return kInf;
    }
    return r.value;
  };
  for (std::size_t s = 0; s < n_seeds; ++s) {
    const StepFunction f = ev.step(starts[s]);
    out.seed_ratios.push_back(score_exact(f));
    candidates.push_back(f);
    candidate_values.push_back(out.seed_ratios.back());
  }

  for (std::size_t s = 0; s < starts.size(); ++s) {
    std::vector<double> x = starts[s];
    ev.normalize(x);
    double cur = ev.surrogate(x);
    out.restart_history[s].push_back(cur);
    for (int it = 0; it < cfg.max_iters; ++it) {
      const double next = ev.sweep(x);
      out.restart_history[s].push_back(next);
      ++out.iterations;
      const bool improved = next > cur * (1.0 + cfg.ascent_tol);
      cur = std::max(cur, next);
      if (!improved) break;
    }
    const StepFunction f = ev.step(x);
    candidates.push_back(f);
    candidate_values.push_back(score_exact(f));
  }

  if (found_infinite) {
    out.C_est = ExtendedValue::infinite(inf_site);
    out.witness = "a test function achieved an infinite ratio";
    return out;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidate_values.size(); ++i) {
    if (candidate_values[i] > candidate_values[best]) best = i;
  }
  if (candidate_values.empty() || !(candidate_values[best] > 0.0)) {
    out.C_est = ExtendedValue::finite_value(0.0);
    out.witness = "no test function with positive ratio was found";
    return out;
  }
  out.C_est = ExtendedValue::finite_value(candidate_values[best]);
  out.argmax_f = candidates[best];
  return out;
}

SupremumCheck supremum_identity_check(const Weight& v, const Exponents& e,
                                      double t, const SearchConfig& cfg) {
  const ExtendedValue vt = compute_V(v, e, t);
  if (!vt.finite() || !(vt.value > 0.0)) {
    fail(ErrorCode::PreconditionViolated, "V(t) must be positive and finite");
  }
  const StepFunction seed = saturating_step(v, e, t, cfg.n_cells);
  const auto& edges = seed.edges();
  const std::size_t n = edges.size() - 1;
  std::vector<double> dx(n), vm(n), x = seed.values();
  const PowerExpr& vx = v.expr();
  for (std::size_t i = 0; i < n; ++i) {
    dx[i] = edges[i + 1] - edges[i];
    const ExtendedValue vi = vx.integral(edges[i], edges[i + 1]);
    vm[i] = vi.finite() ? vi.value : kInf;
    if (!std::isfinite(vm[i])) x[i] = 0.0;  // mass there costs infinite energy
  }

  SupremumCheck out;
  out.V_t = vt.value;

  if (e.p == 1.0) {
    // mass concentrates on the single best cell: a weighted mediant never
    // beats the largest of its parts
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (vm[i] > 0.0 && std::isfinite(vm[i])) {
        best = std::max(best, dx[i] / vm[i]);
      }
    }
    out.oracle_sup = best;
  } else {
    double mass = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mass += x[i] * dx[i];
      if (x[i] > 0.0) den += vm[i] * std::pow(x[i], e.p);
    }
    double cur = den > 0.0 ? mass / std::pow(den, 1.0 / e.p) : 0.0;
    for (int it = 0; it < std::max(cfg.max_iters, 8); ++it) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!(vm[j] > 0.0) || !std::isfinite(vm[j])) continue;
        const double a = mass - x[j] * dx[j];
        const double d_rest =
            std::max(den - (x[j] > 0.0 ? vm[j] * std::pow(x[j], e.p) : 0.0), 0.0);
        double x_new;
        if (a > 0.0 && d_rest > 0.0) {
          // unique stationary point of (a + b x)/(d + m x^p)^{1/p}
          x_new = std::pow(dx[j] * d_rest / (a * vm[j]), 1.0 / (e.p - 1.0));
        } else if (d_rest > 0.0) {
          x_new = (x[j] > 0.0 ? x[j] : 1.0) * std::exp(6.0);
        } else {
          x_new = x[j] > 0.0 ? x[j] : 1.0;
        }
        mass = a + x_new * dx[j];
        den = d_rest + vm[j] * std::pow(x_new, e.p);
        x[j] = x_new;
      }
      const double next = den > 0.0 ? mass / std::pow(den, 1.0 / e.p) : 0.0;
      if (next <= cur * (1.0 + cfg.ascent_tol)) {
        cur = std::max(cur, next);
        break;
      }
      cur = next;
    }
    out.oracle_sup = cur;
  }
  out.rel_gap = std::abs(out.oracle_sup - out.V_t) / out.V_t;
  return out;
}

EquivalenceAudit equivalence_audit(const HardyInstance& inst,
                                   const SearchConfig& cfg) {
  EquivalenceAudit audit;
  audit.functional = compute_A(inst, cfg.window);
  audit.criterion_finite = audit.functional.A.finite();

  const Regime reg = classify_regime(inst.e);
  try {
    if (reg == Regime::Convex) {
      double t = audit.functional.witness_t;
      if (!(t > 0.0) || !std::isfinite(t)) {
        t = std::sqrt(cfg.window.lo * cfg.window.hi);
      }
      const StepFunction f = saturating_step(
          inst.v, inst.e, t, std::min<std::size_t>(cfg.n_cells * 4, 2048));
      const ExtendedValue r = rayleigh_ratio(f, inst);
      if (r.finite()) audit.C_lower = r.value;
    } else if (reg == Regime::NonConvex) {
      const StepFunction f = theta_test_function(
          inst.v, inst.w, inst.e, inst.e.r() / inst.e.p_prime() + 1.0,
          cfg.window, std::min<std::size_t>(cfg.n_cells * 4, 2048));
      const ExtendedValue r = rayleigh_ratio(f, inst);
      if (r.finite()) audit.C_lower = r.value;
    } else {
      const SigmaDecomposition dec =
          sigma_levels(inst.v, inst.w, inst.e, 2.0, cfg.window, 1e-6);
      const StepFunction h = build_h(dec);
      const PowerExpr recip = inst.v.expr().reciprocal();
      const SupProfile prof(recip, cfg.window.hi);
      const double sexp = inst.e.q / (1.0 - inst.e.q);
      const double zeta = 1.0 / (1.0 - inst.e.q);
      const auto& he = h.edges();
      std::vector<double> vals(h.values().size(), 0.0);
      for (std::size_t i = 0; i < vals.size(); ++i) {
        if (!(h.values()[i] > 0.0)) continue;
        const double mid = std::sqrt(he[i] * he[i + 1]);
        if (mid > prof.infinite_from()) continue;
        const double wt = inst.w.expr().integral(mid, kInf).value;
        if (!(wt > 0.0)) continue;
        vals[i] = h.values()[i] * recip.eval(mid) *
                  std::pow(prof(mid), sexp) * std::pow(wt, zeta);
      }
      const StepFunction f(he, vals);
      const ExtendedValue r = rayleigh_ratio(f, inst);
      if (r.finite()) audit.C_lower = r.value;
    }
  } catch (const Error&) {
    // construction inapplicable on this instance; the bound stays at zero
  }

  const SearchResult main = best_constant_search(inst, cfg);
  audit.C_est = main.C_est;

  SearchConfig sub = cfg;
  sub.n_cells = std::min<std::size_t>(cfg.n_cells, 256);
  sub.restarts = std::min(cfg.restarts, 2);
  bool any_infinite = false;
  for (int k = 0; k < 3; ++k) {
    const double widen = std::pow(100.0, k);
    sub.window = Window{cfg.window.lo / widen, cfg.window.hi * widen};
    const SearchResult s = best_constant_search(inst, sub);
    audit.window_estimates[static_cast<std::size_t>(k)] =
        s.C_est.finite() ? s.C_est.value : kInf;
    any_infinite = any_infinite || !s.C_est.finite();
  }
  double growth = 0.0;
  for (int k = 0; k + 1 < 3; ++k) {
    const double a = audit.window_estimates[static_cast<std::size_t>(k)];
    const double b = audit.window_estimates[static_cast<std::size_t>(k + 1)];
    double g;
    if (a <= 1e-12 && b <= 1e-12) {
      g = 1.0;
    } else if (a <= 1e-12) {
      g = kInf;
    } else {
      g = b / a;
    }
    growth = std::max(growth, g);
  }
  audit.max_growth = growth;
  audit.oracle_stable = !any_infinite && growth < 1.1;
  audit.finiteness_agrees = audit.criterion_finite == audit.oracle_stable;

  if (audit.criterion_finite && audit.functional.A.value > 0.0) {
    if (audit.C_est.finite()) {
      audit.est_over_A = audit.C_est.value / audit.functional.A.value;
    }
    audit.lower_over_A = audit.C_lower / audit.functional.A.value;
  }
  return audit;
}

}  // namespace hardy
