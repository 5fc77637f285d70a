#include "functionals.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "quadrature.hpp"

namespace hardy {

namespace {

// Leading behaviour coef * t^expo * |log t|^lg near one endpoint, or a
// certified blow-up. coef == 0 encodes an exact zero (e.g. W beyond the
// support of w).
struct Asym {
  bool infinite = false;
  double coef = 0.0;
  double expo = 0.0;
  double lg = 0.0;
};

Asym asym_pow(const Asym& a, double s) {
  if (a.infinite) return a;
  if (a.coef == 0.0) return a;
  return {false, std::pow(a.coef, s), a.expo * s, a.lg * s};
}

Asym asym_mul(const Asym& a, const Asym& b) {
  if (a.coef == 0.0 || b.coef == 0.0) return {false, 0.0, 0.0, 0.0};
  if (a.infinite || b.infinite) return {true, 0.0, 0.0, 0.0};
  return {false, a.coef * b.coef, a.expo + b.expo, a.lg + b.lg};
}

double asym_limit(const Asym& f, bool at_zero) {
  if (f.coef == 0.0) return 0.0;
  if (f.infinite) return kInf;
  // exponents arrive through mixed algebra (divisions vs. reciprocal
  // products), so an exactly balanced sum can land a few ulp off zero
  constexpr double kExpoEps = 1e-10;
  double expo = std::abs(f.expo) <= kExpoEps ? 0.0 : f.expo;
  double lg = std::abs(f.lg) <= kExpoEps ? 0.0 : f.lg;
  if (expo > 0.0) return at_zero ? 0.0 : kInf;
  if (expo < 0.0) return at_zero ? kInf : 0.0;
  if (lg > 0.0) return kInf;
  if (lg < 0.0) return 0.0;
  return f.coef;
}

// V(t) as t -> 0+.
Asym asym_V_zero(const Weight& v, const Exponents& e) {
  if (e.p == 1.0) {
    const PowerPiece& f = v.expr().reciprocal().pieces().front();
    if (f.c == kInf || f.a < 0.0) return {true};
    if (f.c == 0.0) return {false, 0.0, 0.0, 0.0};
    return {false, f.c, f.a, 0.0};
  }
  double pp = e.p_prime();
  const PowerPiece& f = v.expr().pow(1.0 - pp).pieces().front();
  if (f.c == kInf) return {true};
  if (f.c == 0.0) return {false, 0.0, 0.0, 0.0};
  double g = f.a + 1.0;
  if (g <= 0.0) return {true};
  return {false, std::pow(f.c / g, 1.0 / pp), g / pp, 0.0};
}

// V(t) as t -> inf; only meaningful when V is finite everywhere.
Asym asym_V_inf(const Weight& v, const Exponents& e) {
  if (e.p == 1.0) {
    auto recip = v.expr().reciprocal();
    const PowerPiece& l = recip.pieces().back();
    if (l.c != kInf && l.c != 0.0 && l.a > 0.0) return {false, l.c, l.a, 0.0};
    return {false, recip.sup(0.0, kInf), 0.0, 0.0};
  }
  double pp = e.p_prime();
  auto ev = v.expr().pow(1.0 - pp);
  const PowerPiece& l = ev.pieces().back();
  double g = l.a + 1.0;
  if (l.c != 0.0 && l.c != kInf) {
    if (g > 0.0) return {false, std::pow(l.c / g, 1.0 / pp), g / pp, 0.0};
    if (g == 0.0) return {false, std::pow(l.c, 1.0 / pp), 0.0, 1.0 / pp};
  }
  ExtendedValue total = ev.integral(0.0, kInf);
  if (!total.finite()) return {true};
  return {false, std::pow(total.value, 1.0 / pp), 0.0, 0.0};
}

// W(t) as t -> 0+; assumes the tail of w is integrable.
Asym asym_W_zero(const Weight& w) {
  const PowerPiece& f = w.expr().pieces().front();
  double g = f.a + 1.0;
  if (f.c == 0.0 || g > 0.0) {
    ExtendedValue w0 = w.expr().integral(0.0, kInf);
    if (!w0.finite()) return {true};
    return {false, w0.value, 0.0, 0.0};
  }
  if (g == 0.0) return {false, f.c, 0.0, 1.0};
  return {false, f.c / (-g), g, 0.0};
}

// W(t) as t -> inf.
Asym asym_W_inf(const Weight& w) {
  const PowerPiece& l = w.expr().pieces().back();
  if (l.c == 0.0) return {false, 0.0, 0.0, 0.0};
  double g = l.a + 1.0;
  if (g >= 0.0) return {true};
  return {false, l.c / (-g), g, 0.0};
}

// Upper edge of the support of w (0 if w vanishes a.e., inf for a live tail).
double support_end(const Weight& w) {
  const auto& ps = w.expr().pieces();
  for (auto it = ps.rbegin(); it != ps.rend(); ++it) {
    if (it->c != 0.0) return it->hi;
  }
  return 0.0;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out;
  out.reserve(n + 1);
  double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i <= n; ++i) {
    out.push_back(std::exp(llo + (lhi - llo) * i / n));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> merged_breakpoints(const HardyInstance& inst) {
  std::vector<double> bps = inst.v.breakpoints();
  for (double b : inst.w.breakpoints()) bps.push_back(b);
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  return bps;
}

double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double* arg_out) {
  // maximize over log-abscissa
  const double gr = 0.6180339887498949;
  double a = std::log(lo), b = std::log(hi);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(std::exp(x1)), f2 = f(std::exp(x2));
  for (int i = 0; i < 90 && b - a > 1e-14; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(std::exp(x2));
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(std::exp(x1));
    }
  }
  double xm = 0.5 * (a + b);
  double fm = f(std::exp(xm));
  if (arg_out) *arg_out = std::exp(xm);
  return std::max({f1, f2, fm});
}

}  // namespace

ExtendedValue compute_V(const Weight& v, const Exponents& e, double t) {
  if (!(t > 0.0)) fail(ErrorCode::NonPositiveArgument, "V needs t > 0");
  if (e.p == 1.0) {
    auto recip = v.expr().reciprocal();
    double s = recip.sup(0.0, t);
    if (std::isfinite(s)) {
      return ExtendedValue::finite_value(
          s, 4 * std::numeric_limits<double>::epsilon() * s);
    }
    for (const auto& pc : recip.pieces()) {
      if (pc.lo >= t) break;
      if (pc.lo == 0.0 && (pc.c == kInf || (pc.c > 0.0 && pc.a < 0.0))) {
        return ExtendedValue::infinite(DivergenceSite::AtZero);
      }
      if (pc.c == kInf) return ExtendedValue::infinite(DivergenceSite::Interior);
    }
    return ExtendedValue::infinite(DivergenceSite::Interior);
  }
  double pp = e.p_prime();
  ExtendedValue I = v.expr().pow(1.0 - pp).integral(0.0, t);
  if (!I.finite()) return I;
  double val = std::pow(I.value, 1.0 / pp);
  return ExtendedValue::finite_value(
      val, 8 * std::numeric_limits<double>::epsilon() * val);
}

ExtendedValue compute_W(const Weight& w, double t) {
  if (!(t > 0.0)) fail(ErrorCode::NonPositiveArgument, "W needs t > 0");
  return w.expr().integral(t, kInf);
}

double V_finite_cut(const Weight& v, const Exponents& e) {
  if (e.p == 1.0) {
    for (const auto& pc : v.expr().reciprocal().pieces()) {
      if (pc.lo == 0.0 && pc.c > 0.0 && pc.a < 0.0) return 0.0;
      if (pc.c == kInf) return pc.lo;
    }
    return kInf;
  }
  for (const auto& pc : v.expr().pow(1.0 - e.p_prime()).pieces()) {
    if (pc.lo == 0.0 && pc.c > 0.0 && pc.a + 1.0 <= 0.0) return 0.0;
    if (pc.c == kInf) return pc.lo;
  }
  return kInf;
}

namespace {

MonotoneEnvelope build_envelope(const std::function<double(double)>& fn,
                                Direction dir, Window win, int n_samples,
                                const std::vector<double>& extra_points,
                                const char* label) {
  std::vector<double> ts = log_grid(win.lo, win.hi, std::max(n_samples, 8));
  for (double b : extra_points) {
    if (b > win.lo && b < win.hi) ts.push_back(b);
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  std::vector<double> ys;
  ys.reserve(ts.size());
  for (double t : ts) {
    double y = fn(t);
    if (!std::isfinite(y)) {
      fail(ErrorCode::WindowTooSmall,
           std::string(label) + " is infinite at t = " + std::to_string(t) +
               "; shrink the window to where it is finite");
    }
    ys.push_back(y);
  }
  return MonotoneEnvelope(std::move(ts), std::move(ys), dir, fn);
}

}  // namespace

MonotoneEnvelope envelope_V(const Weight& v, const Exponents& e, Window win,
                            int n_samples) {
  if (!(win.lo > 0.0) || !(win.hi > win.lo) || !std::isfinite(win.hi)) {
    fail(ErrorCode::ConfigError, "window needs 0 < lo < hi < inf");
  }
  auto fn = [&v, e](double t) { return compute_V(v, e, t).value; };
  return build_envelope(fn, Direction::NonDecreasing, win, n_samples,
                        v.breakpoints(), "V");
}

MonotoneEnvelope envelope_W(const Weight& w, Window win, int n_samples) {
  if (!(win.lo > 0.0) || !(win.hi > win.lo) || !std::isfinite(win.hi)) {
    fail(ErrorCode::ConfigError, "window needs 0 < lo < hi < inf");
  }
  if (asym_W_inf(w).infinite) {
    fail(ErrorCode::DegenerateWeight, "tail of w is not integrable, W is infinite");
  }
  auto fn = [&w](double t) { return compute_W(w, t).value; };
  return build_envelope(fn, Direction::NonIncreasing, win, n_samples,
                        w.breakpoints(), "W");
}

namespace {

FunctionalResult convex_A(const HardyInstance& inst, Window win, int n_samples,
                          double rel_tol) {
  (void)rel_tol;  // closed-form evaluations; no quadrature involved
  FunctionalResult res;
  res.regime = Regime::Convex;
  const Exponents& e = inst.e;
  double q = e.q;

  if (inst.w.expr().almost_everywhere_zero()) {
    res.A = ExtendedValue::finite_value(0.0);
    res.diagnostics["note"] = "w vanishes a.e.";
    return res;
  }
  if (asym_W_inf(inst.w).infinite) {
    res.A = ExtendedValue::infinite(DivergenceSite::AtInfinity);
    res.diagnostics["note"] = "tail of w is not integrable";
    return res;
  }
  double cut = V_finite_cut(inst.v, e);
  if (cut == 0.0) {
    res.A = ExtendedValue::infinite(DivergenceSite::AtZero);
    res.diagnostics["note"] = "V is infinite for every t";
    return res;
  }
  if (cut < kInf) {
    ExtendedValue Wcut = compute_W(inst.w, cut);
    if (Wcut.value > 0.0) {
      res.A = ExtendedValue::infinite(DivergenceSite::Interior);
      res.witness_t = cut;
      res.diagnostics["note"] = "V blows up at the cut with w mass beyond it";
      res.diagnostics["cut"] = cut;
      return res;
    }
  }

  auto phi = [&inst, e, q](double t) -> double {
    ExtendedValue Wt = compute_W(inst.w, t);
    if (Wt.value == 0.0) return 0.0;
    ExtendedValue Vt = compute_V(inst.v, e, t);
    return Vt.value * std::pow(Wt.value, 1.0 / q);
  };

  double L0 = asym_limit(
      asym_mul(asym_V_zero(inst.v, e), asym_pow(asym_W_zero(inst.w), 1.0 / q)),
      true);
  if (L0 == kInf) {
    res.A = ExtendedValue::infinite(DivergenceSite::AtZero);
    res.witness_t = 0.0;
    res.diagnostics["note"] = "sup escapes to the origin";
    return res;
  }
  double Linf = 0.0;
  if (cut == kInf) {
    Linf = asym_limit(asym_mul(asym_V_inf(inst.v, e),
                               asym_pow(asym_W_inf(inst.w), 1.0 / q)),
                      false);
    if (Linf == kInf) {
      res.A = ExtendedValue::infinite(DivergenceSite::AtInfinity);
      res.witness_t = kInf;
      res.diagnostics["note"] = "sup escapes to infinity";
      return res;
    }
  }

  // Search grid: the window, stretched to cover all weight breakpoints so
  // piecewise weights are never probed blind, truncated at the V cut.
  std::vector<double> bps = merged_breakpoints(inst);
  double lo_g = win.lo, hi_g = win.hi;
  if (!bps.empty()) {
    lo_g = std::min(lo_g, bps.front() * 0.25);
    hi_g = std::max(hi_g, bps.back() * 4.0);
  }
  if (cut < kInf) {
    hi_g = std::min(hi_g, cut);
    lo_g = std::min(lo_g, cut * 1e-3);
  }
  std::vector<double> grid = log_grid(lo_g, hi_g, std::max(n_samples, 16));
  for (double b : bps) {
    if (b > lo_g && b < hi_g) grid.push_back(b);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  size_t best_i = 0;
  double best = -1.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    double f = phi(grid[i]);
    if (!std::isfinite(f)) {
      res.A = ExtendedValue::infinite(DivergenceSite::Interior);
      res.witness_t = grid[i];
      return res;
    }
    if (f > best) {
      best = f;
      best_i = i;
    }
  }
  if (best_i == 0 && best > L0 * (1.0 + 1e-9) + 1e-300) {
    fail(ErrorCode::WindowTooSmall,
         "sup of V W^{1/q} is still rising at the lower window edge t = " +
             std::to_string(lo_g) + "; extend the window downward");
  }
  double refined = best, arg = grid[best_i];
  if (best_i > 0 && best_i + 1 < grid.size()) {
    refined = golden_max(phi, grid[best_i - 1], grid[best_i + 1], &arg);
    refined = std::max(refined, best);
  }
  res.diagnostics["grid_points"] = grid.size();
  res.diagnostics["grid_max"] = best;
  res.diagnostics["limit_at_zero"] = L0;
  res.diagnostics["limit_at_infinity"] = Linf;
  double A = std::max({refined, L0, Linf});
  if (A == refined) {
    res.witness_t = arg;
  } else {
    res.witness_t = A == L0 ? 0.0 : kInf;
  }
  res.A = ExtendedValue::finite_value(A, 1e-11 * A);
  return res;
}

// Integrand of the mass of V^{vp} against W^{wp} where V is absolutely
// continuous: W(t)^{wp} (vp/p') I(t)^{(vp-p')/p'} v(t)^{1-p'} for p > 1.
struct NonConvexDensity {
  const Weight* w;
  PowerExpr ev;  // v^{1-p'}
  double wp, vp, pp;
  double operator()(double t) const {
    double Wt = compute_W(*w, t).value;
    if (Wt == 0.0) return 0.0;
    ExtendedValue I = ev.integral(0.0, t);
    if (!I.finite()) return kInf;
    return std::pow(Wt, wp) * (vp / pp) *
           std::pow(I.value, (vp - pp) / pp) * ev.eval(t);
  }
};

FunctionalResult nonconvex_A(const HardyInstance& inst, Window win,
                             int n_samples, double rel_tol) {
  FunctionalResult res;
  const Exponents& e = inst.e;
  res.regime = classify_regime(e);
  const double wp = e.p / (e.p - e.q);
  const double vp = e.p * e.q / (e.p - e.q);

  if (inst.w.expr().almost_everywhere_zero()) {
    res.A = ExtendedValue::finite_value(0.0);
    res.diagnostics["note"] = "w vanishes a.e.";
    return res;
  }
  if (asym_W_inf(inst.w).infinite) {
    res.A = ExtendedValue::infinite(DivergenceSite::AtInfinity);
    res.diagnostics["note"] = "tail of w is not integrable";
    return res;
  }
  double cut = V_finite_cut(inst.v, e);
  if (cut == 0.0) {
    res.A = ExtendedValue::infinite(DivergenceSite::AtZero);
    res.diagnostics["note"] = "V is infinite for every t";
    return res;
  }
  if (cut < kInf && compute_W(inst.w, cut).value > 0.0) {
    res.A = ExtendedValue::infinite(DivergenceSite::Interior);
    res.diagnostics["note"] = "V blows up at the cut with w mass beyond it";
    res.diagnostics["cut"] = cut;
    return res;
  }
  double U = std::min(cut, support_end(inst.w));

  // Atom at the origin: a positive limit V(0+) weights the mass W(0+)^{wp}.
  double atom0 = 0.0;
  Asym v0 = asym_V_zero(inst.v, e);
  double V0 = v0.infinite        ? kInf
              : v0.expo == 0.0 ? asym_limit(v0, true)
                               : 0.0;
  if (V0 > 0.0) {
    double W0 = asym_limit(asym_W_zero(inst.w), true);
    if (W0 == kInf || V0 == kInf) {
      res.A = ExtendedValue::infinite(DivergenceSite::AtZero);
      res.diagnostics["note"] = "atom at the origin carries infinite mass";
      return res;
    }
    atom0 = std::pow(V0, vp) * std::pow(W0, wp);
  }

  std::vector<double> bps = merged_breakpoints(inst);
  double ta = win.lo, tb = win.hi;
  if (!bps.empty()) {
    ta = std::min(ta, bps.front() * 0.25);
    tb = std::max(tb, bps.back() * 4.0);
  }
  ta = std::min(ta, 0.5 * U);
  tb = std::min(tb, U);

  double err = 0.0;
  double total = atom0;

  // (0, ta]: V is a single power there, so the mass has a closed-form
  // density; the shell rule pins divergence at the origin.
  ExtendedValue near0;
  if (e.p > 1.0) {
    NonConvexDensity dens{&inst.w, inst.v.expr().pow(1.0 - e.p_prime()), wp,
                          vp, e.p_prime()};
    near0 = integrate(dens, 0.0, ta, rel_tol);
  } else {
    // ta sits strictly below the first knot, where the sup profile of 1/v is
    // a single power piece: either rising (power density) or flat (no mass).
    const PowerPiece& f0 = inst.v.expr().reciprocal().pieces().front();
    if (f0.c > 0.0 && f0.a > 0.0) {
      double c0 = f0.c, a0 = f0.a;
      auto dens = [&inst, c0, a0, wp, vp](double t) {
        double Wt = compute_W(inst.w, t).value;
        if (Wt == 0.0) return 0.0;
        return std::pow(Wt, wp) * vp * a0 * std::pow(c0, vp) *
               std::pow(t, a0 * vp - 1.0);
      };
      near0 = integrate(dens, 0.0, ta, rel_tol);
    } else {
      near0 = ExtendedValue::finite_value(0.0);
    }
  }
  if (!near0.finite()) {
    res.A = ExtendedValue::infinite(DivergenceSite::AtZero);
    res.diagnostics["note"] = "mass diverges at the origin";
    return res;
  }
  total += near0.value;
  err += near0.abs_error;

  // [ta, tb]: left-sum Stieltjes against the exact envelope of V^{vp}.
  ExtendedValue interior = ExtendedValue::finite_value(0.0);
  size_t envelope_samples = 0;
  if (tb > ta * (1.0 + 1e-14)) {
    auto Fexact = [&inst, &e, vp](double t) {
      return std::pow(compute_V(inst.v, e, t).value, vp);
    };
    MonotoneEnvelope F =
        build_envelope(Fexact, Direction::NonDecreasing, Window{ta, tb},
                       n_samples, inst.v.breakpoints(), "V^{pq/(p-q)}");
    envelope_samples = F.abscissae().size();
    auto g = [&inst, wp](double t) {
      return std::pow(compute_W(inst.w, t).value, wp);
    };
    interior = stieltjes_integrate(g, F, ta, tb, rel_tol, bps);
    if (!interior.finite()) {
      res.A = ExtendedValue::infinite(DivergenceSite::Interior);
      return res;
    }
    total += interior.value;
    err += interior.abs_error;
  }

  // [tb, U): beyond every breakpoint; density quadrature handles a finite or
  // infinite top end, including the divergence verdict there.
  ExtendedValue tail = ExtendedValue::finite_value(0.0);
  if (U > tb * (1.0 + 1e-14)) {
    if (e.p > 1.0) {
      NonConvexDensity dens{&inst.w, inst.v.expr().pow(1.0 - e.p_prime()), wp,
                            vp, e.p_prime()};
      tail = integrate(dens, tb, U, rel_tol);
    } else {
      auto recip = inst.v.expr().reciprocal();
      const PowerPiece& l = recip.pieces().back();
      if (l.c > 0.0 && l.c < kInf && l.a > 0.0) {
        double M = compute_V(inst.v, e, tb).value;
        double t_cross = std::pow(M / l.c, 1.0 / l.a);
        double lo_t = std::max(tb, std::min(t_cross, U));
        if (U > lo_t * (1.0 + 1e-14)) {
          double cL = l.c, aL = l.a;
          auto dens = [&inst, cL, aL, wp, vp](double t) {
            double Wt = compute_W(inst.w, t).value;
            if (Wt == 0.0) return 0.0;
            return std::pow(Wt, wp) * vp * aL * std::pow(cL, vp) *
                   std::pow(t, aL * vp - 1.0);
          };
          tail = integrate(dens, lo_t, U, rel_tol);
        }
      }
      // non-increasing reciprocal beyond the last knot: V is flat, no mass
    }
    if (!tail.finite()) {
      res.A = ExtendedValue::infinite(
          U == kInf ? DivergenceSite::AtInfinity : DivergenceSite::Interior);
      return res;
    }
    total += tail.value;
    err += tail.abs_error;
  }

  res.A = ExtendedValue::finite_value(total, err);
  res.diagnostics["atom_at_zero"] = atom0;
  res.diagnostics["mass_below"] = near0.value;
  res.diagnostics["mass_interior"] = interior.value;
  res.diagnostics["mass_above"] = tail.value;
  res.diagnostics["stieltjes_lo"] = ta;
  res.diagnostics["stieltjes_hi"] = tb;
  res.diagnostics["upper_end"] = U == kInf ? nlohmann::json("inf")
                                           : nlohmann::json(U);
  res.diagnostics["envelope_samples"] = envelope_samples;
  return res;
}

}  // namespace

FunctionalResult compute_A(const HardyInstance& inst, Window win,
                           int n_samples, double rel_tol) {
  if (!(win.lo > 0.0) || !(win.hi > win.lo) || !std::isfinite(win.hi)) {
    fail(ErrorCode::ConfigError, "window needs 0 < lo < hi < inf");
  }
  if (classify_regime(inst.e) == Regime::Convex) {
    return convex_A(inst, win, n_samples, rel_tol);
  }
  return nonconvex_A(inst, win, n_samples, rel_tol);
}

ExtendedValue mazya_rozin_A(const HardyInstance& inst, double rel_tol) {
  const Exponents& e = inst.e;
  if (!(e.q >= 1.0) || !(e.q < e.p)) {
    fail(ErrorCode::RegimeMismatch,
         "integral form needs 1 <= q < p");
  }
  if (inst.w.expr().almost_everywhere_zero()) {
    return ExtendedValue::finite_value(0.0);
  }
  if (asym_W_inf(inst.w).infinite) {
    return ExtendedValue::infinite(DivergenceSite::AtInfinity);
  }
  double cut = V_finite_cut(inst.v, e);
  if (cut == 0.0) return ExtendedValue::infinite(DivergenceSite::AtZero);
  if (cut < kInf && compute_W(inst.w, cut).value > 0.0) {
    return ExtendedValue::infinite(DivergenceSite::Interior);
  }
  double U = std::min(cut, support_end(inst.w));
  double r = e.r();
  double rq = r / e.q;
  double rqp = r * (1.0 - 1.0 / e.q);  // r/q', zero at q == 1
  PowerExpr ev = inst.v.expr().pow(1.0 - e.p_prime());
  auto m = [&inst, &ev, rq, rqp](double t) -> double {
    double Wt = compute_W(inst.w, t).value;
    if (Wt == 0.0) return 0.0;
    ExtendedValue I = ev.integral(0.0, t);
    if (!I.finite()) return kInf;
    return std::pow(Wt, rq) * std::pow(I.value, rqp) * ev.eval(t);
  };
  return integrate_split(m, 0.0, U, rel_tol, merged_breakpoints(inst));
}

BoundCheck check_pointwise_bound(const StepFunction& f, const Weight& v,
                                 const Exponents& e, double eps, double t,
                                 double constant_scale) {
  if (!(eps > 0.0) || !(eps < 1.0)) {
    fail(ErrorCode::ConfigError, "eps must lie in (0, 1)");
  }
  if (!(t > 0.0)) fail(ErrorCode::NonPositiveArgument, "bound needs t > 0");
  BoundCheck out;
  out.lhs = f.cumulative(t);
  if (out.lhs == 0.0) {
    // no mass below t: both sides vanish, counted as holding with zero slack
    out.holds = true;
    return out;
  }
  ExtendedValue Vt = compute_V(v, e, t);
  double K = e.p == 1.0
                 ? constant_scale
                 : constant_scale * std::pow(1.0 - eps, -1.0 / e.p_prime());
  if (!Vt.finite()) {
    out.rhs = kInf;
    out.slack = kInf;
    out.holds = true;
    return out;
  }
  double M = 0.0;
  const auto& edges = f.edges();
  const auto& vals = f.values();
  std::vector<double> vbps = v.breakpoints();
  for (size_t i = 0; i < vals.size() && edges[i] < t; ++i) {
    if (vals[i] == 0.0) continue;
    double lo = edges[i], hi = std::min(edges[i + 1], t);
    auto integrand = [&v, &e, eps](double s) {
      double Vs = compute_V(v, e, s).value;
      return std::pow(Vs, eps * e.p) * v.expr().eval(s);
    };
    std::vector<double> pts;
    for (double b : vbps) {
      if (b > lo && b < hi) pts.push_back(b);
    }
    ExtendedValue cell = integrate_split(integrand, lo, hi, 1e-10, pts);
    if (!cell.finite()) {
      out.rhs = kInf;
      out.slack = kInf;
      out.holds = true;
      return out;
    }
    M += std::pow(vals[i], e.p) * cell.value;
  }
  out.rhs = K * std::pow(M, 1.0 / e.p) * std::pow(Vt.value, 1.0 - eps);
  out.slack = out.rhs - out.lhs;
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-8) + 1e-300;
  return out;
}

IdentityCheck check_change_of_variables(const Weight& v, const Exponents& e,
                                        double eps, double t, double rel_tol) {
  if (e.p == 1.0) {
    fail(ErrorCode::RegimeMismatch, "substitution identity needs p > 1");
  }
  if (!(eps > 0.0) || !(eps < 1.0)) {
    fail(ErrorCode::ConfigError, "eps must lie in (0, 1)");
  }
  if (!(t > 0.0)) fail(ErrorCode::NonPositiveArgument, "identity needs t > 0");
  PowerExpr ev = v.expr().pow(1.0 - e.p_prime());
  ExtendedValue It = ev.integral(0.0, t);
  if (!It.finite() || It.value <= 0.0) {
    fail(ErrorCode::PreconditionViolated,
         "identity needs 0 < V(t) < inf at the probe point");
  }
  auto integrand = [&ev, eps](double s) {
    ExtendedValue I = ev.integral(0.0, s);
    return std::pow(I.value, -eps) * ev.eval(s);
  };
  std::vector<double> pts;
  for (double b : v.breakpoints()) {
    if (b < t) pts.push_back(b);
  }
  ExtendedValue lhs = integrate_split(integrand, 0.0, t, rel_tol, pts);
  IdentityCheck out;
  out.lhs = lhs.value;
  out.rhs = std::pow(It.value, 1.0 - eps) / (1.0 - eps);
  out.rel_gap = std::abs(out.lhs - out.rhs) / out.rhs;
  return out;
}

}  // namespace hardy
