#pragma once

#include <json.hpp>

#include "envelope.hpp"
#include "extended_value.hpp"
#include "step_function.hpp"
#include "weight.hpp"

namespace hardy {

struct Window {
  double lo = 1e-6;
  double hi = 1e6;
};

struct HardyInstance {
  Weight v;
  Weight w;
  Exponents e;
};

// V(t): for p > 1 the p'-th root of the integral of v^{1-p'} over (0, t);
// for p = 1 the essential sup of 1/v over (0, t). Exact closed form.
ExtendedValue compute_V(const Weight& v, const Exponents& e, double t);

// W(t): integral of w over (t, inf). Exact closed form.
ExtendedValue compute_W(const Weight& w, double t);

// Largest t with V(t) < inf: 0 when V is infinite everywhere, inf when V is
// finite for every finite t.
double V_finite_cut(const Weight& v, const Exponents& e);

// Monotone envelopes sampled on a log grid over the window (plus weight
// breakpoints), carrying the exact evaluator. Throws WindowTooSmall if V is
// infinite inside the window.
MonotoneEnvelope envelope_V(const Weight& v, const Exponents& e, Window win,
                            int n_samples = 512);
MonotoneEnvelope envelope_W(const Weight& w, Window win, int n_samples = 512);

struct FunctionalResult {
  ExtendedValue A;
  Regime regime = Regime::Convex;
  // Convex: abscissa attaining the sup (0 / inf mark an endpoint limit).
  // Others: unused (0).
  double witness_t = 0.0;
  nlohmann::json diagnostics;
};

// The characterization functional. Convex regime: sup over t of
// V(t) W(t)^{1/q}, located by grid search plus golden-section refinement and
// closed-form endpoint limits. Other regimes: the Stieltjes integral of
// W^{p/(p-q)} against V^{pq/(p-q)}, with closed-form endpoint pieces and the
// convention that a positive limit V(0+) contributes an atom at the origin.
FunctionalResult compute_A(const HardyInstance& inst, Window win = {},
                           int n_samples = 512, double rel_tol = 1e-8);

// Alternative integral form of the functional for 1 <= q < p:
// integral of W^{r/q} V^{p' r / q'} v^{1-p'}; r/q' is taken as r (1 - 1/q),
// which vanishes at q = 1.
ExtendedValue mazya_rozin_A(const HardyInstance& inst, double rel_tol = 1e-8);

struct BoundCheck {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
};

// Pointwise bound on the running integral of a test function:
//   cumulative(f)(t) <= K (integral of f^p V^{eps p} v over (0,t))^{1/p}
//                         * V(t)^{1-eps}
// with K = (1-eps)^{-1/p'} for p > 1 and K = 1 for p = 1. `constant_scale`
// deliberately rescales K so callers can demonstrate a failing check.
BoundCheck check_pointwise_bound(const StepFunction& f, const Weight& v,
                                 const Exponents& e, double eps, double t,
                                 double constant_scale = 1.0);

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_gap = 0.0;
};

// Quadrature of V^{-eps p'} v^{1-p'} over (0, t) against its closed form
// V(t)^{(1-eps) p'} / (1-eps). Requires p > 1 and 0 < V(t) < inf.
IdentityCheck check_change_of_variables(const Weight& v, const Exponents& e,
                                        double eps, double t,
                                        double rel_tol = 1e-8);

}  // namespace hardy
