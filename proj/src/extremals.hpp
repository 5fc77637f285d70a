#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "envelope.hpp"
#include "extended_value.hpp"
#include "functionals.hpp"
#include "step_function.hpp"
#include "weight.hpp"

namespace hardy {

// ---------------------------------------------------------------------------
// Running-supremum profile
// ---------------------------------------------------------------------------

// One span of the running supremum: either flat at `value`, or rising along
// the power c * t^a (a > 0). Spans cover (lo, hi] and tile (0, cap].
struct SupSegment {
  double lo = 0.0;
  double hi = 0.0;
  bool flat = true;
  double value = 0.0;  // flat level (meaningful when flat)
  double c = 0.0;      // rising coefficient (meaningful when !flat)
  double a = 0.0;      // rising exponent, > 0 (meaningful when !flat)
};

// Piecewise closed form of t -> ess sup over (0, t) of a piecewise-power
// expression, built once and then evaluated, inverted and integrated exactly.
// The profile is non-decreasing and left-continuous; if the supremum becomes
// infinite at some abscissa the profile reports it instead of overflowing.
class SupProfile {
 public:
  // Builds the profile on (0, cap]; cap must be positive and finite.
  SupProfile(const PowerExpr& g, double cap);

  // Left-continuous value at t (clamped to the cap value beyond the cap).
  double operator()(double t) const;

  double limit_at_zero() const { return limit0_; }
  // Abscissa from which the running supremum is +inf (kInf if never).
  double infinite_from() const { return inf_from_; }
  double cap() const { return cap_; }

  // inf { t : profile(t) > level }; kInf when the level is never exceeded
  // on (0, cap].
  double first_cross(double level) const;

  // Exact integral of profile(t)^s over (x, y), clipped to (0, cap].
  // Requires s > 0; spans where the profile is zero contribute nothing.
  double integral_power(double x, double y, double s) const;

  const std::vector<SupSegment>& segments() const { return segments_; }

 private:
  std::vector<SupSegment> segments_;
  double cap_ = 0.0;
  double limit0_ = 0.0;
  double inf_from_ = kInf;
};

// Exact integral over (x, y) of g(t) * profile(t)^s for a piecewise-power g;
// every overlap of a g-piece with a profile span is a closed-form power
// integral. Requires the profile to be finite on (x, y).
double weighted_profile_integral(const PowerExpr& g, const SupProfile& prof,
                                 double s, double x, double y);

// ---------------------------------------------------------------------------
// Test-function constructions
// ---------------------------------------------------------------------------

// Step discretization of the mass-optimal test function truncated at t.
//
// For p > 1 this is v^{1-p'} on (0, t), realized as exact cell averages on a
// log grid whose lower end is pushed down until all but a 1e-8 fraction of
// the mass of v^{1-p'} is covered. For p = 1 it is (1/v) restricted to the
// set where 1/v >= lambda, with lambda < V(t); lambda <= 0 selects the
// default 0.99 * V(t).
//
// Throws DegenerateWeight when V(t) is 0 or +inf (no finite normalization
// exists), PreconditionViolated for a p = 1 lambda >= V(t).
StepFunction saturating_step(const Weight& v, const Exponents& e, double t,
                             std::size_t n_cells = 2048, double lambda = 0.0);

// cumulative(f)(t) / (integral of f^p v)^{1/p} -- the quantity the
// saturating step drives toward V(t).
double saturation_ratio(const StepFunction& f, const Weight& v,
                        const Exponents& e, double t);

// Step discretization, on (win.lo, win.hi), of the two-parameter family
//   f(t) = (integral_t^T  W^{r/p} w V^{r - theta p'})^{1/p}
//          * V(t)^{(theta-1)(p'-1)} * v(t)^{1-p'},
// with the outer integral truncated at T = win.hi. Requires p > q, p > 1
// (RegimeMismatch) and theta > r/p' (ThetaOutOfRange); DegenerateWeight when
// V or W is infinite inside the window.
StepFunction theta_test_function(const Weight& v, const Weight& w,
                                 const Exponents& e, double theta,
                                 Window win = {}, std::size_t n_cells = 2048);

struct ThetaDiagnostics {
  double b_truncated = 0.0;  // integral of V^r W^{r/p} w over (0, win.hi)
  double energy = 0.0;       // integral of f^p v for the step realization
  double rel_gap = 0.0;      // |energy - b_truncated/theta| / (b/theta)
};

// Checks the exact energy identity of the family above: the p-energy of f
// equals b_truncated / theta. The gap measures only the step-sampling error.
ThetaDiagnostics theta_energy_identity(const Weight& v, const Weight& w,
                                       const Exponents& e, double theta,
                                       Window win = {},
                                       std::size_t n_cells = 2048,
                                       double rel_tol = 1e-8);

// ---------------------------------------------------------------------------
// Level decomposition for p = 1, q < 1
// ---------------------------------------------------------------------------

struct SigmaInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct SigmaLevel {
  int k = 0;          // level index: sigma^k < V <= sigma^{k+1} on (a, b]
  double a = 0.0;     // first abscissa where V exceeds sigma^k
  double b = 0.0;     // end of the level (possibly clipped at the window)
  double delta = 0.0; // margin with a + delta < b chosen by bisection so that
                      // the tail mass over (a, b) is at most sigma times the
                      // tail mass over (a + delta, b)
  std::vector<SigmaInterval> G;  // where 1/v > sigma^k inside (a, a + delta)
  double G_measure = 0.0;        // |G|, floored at 1e-12 for normalization
  double tail_mass_full = 0.0;   // integral of W^{q/(1-q)} w over (a, b)
  double tail_mass_delta = 0.0;  // the same over (a + delta, b)
  bool truncated = false;        // b was clipped at the window edge
};

struct SigmaDecomposition {
  double sigma = 0.0;
  double q = 0.0;
  Window window;
  std::vector<SigmaLevel> levels;  // ascending k
  bool bottom_truncated = false;   // level enumeration stopped above 0
  bool top_truncated = false;      // highest level clipped at the window
};

// Splits (0, win.hi) into the bands where V = running ess sup of 1/v crosses
// consecutive powers of sigma, picks each band's margin delta by bisection on
// the tail-mass condition, and realizes G as explicit intervals. Requires
// p = 1 > q (RegimeMismatch) and sigma > 1 (PreconditionViolated); throws
// EmptyDecomposition when V is identically 0 or +inf on the window.
SigmaDecomposition sigma_levels(const Weight& v, const Weight& w,
                                const Exponents& e, double sigma,
                                Window win = {}, double rel_tol = 1e-8);

// The normalized indicator sum over the decomposition's G sets: value
// 1/|G_k| on each interval of G_k, zero between. Unit mass per level.
StepFunction build_h(const SigmaDecomposition& dec);

// ---------------------------------------------------------------------------
// Ratio and order-comparison checks
// ---------------------------------------------------------------------------

// (integral over (0,inf) of cumulative(f)^q w)^{1/q} divided by
// (integral of f^p v)^{1/p}. Any finite value is a lower bound for the best
// constant of the inequality. +inf is a legitimate result (divergent
// numerator); ZeroFunction and IndeterminateRatio guard f == 0 and a zero or
// infinite denominator.
ExtendedValue rayleigh_ratio(const StepFunction& f, const HardyInstance& inst,
                             double rel_tol = 1e-8);

struct LemmaCheck {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_slack = 0.0;  // (rhs - lhs) / rhs
};

// If cumulative mass of mu1 never exceeds that of mu2, then integrals of any
// non-increasing step function are ordered the same way. Evaluates both
// integrals (the region below h's first edge counts with h's first value)
// and reports the comparison. Throws NotMonotone for a wrongly-directed
// input and PreconditionViolated when cumulative domination fails on the
// merged grid -- the comparison is then inapplicable rather than false.
LemmaCheck hardy_lemma_check(const MonotoneEnvelope& cum1,
                             const MonotoneEnvelope& cum2,
                             const StepFunction& h);

// ---------------------------------------------------------------------------
// Full lower-bound chain for p = 1, q < 1
// ---------------------------------------------------------------------------

struct ChainStep {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;       // already includes the claimed constant
  double constant = 1.0;  // the claimed multiplicative constant
  bool holds = false;
  double rel_slack = 0.0;  // (rhs - lhs) / max(rhs, lhs)
};

struct ChainLevelCheck {
  int k = 0;
  bool tail_condition_holds = false;  // full tail mass <= sigma * margin tail mass
  double h_estimate = 0.0;            // cumulative of h v^{-1} V^{q/(1-q)} at a+delta
  double h_estimate_bound = 0.0;      // sigma^{k/(1-q)}
  bool h_estimate_holds = false;
};

struct ChainReport {
  double sigma = 0.0;
  double q = 0.0;
  double D = 0.0;  // the characterization integral being bounded
  double K = 0.0;  // pinned domination constant sigma^{2q/(1-q)} / (1 - sigma^{-q/(1-q)})
  double measured_domination = 0.0;  // max over the grid of cum(h V^{q/(1-q)}) / V^{q/(1-q)}
  bool domination_holds = false;     // measured_domination <= K
  double C_measured = 0.0;           // ratio achieved by h v^{-1} V^{q/(1-q)} W^{1/(1-q)}
  double C_lower_implied = 0.0;      // from closing the chain
  std::vector<ChainStep> steps;
  std::vector<ChainLevelCheck> level_checks;
  LemmaCheck lemma;
  SigmaDecomposition decomposition;
};

// Runs every link of the lower-bound chain on a concrete instance and
// records measured values against the claimed constants: the by-parts step
// (constant 2), the band decomposition (equality), the band bound, the
// margin bound (sigma), the h-estimate (sigma^{q/(1-q)}), two monotone
// pull-ins (constant 1), the inequality itself (the measured ratio), and
// the domination comparison (constant K). `C_reference`, when positive, is
// an externally trusted bound the measured ratio must not exceed by more
// than 5%. Requires p = 1 > q and a finite characterization integral.
ChainReport verify_p1_chain(const Weight& v, const Weight& w,
                            const Exponents& e, double sigma, Window win = {},
                            double rel_tol = 1e-6, double C_reference = 0.0);

}  // namespace hardy
