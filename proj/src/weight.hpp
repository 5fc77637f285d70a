#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "extended_value.hpp"

namespace hardy {

// One multiplicative piece c * t^a on (lo, hi]. c may be 0 (dead zone) or
// +infinity (used internally after pow() of a zero piece with a negative
// exponent); a is always finite.
struct PowerPiece {
  double lo = 0.0;
  double hi = kInf;
  double c = 1.0;
  double a = 0.0;
};

// Exact piecewise-power expression tiling (0, inf). All calculus on weights
// reduces to closed forms on these pieces: integrals, sups and asymptotic
// behaviour at both endpoints are evaluated without quadrature, so
// finite/infinite verdicts are exact.
class PowerExpr {
 public:
  PowerExpr() : pieces_{{0.0, kInf, 0.0, 0.0}} {}

  static PowerExpr single(double c, double a);
  // Sorts, validates disjointness and fills gaps with zero pieces.
  static PowerExpr from_pieces(std::vector<PowerPiece> pieces);

  double eval(double t) const;
  PowerExpr pow(double s) const;
  PowerExpr reciprocal() const { return pow(-1.0); }

  // Integral over (x, y), 0 <= x <= y <= inf. Exact up to rounding;
  // divergence verdicts are exact with the site of the blow-up.
  ExtendedValue integral(double x, double y) const;

  // Supremum over the open interval (x, y); may be +inf.
  double sup(double x, double y) const;

  const std::vector<PowerPiece>& pieces() const { return pieces_; }
  // Interior breakpoints (finite, strictly inside (0, inf)).
  std::vector<double> breakpoints() const;
  bool almost_everywhere_zero() const;

 private:
  std::vector<PowerPiece> pieces_;  // tile (0, inf), lo strictly increasing
};

enum class WeightKind { Power, PiecewisePower, Tabulated };

// A weight on (0, inf). Three input kinds, all represented exactly as a
// PowerExpr: a pure power, an explicit piecewise power, or a positive table
// interpolated log-log with power extrapolation beyond the end nodes.
class Weight {
 public:
  static Weight power(double a);
  static Weight piecewise_power(std::vector<PowerPiece> pieces);
  // n >= 2 strictly increasing abscissae, strictly positive values.
  static Weight tabulated(std::vector<double> t, std::vector<double> values);

  static Weight parse(const nlohmann::json& j);
  nlohmann::json to_json() const { return spec_; }

  WeightKind kind() const { return kind_; }
  const PowerExpr& expr() const { return expr_; }
  std::vector<double> breakpoints() const { return expr_.breakpoints(); }

 private:
  Weight(WeightKind k, PowerExpr e, nlohmann::json spec)
      : kind_(k), expr_(std::move(e)), spec_(std::move(spec)) {}

  WeightKind kind_;
  PowerExpr expr_;
  nlohmann::json spec_;
};

// Pointwise evaluation; throws NonPositiveArgument unless t > 0.
double evaluate(const Weight& w, double t);

struct Exponents {
  Exponents(double p_, double q_);
  double p;
  double q;
  double p_prime() const;  // conjugate exponent, +inf when p == 1
  double r() const;        // pq/(p-q); requires p > q
};

enum class Regime { Convex, NonConvex, NonConvexP1 };

Regime classify_regime(const Exponents& e);
const char* regime_name(Regime r);

}  // namespace hardy
