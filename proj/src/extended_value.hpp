#pragma once

#include <cmath>
#include <limits>
#include <string>

namespace hardy {

// Where a divergent integral or supremum picked up its infinite mass.
enum class DivergenceSite { None, AtZero, AtInfinity, Interior };

inline const char* divergence_site_name(DivergenceSite s) {
  switch (s) {
    case DivergenceSite::None: return "none";
    case DivergenceSite::AtZero: return "at_zero";
    case DivergenceSite::AtInfinity: return "at_infinity";
    case DivergenceSite::Interior: return "interior";
  }
  return "none";
}

// Nonnegative extended real with an error estimate and, when infinite,
// the site responsible for the divergence.
struct ExtendedValue {
  double value = 0.0;
  double abs_error = 0.0;
  DivergenceSite site = DivergenceSite::None;

  bool finite() const { return std::isfinite(value); }

  static ExtendedValue finite_value(double v, double err = 0.0) {
    return {v, err, DivergenceSite::None};
  }
  static ExtendedValue infinite(DivergenceSite s) {
    return {std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity(), s};
  }
};

inline ExtendedValue operator+(const ExtendedValue& a, const ExtendedValue& b) {
  if (!a.finite()) return a;
  if (!b.finite()) return b;
  return {a.value + b.value, a.abs_error + b.abs_error, DivergenceSite::None};
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace hardy
