#include "weight.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace hardy {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double checked_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    fail(ErrorCode::ConfigError,
         std::string("weight field '") + key + "' must be a number");
  }
  return j[key].get<double>();
}

// Accepts a number or the string "inf" for an upper bound.
double checked_upper(const nlohmann::json& j, const char* key) {
  if (j.contains(key) && j[key].is_string()) {
    if (j[key].get<std::string>() == "inf") return kInf;
    fail(ErrorCode::ConfigError,
         std::string("weight field '") + key + "' must be a number or \"inf\"");
  }
  return checked_number(j, key);
}

}  // namespace

PowerExpr PowerExpr::single(double c, double a) {
  PowerExpr e;
  e.pieces_ = {{0.0, kInf, c, a}};
  return e;
}

PowerExpr PowerExpr::from_pieces(std::vector<PowerPiece> pieces) {
  for (const auto& p : pieces) {
    if (!(p.lo >= 0.0) || !(p.hi > p.lo)) {
      fail(ErrorCode::ConfigError, "piece bounds must satisfy 0 <= lo < hi");
    }
    if (std::isnan(p.c) || p.c < 0.0 || !std::isfinite(p.a)) {
      fail(ErrorCode::ConfigError,
           "piece needs coefficient >= 0 and finite exponent");
    }
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const PowerPiece& x, const PowerPiece& y) { return x.lo < y.lo; });
  std::vector<PowerPiece> tiled;
  double cursor = 0.0;
  for (const auto& p : pieces) {
    if (p.lo < cursor * (1.0 - 4 * kEps)) {
      fail(ErrorCode::ConfigError, "pieces overlap");
    }
    if (p.lo > cursor) tiled.push_back({cursor, p.lo, 0.0, 0.0});
    tiled.push_back(p);
    tiled.back().lo = std::max(p.lo, cursor);
    cursor = p.hi;
    if (cursor == kInf) break;
  }
  if (cursor < kInf) tiled.push_back({cursor, kInf, 0.0, 0.0});
  PowerExpr e;
  e.pieces_ = std::move(tiled);
  return e;
}

double PowerExpr::eval(double t) const {
  if (!(t > 0.0)) fail(ErrorCode::NonPositiveArgument, "eval needs t > 0");
  for (const auto& p : pieces_) {
    if (t <= p.hi || &p == &pieces_.back()) {
      if (p.c == 0.0) return 0.0;
      if (p.c == kInf) return kInf;
      return p.a == 0.0 ? p.c : p.c * std::pow(t, p.a);
    }
  }
  return 0.0;
}

PowerExpr PowerExpr::pow(double s) const {
  PowerExpr e;
  e.pieces_.clear();
  for (const auto& p : pieces_) {
    double c;
    if (p.c == 0.0) {
      c = s > 0.0 ? 0.0 : (s < 0.0 ? kInf : 1.0);
    } else if (p.c == kInf) {
      c = s > 0.0 ? kInf : (s < 0.0 ? 0.0 : 1.0);
    } else {
      c = std::pow(p.c, s);
    }
    e.pieces_.push_back({p.lo, p.hi, c, p.a * s});
  }
  return e;
}

ExtendedValue PowerExpr::integral(double x, double y) const {
  if (!(x >= 0.0) || !(y >= x)) {
    fail(ErrorCode::NonPositiveArgument, "integral needs 0 <= x <= y");
  }
  if (y == x) return ExtendedValue::finite_value(0.0);
  double total = 0.0;
  for (const auto& p : pieces_) {
    double lo = std::max(p.lo, x);
    double hi = std::min(p.hi, y);
    if (!(hi > lo) || p.c == 0.0) continue;
    DivergenceSite here = lo == 0.0 ? DivergenceSite::AtZero
                          : hi == kInf ? DivergenceSite::AtInfinity
                                       : DivergenceSite::Interior;
    if (p.c == kInf) return ExtendedValue::infinite(here);
    double g = p.a + 1.0;
    double part;
    if (lo == 0.0) {
      if (g <= 0.0) return ExtendedValue::infinite(DivergenceSite::AtZero);
      part = hi == kInf ? kInf : p.c * std::pow(hi, g) / g;
      if (!std::isfinite(part)) {
        return ExtendedValue::infinite(hi == kInf ? DivergenceSite::AtInfinity
                                                  : here);
      }
    } else if (hi == kInf) {
      if (g >= 0.0) return ExtendedValue::infinite(DivergenceSite::AtInfinity);
      part = p.c * std::pow(lo, g) / (-g);
      if (!std::isfinite(part)) return ExtendedValue::infinite(here);
    } else if (g == 0.0) {
      part = p.c * std::log(hi / lo);
    } else {
      part = p.c * (std::pow(hi, g) - std::pow(lo, g)) / g;
      if (!std::isfinite(part)) return ExtendedValue::infinite(here);
    }
    total += part;
  }
  if (!std::isfinite(total)) {
    return ExtendedValue::infinite(DivergenceSite::Interior);
  }
  return ExtendedValue::finite_value(total, 8 * kEps * std::abs(total));
}

double PowerExpr::sup(double x, double y) const {
  double best = 0.0;
  for (const auto& p : pieces_) {
    double lo = std::max(p.lo, x);
    double hi = std::min(p.hi, y);
    if (!(hi > lo) || p.c == 0.0) continue;
    if (p.c == kInf) return kInf;
    double s;
    if (p.a > 0.0) {
      s = hi == kInf ? kInf : p.c * std::pow(hi, p.a);
    } else if (p.a < 0.0) {
      s = lo == 0.0 ? kInf : p.c * std::pow(lo, p.a);
    } else {
      s = p.c;
    }
    best = std::max(best, s);
  }
  return best;
}

std::vector<double> PowerExpr::breakpoints() const {
  std::vector<double> bps;
  for (const auto& p : pieces_) {
    if (p.lo > 0.0 && std::isfinite(p.lo)) bps.push_back(p.lo);
  }
  return bps;
}

bool PowerExpr::almost_everywhere_zero() const {
  for (const auto& p : pieces_) {
    if (p.c != 0.0) return false;
  }
  return true;
}

Weight Weight::power(double a) {
  if (!std::isfinite(a)) fail(ErrorCode::ConfigError, "power exponent must be finite");
  nlohmann::json spec = {{"kind", "power"}, {"a", a}};
  return Weight(WeightKind::Power, PowerExpr::single(1.0, a), std::move(spec));
}

Weight Weight::piecewise_power(std::vector<PowerPiece> pieces) {
  if (pieces.empty()) fail(ErrorCode::ConfigError, "piecewise weight needs pieces");
  PowerExpr e = PowerExpr::from_pieces(pieces);
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : pieces) {
    nlohmann::json jp = {{"lo", p.lo}, {"c", p.c}, {"a", p.a}};
    if (p.hi == kInf) {
      jp["hi"] = "inf";
    } else {
      jp["hi"] = p.hi;
    }
    arr.push_back(std::move(jp));
  }
  nlohmann::json spec = {{"kind", "piecewise_power"}, {"pieces", std::move(arr)}};
  return Weight(WeightKind::PiecewisePower, std::move(e), std::move(spec));
}

Weight Weight::tabulated(std::vector<double> t, std::vector<double> values) {
  if (t.size() != values.size() || t.size() < 2) {
    fail(ErrorCode::ConfigError, "tabulated weight needs >= 2 matching samples");
  }
  for (size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || !std::isfinite(t[i])) {
      fail(ErrorCode::ConfigError, "tabulated abscissae must be positive finite");
    }
    if (i > 0 && !(t[i] > t[i - 1])) {
      fail(ErrorCode::ConfigError, "tabulated abscissae must be strictly increasing");
    }
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      fail(ErrorCode::ConfigError, "tabulated values must be positive finite");
    }
  }
  // Each log-log segment is an exact power piece; the first and last segments
  // extend as power extrapolation to 0 and infinity.
  std::vector<PowerPiece> pieces;
  size_t n = t.size();
  for (size_t i = 0; i + 1 < n; ++i) {
    double a = std::log(values[i + 1] / values[i]) / std::log(t[i + 1] / t[i]);
    double c = std::exp(std::log(values[i]) - a * std::log(t[i]));
    double lo = i == 0 ? 0.0 : t[i];
    double hi = i + 2 == n ? kInf : t[i + 1];
    pieces.push_back({lo, hi, c, a});
  }
  PowerExpr e = PowerExpr::from_pieces(std::move(pieces));
  nlohmann::json spec = {{"kind", "tabulated"}, {"t", t}, {"v", values}};
  return Weight(WeightKind::Tabulated, std::move(e), std::move(spec));
}

Weight Weight::parse(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    fail(ErrorCode::ConfigError, "weight must be an object with a \"kind\"");
  }
  std::string kind = j["kind"].get<std::string>();
  if (kind == "power") {
    return Weight::power(checked_number(j, "a"));
  }
  if (kind == "piecewise_power") {
    if (!j.contains("pieces") || !j["pieces"].is_array() || j["pieces"].empty()) {
      fail(ErrorCode::ConfigError, "piecewise_power needs a nonempty \"pieces\" array");
    }
    std::vector<PowerPiece> pieces;
    for (const auto& jp : j["pieces"]) {
      PowerPiece p;
      p.lo = checked_number(jp, "lo");
      p.hi = checked_upper(jp, "hi");
      p.c = checked_number(jp, "c");
      p.a = checked_number(jp, "a");
      pieces.push_back(p);
    }
    return Weight::piecewise_power(std::move(pieces));
  }
  if (kind == "tabulated") {
    if (!j.contains("t") || !j.contains("v") || !j["t"].is_array() ||
        !j["v"].is_array()) {
      fail(ErrorCode::ConfigError, "tabulated needs \"t\" and \"v\" arrays");
    }
    std::vector<double> t, v;
    for (const auto& x : j["t"]) {
      if (!x.is_number()) fail(ErrorCode::ConfigError, "tabulated \"t\" entries must be numbers");
      t.push_back(x.get<double>());
    }
    for (const auto& x : j["v"]) {
      if (!x.is_number()) fail(ErrorCode::ConfigError, "tabulated \"v\" entries must be numbers");
      v.push_back(x.get<double>());
    }
    return Weight::tabulated(std::move(t), std::move(v));
  }
  fail(ErrorCode::ConfigError, "unknown weight kind '" + kind + "'");
}

double evaluate(const Weight& w, double t) {
  if (!(t > 0.0)) fail(ErrorCode::NonPositiveArgument, "weights live on (0, inf)");
  return w.expr().eval(t);
}

Exponents::Exponents(double p_, double q_) : p(p_), q(q_) {
  if (!std::isfinite(p) || p < 1.0) {
    fail(ErrorCode::ConfigError, "exponent p must be finite and >= 1");
  }
  if (!std::isfinite(q) || !(q > 0.0)) {
    fail(ErrorCode::ConfigError, "exponent q must be finite and > 0");
  }
}

double Exponents::p_prime() const {
  if (p == 1.0) return kInf;
  return p / (p - 1.0);
}

double Exponents::r() const {
  if (!(p > q)) fail(ErrorCode::RegimeMismatch, "r = pq/(p-q) needs p > q");
  return p * q / (p - q);
}

Regime classify_regime(const Exponents& e) {
  if (e.p <= e.q) return Regime::Convex;
  if (e.p == 1.0) return Regime::NonConvexP1;
  return Regime::NonConvex;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Convex: return "convex";
    case Regime::NonConvex: return "nonconvex";
    case Regime::NonConvexP1: return "nonconvex_p1";
  }
  return "convex";
}

}  // namespace hardy
