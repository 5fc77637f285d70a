#include <doctest.h>

#include <cmath>

#include "envelope.hpp"
#include "errors.hpp"
#include "weight.hpp"

using namespace hardy;

TEST_CASE("monotone envelope interpolates power segments exactly") {
  MonotoneEnvelope f({1.0, 4.0}, {2.0, 8.0}, Direction::NonDecreasing);
  // log-log straight line through (1,2), (4,8) is 2t
  CHECK(f(2.0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(f(0.5) == doctest::Approx(2.0));  // held below the range
  CHECK(f(9.0) == doctest::Approx(8.0));  // held above the range
}

TEST_CASE("monotone envelope rejects direction violations") {
  CHECK_THROWS_AS(MonotoneEnvelope({1.0, 2.0}, {1.0, 0.5},
                                   Direction::NonDecreasing),
                  Error);
  // rounding noise is clamped, not rejected
  MonotoneEnvelope ok({1.0, 2.0}, {1.0, 1.0 - 1e-15},
                      Direction::NonDecreasing);
  CHECK(ok(2.0) >= ok(1.0));
}

TEST_CASE("exact evaluator takes precedence between samples") {
  MonotoneEnvelope f({1.0, 2.0, 4.0}, {1.0, 4.0, 16.0},
                     Direction::NonDecreasing,
                     [](double t) { return t * t; });
  CHECK(f(3.0) == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("left sums against a monotone integrator reach closed forms") {
  MonotoneEnvelope F({1e-6, 3.0}, {1e-6, 3.0}, Direction::NonDecreasing,
                     [](double t) { return t; });
  auto g = [](double t) {
    double u = std::max(2.0 - t, 0.0);
    return u * u;
  };
  ExtendedValue s = stieltjes_integrate(g, F, 1e-6, 3.0, 1e-8, {2.0});
  CHECK(s.finite());
  CHECK(s.value == doctest::Approx(8.0 / 3.0).epsilon(1e-5));
}

TEST_CASE("flat stretches contribute nothing even where g blows up") {
  MonotoneEnvelope F({1.0, 2.0}, {5.0, 5.0}, Direction::NonDecreasing);
  auto g = [](double t) { return 1.0 / std::fabs(t - 1.0); };
  ExtendedValue s = stieltjes_integrate(g, F, 1.0, 2.0, 1e-8);
  CHECK(s.finite());
  CHECK(s.value == doctest::Approx(0.0));
}

TEST_CASE("essential supremum of power expressions is exact") {
  CHECK(ess_sup(PowerExpr::single(1.0, 0.5), 4.0) == doctest::Approx(2.0));
  CHECK(ess_sup(PowerExpr::single(2.0, -1.0), 4.0) == kInf);
  PowerExpr peak = PowerExpr::from_pieces(
      {{0.0, 1.0, 1.0, 1.0}, {1.0, kInf, 1.0, -1.0}});
  CHECK(ess_sup(peak, 10.0) == doctest::Approx(1.0));
  CHECK(ess_sup(peak, 0.25) == doctest::Approx(0.25));
}

TEST_CASE("grid fallback refines toward an interior maximum") {
  auto f = [](double t) { return t * (2.0 - t); };
  CHECK(ess_sup(f, 2.0) == doctest::Approx(1.0).epsilon(1e-6));
}
