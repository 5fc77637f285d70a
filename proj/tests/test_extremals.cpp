#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "extremals.hpp"
#include "functionals.hpp"

using namespace hardy;

namespace {

Weight indicator_12() {
  return Weight::piecewise_power(
      {{0.0, 1.0, 0.0, 0.0}, {1.0, 2.0, 1.0, 0.0}, {2.0, kInf, 0.0, 0.0}});
}

}  // namespace

TEST_CASE("running supremum profile of a reciprocal weight") {
  // v = 1 on (0,1], t on (1,inf): 1/v = 1 then t^{-1}; running sup is 1
  Weight v = Weight::piecewise_power({{0.0, 1.0, 1.0, 0.0},
                                      {1.0, kInf, 1.0, 1.0}});
  SupProfile prof(v.expr().reciprocal(), 100.0);
  CHECK(prof(0.5) == doctest::Approx(1.0));
  CHECK(prof(50.0) == doctest::Approx(1.0));
  CHECK(prof.first_cross(0.5) == doctest::Approx(0.0));

  // v = t^{-1}: 1/v = t rises forever
  SupProfile rising(Weight::power(-1.0).expr().reciprocal(), 100.0);
  CHECK(rising(3.0) == doctest::Approx(3.0));
  CHECK(rising.first_cross(3.0) == doctest::Approx(3.0));
  CHECK(rising.integral_power(1.0, 2.0, 2.0) ==
        doctest::Approx(7.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("saturating step achieves the primitive for p > 1") {
  // v = 1, p = 2, t = 1: ratio should reach V(1) = 1
  Exponents e(2.0, 2.0);
  StepFunction f = saturating_step(Weight::power(0.0), e, 1.0);
  double rho = saturation_ratio(f, Weight::power(0.0), e, 1.0);
  CHECK(rho == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("saturating step achieves the supremum for p = 1") {
  Exponents e(1.0, 0.5);
  StepFunction f = saturating_step(Weight::power(0.0), e, 1.0, 2048, 0.9);
  double rho = saturation_ratio(f, Weight::power(0.0), e, 1.0);
  CHECK(rho == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("saturating step rejects a non-integrable inner density") {
  // v = s^2, p = 2: v^{1-p'} = s^{-2} has infinite mass near 0
  CHECK_THROWS_AS(saturating_step(Weight::power(2.0), Exponents(2.0, 2.0), 1.0),
                  Error);
}

TEST_CASE("parametrized family matches its closed form at an interior point") {
  // p = 2, q = 1, v = 1, w on (1,2), theta = 2:
  // f(1.5) = (2 ln(4/3) - 1/2)^{1/2} * 1.5^{1/2}
  Exponents e(2.0, 1.0);
  StepFunction f = theta_test_function(Weight::power(0.0), indicator_12(), e,
                                       2.0);
  double expected = std::sqrt(2.0 * std::log(4.0 / 3.0) - 0.5) * std::sqrt(1.5);
  CHECK(f(1.5) == doctest::Approx(expected).epsilon(0.05));
  // and vanishes beyond the support of w
  CHECK(f(2.5) == 0.0);
  CHECK(f(100.0) == 0.0);
}

TEST_CASE("parametrized family energy identity") {
  Exponents e(2.0, 1.0);
  ThetaDiagnostics d = theta_energy_identity(Weight::power(0.0),
                                             indicator_12(), e, 2.0);
  CHECK(d.b_truncated > 0.0);
  CHECK(d.rel_gap < 1e-4);
}

TEST_CASE("parametrized family guards its domain") {
  Exponents conv(2.0, 2.0);
  CHECK_THROWS_AS(theta_test_function(Weight::power(0.0), indicator_12(), conv,
                                      2.0),
                  Error);
  Exponents e(2.0, 1.0);
  // theta at or below r/p' = 1 is out of range
  CHECK_THROWS_AS(theta_test_function(Weight::power(0.0), indicator_12(), e,
                                      0.5),
                  Error);
}

TEST_CASE("parametrized family of a vanishing w is identically zero") {
  Exponents e(2.0, 1.0);
  Weight zero = Weight::piecewise_power({{0.0, kInf, 0.0, 0.0}});
  StepFunction f = theta_test_function(Weight::power(0.0), zero, e, 2.0);
  CHECK(f.total_mass() == 0.0);
}

TEST_CASE("level decomposition of a constant weight") {
  // v = 1: the running sup of 1/v is 1; with sigma = 2 only level k = -1
  // contributes, clipped at the window edge.
  SigmaDecomposition dec =
      sigma_levels(Weight::power(0.0), indicator_12(), Exponents(1.0, 0.5),
                   2.0, Window{1e-4, 1e4});
  REQUIRE(dec.levels.size() == 1);
  CHECK(dec.levels[0].k == -1);
  CHECK(dec.levels[0].a == doctest::Approx(0.0));
  CHECK(dec.levels[0].G_measure > 0.0);
  // the margin condition the construction promises
  CHECK(dec.levels[0].tail_mass_full <=
        dec.sigma * dec.levels[0].tail_mass_delta * (1.0 + 1e-9));
}

TEST_CASE("level decomposition tracks an exponential table") {
  std::vector<double> ts, ys;
  for (int i = 0; i < 1500; ++i) {
    double t = 0.002 * std::pow(30.0 / 0.002, i / 1499.0);
    ts.push_back(t);
    ys.push_back(std::exp(-t));
  }
  Weight v = Weight::tabulated(ts, ys);
  SigmaDecomposition dec = sigma_levels(v, indicator_12(), Exponents(1.0, 0.5),
                                        std::exp(1.0), Window{0.002, 30.0});
  REQUIRE(dec.levels.size() >= 3);
  // V = e^t crosses e^k at t = k
  for (const SigmaLevel& level : dec.levels) {
    if (level.k >= 1 && level.k <= 3)
      CHECK(level.a == doctest::Approx(double(level.k)).epsilon(0.02));
    CHECK(level.tail_mass_full <=
          dec.sigma * level.tail_mass_delta * (1.0 + 1e-9));
  }
}

TEST_CASE("the normalized indicator sum has unit mass per level") {
  SigmaDecomposition dec =
      sigma_levels(Weight::power(-1.0), indicator_12(), Exponents(1.0, 0.5),
                   2.0, Window{1e-3, 1e3});
  REQUIRE(!dec.levels.empty());
  StepFunction h = build_h(dec);
  CHECK(h.total_mass() ==
        doctest::Approx(double(dec.levels.size())).epsilon(1e-9));
}

TEST_CASE("ratio evaluation against a closed form") {
  // f = indicator of (0,1], p = q = 2, v = 1, w = t^{-2}:
  // lhs^2 = 1 + 1 = 2, energy = 1, ratio = sqrt(2)
  StepFunction f({1e-9, 1.0}, {1.0});
  HardyInstance inst{Weight::power(0.0), Weight::power(-2.0),
                     Exponents(2.0, 2.0)};
  ExtendedValue rho = rayleigh_ratio(f, inst);
  REQUIRE(rho.finite());
  CHECK(rho.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("ratio evaluation reports the divergence site") {
  StepFunction f({1e-9, 1.0}, {1.0});
  HardyInstance inst{Weight::power(0.0), Weight::power(-1.0),
                     Exponents(2.0, 2.0)};
  ExtendedValue rho = rayleigh_ratio(f, inst);
  CHECK_FALSE(rho.finite());
  CHECK(rho.site == DivergenceSite::AtInfinity);
}

TEST_CASE("ratio evaluation rejects a zero function") {
  StepFunction z({1.0, 2.0}, {0.0});
  HardyInstance inst{Weight::power(0.0), Weight::power(-2.0),
                     Exponents(2.0, 2.0)};
  CHECK_THROWS_AS(rayleigh_ratio(z, inst), Error);
}

TEST_CASE("monotone domination comparison") {
  std::vector<double> ts{1.0, 2.0, 3.0, 4.0};
  StepFunction h({1.0, 2.0, 3.0, 4.0}, {3.0, 2.0, 1.0});

  MonotoneEnvelope small(ts, {0.0, 0.5, 1.0, 1.5}, Direction::NonDecreasing);
  MonotoneEnvelope big(ts, {0.0, 1.0, 2.0, 3.0}, Direction::NonDecreasing);
  LemmaCheck ok = hardy_lemma_check(small, big, h);
  CHECK(ok.holds);
  CHECK(ok.lhs <= ok.rhs);

  LemmaCheck eq = hardy_lemma_check(big, big, h);
  CHECK(eq.holds);
  CHECK(eq.rel_slack == doctest::Approx(0.0).epsilon(1e-9));

  // domination failure makes the comparison inapplicable, not false
  MonotoneEnvelope jumpy(ts, {0.0, 2.0, 2.0, 2.0}, Direction::NonDecreasing);
  CHECK_THROWS_AS(hardy_lemma_check(jumpy, big, h), Error);

  // non-increasing h is required
  StepFunction risingh({1.0, 2.0, 3.0, 4.0}, {1.0, 2.0, 3.0});
  CHECK_THROWS_AS(hardy_lemma_check(small, big, risingh), Error);
}

TEST_CASE("chain verification guards its domain") {
  CHECK_THROWS_AS(verify_p1_chain(Weight::power(0.0), indicator_12(),
                                  Exponents(2.0, 1.0), 2.0),
                  Error);
  CHECK_THROWS_AS(verify_p1_chain(Weight::power(0.0), indicator_12(),
                                  Exponents(1.0, 0.5), 0.9),
                  Error);
}
