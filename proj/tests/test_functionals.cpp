#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "functionals.hpp"
#include "support/closed_form.hpp"

using namespace hardy;

TEST_CASE("weight primitives match closed forms") {
  Exponents e(2.0, 2.0);
  ExtendedValue v1 = compute_V(Weight::power(0.0), e, 4.0);
  CHECK(v1.value == doctest::Approx(2.0).epsilon(1e-12));

  // v = t^2, p = 2: v^{1-p'} = t^{-2} is not integrable at 0
  ExtendedValue v2 = compute_V(Weight::power(2.0), e, 1.0);
  CHECK_FALSE(v2.finite());

  // p = 1: essential supremum of 1/v
  ExtendedValue v3 = compute_V(Weight::power(-1.0), Exponents(1.0, 0.5), 2.0);
  CHECK(v3.value == doctest::Approx(2.0).epsilon(1e-12));

  ExtendedValue w1 = compute_W(Weight::power(-2.0), 2.0);
  CHECK(w1.value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(compute_W(Weight::power(0.0), 1.0).finite());
}

TEST_CASE("criterion value for the classical pair is one") {
  HardyInstance inst{Weight::power(0.0), Weight::power(-2.0),
                     Exponents(2.0, 2.0)};
  FunctionalResult r = compute_A(inst);
  CHECK(r.regime == Regime::Convex);
  REQUIRE(r.A.finite());
  CHECK(r.A.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("criterion detects divergence with its site") {
  // W is infinite for w with a slow tail
  HardyInstance inst{Weight::power(0.0), Weight::power(0.0),
                     Exponents(2.0, 2.0)};
  FunctionalResult r = compute_A(inst);
  CHECK_FALSE(r.A.finite());

  // V identically infinite
  HardyInstance inst2{Weight::power(2.0), Weight::power(-2.0),
                      Exponents(2.0, 2.0)};
  CHECK_FALSE(compute_A(inst2).A.finite());
}

TEST_CASE("integral criterion for p=2, q=1 against the exact reduction") {
  // v = 1: V^2 = t, so the criterion integral is the integral of W^2 dt:
  // 1 on (0,1] plus (2-t)^2 on (1,2], total 4/3.
  HardyInstance inst{Weight::power(0.0),
                     Weight::piecewise_power({{0.0, 1.0, 0.0, 0.0},
                                              {1.0, 2.0, 1.0, 0.0},
                                              {2.0, kInf, 0.0, 0.0}}),
                     Exponents(2.0, 1.0)};
  FunctionalResult r = compute_A(inst, {}, 512, 1e-10);
  CHECK(r.regime == Regime::NonConvex);
  REQUIRE(r.A.finite());
  CHECK(r.A.value == doctest::Approx(4.0 / 3.0).epsilon(1e-9));

  // at q = 1 the alternative integral form coincides with the criterion
  ExtendedValue m = mazya_rozin_A(inst);
  REQUIRE(m.finite());
  CHECK(m.value == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("closed-form finiteness rule agrees with the criterion on powers") {
  // spot checks across regimes; the full frontier is in the acceptance run
  for (double a : {-1.0, 0.0, 0.5}) {
    for (double b : {-3.0, -1.5, 0.0}) {
      for (double p : {1.0, 2.0}) {
        for (double q : {0.5, 2.0, 3.0}) {
          HardyInstance inst{Weight::power(a), Weight::power(b),
                             Exponents(p, q)};
          bool expected = testsupport::power_A_finite(a, b, p, q);
          CAPTURE(a);
          CAPTURE(b);
          CAPTURE(p);
          CAPTURE(q);
          CHECK(compute_A(inst).A.finite() == expected);
        }
      }
    }
  }
  // a balanced convex pair really is finite
  HardyInstance inst{Weight::power(-0.5), Weight::power(-2.5),
                     Exponents(1.0, 3.0)};
  CHECK(testsupport::power_A_finite(-0.5, -2.5, 1.0, 3.0));
  CHECK(compute_A(inst).A.finite());
}

TEST_CASE("pointwise bound on the running integral") {
  // f = indicator of (0,2], v = 1, p = 2, eps = 0.5 at t = 1:
  // lhs = 1, rhs = sqrt(2) * (2/3)^{1/2} * 1
  StepFunction f({1e-9, 2.0}, {1.0});
  BoundCheck bc = check_pointwise_bound(f, Weight::power(0.0),
                                        Exponents(2.0, 2.0), 0.5, 1.0);
  CHECK(bc.lhs == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(bc.rhs ==
        doctest::Approx(std::sqrt(2.0) * std::sqrt(2.0 / 3.0)).epsilon(1e-7));
  CHECK(bc.holds);

  // deliberately halving the constant breaks the bound
  BoundCheck bad = check_pointwise_bound(f, Weight::power(0.0),
                                         Exponents(2.0, 2.0), 0.5, 1.0, 0.5);
  CHECK_FALSE(bad.holds);

  // p = 1 uses constant 1
  BoundCheck p1 = check_pointwise_bound(f, Weight::power(0.0),
                                        Exponents(1.0, 1.0), 0.5, 1.0);
  CHECK(p1.holds);
}

TEST_CASE("change of variables identity closed form") {
  // v = 1, p = 2, eps = 0.5, t = 4: both sides equal 4
  IdentityCheck ic = check_change_of_variables(Weight::power(0.0),
                                               Exponents(2.0, 2.0), 0.5, 4.0);
  CHECK(ic.lhs == doctest::Approx(4.0).epsilon(1e-7));
  CHECK(ic.rhs == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(ic.rel_gap < 1e-6);
}
