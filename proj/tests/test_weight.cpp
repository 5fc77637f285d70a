#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "weight.hpp"

using namespace hardy;

TEST_CASE("pure power evaluation and calculus") {
  PowerExpr f = PowerExpr::single(1.0, -2.0);
  CHECK(f.eval(3.0) == doctest::Approx(1.0 / 9.0));

  ExtendedValue tail = f.integral(1.0, kInf);
  CHECK(tail.finite());
  CHECK(tail.value == doctest::Approx(1.0).epsilon(1e-12));

  ExtendedValue head = f.integral(0.0, 1.0);
  CHECK_FALSE(head.finite());
  CHECK(head.site == DivergenceSite::AtZero);

  PowerExpr g = PowerExpr::single(1.0, -0.5);
  ExtendedValue two = g.integral(0.0, 1.0);
  CHECK(two.finite());
  CHECK(two.value == doctest::Approx(2.0).epsilon(1e-12));

  // log case: exponent exactly -1
  PowerExpr h = PowerExpr::single(1.0, -1.0);
  ExtendedValue lg = h.integral(1.0, std::exp(2.0));
  CHECK(lg.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(h.integral(1.0, kInf).finite());
  CHECK(h.integral(1.0, kInf).site == DivergenceSite::AtInfinity);
}

TEST_CASE("piecewise pieces tile the half line with zero fill") {
  PowerExpr f = PowerExpr::from_pieces({{1.0, 2.0, 1.0, 0.0}});
  CHECK(f.eval(0.5) == 0.0);
  CHECK(f.eval(1.5) == 1.0);
  CHECK(f.eval(3.0) == 0.0);
  CHECK(f.integral(0.0, kInf).value == doctest::Approx(1.0));
  CHECK(f.sup(0.0, 10.0) == doctest::Approx(1.0));
  CHECK_FALSE(f.almost_everywhere_zero());
  CHECK(PowerExpr::from_pieces({{0.0, kInf, 0.0, 0.0}}).almost_everywhere_zero());
}

TEST_CASE("reciprocal and pow act piecewise") {
  PowerExpr f = PowerExpr::single(4.0, 2.0);
  PowerExpr r = f.reciprocal();
  CHECK(r.eval(2.0) == doctest::Approx(1.0 / 16.0));
  PowerExpr s = f.pow(0.5);
  CHECK(s.eval(9.0) == doctest::Approx(18.0));
}

TEST_CASE("tabulated weights interpolate log-log and extrapolate as powers") {
  Weight w = Weight::tabulated({1.0, 10.0}, {1.0, 100.0});
  // slope 2 in log-log: the table is exactly t^2
  CHECK(evaluate(w, std::sqrt(10.0)) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(evaluate(w, 100.0) == doctest::Approx(10000.0).epsilon(1e-12));
  CHECK(evaluate(w, 0.5) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("weight parse round trip") {
  Weight w = Weight::power(-2.0);
  Weight back = Weight::parse(w.to_json());
  CHECK(evaluate(back, 2.0) == doctest::Approx(0.25));

  Weight pw = Weight::piecewise_power({{0.0, 1.0, 1.0, 0.0},
                                       {1.0, kInf, 1.0, 1.0}});
  Weight back2 = Weight::parse(pw.to_json());
  CHECK(evaluate(back2, 4.0) == doctest::Approx(4.0));

  Weight tab = Weight::tabulated({1.0, 2.0, 4.0}, {1.0, 4.0, 16.0});
  Weight back3 = Weight::parse(tab.to_json());
  CHECK(evaluate(back3, 3.0) == doctest::Approx(9.0).epsilon(1e-9));
}

TEST_CASE("evaluate rejects non-positive abscissae") {
  Weight w = Weight::power(1.0);
  CHECK_THROWS_AS(evaluate(w, 0.0), Error);
  CHECK_THROWS_AS(evaluate(w, -1.0), Error);
}

TEST_CASE("exponent bookkeeping") {
  Exponents e(2.0, 1.0);
  CHECK(e.p_prime() == doctest::Approx(2.0));
  CHECK(e.r() == doctest::Approx(2.0));
  CHECK(Exponents(1.5, 1.0).p_prime() == doctest::Approx(3.0));
  CHECK(std::isinf(Exponents(1.0, 0.5).p_prime()));

  CHECK(classify_regime(Exponents(2.0, 2.0)) == Regime::Convex);
  CHECK(classify_regime(Exponents(1.0, 2.0)) == Regime::Convex);
  CHECK(classify_regime(Exponents(2.0, 1.0)) == Regime::NonConvex);
  CHECK(classify_regime(Exponents(1.0, 0.5)) == Regime::NonConvexP1);
}
