#include <doctest.h>

#include <cmath>

#include "quadrature.hpp"
#include "support/closed_form.hpp"

using namespace hardy;

TEST_CASE("finite integrals against closed forms") {
  ExtendedValue a = integrate([](double t) { return t * t; }, 0.0, 2.0, 1e-10);
  CHECK(a.finite());
  CHECK(a.value == doctest::Approx(8.0 / 3.0).epsilon(1e-9));

  ExtendedValue b = integrate([](double t) { return std::exp(-t); }, 0.0, kInf,
                              1e-10);
  CHECK(b.value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("endpoint singularities and tails") {
  ExtendedValue a =
      integrate([](double t) { return 1.0 / (t * t); }, 1.0, kInf, 1e-10);
  CHECK(a.value == doctest::Approx(1.0).epsilon(1e-8));

  ExtendedValue b =
      integrate([](double t) { return 1.0 / std::sqrt(t); }, 0.0, 1.0, 1e-10);
  CHECK(b.value == doctest::Approx(2.0).epsilon(1e-8));

  ExtendedValue c = integrate([](double t) { return 1.0 / t; }, 0.0, 1.0, 1e-8);
  CHECK_FALSE(c.finite());
  CHECK(c.site == DivergenceSite::AtZero);

  ExtendedValue d = integrate([](double t) { return 1.0 / t; }, 1.0, kInf, 1e-8);
  CHECK_FALSE(d.finite());
  CHECK(d.site == DivergenceSite::AtInfinity);
}

TEST_CASE("agreement with an independent integrator on a smooth function") {
  auto f = [](double t) { return std::exp(std::sin(3.0 * t)) / (1.0 + t); };
  ExtendedValue mine = integrate(f, 0.5, 3.0, 1e-10);
  double reference = testsupport::integrate(f, 0.5, 3.0, 1e-12);
  CHECK(mine.value == doctest::Approx(reference).epsilon(1e-8));
}

TEST_CASE("interior splits handle jumps and are order-insensitive") {
  auto f = [](double t) { return t <= 1.0 ? 1.0 : 3.0; };
  ExtendedValue a = integrate_split(f, 0.0, 2.0, 1e-10, {1.0});
  CHECK(a.value == doctest::Approx(4.0).epsilon(1e-9));
  ExtendedValue b = integrate_split(f, 0.0, 2.0, 1e-10, {1.5, 1.0, 0.5});
  CHECK(b.value == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("interior blow-up is classified as interior divergence") {
  auto f = [](double t) {
    double d = std::fabs(t - 1.0);
    return d == 0.0 ? kInf : 1.0 / (d * d);
  };
  ExtendedValue a = integrate_split(f, 0.0, 2.0, 1e-8, {1.0});
  CHECK_FALSE(a.finite());
  CHECK(a.site == DivergenceSite::Interior);
}

TEST_CASE("error estimates accompany finite results") {
  ExtendedValue a = integrate([](double t) { return t; }, 0.0, 1.0, 1e-10);
  CHECK(a.abs_error >= 0.0);
  CHECK(a.abs_error < 1e-6);
}
