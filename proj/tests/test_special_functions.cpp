#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fpp/errors.hpp"
#include "fpp/special_functions.hpp"

using fpp::FractionalOrder;

// Reference values: mpmath, 80-120 digit series sums.

TEST_SUITE("special_functions") {
  TEST_CASE("fractional order range") {
    CHECK_THROWS_AS(FractionalOrder(0.0), fpp::DomainError);
    CHECK_THROWS_AS(FractionalOrder(1.5), fpp::DomainError);
    CHECK_THROWS_AS(FractionalOrder(std::nan("")), fpp::DomainError);
    CHECK(FractionalOrder(1.0).is_exponential());
  }

  TEST_CASE("one-parameter function at zero and for beta = 1") {
    for (double b : {0.1, 0.5, 0.9, 1.0}) CHECK(fpp::ml_one_param(FractionalOrder(b), 0.0).value == 1.0);
    for (double x = 0.0; x <= 30.0; x += 0.75) {
      CHECK(std::abs(fpp::ml_one_param(FractionalOrder(1.0), -x).value - std::exp(-x)) <= 1e-12);
    }
  }

  TEST_CASE("half order against the erfc closed form") {
    const double e = fpp::ml_one_param(FractionalOrder(0.5), -1.0).value;
    CHECK(e == doctest::Approx(std::exp(1.0) * std::erfc(1.0)).epsilon(1e-13));
    CHECK(fpp::ml_one_param(FractionalOrder(0.5), -5.0).value ==
          doctest::Approx(0.11070463773306863).epsilon(1e-11));
    CHECK(fpp::ml_one_param(FractionalOrder(0.5), -30.0).value ==
          doctest::Approx(0.018795888861416751).epsilon(1e-11));
  }

  TEST_CASE("one-parameter function across regimes") {
    struct Case { double b, x, ref; };
    const Case cases[] = {{0.9, -5.0, 0.034431324804098418},  {0.75, -40.0, 0.0070756747558264278},
                          {0.6, -8.0, 0.058609742636332041},  {0.3, -0.5, 0.63264900594359902},
                          {0.25, -3.0, 0.2190044275604068},   {0.9, -30.0, 0.003713707698459853}};
    for (const auto& c : cases) {
      CAPTURE(c.b);
      CAPTURE(c.x);
      const auto r = fpp::ml_one_param(FractionalOrder(c.b), c.x);
      CHECK(std::abs(r.value - c.ref) <= 1e-10);
      CHECK(r.est_abs_error <= 1e-10);
    }
  }

  TEST_CASE("one-parameter function is decreasing and positive") {
    for (double b : {0.25, 0.5, 0.75, 0.95}) {
      double prev = 1.0;
      for (double x = 0.25; x <= 50.0; x += 0.25) {
        const double v = fpp::ml_one_param(FractionalOrder(b), -x).value;
        CHECK(v > 0.0);
        CHECK(v < prev);
        prev = v;
      }
    }
  }

  TEST_CASE("two-parameter function") {
    CHECK(fpp::ml_two_param(FractionalOrder(1.0), -3.0).value == doctest::Approx(std::exp(-3.0)));
    CHECK(fpp::ml_two_param(FractionalOrder(0.5), 0.0).value ==
          doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-14));
    CHECK(std::abs(fpp::ml_two_param(FractionalOrder(0.75), -2.0).value - 0.084363572245660564) <= 1e-12);
    CHECK(std::abs(fpp::ml_two_param(FractionalOrder(0.5), -10.0).value - 0.0027796561095304284) <= 1e-12);
    CHECK(std::abs(fpp::ml_two_param(FractionalOrder(0.9), -25.0).value - 0.00017468551917377772) <= 1e-12);
  }

  TEST_CASE("positive or non-finite arguments are rejected") {
    CHECK_THROWS_AS(fpp::ml_one_param(FractionalOrder(0.5), 0.1), fpp::DomainError);
    CHECK_THROWS_AS(fpp::ml_two_param(FractionalOrder(0.5), -INFINITY), fpp::DomainError);
  }

  TEST_CASE("derivative series") {
    CHECK(fpp::ml_derivative_series(0, FractionalOrder(0.7), 1.0).value ==
          doctest::Approx(fpp::ml_one_param(FractionalOrder(0.7), -1.0).value).epsilon(1e-14));
    CHECK(fpp::ml_derivative_series(3, FractionalOrder(1.0), 2.0).value ==
          doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    struct Case { int n; double b, t, ref; };
    const Case cases[] = {{1, 0.5, 1.0, 0.27321201478389857},
                          {3, 0.25, 0.7, 0.51287393419601657},
                          {5, 0.9, 1.0, 0.63163780750174517},
                          {2, 0.75, 3.0, 0.07419064957124936}};
    for (const auto& c : cases) {
      CAPTURE(c.n);
      CHECK(std::abs(fpp::ml_derivative_series(c.n, FractionalOrder(c.b), c.t).value - c.ref) <= 1e-10);
    }
  }

  TEST_CASE("stable-integral derivatives agree with the series") {
    struct Case { int n; double b, t; };
    const Case cases[] = {{1, 0.5, 1.0}, {2, 0.9, 0.5}, {2, 0.5, 0.8}, {1, 0.5, 1e-3}, {4, 0.25, 0.3}};
    for (const auto& c : cases) {
      CAPTURE(c.n);
      CAPTURE(c.b);
      CAPTURE(c.t);
      const double s = fpp::ml_derivative_series(c.n, FractionalOrder(c.b), c.t).value;
      const double q = fpp::ml_derivative_stable(c.n, FractionalOrder(c.b), c.t).value;
      CHECK(std::abs(s - q) <= 1e-6);
    }
  }

  TEST_CASE("counting probability by the stable route") {
    CHECK(std::abs(fpp::counting_probability_stable(1, FractionalOrder(0.5), 1.0).value -
                   0.27321201478389857) <= 1e-10);
    CHECK(std::abs(fpp::counting_probability_stable(10, FractionalOrder(0.9), 5.0).value -
                   0.017309737113150939) <= 1e-10);
  }
}
