#include <cmath>
#include <random>

#include "doctest.h"
#include "fpp/errors.hpp"
#include "fpp/stable_law.hpp"

using fpp::FractionalOrder;

TEST_SUITE("stable_law") {
  TEST_CASE("half order is the Levy law") {
    // Laplace transform exp(-u sqrt(s)) <-> cdf erfc(u / (2 sqrt(t))).
    for (double u : {0.5, 1.0, 3.0}) {
      for (double t : {0.05, 0.3, 1.0, 4.0, 50.0}) {
        CAPTURE(u);
        CAPTURE(t);
        const double ref = std::erfc(u / (2.0 * std::sqrt(t)));
        CHECK(std::abs(fpp::stable_cdf_for_weight(FractionalOrder(0.5), u, t) - ref) <= 1e-12);
      }
    }
    CHECK(fpp::stable_cdf_for_weight(FractionalOrder(0.5), 1.0, 4.0) ==
          doctest::Approx(0.7236736098317631).epsilon(1e-13));
  }

  TEST_CASE("support and limits") {
    CHECK(fpp::stable_cdf_for_weight(FractionalOrder(0.5), 1.0, 1e-9) <= 1e-14);
    CHECK(fpp::stable_cdf_for_weight(FractionalOrder(0.9), 5.0, 0.0) == 0.0);
    // Upper tail: u t^-b / Gamma(1 - b) to leading order.
    const double tail = 1.0 - fpp::stable_cdf_for_weight(FractionalOrder(0.75), 2.0, 1e4);
    CHECK(tail == doctest::Approx(2.0 * std::pow(1e4, -0.75) / std::tgamma(0.25)).epsilon(1e-2));
    CHECK(fpp::stable_cdf_for_weight(FractionalOrder(0.5), 1e-8, 1.0) == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("monotone and within range") {
    for (double b : {0.2, 0.5, 0.8, 0.95}) {
      const auto spec = fpp::StableSpec::for_weight(FractionalOrder(b), 1.0);
      double prev = 0.0;
      for (double t = 1e-3; t < 1e3; t *= 1.3) {
        const double f = fpp::stable_cdf(spec, t);
        CHECK(f >= prev - 1e-15);
        CHECK(f <= 1.0);
        prev = f;
      }
    }
  }

  TEST_CASE("self-similarity in the scale") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> beta(0.1, 0.95), log_g(-2.0, 2.0), log_t(-2.0, 2.0);
    for (int i = 0; i < 40; ++i) {
      const FractionalOrder b(beta(rng));
      const double g = std::exp(log_g(rng));
      const double t = std::exp(log_t(rng));
      const double lhs = fpp::stable_cdf(fpp::StableSpec(b, g), t);
      const double rhs = fpp::stable_cdf(fpp::StableSpec(b, 1.0), t / g);
      CHECK(std::abs(lhs - rhs) <= 1e-8);
    }
  }

  TEST_CASE("invalid specifications") {
    CHECK_THROWS_AS(fpp::StableSpec(FractionalOrder(1.0), 1.0), fpp::DomainError);
    CHECK_THROWS_AS(fpp::StableSpec(FractionalOrder(0.5), 0.0), fpp::DomainError);
    CHECK_THROWS_AS(fpp::StableSpec::for_weight(FractionalOrder(0.5), -1.0), fpp::DomainError);
  }
}
