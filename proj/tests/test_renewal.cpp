#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fpp/errors.hpp"
#include "fpp/numerics.hpp"
#include "fpp/renewal.hpp"

namespace {

fpp::InterArrivalLaw law_for(double b) { return fpp::InterArrivalLaw(fpp::FractionalOrder(b)); }

}  // namespace

TEST_SUITE("renewal") {
  TEST_CASE("waiting-time cdf") {
    CHECK(fpp::interarrival_cdf(law_for(0.5), 0.0) == 0.0);
    CHECK(fpp::interarrival_cdf(law_for(1.0), std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(fpp::interarrival_cdf(law_for(0.5), 1.0) ==
          doctest::Approx(1.0 - std::exp(1.0) * std::erfc(1.0)).epsilon(1e-13));
    for (double b : {0.3, 0.6, 0.9}) {
      const auto law = law_for(b);
      double prev = 0.0;
      for (double t = 0.01; t < 100.0; t *= 1.2) {
        const double f = law.cdf(t);
        CHECK(f > prev);
        prev = f;
      }
    }
    CHECK_THROWS_AS(law_for(0.5).cdf(-1.0), fpp::DomainError);
  }

  TEST_CASE("waiting-time density") {
    CHECK(fpp::interarrival_pdf(law_for(1.0), 2.0) == doctest::Approx(std::exp(-2.0)));
    const auto law = law_for(0.5);
    const double h = 1e-5;
    const double fd = (law.cdf(1.0 + h) - law.cdf(1.0 - h)) / (2.0 * h);
    CHECK(std::abs(law.pdf(1.0) - fd) <= 1e-6);
    for (double t : {1e-6, 1e-4, 0.3, 2.0}) {
      const double exact = 1.0 / std::sqrt(std::numbers::pi * t) - std::exp(t) * std::erfc(std::sqrt(t));
      CHECK(law.pdf(t) == doctest::Approx(exact).epsilon(1e-10));
    }
    for (double x = 0.01; x < 50.0; x *= 1.5) CHECK(law.pdf(x) >= 0.0);
  }

  TEST_CASE("epoch densities") {
    CHECK(fpp::epoch_pdf(1, law_for(0.7), 1.0) == doctest::Approx(law_for(0.7).pdf(1.0)).epsilon(1e-13));
    CHECK(fpp::epoch_pdf(3, law_for(1.0), 2.0) == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-14));
    const auto law = law_for(0.5);
    const double h = 1e-3;
    const auto two = fpp::numerics::self_convolve(fpp::epoch_pdf_grid(law, 1, h, 2000), 2).density;
    CHECK(std::abs(two(1.5) - fpp::epoch_pdf(2, law, 1.5)) <= 1e-4);
  }

  TEST_CASE("counting pmf reference values") {
    const auto pmf = fpp::counting_pmf(law_for(0.5), 1.0, 10);
    CHECK(pmf.probabilities[0] == doctest::Approx(std::exp(1.0) * std::erfc(1.0)).epsilon(1e-13));
    CHECK(std::abs(pmf.probabilities[1] - 0.27321201478389857) <= 1e-12);
    CHECK(std::abs(law_for(0.75).counting_probability(4, 2.0).value - 0.08114706966544347) <= 1e-12);
    CHECK(std::abs(law_for(0.25).counting_probability(2, 3.0).value - 0.14925667938385731) <= 1e-12);
    CHECK(std::abs(law_for(0.9).counting_probability(10, 5.0).value - 0.017309737113150939) <= 1e-12);
  }

  TEST_CASE("unit order gives the Poisson law") {
    const auto pmf = fpp::counting_pmf(law_for(1.0), 3.0, 25);
    double p = std::exp(-3.0);
    for (int n = 0; n <= 25; ++n) {
      if (n > 0) p *= 3.0 / n;
      CHECK(std::abs(pmf.probabilities[n] - p) <= 1e-15);
    }
  }

  TEST_CASE("normalization with an independent tail") {
    for (double b : {0.25, 0.5, 0.75, 0.9, 1.0}) {
      for (double t : {0.5, 1.0, 5.0}) {
        const auto pmf = fpp::counting_pmf(law_for(b), t, 30);
        CAPTURE(b);
        CAPTURE(t);
        CHECK(pmf.normalization_defect <= 1e-6);
      }
    }
    CHECK(fpp::counting_pmf(law_for(0.5), 50.0, 2).tail_warning);
  }

  TEST_CASE("renewal quadrature route") {
    CHECK(fpp::counting_pmf_renewal(law_for(0.6), 2.0, 0) == law_for(0.6).survival(2.0));
    CHECK(fpp::counting_pmf_renewal(law_for(1.0), 1.0, 2) ==
          doctest::Approx(std::exp(-1.0) / 2.0).epsilon(1e-10));
    double worst = 0.0;
    for (double b : {0.25, 0.5, 0.75, 0.9}) {
      const auto law = law_for(b);
      for (double t : {0.5, 1.0, 5.0}) {
        for (int n = 1; n <= 10; n += 3) {
          worst = std::max(worst, std::abs(law.counting_probability(n, t).value -
                                           fpp::counting_pmf_renewal(law, t, n)));
        }
      }
    }
    CHECK(worst <= 1e-5);
  }

  TEST_CASE("epoch cdf is the tail of the counting law") {
    const auto law = law_for(0.7);
    double below = 0.0;
    for (int k = 0; k < 4; ++k) below += law.counting_probability(k, 2.0).value;
    CHECK(std::abs(law.epoch_cdf(4, 2.0) - (1.0 - below)) <= 1e-12);
  }
}
