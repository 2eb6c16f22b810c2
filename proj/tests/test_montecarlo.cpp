#include <cmath>

#include "doctest.h"
#include "fpp/errors.hpp"
#include "fpp/montecarlo.hpp"

namespace {

fpp::InterArrivalLaw law_for(double b) { return fpp::InterArrivalLaw(fpp::FractionalOrder(b)); }

}  // namespace

TEST_SUITE("montecarlo") {
  TEST_CASE("streams are reproducible and distinct") {
    fpp::RandomStream a(5, 0), b(5, 0), c(5, 1);
    bool differ = false;
    for (int i = 0; i < 100; ++i) {
      const double x = a.uniform();
      CHECK(x == b.uniform());
      CHECK(x > 0.0);
      CHECK(x < 1.0);
      differ = differ || x != c.uniform();
    }
    CHECK(differ);
  }

  TEST_CASE("sampler passes the KS test") {
    for (double beta : {0.5, 1.0}) {
      const auto law = law_for(beta);
      fpp::RandomStream rng(17, 0);
      std::vector<double> x(100000);
      for (auto& v : x) v = fpp::sample_interarrival(law, rng);
      const double d = fpp::ks_distance(x, [&](double t) { return law.cdf(t); });
      CAPTURE(beta);
      CHECK(d < fpp::ks_critical_value(x.size()));
    }
    CHECK(fpp::ks_critical_value(100000) == doctest::Approx(0.005147).epsilon(1e-3));
  }

  TEST_CASE("paths") {
    fpp::RandomStream rng(3, 0);
    const auto p = fpp::simulate_path(law_for(1.0), 1e4, rng);
    CHECK(std::abs(static_cast<double>(p.epochs.size()) / 1e4 - 1.0) <= 3.0 / std::sqrt(1e4));
    for (std::size_t i = 1; i < p.epochs.size(); ++i) CHECK(p.epochs[i] > p.epochs[i - 1]);
    CHECK(p.epochs.back() <= 1e4);
    for (double b : {0.3, 0.8}) {
      fpp::RandomStream r(9, 0);
      for (int i = 0; i < 200; ++i) {
        const auto q = fpp::simulate_path(law_for(b), 1e-6, r);
        for (double e : q.epochs) CHECK(e <= 1e-6);
      }
    }
    CHECK_THROWS_AS(fpp::simulate_path(law_for(0.5), 0.0, rng), fpp::DomainError);
  }

  TEST_CASE("counting histogram") {
    const auto law = law_for(1.0);
    fpp::MonteCarloOptions o;
    o.seed = 21;
    const auto h = fpp::estimate_counting_pmf(law, 1.0, 100000, o);
    for (std::size_t n = 0; n < 6; ++n) {
      const double p = std::exp(-1.0) / std::tgamma(n + 1.0);
      CHECK(std::abs(h.probability(n) - p) <= 4.0 * std::sqrt(p * (1.0 - p) / 1e5));
    }
    const auto single = fpp::estimate_counting_pmf(law, 1.0, 1, o);
    std::uint64_t total = 0;
    for (auto c : single.counts) total += c;
    CHECK(total == 1);
  }

  TEST_CASE("results do not depend on the thread count") {
    const auto law = law_for(0.6);
    fpp::ConditionalOptions one, many;
    one.threads = 1;
    many.threads = 3;
    const auto a = fpp::estimate_conditional_laws(law, 1.0, 1, 50000, one);
    const auto b = fpp::estimate_conditional_laws(law, 1.0, 1, 50000, many);
    CHECK(a.residual.counts == b.residual.counts);
    CHECK(a.last_epoch_samples == b.last_epoch_samples);
  }

  TEST_CASE("conditional laws") {
    const auto law = law_for(1.0);
    fpp::ConditionalOptions o;
    o.seed = 4;
    const auto c = fpp::estimate_conditional_laws(law, 1.0, 2, 200000, o);
    CHECK(c.residual.bin_width == 0.01);
    CHECK(c.last_epoch.bin_width == 0.05);
    std::uint64_t in_bins = 0;
    for (auto x : c.residual.counts) in_bins += x;
    CHECK(in_bins + c.residual.overflow + c.residual.underflow == c.residual.n_samples);
    const double d = fpp::ks_distance(c.residual_samples, [](double y) { return 1.0 - std::exp(-y); });
    CHECK(d < fpp::ks_critical_value(c.accepted));
    // Last renewal: maximum of two uniforms on (0, 1).
    const double du = fpp::ks_distance(c.last_epoch_samples, [](double u) { return u * u; });
    CHECK(du < fpp::ks_critical_value(c.accepted));

    o.min_accepted = 1000;
    CHECK_THROWS_AS(fpp::estimate_conditional_laws(law, 1.0, 12, 2000, o), fpp::InsufficientAcceptance);
  }

  TEST_CASE("joint estimate") {
    const auto law = law_for(0.5);
    const auto e = fpp::estimate_joint_pmf(law, fpp::ObservationSchedule({1.0, 2.0}, {0, 1}), 400000);
    CHECK(std::abs(e.probability - 0.0487884120) <= 3.0 * e.standard_error);
  }

  TEST_CASE("epoch samples") {
    const auto law = law_for(1.0);
    const auto x = fpp::sample_epochs(law, 3, 50000);
    const double d = fpp::ks_distance(x, [](double t) {
      return 1.0 - std::exp(-t) * (1.0 + t + t * t / 2.0);
    });
    CHECK(d < fpp::ks_critical_value(x.size()));
  }

  TEST_CASE("KS distance edge cases") {
    CHECK_THROWS_AS(fpp::ks_distance(std::vector<double>{}, [](double) { return 0.0; }), fpp::DomainError);
    fpp::Histogram h(0.0, 0.1, 10);
    for (int i = 0; i < 100; ++i) h.add(0.5);
    // Only bin edges are compared, so a step inside the bin is invisible.
    CHECK(fpp::ks_distance(h, [](double x) { return x >= 0.55 ? 1.0 : 0.0; }) == 0.0);
    CHECK(fpp::ks_distance(h, [](double x) { return x >= 0.65 ? 1.0 : 0.0; }) == 1.0);
    fpp::Histogram empty(0.0, 0.1, 10);
    CHECK_THROWS_AS(fpp::ks_distance(empty, [](double) { return 0.0; }), fpp::DomainError);
  }
}
