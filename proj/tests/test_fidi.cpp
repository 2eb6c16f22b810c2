#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fpp/errors.hpp"
#include "fpp/fidi.hpp"

namespace {

fpp::InterArrivalLaw law_for(double b) { return fpp::InterArrivalLaw(fpp::FractionalOrder(b)); }

double poisson(int m, double t) { return std::exp(m * std::log(t) - t - std::lgamma(m + 1.0)); }

}  // namespace

TEST_SUITE("fidi") {
  TEST_CASE("schedule validation") {
    CHECK_THROWS_AS(fpp::ObservationSchedule({}, {}), fpp::DomainError);
    CHECK_THROWS_AS(fpp::ObservationSchedule({1.0, 1.0}, {0, 1}), fpp::DomainError);
    CHECK_THROWS_AS(fpp::ObservationSchedule({1.0, 2.0}, {2, 1}), fpp::DomainError);
    CHECK_THROWS_AS(fpp::ObservationSchedule({1.0, 2.0}, {0}), fpp::DomainError);
    CHECK_THROWS_AS(fpp::ObservationSchedule({-1.0}, {0}), fpp::DomainError);
  }

  TEST_CASE("last renewal before t1") {
    const auto g = fpp::last_epoch_pdf(law_for(1.0), 1.0, 2);
    for (std::size_t i = 0; i < g.size(); i += 37) CHECK(std::abs(g[i] - 2.0 * g.node(i)) <= 1e-10);
    CHECK_THROWS_AS(fpp::last_epoch_pdf(law_for(0.5), 1.0, 0), fpp::DomainError);
    for (double b : {0.5, 0.75, 0.9}) {
      for (int n1 : {1, 2, 4}) CHECK(std::abs(fpp::last_epoch_pdf(law_for(b), 1.5, n1).integral() - 1.0) <= 1e-4);
    }
  }

  TEST_CASE("residual lifetime is exponential for beta = 1") {
    for (double t1 : {1.0, 2.0}) {
      for (int n1 : {0, 1, 3}) {
        const auto k = fpp::residual_lifetime_pdf(law_for(1.0), t1, n1);
        double err = 0.0;
        for (std::size_t i = 0; i < k.density().size(); ++i) {
          err = std::max(err, std::abs(k.density()[i] - std::exp(-k.density().node(i))));
        }
        CAPTURE(t1);
        CAPTURE(n1);
        CHECK(err <= 1e-8);
      }
    }
  }

  TEST_CASE("residual lifetime with no renewal before t1") {
    const auto law = law_for(0.5);
    const auto k = fpp::residual_lifetime_pdf(law, 1.0, 0);
    const double s = law.survival(1.0);
    for (double y : {0.01, 0.3, 1.0, 4.0}) {
      CHECK(k.pdf(y) == doctest::Approx(law.pdf(y + 1.0) / s).epsilon(1e-12));
      CHECK(std::abs(k.density()(y) - law.pdf(y + 1.0) / s) <= 1e-6);
    }
    CHECK(k.normalization_defect() <= 1e-4);
    CHECK(k.tail_mass() > 0.0);
  }

  TEST_CASE("conditional increments") {
    const auto exp_law = law_for(1.0);
    // A single grid is second order in the step.
    auto worst = [&](double step) {
      fpp::KernelOptions o;
      o.step = step;
      const auto k = fpp::residual_lifetime_pdf(exp_law, 1.0, 2, o);
      double e = 0.0;
      for (int m = 0; m <= 4; ++m) {
        e = std::max(e, std::abs(fpp::conditional_increment_pmf(k, exp_law, 1.5, m) - poisson(m, 1.5)));
      }
      return e;
    };
    const double coarse = worst(1e-3);
    const double fine = worst(5e-4);
    CHECK(fine <= 1e-8);
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.05));

    const auto law = law_for(0.5);
    const auto k1 = fpp::residual_lifetime_pdf(law, 1.0, 1);
    double total = 0.0;
    for (int m = 0; m <= 30; ++m) total += fpp::conditional_increment_pmf(k1, law, 1.0, m);
    CHECK(total >= 1.0 - 1e-3);
    CHECK(total <= 1.0 + 1e-4);

    const double two_point = fpp::joint_pmf_oracle(fpp::ObservationSchedule({1.0, 2.0}, {1, 2}), law).value;
    const double ratio = two_point / law.counting_probability(1, 1.0).value;
    CHECK(std::abs(fpp::conditional_increment_pmf(k1, law, 1.0, 1) - ratio) <= 1e-4);
  }

  TEST_CASE("kernel update") {
    const auto exp_law = law_for(1.0);
    const auto k1 = fpp::residual_lifetime_pdf(exp_law, 1.0, 1);
    for (int dn : {0, 1, 2}) {
      const auto k2 = fpp::memory_kernel_update(k1, exp_law, 1.0, 2.0, dn);
      double err = 0.0;
      for (std::size_t i = 0; i < k2.density().size(); i += 11) {
        err = std::max(err, std::abs(k2.density()[i] - std::exp(-k2.density().node(i))));
      }
      CAPTURE(dn);
      CHECK(err <= 1e-8);
      CHECK(k2.schedule_prefix().counts().back() == 1 + dn);
    }

    const auto law = law_for(0.5);
    fpp::KernelOptions short_span;
    short_span.span = 0.5;
    const auto k = fpp::residual_lifetime_pdf(law, 1.0, 1, short_span);
    CHECK_THROWS_AS(fpp::memory_kernel_update(k, law, 1.0, 2.0, 1), fpp::SupportError);
    CHECK_THROWS_AS(fpp::memory_kernel_update(k, law, 1.5, 2.0, 1), fpp::DomainError);
  }

  TEST_CASE("joint law base cases") {
    const auto law = law_for(0.75);
    const auto one = fpp::joint_pmf(fpp::ObservationSchedule({1.3}, {2}), law);
    CHECK(one.value == law.counting_probability(2, 1.3).value);

    const auto exp_law = law_for(1.0);
    const double r = fpp::joint_pmf(fpp::ObservationSchedule({1, 2, 3}, {1, 2, 4}), exp_law).value;
    CHECK(std::abs(r - poisson(1, 1.0) * poisson(1, 1.0) * poisson(2, 1.0)) <= 1e-8);

    CHECK(fpp::joint_pmf_oracle(fpp::ObservationSchedule({1.0, 2.0}, {1, 1}), exp_law).value ==
          doctest::Approx(std::exp(-2.0)).epsilon(1e-8));
    CHECK(fpp::joint_pmf_oracle(fpp::ObservationSchedule({1.7}, {2}), law).value ==
          doctest::Approx(fpp::counting_pmf_renewal(law, 1.7, 2)).epsilon(1e-9));
  }

  TEST_CASE("recursion against the oracle") {
    struct Case { double b; std::vector<double> t; std::vector<int> n; };
    const Case cases[] = {{0.5, {1, 2}, {0, 1}}, {0.75, {0.5, 1.5}, {1, 3}}, {0.9, {1, 2}, {2, 2}},
                          {0.5, {1, 2, 3}, {1, 2, 3}}};
    for (const auto& c : cases) {
      const fpp::ObservationSchedule s(c.t, c.n);
      const auto law = law_for(c.b);
      const auto rec = fpp::joint_pmf(s, law);
      const auto ora = fpp::joint_pmf_oracle(s, law);
      CAPTURE(c.b);
      CHECK(std::abs(rec.value - ora.value) <= 1e-4);
      CHECK(rec.est_abs_error < 1e-4);
    }
    CHECK(std::abs(fpp::joint_pmf_oracle(fpp::ObservationSchedule({0.5, 1.5}, {1, 3}), law_for(0.75)).value -
                   0.0420669024) <= 1e-8);
  }

  TEST_CASE("marginal consistency") {
    for (double b : {0.5, 0.9}) {
      const auto law = law_for(b);
      for (int n1 : {0, 1, 2}) {
        double sum = 0.0;
        for (int n2 = n1; n2 <= n1 + 25; ++n2) {
          fpp::JointPmfOptions o;
          o.estimate_error = false;
          sum += fpp::joint_pmf(fpp::ObservationSchedule({1.0, 2.0}, {n1, n2}), law, o).value;
        }
        CAPTURE(b);
        CAPTURE(n1);
        CHECK(std::abs(sum - law.counting_probability(n1, 1.0).value) <= 1e-4);
      }
    }
  }

  TEST_CASE("the increment depends on the past count") {
    const auto law = law_for(0.5);
    const auto k0 = fpp::residual_lifetime_pdf(law, 1.0, 0);
    const auto k3 = fpp::residual_lifetime_pdf(law, 1.0, 3);
    const double a = fpp::conditional_increment_pmf(k0, law, 1.0, 0);
    const double b = fpp::conditional_increment_pmf(k3, law, 1.0, 0);
    CHECK(std::abs(a - b) > 1e-2);
  }
}
