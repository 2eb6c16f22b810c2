#include <cmath>
#include <limits>

#include "doctest.h"
#include "fpp/errors.hpp"
#include "fpp/numerics.hpp"
#include "fpp/renewal.hpp"

namespace nm = fpp::numerics;

namespace {

nm::GridFunction tabulate(double step, std::size_t cells, double (*f)(double)) {
  std::vector<double> v(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) v[i] = f(step * static_cast<double>(i));
  return nm::GridFunction(0.0, step, std::move(v));
}

double decay(double t) { return std::exp(-t); }

}  // namespace

TEST_SUITE("numerics") {
  TEST_CASE("quadrature on simple integrands") {
    CHECK(nm::integrate([](double x) { return x * x; }, 0.0, 1.0, 1e-10).value ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(std::abs(nm::integrate([](double x) { return std::exp(-x); }, 0.0, inf, 1e-10).value - 1.0) <= 1e-10);
    nm::QuadratureOptions o;
    o.abs_tol = 1e-12;
    auto root = [](double x) { return 1.0 / std::sqrt(x); };
    CHECK(std::abs(nm::integrate_endpoint_singular(root, 0.0, 4.0, o).value - 4.0) <= 1e-10);
  }

  TEST_CASE("waiting-time density integrates to one") {
    const fpp::InterArrivalLaw law{fpp::FractionalOrder(0.5)};
    nm::QuadratureOptions o;
    o.abs_tol = 1e-9;
    auto f = [&](double t) { return t > 0.0 ? law.pdf(t) : 0.0; };
    const double head = nm::integrate_endpoint_singular(f, 0.0, 1.0, o).value;
    // The tail decays like t^-3/2; t = 1/v^2 makes it regular.
    auto g = [&](double v) { return v > 0.0 ? 2.0 * f(1.0 / (v * v)) / (v * v * v) : 0.0; };
    const double tail = nm::integrate(g, 0.0, 1.0, o).value;
    CHECK(std::abs(head + tail - 1.0) <= 1e-6);
  }

  TEST_CASE("quadrature budget exhaustion reports the best estimate") {
    nm::QuadratureOptions o;
    o.abs_tol = 1e-15;
    o.max_intervals = 3;
    auto wild = [](double x) { return std::sin(200.0 * x) * std::exp(x); };
    try {
      nm::integrate(wild, 0.0, 3.0, o);
      FAIL("expected a convergence error");
    } catch (const fpp::ConvergenceError& e) {
      CHECK(std::isfinite(e.best_estimate()));
      CHECK(e.error_bound() > 1e-15);
    }
  }

  TEST_CASE("grid convolution of exponentials") {
    const auto f = tabulate(1e-3, 10000, decay);
    const auto g = nm::convolve(f, f);
    double err = 0.0;
    for (std::size_t i = 0; i <= 10000; ++i) {
      const double t = g.node(i);
      err = std::max(err, std::abs(g[i] - t * std::exp(-t)));
    }
    CHECK(err <= 1e-4);
    CHECK(std::abs(g.truncated(10001).integral() - (1.0 - 11.0 * std::exp(-10.0))) <= 1e-4);

    const auto p3 = nm::self_convolve(f, 3);
    err = 0.0;
    for (std::size_t i = 0; i < p3.density.size(); ++i) {
      const double t = p3.density.node(i);
      err = std::max(err, std::abs(p3.density[i] - t * t * std::exp(-t) / 2.0));
    }
    CHECK(err <= 1e-4);
  }

  TEST_CASE("a narrow hat acts as a shift") {
    const double h = 1e-2;
    const nm::GridFunction hat(0.0, h, {0.0, 1.0 / h, 0.0});
    const auto g = tabulate(h, 300, [](double t) { return std::sin(t) + 2.0; });
    const auto c = nm::convolve(hat, g);
    for (std::size_t k = 2; k < 300; k += 7) CHECK(std::abs(c[k + 1] - g[k]) <= 1e-3);
  }

  TEST_CASE("convolution power of the waiting-time density") {
    const fpp::InterArrivalLaw law{fpp::FractionalOrder(0.5)};
    const double h = 1e-3;
    const auto f = fpp::epoch_pdf_grid(law, 1, h, 2000);
    const auto one = nm::self_convolve(f, 1).density;
    CHECK(one.size() == f.size());
    CHECK(one[1000] == doctest::Approx(f[1000]));
    const auto two = nm::self_convolve(f, 2).density;
    double err = 0.0;
    for (std::size_t i = 100; i <= 2000; i += 50) {
      err = std::max(err, std::abs(two[i] - law.epoch_pdf(2, two.node(i))));
    }
    CHECK(err <= 1e-4);
  }

  TEST_CASE("reflected product against quadrature") {
    const auto q = tabulate(1e-3, 1000, [](double v) { return v * v; });
    nm::AnalyticFunction k{[](double x) { return std::exp(-x); }, std::nullopt};
    const double c = 1.5;
    const double ref =
        nm::integrate([c](double v) { return v * v * std::exp(-(c - v)); }, 0.0, 1.0, 1e-13).value;
    CHECK(std::abs(nm::reflected_product(q, k, c) - ref) <= 1e-6);
    CHECK_THROWS_AS(nm::reflected_product(q, k, 0.5), fpp::DomainError);
  }

  TEST_CASE("grid validation") {
    CHECK_THROWS_AS(nm::GridFunction(0.0, 0.0, {1.0, 2.0}), fpp::DomainError);
    const nm::GridFunction a(0.0, 1e-3, {1.0, 1.0});
    const nm::GridFunction b(0.0, 2e-3, {1.0, 1.0});
    CHECK_THROWS_AS(nm::convolve(a, b), fpp::DomainError);
  }
}
