#include "fpp/stable_law.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fpp/errors.hpp"
#include "fpp/numerics.hpp"

namespace fpp {

namespace {

constexpr double kPi = std::numbers::pi;

// exp(-36) ~ 2e-16: below this the cdf is reported as 0 without quadrature.
constexpr double kCutoff = 36.0;
// Past lambda * A = 40 the angular integrand is below 5e-18.
constexpr double kNegligible = 40.0;

// log A(theta) with
// A = sin(b th)^(b/(1-b)) sin((1-b) th) / sin(th)^(1/(1-b)).
double log_kernel(double b, double theta) {
  const double r = b / (1.0 - b);
  if (theta < 1e-7) {
    return std::log1p(-b) + r * std::log(b);
  }
  return r * std::log(std::sin(b * theta)) + std::log(std::sin((1.0 - b) * theta)) -
         (1.0 / (1.0 - b)) * std::log(std::sin(theta));
}

// Smallest theta with log A(theta) >= level; A increases on (0, pi).
double solve_angle(double b, double level) {
  double lo = 0.0;
  double hi = kPi;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (log_kernel(b, mid) < level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

StableSpec::StableSpec(FractionalOrder beta, double scale) : beta_(beta), scale_(scale) {
  if (beta.is_exponential()) {
    throw DomainError("the one-sided stable law needs beta < 1");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw DomainError("stable scale must be positive and finite");
  }
  const double b = beta.value();
  factor_ = scale / std::pow(std::cos(kPi * b / 2.0), 1.0 / b);
}

StableSpec StableSpec::for_weight(FractionalOrder beta, double u) {
  if (!(u > 0.0) || !std::isfinite(u)) {
    throw DomainError("stable weight u must be positive and finite");
  }
  const double b = beta.value();
  return StableSpec(beta, std::pow(u * std::cos(kPi * b / 2.0), 1.0 / b));
}

double stable_cdf_standard(FractionalOrder beta, double z, double* est_abs_error) {
  if (est_abs_error) *est_abs_error = 0.0;
  if (beta.is_exponential()) {
    throw DomainError("the one-sided stable law needs beta < 1");
  }
  if (std::isnan(z)) throw DomainError("stable cdf argument is NaN");
  if (z <= 0.0) return 0.0;
  if (std::isinf(z)) return 1.0;
  const double b = beta.value();
  const double log_lambda = -(b / (1.0 - b)) * std::log(z);
  const double log_a0 = log_kernel(b, 0.0);
  if (log_a0 + log_lambda > std::log(kCutoff)) return 0.0;

  auto integrand = [b, log_lambda](double theta) {
    return std::exp(-std::exp(log_kernel(b, theta) + log_lambda));
  };
  // The integrand falls from 1 to 0 over a layer that, for large z, is
  // squeezed against pi.  Breakpoints at geometric levels of lambda * A keep
  // the first Kronrod pass from stepping over it.
  std::vector<double> points{0.0};
  for (double level : {1e-16, 1e-12, 1e-8, 1e-4, 1e-2, 1.0, kNegligible}) {
    if (log_a0 + log_lambda >= std::log(level)) continue;
    const double angle = solve_angle(b, std::log(level) - log_lambda);
    if (angle > points.back()) points.push_back(angle);
  }
  if (points.size() == 1) points.push_back(kPi);
  numerics::QuadratureOptions options;
  options.abs_tol = 1e-15;
  options.max_intervals = 500;
  const auto r = numerics::integrate(integrand, points, options);
  if (est_abs_error) *est_abs_error = r.est_abs_error / kPi + 1e-17;
  return std::clamp(r.value / kPi, 0.0, 1.0);
}

double stable_cdf(const StableSpec& spec, double t) {
  if (std::isnan(t)) throw DomainError("stable cdf argument is NaN");
  if (t <= 0.0) return 0.0;
  return stable_cdf_standard(spec.beta(), t / spec.standard_factor());
}

double stable_cdf_for_weight(FractionalOrder beta, double u, double t) {
  return stable_cdf(StableSpec::for_weight(beta, u), t);
}

}  // namespace fpp
