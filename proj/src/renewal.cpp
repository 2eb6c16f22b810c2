#include "fpp/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fpp/errors.hpp"

namespace fpp {

namespace {

constexpr double kSeriesAccept = 1e-12;

void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw DomainError("time must be finite and >= 0");
  }
}

double poisson(int n, double t) {
  if (t == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(n * std::log(t) - t - std::lgamma(n + 1.0));
}

// Regularized lower incomplete gamma P(n, t) for integer n >= 1.
double erlang_cdf(int n, double t) {
  if (t <= 0.0) return 0.0;
  if (t < n) {
    double term = poisson(n, t);
    double sum = 0.0;
    for (int k = n; term > 1e-18 * sum || k < n + 2; ++k) {
      sum += term;
      term *= t / (k + 1);
      if (k > n + 2000) break;
    }
    return sum;
  }
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += poisson(k, t);
  return std::max(0.0, 1.0 - s);
}

}  // namespace

InterArrivalLaw::InterArrivalLaw(FractionalOrder beta)
    : beta_(beta), ml_(std::make_shared<const MittagLeffler>(beta, 1024)) {}

double InterArrivalLaw::survival(double t) const {
  check_time(t);
  if (t == 0.0) return 1.0;
  if (beta_.is_exponential()) return std::exp(-t);
  return ml_->one_param(-std::pow(t, beta_.value())).value;
}

double InterArrivalLaw::cdf(double t) const {
  check_time(t);
  if (t == 0.0) return 0.0;
  if (beta_.is_exponential()) return -std::expm1(-t);
  return 1.0 - survival(t);
}

double InterArrivalLaw::pdf(double t) const {
  check_time(t);
  if (beta_.is_exponential()) return std::exp(-t);
  if (t == 0.0) throw DomainError("the waiting-time density diverges at t = 0 for beta < 1");
  const double b = beta_.value();
  return std::pow(t, b - 1.0) * ml_->two_param(-std::pow(t, b)).value;
}

MLEvaluation InterArrivalLaw::counting_probability(int n, double t) const {
  if (n < 0) throw DomainError("count must be >= 0");
  check_time(t);
  if (t == 0.0) return {n == 0 ? 1.0 : 0.0, MLMethod::closed_form, 0.0};
  if (beta_.is_exponential()) return {poisson(n, t), MLMethod::closed_form, 0.0};
  if (n == 0) return ml_->one_param(-std::pow(t, beta_.value()));
  const SeriesSum s = ml_->counting_series(n, t);
  if (s.converged && s.est_abs_error <= kSeriesAccept) {
    return {s.value, MLMethod::series, s.est_abs_error};
  }
  return counting_probability_stable(n, beta_, t);
}

double InterArrivalLaw::epoch_pdf(int n, double t) const {
  if (n < 1) throw DomainError("epoch index must be >= 1");
  check_time(t);
  if (beta_.is_exponential()) {
    if (t == 0.0) return n == 1 ? 1.0 : 0.0;
    return std::exp((n - 1) * std::log(t) - t - std::lgamma(static_cast<double>(n)));
  }
  if (n == 1) return pdf(t);
  if (t == 0.0) {
    const double e = n * beta_.value() - 1.0;
    if (e < 0.0) throw DomainError("epoch density diverges at t = 0");
    return e == 0.0 ? beta_.value() * n * ml_->reciprocal_gamma(n) : 0.0;
  }
  return beta_.value() * n * counting_probability(n, t).value / t;
}

double InterArrivalLaw::epoch_cdf(int n, double t) const {
  if (n < 1) throw DomainError("epoch index must be >= 1");
  check_time(t);
  if (t == 0.0) return 0.0;
  if (beta_.is_exponential()) return erlang_cdf(n, t);
  const SeriesSum s = ml_->epoch_cdf_series(n, t);
  if (s.converged && s.est_abs_error <= 1e-13) return std::clamp(s.value, 0.0, 1.0);
  double below = 0.0;
  for (int k = 0; k < n; ++k) below += counting_probability(k, t).value;
  return std::clamp(1.0 - below, 0.0, 1.0);
}

double InterArrivalLaw::expansion_radius(double step) const {
  // t^beta <= 1/2 keeps the expansion terms small, and 64 cells bound the
  // per-call cost of the exact cell moments.
  const double natural = std::pow(0.5, 1.0 / beta_.value());
  return std::max(step, std::min(64.0 * step, natural));
}

double interarrival_cdf(const InterArrivalLaw& law, double t) { return law.cdf(t); }

double interarrival_pdf(const InterArrivalLaw& law, double t) { return law.pdf(t); }

double epoch_pdf(int n, const InterArrivalLaw& law, double t) { return law.epoch_pdf(n, t); }

CountingPmf counting_pmf(const InterArrivalLaw& law, double t, int n_max) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("t must be positive and finite");
  if (n_max < 0) throw DomainError("n_max must be >= 0");
  CountingPmf out;
  out.t = t;
  double sum = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    const MLEvaluation p = law.counting_probability(n, t);
    out.probabilities.push_back(std::clamp(p.value, 0.0, 1.0));
    out.max_abs_error = std::max(out.max_abs_error, p.est_abs_error);
    sum += out.probabilities.back();
  }
  out.tail_mass = law.epoch_cdf(n_max + 1, t);
  out.normalization_defect = std::abs(sum + out.tail_mass - 1.0);
  out.tail_warning = out.tail_mass > 1e-3;
  return out;
}

double counting_pmf_renewal(const InterArrivalLaw& law, double t, int n) {
  if (n < 0) throw DomainError("count must be >= 0");
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("t must be positive and finite");
  if (n == 0) return law.survival(t);
  auto integrand = [&](double u) { return law.epoch_pdf(n, u) * law.survival(t - u); };
  numerics::QuadratureOptions options;
  options.abs_tol = 1e-12;
  options.max_intervals = 2000;
  const int power = std::max(4, static_cast<int>(std::ceil(2.0 / law.beta().value())));
  return numerics::integrate_endpoint_singular(integrand, 0.0, t, options, power).value;
}

numerics::GridFunction epoch_pdf_grid(const InterArrivalLaw& law, int n, double step,
                                      std::size_t cells) {
  if (n < 1) throw DomainError("epoch index must be >= 1");
  if (!(step > 0.0)) throw DomainError("grid step must be positive");
  const double radius = law.expansion_radius(step);
  auto origin = law.functions().epoch_density_expansion(n, radius);
  std::vector<double> values(cells + 1);
  values[0] = origin(0.0);
  for (std::size_t i = 1; i <= cells; ++i) {
    const double t = step * static_cast<double>(i);
    values[i] = t <= radius ? origin(t) : law.epoch_pdf(n, t);
  }
  return numerics::GridFunction(0.0, step, std::move(values), std::move(origin));
}

numerics::AnalyticFunction epoch_pdf_function(const InterArrivalLaw& law, int n, double step) {
  const double radius = law.expansion_radius(step);
  auto origin = law.functions().epoch_density_expansion(n, radius);
  return {[law, n, origin](double t) {
            return t <= origin.radius() ? origin(t) : law.epoch_pdf(n, t);
          },
          origin};
}

numerics::AnalyticFunction counting_function(const InterArrivalLaw& law, int m, double step) {
  const double radius = law.expansion_radius(step);
  auto origin = law.functions().counting_expansion(m, radius);
  return {[law, m, origin](double t) {
            return t <= origin.radius() ? origin(t) : law.counting_probability(m, t).value;
          },
          origin};
}

numerics::AnalyticFunction survival_function(const InterArrivalLaw& law, double step) {
  return counting_function(law, 0, step);
}

}  // namespace fpp
