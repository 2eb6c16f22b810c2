#pragma once

#include <vector>

#include "fpp/fractional_order.hpp"
#include "fpp/numerics.hpp"

namespace fpp {

enum class MLMethod { closed_form, series, asymptotic, spectral_integral, stable_integral };

const char* to_string(MLMethod method) noexcept;

struct MLEvaluation {
  double value = 0.0;
  MLMethod method = MLMethod::series;
  double est_abs_error = 0.0;
};

/// Result of a truncated power series, kept apart from MLEvaluation because
/// callers decide what to do when it is not usable.
struct SeriesSum {
  double value = 0.0;
  double est_abs_error = 0.0;
  bool converged = false;
};

/// Mittag-Leffler evaluator for one beta.
///
/// Holds 1/Gamma(k beta + 1) for k < table_size in extended precision; every
/// series used by the library (E_beta, E_beta,beta, derivatives, the counting
/// probabilities and the epoch cdfs) is a binomially weighted sum over this
/// one table.  Immutable after construction.
class MittagLeffler {
 public:
  explicit MittagLeffler(FractionalOrder beta, int table_size = 1024);

  FractionalOrder beta() const noexcept { return beta_; }

  /// E_beta(x) and E_beta,beta(x) for x <= 0, switching regimes.
  MLEvaluation one_param(double x) const;
  MLEvaluation two_param(double x) const;

  /// sum_{j>=0} C(j+m, m) (-y)^j / Gamma((j+m) beta + 1), the common core of
  /// E^(m)(-y) = m! S and P(N(t) = m) = y^m S with y = t^beta.
  SeriesSum derivative_core(int m, double y, int max_terms = 500) const;

  /// P(N(t) = m) by the termwise series.
  SeriesSum counting_series(int m, double t) const;
  /// P(T_m <= t) = sum_{k>=m} (-1)^(k-m) C(k-1, m-1) t^(k beta) / Gamma(k beta + 1), m >= 1.
  SeriesSum epoch_cdf_series(int m, double t) const;

  /// Local expansions about t = 0, truncated once the terms are negligible on [0, radius].
  numerics::LocalExpansion counting_expansion(int m, double radius) const;
  numerics::LocalExpansion epoch_density_expansion(int n, double radius) const;

  double reciprocal_gamma(int k) const { return static_cast<double>(rgamma_.at(k)); }

 private:
  MLEvaluation spectral(double y, bool two_parameter) const;
  SeriesSum series(int m, double y, bool epoch_weights, int max_terms) const;

  FractionalOrder beta_;
  std::vector<long double> rgamma_;
};

/// E_beta(x), x <= 0, est_abs_error <= 1e-10 for |x| <= 50.
MLEvaluation ml_one_param(FractionalOrder beta, double x);

/// E_beta,beta(x) = sum x^n / Gamma(n beta + beta), x <= 0.
MLEvaluation ml_two_param(FractionalOrder beta, double x);

/// n-th derivative E_beta^(n)(-t^beta) by termwise differentiation of the
/// power series.  Throws ConvergenceError when the truncation and rounding
/// error cannot be brought below `tol` within 500 terms.
MLEvaluation ml_derivative_series(int n, FractionalOrder beta, double t, double tol = 1e-10);

/// n-th derivative E_beta^(n)(-t^beta), n >= 1, beta < 1, through
///   (t^(n beta) / n!) E^(n)(-t^beta) = int_0^inf F_S(t; u) [p_{n-1}(u) - p_n(u)] du
/// where p_k is the Poisson weight e^-u u^k / k! and F_S(t; u) the cdf of
/// the positive stable law with Laplace transform exp(-u s^beta).
MLEvaluation ml_derivative_stable(int n, FractionalOrder beta, double t, double tol = 1e-11);

/// P(N(t) = n) by the stable-law integral above; valid for any t > 0.
MLEvaluation counting_probability_stable(int n, FractionalOrder beta, double t, double tol = 1e-12);

}  // namespace fpp
