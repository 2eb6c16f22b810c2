#pragma once

#include "fpp/fractional_order.hpp"

namespace fpp {

/// Totally skewed stable law S_beta(1, scale, 0) in the S1 parameterization,
/// beta < 1.  Its Laplace transform is exp(-scale^beta s^beta / cos(pi beta / 2)).
class StableSpec {
 public:
  StableSpec(FractionalOrder beta, double scale);

  /// Scale (u cos(pi beta / 2))^(1/beta), so that E exp(-s S) = exp(-u s^beta).
  static StableSpec for_weight(FractionalOrder beta, double u);

  FractionalOrder beta() const noexcept { return beta_; }
  double scale() const noexcept { return scale_; }
  double skewness() const noexcept { return 1.0; }
  double location() const noexcept { return 0.0; }

  /// c such that S = c * S0 where S0 has Laplace transform exp(-s^beta).
  double standard_factor() const noexcept { return factor_; }

 private:
  FractionalOrder beta_;
  double scale_;
  double factor_;
};

/// P(S0 <= z) for the standard law with Laplace transform exp(-s^beta),
/// from the single-integral representation over an angle on (0, pi).
/// `est_abs_error` receives the quadrature error estimate when non-null.
double stable_cdf_standard(FractionalOrder beta, double z, double* est_abs_error = nullptr);

/// P(S <= t), clamped to [0, 1]; 0 for t <= 0.
double stable_cdf(const StableSpec& spec, double t);

/// stable_cdf(StableSpec::for_weight(beta, u), t).
double stable_cdf_for_weight(FractionalOrder beta, double u, double t);

}  // namespace fpp
