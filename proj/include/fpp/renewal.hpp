#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "fpp/fractional_order.hpp"
#include "fpp/numerics.hpp"
#include "fpp/special_functions.hpp"

namespace fpp {

/// Mittag-Leffler waiting-time law, P(tau > t) = E_beta(-t^beta).
class InterArrivalLaw {
 public:
  explicit InterArrivalLaw(FractionalOrder beta);

  FractionalOrder beta() const noexcept { return beta_; }
  const MittagLeffler& functions() const noexcept { return *ml_; }

  double survival(double t) const;
  double cdf(double t) const;
  double pdf(double t) const;

  /// P(N(t) = n): series where it is well conditioned, otherwise the stable-law integral.
  MLEvaluation counting_probability(int n, double t) const;
  /// Density of T_n = tau_1 + ... + tau_n.
  double epoch_pdf(int n, double t) const;
  /// P(T_n <= t) = P(N(t) >= n).
  double epoch_cdf(int n, double t) const;

  /// Radius of the expansions about 0 attached to tabulated functions.
  double expansion_radius(double step) const;

 private:
  FractionalOrder beta_;
  std::shared_ptr<const MittagLeffler> ml_;
};

struct CountingPmf {
  double t = 0.0;
  std::vector<double> probabilities;  // n = 0..n_max
  double tail_mass = 0.0;             // P(N(t) > n_max), computed independently
  double normalization_defect = 0.0;  // |sum + tail - 1|
  double max_abs_error = 0.0;
  /// tail_mass > 1e-3: n_max is too small for this t.
  bool tail_warning = false;
};

double interarrival_cdf(const InterArrivalLaw& law, double t);
double interarrival_pdf(const InterArrivalLaw& law, double t);
double epoch_pdf(int n, const InterArrivalLaw& law, double t);

CountingPmf counting_pmf(const InterArrivalLaw& law, double t, int n_max);

/// P(N(t) = n) = int_0^t f^{*n}(u) (1 - F(t - u)) du by quadrature.
double counting_pmf_renewal(const InterArrivalLaw& law, double t, int n);

/// f^{*n} on [0, cells * step], with its power series about 0 attached.
numerics::GridFunction epoch_pdf_grid(const InterArrivalLaw& law, int n, double step,
                                      std::size_t cells);

/// Pointwise f^{*n} (n >= 1), P(N(.) = m) and the survival, each carrying its
/// expansion about 0 for the singular first cells of grid products.
numerics::AnalyticFunction epoch_pdf_function(const InterArrivalLaw& law, int n, double step);
numerics::AnalyticFunction counting_function(const InterArrivalLaw& law, int m, double step);
numerics::AnalyticFunction survival_function(const InterArrivalLaw& law, double step);

}  // namespace fpp
