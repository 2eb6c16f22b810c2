#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "fpp/numerics.hpp"
#include "fpp/renewal.hpp"

namespace fpp {

/// Observation instants t_1 < ... < t_k with counts n_1 <= ... <= n_k.
class ObservationSchedule {
 public:
  ObservationSchedule(std::vector<double> times, std::vector<int> counts);

  std::size_t size() const noexcept { return times_.size(); }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<int>& counts() const noexcept { return counts_; }
  double time(std::size_t i) const { return times_.at(i); }
  int count(std::size_t i) const { return counts_.at(i); }

  ObservationSchedule prefix(std::size_t k) const;
  ObservationSchedule extended(double t, int n) const;

 private:
  std::vector<double> times_;
  std::vector<int> counts_;
};

struct KernelOptions {
  /// Preferred grid step; adjusted down so that the window lengths are whole multiples.
  double step = 1e-3;
  /// Step of the tabulated density; 0 means the window step.
  double density_step = 0.0;
  /// Minimum number of cells across a window.
  std::size_t min_cells = 200;
  /// Tabulated extent of the density; 0 picks the extent where the tail drops
  /// below 1e-5, capped at `max_span`.
  double span = 0.0;
  double max_span = 10.0;
};

/// Conditional law of the residual lifetime Y: the time from the latest
/// observation instant to the next renewal, given the observed counts.
///
/// Internally the kernel keeps where the last renewal before the observation
/// instant can sit: either a point (no renewal since a known instant) or an
/// unnormalized density q over a window of absolute time.  Then
///   f_Y(y) = int q(v) f_tau(t_obs - v + y) dv / int q(v) S(t_obs - v) dv,
/// S being the waiting-time survival.  The density is tabulated on [0, span]
/// and the mass beyond span is kept exactly from the same representation.
class MemoryKernel {
 public:
  const numerics::GridFunction& density() const noexcept { return density_; }
  const ObservationSchedule& schedule_prefix() const noexcept { return prefix_; }
  double observation_time() const noexcept { return t_obs_; }
  double span() const noexcept { return density_.end(); }
  /// P(Y > span), from the exact representation.
  double tail_mass() const noexcept { return tail_mass_; }
  /// |int density + tail - 1| before the grid was rescaled.
  double normalization_defect() const noexcept { return defect_; }
  const InterArrivalLaw& law() const noexcept { return law_; }

  /// P(Y > y) and f_Y(y), evaluated from the representation rather than the grid.
  double survival(double y) const;
  double pdf(double y) const;

  /// Same law tabulated with another step and extent.
  MemoryKernel retabulated(double step, double span) const;

 private:
  struct Source {
    double point = 0.0;                            // used when there is no window
    std::optional<numerics::GridFunction> window;  // absolute-time density
  };

  friend MemoryKernel residual_lifetime_pdf(const InterArrivalLaw&, double, int,
                                            const KernelOptions&);
  friend MemoryKernel memory_kernel_update(const MemoryKernel&, const InterArrivalLaw&, double,
                                           double, int, const KernelOptions&);

  MemoryKernel(InterArrivalLaw law, ObservationSchedule prefix, Source source, double t_obs,
               double step, double span);

  static double weight(const InterArrivalLaw& law, const Source& source, double t_obs,
                       const numerics::AnalyticFunction& k, double shift);
  static double auto_span(const InterArrivalLaw& law, const Source& source, double t_obs,
                          double step, const KernelOptions& options);

  InterArrivalLaw law_;
  ObservationSchedule prefix_;
  Source source_;
  double t_obs_;
  double z_ = 1.0;
  double tail_mass_ = 0.0;
  double defect_ = 0.0;
  numerics::GridFunction density_;
};

/// Density of the last renewal before t1 given N(t1) = n1 >= 1, on [0, t1].
numerics::GridFunction last_epoch_pdf(const InterArrivalLaw& law, double t1, int n1,
                                      const KernelOptions& options = {});

/// Residual lifetime at t1 given N(t1) = n1.
MemoryKernel residual_lifetime_pdf(const InterArrivalLaw& law, double t1, int n1,
                                   const KernelOptions& options = {});

/// P(N(t + dt) - N(t) = m | history), t being the kernel's observation time.
double conditional_increment_pmf(const MemoryKernel& kernel, const InterArrivalLaw& law,
                                 double dt, int m);

/// Kernel at t_next after observing dn renewals in (t_prev, t_next].
MemoryKernel memory_kernel_update(const MemoryKernel& prev, const InterArrivalLaw& law,
                                  double t_prev, double t_next, int dn,
                                  const KernelOptions& options = {});

struct JointPmfResult {
  double value = 0.0;
  /// |p(h) - p(2h)|: the difference between the step-h and step-2h recursions.
  double est_abs_error = 0.0;
  /// P(N(t1) = n1) followed by one conditional increment probability per later instant.
  std::vector<double> factors;
  /// Kernel normalization defects met along the chain.
  std::vector<double> kernel_defects;
};

struct JointPmfOptions {
  double step = 1e-3;
  std::size_t min_cells = 200;
  bool estimate_error = true;
};

/// P(N(t_1) = n_1, ..., N(t_k) = n_k) through the residual-lifetime recursion.
JointPmfResult joint_pmf(const ObservationSchedule& schedule, const InterArrivalLaw& law,
                         const JointPmfOptions& options = {});

struct OracleResult {
  double value = 0.0;
  double est_abs_error = 0.0;
};

/// The same probability by nested adaptive quadrature over the renewal
/// epochs, independent of the recursion.  k <= 3.
OracleResult joint_pmf_oracle(const ObservationSchedule& schedule, const InterArrivalLaw& law,
                              double tol = 1e-9);

}  // namespace fpp
