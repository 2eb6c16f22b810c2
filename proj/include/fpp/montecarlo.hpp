#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "fpp/fidi.hpp"
#include "fpp/renewal.hpp"

namespace fpp {

/// Paths are simulated in chunks of this many; chunk c always draws from
/// stream (seed, c), so results do not depend on the worker count.
inline constexpr std::size_t kChunkPaths = 16384;

/// One independent random stream derived from a master seed.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

struct PathSample {
  std::vector<double> epochs;  // T_1 < T_2 < ... <= horizon; T_0 = 0 is not stored
  double horizon = 0.0;
};

/// Counts over equal bins [bin_start + i w, bin_start + (i+1) w).
struct Histogram {
  double bin_start = 0.0;
  double bin_width = 1.0;
  std::vector<std::uint64_t> counts;
  std::uint64_t n_samples = 0;
  std::uint64_t underflow = 0;
  std::uint64_t overflow = 0;

  Histogram() = default;
  Histogram(double start, double width, std::size_t bins);

  std::size_t bins() const noexcept { return counts.size(); }
  double left(std::size_t i) const noexcept { return bin_start + bin_width * static_cast<double>(i); }
  double right(std::size_t i) const noexcept { return left(i + 1); }
  double center(std::size_t i) const noexcept { return left(i) + 0.5 * bin_width; }

  void add(double x);
  void merge(const Histogram& other);

  /// counts[i] / n_samples.
  double probability(std::size_t i) const;
  /// probability(i) / bin_width.
  double density(std::size_t i) const;
  /// Binomial standard error of probability(i).
  double standard_error(std::size_t i) const;
};

struct MonteCarloOptions {
  std::uint64_t seed = 1;
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 0;
};

struct ConditionalOptions : MonteCarloOptions {
  double last_epoch_bin = 0.05;
  double residual_bin = 0.01;
  /// Residual times beyond this land in the overflow count.
  double residual_max = 5.0;
  /// Fewer accepted paths than this raises InsufficientAcceptance.
  std::size_t min_accepted = 100;
  bool keep_samples = true;
};

struct ConditionalLaws {
  Histogram last_epoch;  // T_{n_k}, the last renewal before t_k (0 when n_k = 0)
  Histogram residual;    // T_{n_k + 1} - t_k
  std::size_t accepted = 0;
  std::size_t n_paths = 0;
  /// Raw accepted values, in chunk order, when keep_samples is set.
  std::vector<double> last_epoch_samples;
  std::vector<double> residual_samples;
};

struct JointEstimate {
  double probability = 0.0;
  double standard_error = 0.0;
  std::size_t hits = 0;
  std::size_t n_paths = 0;
};

double sample_interarrival(const InterArrivalLaw& law, RandomStream& rng);

PathSample simulate_path(const InterArrivalLaw& law, double horizon, RandomStream& rng);

/// Histogram of N(t) over n_paths paths, one unit-width bin per count.
Histogram estimate_counting_pmf(const InterArrivalLaw& law, double t, std::size_t n_paths,
                                const MonteCarloOptions& options = {});

/// Paths with N(t1) = n1: last renewal before t1 and residual lifetime at t1.
ConditionalLaws estimate_conditional_laws(const InterArrivalLaw& law, double t1, int n1,
                                          std::size_t n_paths,
                                          const ConditionalOptions& options = {});

/// Same, conditioning on every observation of the schedule and measuring at t_k.
ConditionalLaws estimate_conditional_laws(const InterArrivalLaw& law,
                                          const ObservationSchedule& schedule,
                                          std::size_t n_paths,
                                          const ConditionalOptions& options = {});

/// Fraction of paths that match the whole schedule.
JointEstimate estimate_joint_pmf(const InterArrivalLaw& law, const ObservationSchedule& schedule,
                                 std::size_t n_paths, const MonteCarloOptions& options = {});

/// n_samples draws of T_n.
std::vector<double> sample_epochs(const InterArrivalLaw& law, int n, std::size_t n_samples,
                                  const MonteCarloOptions& options = {});

/// sup |F_emp - F|.  The sample overload is exact; the histogram overload
/// compares at bin edges only.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);
double ks_distance(const Histogram& histogram, const std::function<double(double)>& cdf);

/// Asymptotic one-sample Kolmogorov-Smirnov critical value sqrt(-ln(alpha/2)/2)/sqrt(n).
double ks_critical_value(std::size_t n, double alpha = 0.01);

}  // namespace fpp
