#include "fpp/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

#include "fpp/errors.hpp"

namespace fpp {

namespace {

constexpr double kPi = std::numbers::pi;

// Calls work(chunk, first_path, n) for every chunk and returns the results in
// chunk order.
template <class Work>
auto run_chunks(std::size_t n_paths, const MonteCarloOptions& options, Work work) {
  using Result = decltype(work(std::size_t{}, std::size_t{}, std::size_t{}));
  const std::size_t chunks = (n_paths + kChunkPaths - 1) / kChunkPaths;
  std::vector<Result> results(chunks);
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, chunks)));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        const std::size_t first = c * kChunkPaths;
        results[c] = work(c, first, std::min(kChunkPaths, n_paths - first));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = chunks;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

void check_paths(std::size_t n) {
  if (n < 1) throw DomainError("n_paths must be >= 1");
}

// Walks one path until the schedule is decided.  Returns false when the path
// misses a count; otherwise stores the last renewal before t_k and T_{n_k+1}.
bool walk_schedule(const InterArrivalLaw& law, const ObservationSchedule& s, RandomStream& rng,
                   double& last, double& next) {
  const std::size_t k = s.size();
  std::size_t i = 0;
  int count = 0;
  double t = 0.0;
  last = 0.0;
  for (;;) {
    t += sample_interarrival(law, rng);
    while (i < k && t > s.time(i)) {
      if (count != s.count(i)) return false;
      ++i;
    }
    if (i == k) {
      next = t;
      return true;
    }
    ++count;
    last = t;
    if (count > s.count(i)) return false;
  }
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

Histogram::Histogram(double start, double width, std::size_t bins)
    : bin_start(start), bin_width(width), counts(bins, 0) {
  if (!(width > 0.0) || !std::isfinite(width)) throw DomainError("bin width must be positive");
  if (!std::isfinite(start)) throw DomainError("bin start must be finite");
}

void Histogram::add(double x) {
  ++n_samples;
  if (x < bin_start) {
    ++underflow;
    return;
  }
  const double r = std::floor((x - bin_start) / bin_width);
  if (r >= static_cast<double>(counts.size())) {
    ++overflow;
    return;
  }
  ++counts[static_cast<std::size_t>(r)];
}

void Histogram::merge(const Histogram& other) {
  if (other.bin_start != bin_start || other.bin_width != bin_width ||
      other.counts.size() != counts.size()) {
    throw DomainError("histograms have different bins");
  }
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  n_samples += other.n_samples;
  underflow += other.underflow;
  overflow += other.overflow;
}

double Histogram::probability(std::size_t i) const {
  if (n_samples == 0) throw DomainError("empty histogram");
  return static_cast<double>(counts.at(i)) / static_cast<double>(n_samples);
}

double Histogram::density(std::size_t i) const { return probability(i) / bin_width; }

double Histogram::standard_error(std::size_t i) const {
  const double p = probability(i);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples));
}

double sample_interarrival(const InterArrivalLaw& law, RandomStream& rng) {
  const double u = rng.uniform();
  if (law.beta().is_exponential()) return -std::log(u);
  const double v = rng.uniform();
  const double b = law.beta().value();
  // sin(b pi)/tan(b pi v) - cos(b pi), written as one ratio of sines.
  const double ratio = std::sin(b * kPi * (1.0 - v)) / std::sin(b * kPi * v);
  return -std::log(u) * std::pow(ratio, 1.0 / b);
}

PathSample simulate_path(const InterArrivalLaw& law, double horizon, RandomStream& rng) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("horizon must be positive and finite");
  }
  PathSample path;
  path.horizon = horizon;
  double t = sample_interarrival(law, rng);
  while (t <= horizon) {
    path.epochs.push_back(t);
    t += sample_interarrival(law, rng);
  }
  return path;
}

Histogram estimate_counting_pmf(const InterArrivalLaw& law, double t, std::size_t n_paths,
                                const MonteCarloOptions& options) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("t must be positive and finite");
  check_paths(n_paths);
  auto chunks = run_chunks(n_paths, options, [&](std::size_t c, std::size_t, std::size_t n) {
    RandomStream rng(options.seed, c);
    std::vector<std::uint64_t> counts;
    for (std::size_t p = 0; p < n; ++p) {
      std::size_t k = 0;
      for (double s = sample_interarrival(law, rng); s <= t; s += sample_interarrival(law, rng)) {
        ++k;
      }
      if (k >= counts.size()) counts.resize(k + 1, 0);
      ++counts[k];
    }
    return counts;
  });
  std::size_t bins = 0;
  for (const auto& c : chunks) bins = std::max(bins, c.size());
  Histogram h(0.0, 1.0, bins);
  for (const auto& c : chunks) {
    for (std::size_t k = 0; k < c.size(); ++k) h.counts[k] += c[k];
  }
  h.n_samples = n_paths;
  return h;
}

ConditionalLaws estimate_conditional_laws(const InterArrivalLaw& law, double t1, int n1,
                                          std::size_t n_paths,
                                          const ConditionalOptions& options) {
  if (!(t1 > 0.0) || !std::isfinite(t1)) throw DomainError("t1 must be positive and finite");
  if (n1 < 0) throw DomainError("n1 must be >= 0");
  return estimate_conditional_laws(law, ObservationSchedule({t1}, {n1}), n_paths, options);
}

ConditionalLaws estimate_conditional_laws(const InterArrivalLaw& law,
                                          const ObservationSchedule& schedule,
                                          std::size_t n_paths,
                                          const ConditionalOptions& options) {
  check_paths(n_paths);
  if (!(options.last_epoch_bin > 0.0) || !(options.residual_bin > 0.0) ||
      !(options.residual_max > 0.0)) {
    throw DomainError("bin widths and residual range must be positive");
  }
  const double tk = schedule.times().back();
  const auto u_bins = static_cast<std::size_t>(std::ceil(tk / options.last_epoch_bin - 1e-9));
  const auto y_bins =
      static_cast<std::size_t>(std::ceil(options.residual_max / options.residual_bin - 1e-9));

  struct Chunk {
    Histogram u, y;
    std::vector<double> us, ys;
  };
  auto chunks = run_chunks(n_paths, options, [&](std::size_t c, std::size_t, std::size_t n) {
    RandomStream rng(options.seed, c);
    Chunk out{Histogram(0.0, options.last_epoch_bin, u_bins),
              Histogram(0.0, options.residual_bin, y_bins), {}, {}};
    double last = 0.0;
    double next = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      if (!walk_schedule(law, schedule, rng, last, next)) continue;
      out.u.add(last);
      out.y.add(next - tk);
      if (options.keep_samples) {
        out.us.push_back(last);
        out.ys.push_back(next - tk);
      }
    }
    return out;
  });

  ConditionalLaws laws;
  laws.n_paths = n_paths;
  laws.last_epoch = Histogram(0.0, options.last_epoch_bin, u_bins);
  laws.residual = Histogram(0.0, options.residual_bin, y_bins);
  for (const auto& c : chunks) {
    laws.last_epoch.merge(c.u);
    laws.residual.merge(c.y);
    laws.last_epoch_samples.insert(laws.last_epoch_samples.end(), c.us.begin(), c.us.end());
    laws.residual_samples.insert(laws.residual_samples.end(), c.ys.begin(), c.ys.end());
  }
  laws.accepted = static_cast<std::size_t>(laws.residual.n_samples);
  if (laws.accepted < options.min_accepted) {
    throw InsufficientAcceptance("only " + std::to_string(laws.accepted) + " of " +
                                     std::to_string(n_paths) +
                                     " paths matched the conditioning counts",
                                 laws.accepted, options.min_accepted);
  }
  return laws;
}

JointEstimate estimate_joint_pmf(const InterArrivalLaw& law, const ObservationSchedule& schedule,
                                 std::size_t n_paths, const MonteCarloOptions& options) {
  check_paths(n_paths);
  auto chunks = run_chunks(n_paths, options, [&](std::size_t c, std::size_t, std::size_t n) {
    RandomStream rng(options.seed, c);
    std::size_t hits = 0;
    double last = 0.0;
    double next = 0.0;
    for (std::size_t p = 0; p < n; ++p) hits += walk_schedule(law, schedule, rng, last, next);
    return hits;
  });
  JointEstimate e;
  e.n_paths = n_paths;
  for (std::size_t h : chunks) e.hits += h;
  e.probability = static_cast<double>(e.hits) / static_cast<double>(n_paths);
  e.standard_error = std::sqrt(e.probability * (1.0 - e.probability) / static_cast<double>(n_paths));
  return e;
}

std::vector<double> sample_epochs(const InterArrivalLaw& law, int n, std::size_t n_samples,
                                  const MonteCarloOptions& options) {
  if (n < 1) throw DomainError("epoch index must be >= 1");
  check_paths(n_samples);
  auto chunks = run_chunks(n_samples, options, [&](std::size_t c, std::size_t, std::size_t m) {
    RandomStream rng(options.seed, c);
    std::vector<double> out(m);
    for (auto& x : out) {
      double t = 0.0;
      for (int i = 0; i < n; ++i) t += sample_interarrival(law, rng);
      x = t;
    }
    return out;
  });
  std::vector<double> all;
  all.reserve(n_samples);
  for (const auto& c : chunks) all.insert(all.end(), c.begin(), c.end());
  return all;
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw DomainError("KS distance of an empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_distance(const Histogram& histogram, const std::function<double(double)>& cdf) {
  if (histogram.n_samples == 0) throw DomainError("KS distance of an empty histogram");
  const double n = static_cast<double>(histogram.n_samples);
  double below = static_cast<double>(histogram.underflow);
  double d = std::abs(below / n - cdf(histogram.bin_start));
  for (std::size_t i = 0; i < histogram.bins(); ++i) {
    below += static_cast<double>(histogram.counts[i]);
    d = std::max(d, std::abs(below / n - cdf(histogram.right(i))));
  }
  return d;
}

double ks_critical_value(std::size_t n, double alpha) {
  if (n == 0) throw DomainError("KS critical value needs n >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  return std::sqrt(-std::log(alpha / 2.0) / 2.0) / std::sqrt(static_cast<double>(n));
}

}  // namespace fpp
