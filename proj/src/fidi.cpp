#include "fpp/fidi.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "fpp/errors.hpp"

namespace fpp {

namespace {

constexpr double kTailTarget = 1e-5;

std::size_t cells_for(double length, double step, std::size_t min_cells) {
  const double raw = std::ceil(length / step - 1e-9);
  return std::max<std::size_t>(min_cells, static_cast<std::size_t>(std::max(1.0, raw)));
}

// Number of whole steps in length, or 0 when length is not a multiple of step.
std::size_t whole_steps(double length, double step) {
  const double r = length / step;
  const double n = std::round(r);
  if (n < 1.0 || std::abs(r - n) > 1e-7 * std::max(1.0, n)) return 0;
  return static_cast<std::size_t>(n);
}

// Composite Simpson mass of a tabulated density; the trapezoid rule's O(h^2)
// bias would otherwise leak into every node through the rescaling.
double simpson_mass(const numerics::GridFunction& g) {
  const std::size_t n = g.cells();
  const double h = g.step();
  const std::size_t even = n - n % 2;
  double s = 0.0;
  for (std::size_t i = 0; i + 2 <= even; i += 2) {
    s += h / 3.0 * (g[i] + 4.0 * g[i + 1] + g[i + 2]);
  }
  if (even < n) s += 0.5 * h * (g[n - 1] + g[n]);
  return s;
}

// Monomial coefficients of the degree-n interpolant of g at Chebyshev nodes on [0, r].
std::vector<double> interpolating_polynomial(const std::function<double(double)>& g, double r,
                                             int degree) {
  const auto n = static_cast<std::size_t>(degree) + 1;
  std::vector<double> x(n), d(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = 0.5 * (1.0 - std::cos(std::numbers::pi * (2.0 * i + 1.0) / (2.0 * n)));
    d[i] = g(r * x[i]);
  }
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t i = n - 1; i >= k; --i) d[i] = (d[i] - d[i - 1]) / (x[i] - x[i - k]);
  }
  // Newton form to monomials in x, then x = u / r.
  std::vector<double> c{d[n - 1]};
  for (std::size_t k = n - 1; k-- > 0;) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t j = 0; j < c.size(); ++j) {
      next[j + 1] += c[j];
      next[j] -= x[k] * c[j];
    }
    next[0] += d[k];
    c = std::move(next);
  }
  double scale = 1.0;
  for (auto& v : c) {
    v /= scale;
    scale *= r;
  }
  return c;
}

void check_law(const InterArrivalLaw& a, const InterArrivalLaw& b) {
  if (!(a.beta() == b.beta())) {
    throw DomainError("kernel was built for a different beta");
  }
}

}  // namespace

// ---------------------------------------------------------------- schedule

ObservationSchedule::ObservationSchedule(std::vector<double> times, std::vector<int> counts)
    : times_(std::move(times)), counts_(std::move(counts)) {
  if (times_.empty()) throw DomainError("a schedule needs at least one observation");
  if (times_.size() != counts_.size()) {
    throw DomainError("times and counts must have the same length");
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!(times_[i] > 0.0) || !std::isfinite(times_[i])) {
      throw DomainError("observation times must be positive and finite");
    }
    if (counts_[i] < 0) throw DomainError("counts must be >= 0");
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw DomainError("observation times must be strictly increasing");
    }
    if (i > 0 && counts_[i] < counts_[i - 1]) {
      throw DomainError("counts must be non-decreasing");
    }
  }
}

ObservationSchedule ObservationSchedule::prefix(std::size_t k) const {
  if (k == 0 || k > size()) throw DomainError("prefix length out of range");
  return ObservationSchedule({times_.begin(), times_.begin() + static_cast<std::ptrdiff_t>(k)},
                             {counts_.begin(), counts_.begin() + static_cast<std::ptrdiff_t>(k)});
}

ObservationSchedule ObservationSchedule::extended(double t, int n) const {
  auto times = times_;
  auto counts = counts_;
  times.push_back(t);
  counts.push_back(n);
  return ObservationSchedule(std::move(times), std::move(counts));
}

// ---------------------------------------------------------------- kernel

double MemoryKernel::weight(const InterArrivalLaw& law, const Source& source, double t_obs,
                            const numerics::AnalyticFunction& k, double shift) {
  (void)law;
  if (!source.window) return k.value(t_obs - source.point + shift);
  return numerics::reflected_product(*source.window, k, t_obs + shift);
}

double MemoryKernel::auto_span(const InterArrivalLaw& law, const Source& source, double t_obs,
                               double step, const KernelOptions& options) {
  if (options.span > 0.0) return options.span;
  const auto s = survival_function(law, step);
  const double z = weight(law, source, t_obs, s, 0.0);
  double span = 1.0;
  while (span < options.max_span && weight(law, source, t_obs, s, span) / z > kTailTarget) {
    span *= 2.0;
  }
  return std::min(span, options.max_span);
}

MemoryKernel::MemoryKernel(InterArrivalLaw law, ObservationSchedule prefix, Source source,
                           double t_obs, double step, double span)
    : law_(std::move(law)),
      prefix_(std::move(prefix)),
      source_(std::move(source)),
      t_obs_(t_obs),
      density_(0.0, 1.0, {0.0}) {
  if (!(step > 0.0) || !(span > 0.0)) throw DomainError("kernel step and span must be positive");
  const std::size_t m = cells_for(span, step, 1);
  const auto s = survival_function(law_, step);
  const auto f = epoch_pdf_function(law_, 1, step);
  z_ = weight(law_, source_, t_obs_, s, 0.0);
  if (!(z_ > 0.0)) throw DomainError("conditioning event has zero probability");

  std::vector<double> values(m + 1);
  if (!source_.window) {
    const double d = t_obs_ - source_.point;
    if (!(d > 0.0)) throw DomainError("observation must follow the last renewal");
    for (std::size_t i = 0; i <= m; ++i) values[i] = f.value(d + step * i) / z_;
  } else {
    const auto& q = *source_.window;
    const std::size_t lag = whole_steps(t_obs_ - q.start(), step);
    if (lag > 0 && std::abs(q.step() - step) <= 1e-12 * step) {
      // Lattice-aligned: f_Y on the grid is a slice of q * f_tau.
      const numerics::GridFunction rel(0.0, q.step(), {q.values().begin(), q.values().end()},
                                       q.origin());
      const auto ftau = epoch_pdf_grid(law_, 1, step, lag + m);
      const auto conv = numerics::convolve(rel, ftau);
      for (std::size_t i = 0; i <= m; ++i) values[i] = conv[lag + i] / z_;
    } else {
      for (std::size_t i = 0; i <= m; ++i) {
        values[i] = numerics::reflected_product(q, f, t_obs_ + step * i) / z_;
      }
    }
  }
  numerics::GridFunction raw(0.0, step, std::move(values));
  const double mass = simpson_mass(raw);
  tail_mass_ = weight(law_, source_, t_obs_, s, raw.end()) / z_;
  defect_ = std::abs(mass + tail_mass_ - 1.0);
  density_ = raw.scaled((1.0 - tail_mass_) / mass).clamped_density();
}

double MemoryKernel::survival(double y) const {
  if (!(y >= 0.0)) throw DomainError("residual time must be >= 0");
  if (y == 0.0) return 1.0;
  const auto s = survival_function(law_, density_.step());
  return std::clamp(weight(law_, source_, t_obs_, s, y) / z_, 0.0, 1.0);
}

double MemoryKernel::pdf(double y) const {
  if (!(y >= 0.0)) throw DomainError("residual time must be >= 0");
  const auto f = epoch_pdf_function(law_, 1, density_.step());
  return weight(law_, source_, t_obs_, f, y) / z_;
}

MemoryKernel MemoryKernel::retabulated(double step, double span) const {
  return MemoryKernel(law_, prefix_, source_, t_obs_, step, span);
}

// ---------------------------------------------------------------- one-step laws

numerics::GridFunction last_epoch_pdf(const InterArrivalLaw& law, double t1, int n1,
                                      const KernelOptions& options) {
  if (n1 < 1) {
    throw DomainError("the last renewal before t1 is the point 0 when n1 = 0");
  }
  if (!(t1 > 0.0) || !std::isfinite(t1)) throw DomainError("t1 must be positive and finite");
  const std::size_t cells = cells_for(t1, options.step, options.min_cells);
  const double h = t1 / static_cast<double>(cells);
  const double z = law.counting_probability(n1, t1).value;
  if (!(z > 0.0)) throw DomainError("P(N(t1) = n1) vanishes");

  // f^{*n1}(u) S(t1 - u) / z; near u = 0 the survival factor is replaced by
  // its interpolating polynomial.
  const double radius = std::min(law.expansion_radius(h), 0.25 * t1);
  const auto f = law.functions().epoch_density_expansion(n1, radius);
  const auto poly = interpolating_polynomial([&](double u) { return law.survival(t1 - u); },
                                             radius, 8);
  std::vector<numerics::PowerTerm> terms;
  for (const auto& t : f.terms()) {
    for (std::size_t j = 0; j < poly.size(); ++j) {
      terms.push_back({t.coefficient * poly[j] / z, t.exponent + static_cast<double>(j)});
    }
  }
  numerics::LocalExpansion origin(std::move(terms), radius);
  std::vector<double> values(cells + 1);
  values[0] = origin(0.0);
  for (std::size_t i = 1; i <= cells; ++i) {
    const double u = h * static_cast<double>(i);
    values[i] = law.epoch_pdf(n1, u) * law.survival(t1 - u) / z;
  }
  return numerics::GridFunction(0.0, h, std::move(values), std::move(origin));
}

MemoryKernel residual_lifetime_pdf(const InterArrivalLaw& law, double t1, int n1,
                                   const KernelOptions& options) {
  if (!(t1 > 0.0) || !std::isfinite(t1)) throw DomainError("t1 must be positive and finite");
  if (n1 < 0) throw DomainError("n1 must be >= 0");
  MemoryKernel::Source source;
  double h = options.step;
  if (n1 >= 1) {
    const std::size_t cells = cells_for(t1, options.step, options.min_cells);
    h = t1 / static_cast<double>(cells);
    source.window = epoch_pdf_grid(law, n1, h, cells);
  }
  const double step = options.density_step > 0.0 ? options.density_step : h;
  const double span = MemoryKernel::auto_span(law, source, t1, step, options);
  return MemoryKernel(law, ObservationSchedule({t1}, {n1}), std::move(source), t1, step, span);
}

double conditional_increment_pmf(const MemoryKernel& kernel, const InterArrivalLaw& law,
                                 double dt, int m) {
  check_law(kernel.law(), law);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be positive and finite");
  if (m < 0) throw DomainError("increment must be >= 0");
  if (m == 0) return kernel.survival(dt);
  const auto& g = kernel.density();
  const std::size_t n = whole_steps(dt, g.step());
  numerics::GridFunction window = g;
  if (n > 0 && n <= g.cells()) {
    window = g.truncated(n + 1);
  } else {
    const std::size_t cells = cells_for(dt, g.step(), 200);
    window = kernel.retabulated(dt / static_cast<double>(cells), dt).density();
  }
  const auto p = counting_function(law, m - 1, window.step());
  return std::clamp(numerics::reflected_product(window, p, dt), 0.0, 1.0);
}

MemoryKernel memory_kernel_update(const MemoryKernel& prev, const InterArrivalLaw& law,
                                  double t_prev, double t_next, int dn,
                                  const KernelOptions& options) {
  check_law(prev.law(), law);
  if (dn < 0) throw DomainError("dn must be >= 0");
  if (std::abs(t_prev - prev.observation_time()) > 1e-12 * std::max(1.0, t_prev)) {
    throw DomainError("t_prev does not match the kernel's observation time");
  }
  if (!(t_next > t_prev) || !std::isfinite(t_next)) {
    throw DomainError("t_next must exceed t_prev");
  }
  const double dt = t_next - t_prev;
  if (prev.span() < dt * (1.0 - 1e-12)) {
    throw SupportError("previous kernel covers residual times up to " +
                       std::to_string(prev.span()) + " but the next interval is " +
                       std::to_string(dt));
  }
  const int n_prev = prev.schedule_prefix().counts().back();
  auto prefix = prev.schedule_prefix().extended(t_next, n_prev + dn);

  MemoryKernel::Source source;
  double h;
  if (dn == 0) {
    source = prev.source_;
    h = options.step;
  } else {
    numerics::GridFunction fy = prev.density();
    std::size_t cells = whole_steps(dt, fy.step());
    if (cells > 0 && cells <= fy.cells()) {
      fy = fy.truncated(cells + 1);
    } else {
      cells = cells_for(dt, fy.step(), options.min_cells);
      fy = prev.retabulated(dt / static_cast<double>(cells), dt).density();
    }
    h = fy.step();
    numerics::GridFunction q = fy;
    if (dn > 1) {
      const auto power = epoch_pdf_grid(law, dn - 1, h, cells);
      q = numerics::convolve(fy, power).truncated(cells + 1);
    }
    source.window = numerics::GridFunction(t_prev, h, {q.values().begin(), q.values().end()});
  }
  const double step = options.density_step > 0.0 ? options.density_step : h;
  const double span = MemoryKernel::auto_span(law, source, t_next, step, options);
  return MemoryKernel(law, std::move(prefix), std::move(source), t_next, step, span);
}

// ---------------------------------------------------------------- joint law

namespace {

struct ChainRun {
  double value = 0.0;
  std::vector<double> factors;
  std::vector<double> defects;
};

ChainRun run_chain(const ObservationSchedule& schedule, const InterArrivalLaw& law,
                   double step, std::size_t min_cells) {
  const std::size_t k = schedule.size();
  ChainRun out;
  out.value = law.counting_probability(schedule.count(0), schedule.time(0)).value;
  out.factors.push_back(out.value);
  if (k == 1) return out;

  // One step for every window when the instants allow it, so that every
  // grid product runs on a shared lattice.
  std::vector<double> lengths{schedule.time(0)};
  for (std::size_t i = 1; i < k; ++i) lengths.push_back(schedule.time(i) - schedule.time(i - 1));
  double h = step;
  for (double len : lengths) h = std::min(h, len / static_cast<double>(min_cells));
  const double h_aligned = schedule.time(0) / std::ceil(schedule.time(0) / h - 1e-9);
  bool aligned = true;
  for (double t : schedule.times()) aligned = aligned && whole_steps(t, h_aligned) > 0;
  std::vector<double> steps;
  for (double len : lengths) {
    steps.push_back(aligned ? h_aligned : len / static_cast<double>(cells_for(len, h, min_cells)));
  }

  KernelOptions opts;
  opts.step = steps[0];
  opts.min_cells = min_cells;
  opts.density_step = steps[1];
  opts.span = lengths[1];
  MemoryKernel kernel = residual_lifetime_pdf(law, schedule.time(0), schedule.count(0), opts);
  out.defects.push_back(kernel.normalization_defect());
  for (std::size_t i = 1; i < k; ++i) {
    const int m = schedule.count(i) - schedule.count(i - 1);
    const double factor = conditional_increment_pmf(kernel, law, lengths[i], m);
    out.factors.push_back(factor);
    out.value *= factor;
    if (i + 1 < k) {
      KernelOptions next;
      next.step = steps[i];
      next.min_cells = min_cells;
      next.density_step = steps[i + 1];
      next.span = lengths[i + 1];
      kernel = memory_kernel_update(kernel, law, schedule.time(i - 1), schedule.time(i), m, next);
      out.defects.push_back(kernel.normalization_defect());
    }
  }
  return out;
}

}  // namespace

JointPmfResult joint_pmf(const ObservationSchedule& schedule, const InterArrivalLaw& law,
                         const JointPmfOptions& options) {
  if (!(options.step > 0.0) || options.min_cells < 2) {
    throw DomainError("joint pmf needs a positive step and at least two cells");
  }
  const ChainRun fine = run_chain(schedule, law, options.step, options.min_cells);
  JointPmfResult out;
  out.value = fine.value;
  out.factors = fine.factors;
  out.kernel_defects = fine.defects;
  if (options.estimate_error && schedule.size() > 1) {
    const ChainRun coarse = run_chain(schedule, law, 2.0 * options.step,
                                      std::max<std::size_t>(2, options.min_cells / 2));
    out.est_abs_error = std::abs(fine.value - coarse.value);
  }
  return out;
}

// ---------------------------------------------------------------- oracle

namespace {

class Oracle {
 public:
  Oracle(const ObservationSchedule& schedule, const InterArrivalLaw& law, double tol)
      : s_(schedule), law_(law), tol_(tol) {
    power_ = std::max(4, static_cast<int>(std::ceil(2.0 / law.beta().value())));
    for (std::size_t i = 1; i < s_.size(); ++i) {
      const int m = s_.count(i) - s_.count(i - 1);
      if (m > 0) windows_.push_back({s_.time(i - 1), s_.time(i), m});
    }
    horizon_ = s_.times().back();
  }

  OracleResult run() {
    const int n1 = s_.count(0);
    const double t1 = s_.time(0);
    double value;
    if (windows_.empty()) {
      // No renewal after T_{n1} up to the last instant.
      if (n1 == 0) {
        value = law_.survival(horizon_);
      } else {
        value = integrate([&](double a) { return law_.epoch_pdf(n1, a) * law_.survival(horizon_ - a); },
                          0.0, t1, tol_);
      }
    } else {
      // The first renewal after T_{n1} lands at b inside the first active window.
      auto first_arrival = [&](double b) {
        if (n1 == 0) return law_.pdf(b);
        return integrate([&](double a) { return law_.epoch_pdf(n1, a) * law_.pdf(b - a); }, 0.0,
                         t1, tol_ * 0.01);
      };
      const auto& w = windows_.front();
      value = integrate([&](double b) { return first_arrival(b) * chi(0, b); }, w.lo, w.hi, tol_);
    }
    return {value, error_};
  }

 private:
  struct Window {
    double lo;
    double hi;
    int m;
  };

  double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (!(a < b)) return 0.0;
    numerics::QuadratureOptions o;
    o.abs_tol = tol;
    o.max_intervals = 400;
    try {
      const auto r = numerics::integrate_endpoint_singular(f, a, b, o, power_);
      return r.value;
    } catch (const ConvergenceError& e) {
      error_ = std::max(error_, e.error_bound());
      return e.best_estimate();
    }
  }

  // Everything after the last renewal of window j, which sits at a.
  double rho(std::size_t j, double a) {
    if (j + 1 == windows_.size()) return law_.survival(horizon_ - a);
    return psi(j + 1, a);
  }

  // Given the first renewal of window j at b.
  double chi(std::size_t j, double b) {
    const auto& w = windows_[j];
    if (w.m == 1) return rho(j, b);
    if (j + 1 == windows_.size() && w.hi == horizon_) {
      return law_.counting_probability(w.m - 1, horizon_ - b).value;
    }
    return integrate([&](double a) { return law_.epoch_pdf(w.m - 1, a - b) * rho(j, a); }, b,
                     w.hi, tol_ * 0.01);
  }

  // Given the last renewal at a before window j (none in between).
  double psi(std::size_t j, double a) {
    const auto& w = windows_[j];
    return integrate([&](double b) { return law_.pdf(b - a) * chi(j, b); }, w.lo, w.hi,
                     tol_ * 0.01);
  }

  const ObservationSchedule& s_;
  const InterArrivalLaw& law_;
  double tol_;
  int power_;
  double horizon_;
  double error_ = 0.0;
  std::vector<Window> windows_;
};

}  // namespace

OracleResult joint_pmf_oracle(const ObservationSchedule& schedule, const InterArrivalLaw& law,
                              double tol) {
  if (schedule.size() > 3) {
    throw DomainError("the nested-quadrature oracle is limited to k <= 3");
  }
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (schedule.size() == 1) {
    return {counting_pmf_renewal(law, schedule.time(0), schedule.count(0)), tol};
  }
  OracleResult r = Oracle(schedule, law, tol).run();
  r.est_abs_error = std::max(r.est_abs_error, tol);
  return r;
}

}  // namespace fpp
