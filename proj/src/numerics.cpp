#include "fpp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <string>

#include "fpp/errors.hpp"

namespace fpp::numerics {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min();

struct Segment {
  double a;
  double b;
  double value;
  double error;
  double magnitude;  // integral of |f|
};

struct ByError {
  bool operator()(const Segment& x, const Segment& y) const { return x.error < y.error; }
};

double checked(double v) {
  if (!std::isfinite(v)) {
    throw DomainError("integrand is not finite at a quadrature node");
  }
  return v;
}

Segment kronrod15(const RealFunction& f, double a, double b, int& evaluations) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = checked(f(center));
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  double fv1[7];
  double fv2[7];
  for (int j = 0; j < 3; ++j) {
    const int k = 2 * j + 1;
    const double dx = half * kXgk[k];
    const double f1 = checked(f(center - dx));
    const double f2 = checked(f(center + dx));
    fv1[k] = f1;
    fv2[k] = f2;
    resg += kWg[j] * (f1 + f2);
    resk += kWgk[k] * (f1 + f2);
    resabs += kWgk[k] * (std::abs(f1) + std::abs(f2));
  }
  for (int j = 0; j < 4; ++j) {
    const int k = 2 * j;
    const double dx = half * kXgk[k];
    const double f1 = checked(f(center - dx));
    const double f2 = checked(f(center + dx));
    fv1[k] = f1;
    fv2[k] = f2;
    resk += kWgk[k] * (f1 + f2);
    resabs += kWgk[k] * (std::abs(f1) + std::abs(f2));
  }
  evaluations += 15;
  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  }
  const double width = std::abs(half);
  resasc *= width;
  resabs *= width;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > kTiny / (50.0 * kEps)) {
    err = std::max(50.0 * kEps * resabs, err);
  }
  return {a, b, resk * half, err, resabs};
}

QuadratureResult adaptive(const RealFunction& f, std::span<const double> points,
                          const QuadratureOptions& options) {
  if (points.size() < 2) {
    throw DomainError("integration needs at least two limits");
  }
  QuadratureResult out;
  std::priority_queue<Segment, std::vector<Segment>, ByError> active;
  std::vector<Segment> frozen;
  double value = 0.0;
  double error = 0.0;
  double magnitude = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i] < points[i + 1])) {
      if (points[i] == points[i + 1]) continue;
      throw DomainError("integration limits must be increasing");
    }
    Segment s = kronrod15(f, points[i], points[i + 1], out.evaluations);
    value += s.value;
    error += s.error;
    magnitude += s.magnitude;
    active.push(s);
  }
  auto target = [&] {
    // Below ~100 eps of the absolute integral the error estimates are noise.
    return std::max({options.abs_tol, options.rel_tol * std::abs(value), 100.0 * kEps * magnitude});
  };
  int intervals = static_cast<int>(active.size());
  while (error > target() && !active.empty() && intervals < options.max_intervals) {
    Segment worst = active.top();
    active.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b) || worst.error <= 51.0 * kEps * worst.magnitude ||
        (worst.b - worst.a) < 1e-14 * std::max(std::abs(worst.a), std::abs(worst.b))) {
      frozen.push_back(worst);
      continue;
    }
    Segment left = kronrod15(f, worst.a, mid, out.evaluations);
    Segment right = kronrod15(f, mid, worst.b, out.evaluations);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    magnitude += left.magnitude + right.magnitude - worst.magnitude;
    active.push(left);
    active.push(right);
    ++intervals;
  }
  // Re-sum from scratch to shed the drift of the running updates.
  value = 0.0;
  error = 0.0;
  for (const auto& s : frozen) {
    value += s.value;
    error += s.error;
  }
  while (!active.empty()) {
    value += active.top().value;
    error += active.top().error;
    active.pop();
  }
  out.value = value;
  out.est_abs_error = error;
  if (error > target() * (1.0 + 1e-9)) {
    char msg[96];
    std::snprintf(msg, sizeof msg, "adaptive quadrature did not converge (error estimate %.3g)",
                  error);
    throw ConvergenceError(msg,
                           value, error);
  }
  return out;
}

double power_difference(double lo, double hi, double p) {
  // hi^p - lo^p without cancellation for narrow cells far from the origin.
  if (lo <= 0.0) return std::pow(hi, p);
  return std::pow(lo, p) * std::expm1(p * std::log1p((hi - lo) / lo));
}

// A polynomial expansion gains nothing over the plain cell rules, and skipping
// it keeps the grid products shift-consistent for smooth integrands.
bool covers(const std::optional<LocalExpansion>& origin, double u_hi) {
  return origin && !origin->smooth() && u_hi <= origin->radius() * (1.0 + 1e-12);
}

// Integral over the cells [jlo, jhi) of a grid A (relative coordinate u = j*h)
// of A(u) B(c - u).  B is known through its node values b_at(j) = B(c - u_j)
// and, where singular, through moments of its origin expansion.
template <class AMoments, class BAt, class BMoments>
double window_product(const GridFunction& A, std::size_t jlo, std::size_t jhi,
                      const AMoments& a_moments, const BAt& b_at,
                      const std::optional<LocalExpansion>& b_origin, const BMoments& b_moments,
                      double c) {
  const double h = A.step();
  const auto& a_origin = A.origin();
  double sum = 0.0;
  for (std::size_t j = jlo; j < jhi; ++j) {
    const double u0 = h * static_cast<double>(j);
    const double u1 = u0 + h;
    const double w1 = c - u0;
    const double w0 = std::max(0.0, c - u1);
    const bool a_sing = covers(a_origin, u1);
    const bool b_sing = covers(b_origin, w1);
    auto a_rule = [&] {
      const CellMoments m = a_moments(j);
      const double b0 = b_at(j);
      const double b1 = b_at(j + 1);
      return b0 * m.m0 + (b1 - b0) / h * m.m1;
    };
    auto b_rule = [&] {
      const CellMoments m = b_moments(j, w0, w1);
      const double a0 = A[j];
      const double a1 = A[j + 1];
      return a1 * m.m0 + (a0 - a1) / h * m.m1;
    };
    if (a_sing && b_sing) {
      if (j == 0 && w0 <= 1e-12 * h) {
        sum += convolve(*a_origin, *b_origin)(w1);
      } else if (u0 < w0) {
        sum += a_rule();
      } else if (w0 < u0) {
        sum += b_rule();
      } else {
        sum += 0.5 * (a_rule() + b_rule());
      }
    } else if (a_sing) {
      sum += a_rule();
    } else if (b_sing) {
      sum += b_rule();
    } else {
      sum += 0.5 * h * (A[j] * b_at(j) + A[j + 1] * b_at(j + 1));
    }
  }
  return sum;
}

std::vector<CellMoments> origin_cell_moments(const GridFunction& g) {
  std::vector<CellMoments> out;
  if (!g.origin()) return out;
  const double h = g.step();
  for (std::size_t j = 0; j < g.cells(); ++j) {
    const double u1 = h * static_cast<double>(j + 1);
    if (!covers(g.origin(), u1)) break;
    out.push_back(g.origin()->moments(h * static_cast<double>(j), u1));
  }
  return out;
}

}  // namespace

QuadratureResult integrate(const RealFunction& f, double a, double b, double tol) {
  QuadratureOptions options;
  options.abs_tol = tol;
  return integrate(f, a, b, options);
}

QuadratureResult integrate(const RealFunction& f, double a, double b,
                           const QuadratureOptions& options) {
  if (!(options.abs_tol > 0.0 || options.rel_tol > 0.0)) {
    throw DomainError("quadrature tolerance must be positive");
  }
  if (std::isnan(a) || std::isnan(b) || !std::isfinite(a)) {
    throw DomainError("integration limits must be numbers with a finite lower limit");
  }
  if (std::isinf(b)) {
    if (b < 0) throw DomainError("upper limit -infinity is not supported");
    const double x1 = a + 1e4;
    const double x2 = a + 1e8;
    const double g1 = std::abs(f(x1)) * x1;
    const double g2 = std::abs(f(x2)) * x2;
    if (!std::isfinite(g1) || !std::isfinite(g2) ||
        (g2 > g1 && g2 > options.abs_tol)) {
      throw DomainError("integrand does not appear to decay on the semi-infinite range");
    }
    RealFunction mapped = [&f, a](double s) {
      const double r = 1.0 - s;
      const double x = a + s / r;
      // Deep bisection can land on s == 1 in floating point.
      if (!(r > 0.0) || !std::isfinite(x)) return 0.0;
      return f(x) / (r * r);
    };
    const double limits[2] = {0.0, 1.0};
    return adaptive(mapped, limits, options);
  }
  if (!(a < b)) {
    if (a == b) return {};
    throw DomainError("integration requires a < b");
  }
  const double limits[2] = {a, b};
  return adaptive(f, limits, options);
}

QuadratureResult integrate(const RealFunction& f, std::span<const double> points,
                           const QuadratureOptions& options) {
  for (double p : points) {
    if (!std::isfinite(p)) throw DomainError("breakpoints must be finite");
  }
  return adaptive(f, points, options);
}

QuadratureResult integrate_endpoint_singular(const RealFunction& f, double a, double b,
                                             const QuadratureOptions& options, int power) {
  if (power < 1) throw DomainError("endpoint clustering power must be >= 1");
  if (!(a < b)) {
    if (a == b) return {};
    throw DomainError("integration requires a < b");
  }
  const double width = b - a;
  auto ipow = [power](double v) {
    double r = 1.0;
    for (int i = 0; i < power; ++i) r *= v;
    return r;
  };
  RealFunction mapped = [&, width](double s) {
    const double t = 1.0 - s;
    const double sp = ipow(s);
    const double tp = ipow(t);
    const double den = sp + tp;
    const double jac = static_cast<double>(power) * (sp / s) * (tp / t) / (den * den);
    const double x = s < 0.5 ? a + width * (sp / den) : b - width * (tp / den);
    if (jac == 0.0 || x <= a || x >= b) return 0.0;
    return f(x) * width * jac;
  };
  const double limits[3] = {0.0, 0.5, 1.0};
  return adaptive(mapped, limits, options);
}

// ---------------------------------------------------------------- LocalExpansion

LocalExpansion::LocalExpansion(std::vector<PowerTerm> terms, double radius) : radius_(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw DomainError("local expansion radius must be positive and finite");
  }
  for (const auto& t : terms) {
    if (!(t.exponent > -1.0)) {
      throw DomainError("local expansion exponents must exceed -1");
    }
    if (t.coefficient != 0.0) terms_.push_back(t);
    smooth_ = smooth_ && t.exponent >= 0.0 && t.exponent == std::round(t.exponent);
  }
}

double LocalExpansion::operator()(double u) const {
  double s = 0.0;
  for (const auto& t : terms_) {
    s += t.coefficient * (t.exponent == 0.0 ? 1.0 : std::pow(u, t.exponent));
  }
  return s;
}

CellMoments LocalExpansion::moments(double lo, double hi) const {
  CellMoments m;
  for (const auto& t : terms_) {
    const double p = t.exponent + 1.0;
    const double i0 = power_difference(lo, hi, p) / p;
    const double i1 = power_difference(lo, hi, p + 1.0) / (p + 1.0) - lo * i0;
    m.m0 += t.coefficient * i0;
    m.m1 += t.coefficient * i1;
  }
  return m;
}

LocalExpansion LocalExpansion::scaled(double factor) const {
  std::vector<PowerTerm> terms = terms_;
  for (auto& t : terms) t.coefficient *= factor;
  return LocalExpansion(std::move(terms), radius_);
}

LocalExpansion convolve(const LocalExpansion& f, const LocalExpansion& g) {
  std::vector<PowerTerm> raw;
  raw.reserve(f.terms().size() * g.terms().size());
  for (const auto& a : f.terms()) {
    for (const auto& b : g.terms()) {
      const double x = a.exponent + 1.0;
      const double y = b.exponent + 1.0;
      const double beta = std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
      raw.push_back({a.coefficient * b.coefficient * beta, a.exponent + b.exponent + 1.0});
    }
  }
  std::sort(raw.begin(), raw.end(),
            [](const PowerTerm& p, const PowerTerm& q) { return p.exponent < q.exponent; });
  std::vector<PowerTerm> merged;
  for (const auto& t : raw) {
    if (!merged.empty() && std::abs(merged.back().exponent - t.exponent) <= 1e-12) {
      merged.back().coefficient += t.coefficient;
    } else {
      merged.push_back(t);
    }
  }
  return LocalExpansion(std::move(merged), std::min(f.radius(), g.radius()));
}

// ---------------------------------------------------------------- GridFunction

GridFunction::GridFunction(double start, double step, std::vector<double> values,
                           std::optional<LocalExpansion> origin)
    : start_(start), step_(step), values_(std::move(values)), origin_(std::move(origin)) {
  if (!(step > 0.0) || !std::isfinite(step) || !std::isfinite(start)) {
    throw DomainError("grid step must be positive and finite");
  }
  if (values_.empty()) {
    throw DomainError("grid function needs at least one value");
  }
  if (origin_ && origin_->radius() < step_ * (1.0 - 1e-12) && values_.size() > 1) {
    throw DomainError("origin expansion must cover at least the first grid cell");
  }
}

bool GridFunction::in_origin(double u_hi) const noexcept { return covers(origin_, u_hi); }

double GridFunction::operator()(double x) const {
  const double u = x - start_;
  const double span = step_ * static_cast<double>(cells());
  if (u < 0.0 || u > span * (1.0 + 1e-14) + 1e-300) return 0.0;
  if (origin_ && u <= origin_->radius()) return (*origin_)(u);
  if (cells() == 0) return values_[0];
  const double pos = std::min(u / step_, static_cast<double>(cells()));
  auto i = static_cast<std::size_t>(pos);
  if (i >= cells()) i = cells() - 1;
  const double frac = pos - static_cast<double>(i);
  return values_[i] + frac * (values_[i + 1] - values_[i]);
}

double GridFunction::integral() const {
  const auto cum = cumulative();
  return cum.back();
}

std::vector<double> GridFunction::cumulative() const {
  std::vector<double> out(values_.size(), 0.0);
  double running = 0.0;
  for (std::size_t j = 0; j < cells(); ++j) {
    const double u0 = step_ * static_cast<double>(j);
    const double u1 = u0 + step_;
    if (in_origin(u1)) {
      running += origin_->moments(u0, u1).m0;
    } else {
      running += 0.5 * step_ * (values_[j] + values_[j + 1]);
    }
    out[j + 1] = running;
  }
  return out;
}

GridFunction GridFunction::scaled(double factor) const {
  std::vector<double> v = values_;
  for (auto& x : v) x *= factor;
  std::optional<LocalExpansion> o;
  if (origin_) o = origin_->scaled(factor);
  return GridFunction(start_, step_, std::move(v), std::move(o));
}

GridFunction GridFunction::truncated(std::size_t n) const {
  if (n == 0) throw DomainError("cannot truncate a grid function to zero nodes");
  n = std::min(n, values_.size());
  std::vector<double> v(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(n));
  return GridFunction(start_, step_, std::move(v), origin_);
}

GridFunction GridFunction::clamped_density(double tolerance) const {
  std::vector<double> v = values_;
  for (auto& x : v) {
    if (x < 0.0 && x >= -tolerance) x = 0.0;
  }
  return GridFunction(start_, step_, std::move(v), origin_);
}

// ---------------------------------------------------------------- convolution

GridFunction convolve(const GridFunction& f, const GridFunction& g) {
  const double h = f.step();
  if (std::abs(f.step() - g.step()) > 1e-12 * h) {
    throw DomainError("convolution requires grids with the same step");
  }
  const std::size_t nf = f.size();
  const std::size_t ng = g.size();
  const std::size_t n = nf + ng - 1;
  const auto f_moments = origin_cell_moments(f);
  const auto g_moments = origin_cell_moments(g);
  std::optional<LocalExpansion> origin;
  if (f.origin() && g.origin()) origin = convolve(*f.origin(), *g.origin());

  std::vector<double> out(n, 0.0);
  if (origin) {
    const double v0 = (*origin)(0.0);
    out[0] = std::isnan(v0) ? std::numeric_limits<double>::infinity() : v0;
  }
  for (std::size_t k = 1; k < n; ++k) {
    const double c = h * static_cast<double>(k);
    if (origin && c <= origin->radius()) {
      out[k] = (*origin)(c);
      continue;
    }
    const std::size_t jlo = k >= ng ? k - (ng - 1) : 0;
    const std::size_t jhi = std::min(k, nf - 1);
    if (jhi <= jlo) continue;
    auto a_mom = [&](std::size_t j) { return f_moments[j]; };
    auto b_at = [&](std::size_t j) { return g[k - j]; };
    auto b_mom = [&](std::size_t j, double, double) { return g_moments[k - j - 1]; };
    out[k] = window_product(f, jlo, jhi, a_mom, b_at, g.origin(), b_mom, c);
  }
  return GridFunction(f.start() + g.start(), h, std::move(out), std::move(origin));
}

ConvolutionPower self_convolve(const GridFunction& f, int n) {
  if (n < 1) throw DomainError("convolution power must be at least 1");
  GridFunction current = f;
  double lost = 0.0;
  for (int i = 2; i <= n; ++i) {
    GridFunction full = convolve(current, f);
    GridFunction cut = full.truncated(f.size());
    lost += full.integral() - cut.integral();
    current = std::move(cut);
  }
  return {std::move(current), lost};
}

double reflected_product(const GridFunction& q, const AnalyticFunction& k, double c) {
  const double h = q.step();
  const double rel_c = c - q.start();
  const double span = h * static_cast<double>(q.cells());
  if (rel_c < span * (1.0 - 1e-12)) {
    throw DomainError("reflected product needs c at or beyond the end of the grid");
  }
  if (k.origin && k.origin->radius() < h * (1.0 - 1e-12)) {
    throw DomainError("kernel expansion must cover at least one grid cell");
  }
  if (q.cells() == 0) return 0.0;
  const auto q_moments = origin_cell_moments(q);
  std::vector<double> cache(q.size(), std::numeric_limits<double>::quiet_NaN());
  auto b_at = [&](std::size_t j) {
    double& v = cache[j];
    if (std::isnan(v)) v = k.value(rel_c - h * static_cast<double>(j));
    return v;
  };
  auto a_mom = [&](std::size_t j) { return q_moments[j]; };
  auto b_mom = [&](std::size_t, double w0, double w1) { return k.origin->moments(w0, w1); };
  return window_product(q, 0, q.cells(), a_mom, b_at, k.origin, b_mom, rel_c);
}

}  // namespace fpp::numerics
