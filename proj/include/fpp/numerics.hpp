#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace fpp::numerics {

using RealFunction = std::function<double(double)>;

struct QuadratureResult {
  double value = 0.0;
  double est_abs_error = 0.0;
  int evaluations = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_intervals = 2000;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature with bisection.
///
/// `b` may be +infinity, in which case the range is mapped onto [0, 1) with
/// x = a + s / (1 - s).  The integrand must decay; a crude tail probe rejects
/// integrands whose x*|f(x)| grows between 1e4 and 1e8.
///
/// Throws ConvergenceError (carrying the best estimate and its error bound)
/// when the interval budget is exhausted.
QuadratureResult integrate(const RealFunction& f, double a, double b, double tol);
QuadratureResult integrate(const RealFunction& f, double a, double b,
                           const QuadratureOptions& options);

/// Finite range pre-split at the given sorted points (first and last are the limits).
QuadratureResult integrate(const RealFunction& f, std::span<const double> points,
                           const QuadratureOptions& options);

/// Finite range with nodes clustered at both limits through
/// x = a + (b - a) s^p / (s^p + (1 - s)^p).  An endpoint singularity
/// |x - a|^(g - 1) becomes s^(p g - 1), bounded once p >= 1/g.
QuadratureResult integrate_endpoint_singular(const RealFunction& f, double a, double b,
                                             const QuadratureOptions& options, int power = 4);

struct PowerTerm {
  double coefficient;
  double exponent;  // > -1 so every term is locally integrable
};

/// Zeroth and first moments of a function over a cell [lo, hi]:
/// m0 = int f, m1 = int (u - lo) f.
struct CellMoments {
  double m0 = 0.0;
  double m1 = 0.0;
};

/// A generalized power series f(origin + u) = sum_i c_i u^{e_i}, trusted on
/// 0 <= u <= radius.  Carries the singular behaviour of densities such as the
/// Mittag-Leffler waiting-time pdf at the origin so that grid integrals of the
/// first cells can be done exactly.
class LocalExpansion {
 public:
  LocalExpansion(std::vector<PowerTerm> terms, double radius);

  double operator()(double u) const;
  CellMoments moments(double lo, double hi) const;
  LocalExpansion scaled(double factor) const;

  double radius() const noexcept { return radius_; }
  /// Every exponent is a non-negative integer.
  bool smooth() const noexcept { return smooth_; }
  std::span<const PowerTerm> terms() const noexcept { return terms_; }

 private:
  std::vector<PowerTerm> terms_;
  double radius_;
  bool smooth_ = true;
};

/// Convolution of two expansions; Beta-function product of every term pair.
LocalExpansion convolve(const LocalExpansion& f, const LocalExpansion& g);

/// A real function tabulated on start + i*step, i = 0..size-1.
///
/// When `origin` is present it overrides the node values on the cells it
/// covers; node 0 may then hold +infinity (integrable singularity).
class GridFunction {
 public:
  GridFunction(double start, double step, std::vector<double> values,
               std::optional<LocalExpansion> origin = std::nullopt);

  double start() const noexcept { return start_; }
  double step() const noexcept { return step_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::size_t cells() const noexcept { return values_.size() - 1; }
  double end() const noexcept { return start_ + step_ * static_cast<double>(cells()); }
  double node(std::size_t i) const noexcept { return start_ + step_ * static_cast<double>(i); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  const std::optional<LocalExpansion>& origin() const noexcept { return origin_; }

  /// Linear interpolation, or the origin expansion inside its radius; 0 outside the grid.
  double operator()(double x) const;

  double integral() const;
  /// Running integral at each node, starting from 0.
  std::vector<double> cumulative() const;

  GridFunction scaled(double factor) const;
  GridFunction truncated(std::size_t n) const;
  /// Clamps values in [-tolerance, 0) to zero; anything more negative is left
  /// alone so that callers can detect it.
  GridFunction clamped_density(double tolerance = 1e-12) const;

 private:
  bool in_origin(double u_hi) const noexcept;

  double start_;
  double step_;
  std::vector<double> values_;
  std::optional<LocalExpansion> origin_;
};

/// Linear convolution (f*g)(t) = int f(u) g(t-u) du on the combined support.
/// Both grids must share the step.  Length is f.size() + g.size() - 1.
GridFunction convolve(const GridFunction& f, const GridFunction& g);

struct ConvolutionPower {
  GridFunction density;
  double truncated_mass;  // mass beyond the support of the input, lost over all steps
};

/// n-fold convolution power, truncated to the input support after each step.
ConvolutionPower self_convolve(const GridFunction& f, int n);

/// A function evaluated pointwise, with an optional expansion about 0 used
/// where it is singular.
struct AnalyticFunction {
  RealFunction value;
  std::optional<LocalExpansion> origin;
};

/// int_{q.start}^{q.end} q(v) k(c - v) dv, with c >= q.end.
double reflected_product(const GridFunction& q, const AnalyticFunction& k, double c);

}  // namespace fpp::numerics
