#pragma once

namespace fpp {

/// The exponent beta in (0, 1] of the Mittag-Leffler waiting-time law.
/// beta == 1 is the ordinary Poisson process.
class FractionalOrder {
 public:
  explicit FractionalOrder(double beta);

  double value() const noexcept { return beta_; }
  bool is_exponential() const noexcept { return beta_ == 1.0; }

  friend bool operator==(FractionalOrder, FractionalOrder) = default;

 private:
  double beta_;
};

}  // namespace fpp
