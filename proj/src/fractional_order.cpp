#include "fpp/fractional_order.hpp"

#include <cmath>
#include <string>

#include "fpp/errors.hpp"

namespace fpp {

FractionalOrder::FractionalOrder(double beta) : beta_(beta) {
  if (!std::isfinite(beta) || beta <= 0.0 || beta > 1.0) {
    throw DomainError("fractional order beta must satisfy 0 < beta <= 1, got " +
                      std::to_string(beta));
  }
}

}  // namespace fpp
