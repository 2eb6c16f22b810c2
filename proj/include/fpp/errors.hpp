#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fpp {

/// Argument outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure stopped before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_estimate, double error_bound)
      : std::runtime_error(what), best_estimate_(best_estimate), error_bound_(error_bound) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double best_estimate_;
  double error_bound_;
};

/// A tabulated function does not cover the range an operation needs.
class SupportError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Too few simulated paths satisfied a conditioning event.
class InsufficientAcceptance : public std::runtime_error {
 public:
  InsufficientAcceptance(const std::string& what, std::size_t accepted, std::size_t required)
      : std::runtime_error(what), accepted_(accepted), required_(required) {}

  std::size_t accepted() const noexcept { return accepted_; }
  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t accepted_;
  std::size_t required_;
};

}  // namespace fpp
