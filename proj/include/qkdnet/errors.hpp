#pragma once

#include <stdexcept>
#include <string>

namespace qkdnet {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A link distance at which the secret-key rate is zero.
class InfeasibleDistance : public Error {
 public:
  InfeasibleDistance(const std::string& what, double distance_km)
      : Error(what), distance_km_(distance_km) {}
  double distance_km() const noexcept { return distance_km_; }

 private:
  double distance_km_;
};

/// An iterative method did not reach its tolerance. Carries the best estimate
/// obtained before giving up.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, double best_estimate)
      : Error(what), best_estimate_(best_estimate) {}
  double best_estimate() const noexcept { return best_estimate_; }

 private:
  double best_estimate_;
};

/// The operation requires a different rate model variant.
class UnsupportedModel : public Error {
 public:
  using Error::Error;
};

/// Integer result not representable.
class RangeError : public Error {
 public:
  using Error::Error;
};

}  // namespace qkdnet
