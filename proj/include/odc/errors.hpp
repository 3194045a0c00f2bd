#pragma once

#include <stdexcept>
#include <string>

namespace odc {

/// Input outside the mathematical domain of an operation (negative latency,
/// fraction above 1, zero raw bytes).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or inconsistent arguments and configuration.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Unknown key in a registry.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Robust geometry estimation could not produce a model.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Contact plan cannot carry the requested payload.
class CapacityError : public std::runtime_error {
 public:
  CapacityError(const std::string& what, double shortfall_bits)
      : std::runtime_error(what), shortfall_bits_(shortfall_bits) {}

  double shortfall_bits() const { return shortfall_bits_; }

 private:
  double shortfall_bits_;
};

/// File system or decoding failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace odc
