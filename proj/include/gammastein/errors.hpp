#pragma once

#include <stdexcept>
#include <string>

namespace gammastein {

/// Invalid target or operator description. `field()` names the offending
/// parameter so the CLI can report it.
class SpecError : public std::invalid_argument {
 public:
  SpecError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// A valid request that this library does not implement for the given
/// parameters (e.g. no exact sampler, no CF ODE for the spec kind).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gammastein
