#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geoclust {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad inputs: malformed files, inconsistent dimensions, invalid parameters.
// The CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Degenerate or singular numerical situations (zero variance, rank
// deficiency, empty search ranges). The CLI maps these to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A local weighted fit without enough effective observations. Carries the
// index of the failing location so callers can attach the region id.
class LocalSingularityError : public NumericalError {
 public:
  LocalSingularityError(std::size_t location, const std::string& what)
      : NumericalError(what), location_(location) {}

  std::size_t location() const { return location_; }

 private:
  std::size_t location_;
};

}  // namespace geoclust
