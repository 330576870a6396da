#pragma once

#include <stdexcept>
#include <string>

namespace delyap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched matrix shapes or inconsistent system dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the admissible domain (τ beyond [-h, h], NaN entries, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A matrix exponential or simulation left the representable range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public Error {
 public:
  SingularSystem(const std::string& what, double rcond)
      : Error(what), rcond_(rcond) {}
  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

/// The boundary matrix F1 + F2·e^{Eh} is numerically singular, so the
/// coupled boundary problem has no unique solution.
class SpectrumConditionViolated : public Error {
 public:
  SpectrumConditionViolated(const std::string& what, double sigma_min,
                            double sigma_min_relative)
      : Error(what),
        sigma_min_(sigma_min),
        sigma_min_relative_(sigma_min_relative) {}
  double sigma_min() const noexcept { return sigma_min_; }
  double sigma_min_relative() const noexcept { return sigma_min_relative_; }

 private:
  double sigma_min_;
  double sigma_min_relative_;
};

class SimulationBlowUp : public Error {
 public:
  SimulationBlowUp(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Malformed run configuration. `location()` names the offending key path.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& location, const std::string& what)
      : Error(location + ": " + what), location_(location) {}
  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

}  // namespace delyap
