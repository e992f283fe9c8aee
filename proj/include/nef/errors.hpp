#pragma once

#include <stdexcept>
#include <string>

namespace nef {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// The requested operation is not available for this mixing family
// (GHS supports cumulants only).
class UnsupportedFamily : public std::invalid_argument {
 public:
  explicit UnsupportedFamily(const std::string& what)
      : std::invalid_argument(what) {}
};

// Method-of-moments system has no admissible (phi > 0, sigma2 > 0) root.
class InadmissibleEstimate : public std::runtime_error {
 public:
  explicit InadmissibleEstimate(const std::string& what)
      : std::runtime_error(what) {}
};

// The phi update received an argument outside the range of d'(phi).
class MStepDomainError : public std::runtime_error {
 public:
  explicit MStepDomainError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace nef
