#ifndef SADDLESCOPE_ERRORS_HPP
#define SADDLESCOPE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace saddlescope {

// Malformed inputs or broken preconditions: dof mismatch, non-homogeneous
// generator, contract violations.  CLI maps these to exit code 2.
class StructuralError : public std::runtime_error {
 public:
  explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical validity failures: wrong stability signature, (near-)resonant
// spectra, Newton breakdowns, insufficient quadrature windows.  CLI maps
// these to exit code 3.
class ValidityError : public std::runtime_error {
 public:
  explicit ValidityError(const std::string& what) : std::runtime_error(what) {}
};

class SignatureError : public ValidityError {
 public:
  explicit SignatureError(const std::string& what) : ValidityError(what) {}
};

class SmallDivisorError : public ValidityError {
 public:
  explicit SmallDivisorError(const std::string& what) : ValidityError(what) {}
};

class ConvergenceError : public ValidityError {
 public:
  explicit ConvergenceError(const std::string& what) : ValidityError(what) {}
};

class DomainError : public ValidityError {
 public:
  explicit DomainError(const std::string& what) : ValidityError(what) {}
};

}  // namespace saddlescope

#endif
