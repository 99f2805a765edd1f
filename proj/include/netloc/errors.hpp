#ifndef NETLOC_ERRORS_HPP_
#define NETLOC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace netloc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CollocatedAgents : public Error {
 public:
  using Error::Error;
};

/// The two constraint neighbours of a follower coincide, so w_ii would vanish.
class DegenerateTriple : public Error {
 public:
  using Error::Error;
};

class TriangleViolation : public Error {
 public:
  using Error::Error;
};

/// Sign of direction disagrees with the colinearity implied by the distances.
class SignMismatch : public Error {
 public:
  using Error::Error;
};

class MissingTriple : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public Error {
 public:
  SingularSystem(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class SingularCoupling : public SingularSystem {
 public:
  using SingularSystem::SingularSystem;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Raised by integrators when W_ff stops being invertible mid-run.
class LocalizabilityLost : public Error {
 public:
  LocalizabilityLost(const std::string& what, double time, double condition)
      : Error(what), time_(time), condition_(condition) {}
  double time() const noexcept { return time_; }
  double condition() const noexcept { return condition_; }

 private:
  double time_;
  double condition_;
};

/// An error norm grew between two integrator steps; the step size is too large.
class StepRejected : public Error {
 public:
  StepRejected(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string field, int line)
      : Error(what), field_(std::move(field)), line_(line) {}
  const std::string& field() const noexcept { return field_; }
  /// 1-based line, or 0 when unknown.
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace netloc

#endif  // NETLOC_ERRORS_HPP_
