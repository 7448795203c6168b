#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace coron {

// Point outside the admissible region of a domain (ball, annulus, box).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UnsupportedDimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SingularBlockError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The amplitude system has a real solution but some component is not positive.
class NoPositiveSolutionError : public std::runtime_error {
 public:
  NoPositiveSolutionError(const std::string& what, std::vector<double> powers)
      : std::runtime_error(what), powers_(std::move(powers)) {}
  const std::vector<double>& powers() const noexcept { return powers_; }

 private:
  std::vector<double> powers_;
};

// Parameters violate a lemma hypothesis or an operation precondition.
class HypothesisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace coron
