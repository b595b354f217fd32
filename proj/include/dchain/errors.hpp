#pragma once

#include <stdexcept>
#include <string>

namespace dchain {

// Bad arguments: outside the documented domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A cardinality / size guard refused the request (enumeration too large,
// permutation sum over budget, ...).  The CLI maps this to exit code 3.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Linear-space arithmetic would overflow; the caller should use a log variant.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

// A series did not converge within the configured number of terms.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double partial_sum, double last_term, long terms)
      : std::runtime_error(what + " (partial sum " + std::to_string(partial_sum) + ", last term " +
                           std::to_string(last_term) + ", " + std::to_string(terms) + " terms)"),
        partial_sum_(partial_sum),
        last_term_(last_term),
        terms_(terms) {}

  double partial_sum() const { return partial_sum_; }
  double last_term() const { return last_term_; }
  long terms() const { return terms_; }

 private:
  double partial_sum_;
  double last_term_;
  long terms_;
};

// Adaptive quadrature could not reach the requested tolerance.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double estimate, double error)
      : std::runtime_error(what + " (best estimate " + std::to_string(estimate) + ", error bound " +
                           std::to_string(error) + ")"),
        estimate_(estimate),
        error_(error) {}

  double estimate() const { return estimate_; }
  double error() const { return error_; }

 private:
  double estimate_;
  double error_;
};

}  // namespace dchain
