#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace combprec {

/// Raised when vector lengths disagree with the graph they are applied to.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method stopped without meeting its tolerance.
/// The best estimate reached so far travels with the exception.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_estimate, double residual)
      : std::runtime_error(what), best_estimate_(best_estimate), residual_(residual) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double residual() const noexcept { return residual_; }

 private:
  double best_estimate_;
  double residual_;
};

/// Input text could not be parsed. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A size guard refused an input that would take too long or too much memory.
class SizeLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// PDHG iterates became non-finite.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace combprec
