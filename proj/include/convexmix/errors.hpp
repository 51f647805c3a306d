#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace convexmix {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Non-finite or degenerate intermediate value. Carries the 1-based step
/// index when the failure happened inside a sequential run.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, std::optional<std::size_t> step = std::nullopt)
      : std::runtime_error(step ? what + " (step " + std::to_string(*step) + ")" : what), step_(step) {}

  std::optional<std::size_t> step() const noexcept { return step_; }

 private:
  std::optional<std::size_t> step_;
};

/// Malformed input file. `row` is 1-based and counts the header as row 1.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, const std::string& path)
      : std::runtime_error(what + ": " + path), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace convexmix
