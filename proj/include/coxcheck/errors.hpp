#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace coxcheck {

/// Malformed structure text. `line` is 1-based, 0 when the error is not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A table that does not cover every (V, U) pair with V ⊆ U ≠ ∅.
class IncompleteTableError : public ParseError {
 public:
  IncompleteTableError(std::vector<std::string> missing, std::size_t total_missing)
      : ParseError(0, describe(missing, total_missing)), missing_(std::move(missing)) {}
  const std::vector<std::string>& missing() const { return missing_; }

 private:
  static std::string describe(const std::vector<std::string>& missing, std::size_t total) {
    std::string s = "incomplete table: " + std::to_string(total) + " missing entr" +
                    (total == 1 ? "y" : "ies") + ":";
    for (const auto& m : missing) s += " " + m + ";";
    return s;
  }
  std::vector<std::string> missing_;
};

class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An enumeration would exceed its configured size cap.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace coxcheck
