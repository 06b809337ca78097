#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace probinc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the KB text parser. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " +
              message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// A size limit (worlds, subsets, lattice points) would be exceeded.
class CapExceededError : public Error {
 public:
  CapExceededError(const std::string& what, double requested, double cap)
      : Error(what + " count " + format(requested) + " exceeds cap " +
              format(cap)),
        requested_(requested),
        cap_(cap) {}

  double requested() const { return requested_; }
  double cap() const { return cap_; }

 private:
  static std::string format(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }

  double requested_;
  double cap_;
};

// A constraint has no model with positive antecedent probability.
class SelfConsistencyError : public Error {
 public:
  SelfConsistencyError(const std::string& message, std::size_t index)
      : Error(message), index_(index) {}

  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

}  // namespace probinc
