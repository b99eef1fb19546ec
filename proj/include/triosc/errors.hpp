#pragma once

#include <stdexcept>
#include <string>

namespace triosc {

// Truncated-basis tail exceeded its bound; `suggested` is a size to retry with.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, int suggested)
      : std::runtime_error(what), suggested_(suggested) {}
  int suggested() const { return suggested_; }

 private:
  int suggested_;
};

// Numerical integration failed to reach its target accuracy.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate)
      : std::runtime_error(what), estimate_(estimate) {}
  double error_estimate() const { return estimate_; }

 private:
  double estimate_;
};

// Engine and truncated-basis reference disagree beyond tolerance.
class OracleMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace triosc
