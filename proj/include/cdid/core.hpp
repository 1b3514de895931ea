#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdid {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class ErrorKind {
  invalid_input,     // precondition or validation failure
  io,                // file could not be read or written
  empty_window,      // no observation receives positive kernel weight
  empty_set,         // a subsample or averaging set is empty
  degenerate,        // identifying variation absent (q(x) == x, constant data...)
  singular,          // rank-deficient design
  no_crossing,       // population or sample CDFs do not cross
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Union of closed intervals, e.g. a control set "10,12;26.8,50".
using IntervalSet = std::vector<Interval>;

bool contains(const IntervalSet& set, double x);

/// Parses "a,b;c,d" into an interval set. Throws on malformed input or a > b.
IntervalSet parse_interval_set(const std::string& text);

}  // namespace cdid
