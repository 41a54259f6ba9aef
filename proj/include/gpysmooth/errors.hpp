#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace gpysmooth {

/// Bad parameters: violated preconditions, unknown names, malformed input.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the representable or covered range.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// A numerical tolerance could not be met. Carries the best estimate reached.
class ToleranceError : public std::runtime_error {
 public:
  ToleranceError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved " + format_achieved(achieved) + ")"),
        achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

 private:
  static std::string format_achieved(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
  }

  double achieved_;
};

}  // namespace gpysmooth
