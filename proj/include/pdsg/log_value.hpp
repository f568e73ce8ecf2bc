#pragma once

#include <cmath>
#include <limits>

namespace pdsg {

/// Signed quantity stored as (sign, log|value|). Used for divergence masses
/// that can exceed the double range during early blow-up phases.
class LogValue {
 public:
  LogValue() = default;

  static LogValue from_log(double log_abs, int sign = 1) {
    LogValue v;
    v.sign_ = (sign == 0 || log_abs == -std::numeric_limits<double>::infinity()) ? 0 : (sign > 0 ? 1 : -1);
    v.log_abs_ = v.sign_ == 0 ? -std::numeric_limits<double>::infinity() : log_abs;
    return v;
  }

  static LogValue from_double(double x) {
    if (x == 0.0) return {};
    return from_log(std::log(std::abs(x)), x > 0 ? 1 : -1);
  }

  int sign() const { return sign_; }
  bool is_zero() const { return sign_ == 0; }
  double log_abs() const { return log_abs_; }
  double log10_abs() const { return log_abs_ / std::log(10.0); }

  /// Value as a double; saturates to +-inf when out of range.
  double value() const { return sign_ == 0 ? 0.0 : sign_ * std::exp(log_abs_); }

  LogValue& operator+=(const LogValue& o) {
    if (o.sign_ == 0) return *this;
    if (sign_ == 0) return *this = o;
    const double hi = std::max(log_abs_, o.log_abs_);
    const double lo = std::min(log_abs_, o.log_abs_);
    const int hi_sign = log_abs_ >= o.log_abs_ ? sign_ : o.sign_;
    if (sign_ == o.sign_) {
      log_abs_ = hi + std::log1p(std::exp(lo - hi));
      return *this;
    }
    const double diff = -std::expm1(lo - hi);  // 1 - exp(lo - hi)
    if (diff <= 0.0) return *this = LogValue{};
    log_abs_ = hi + std::log(diff);
    sign_ = hi_sign;
    return *this;
  }

  friend LogValue operator+(LogValue a, const LogValue& b) { return a += b; }

  LogValue operator*(const LogValue& o) const {
    if (sign_ == 0 || o.sign_ == 0) return {};
    return from_log(log_abs_ + o.log_abs_, sign_ * o.sign_);
  }

 private:
  int sign_ = 0;
  double log_abs_ = -std::numeric_limits<double>::infinity();
};

}  // namespace pdsg
