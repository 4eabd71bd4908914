#pragma once

#include <cmath>

namespace ergolab {

/// Neumaier-compensated accumulator. Results depend only on the order of
/// the terms, never on how the caller partitions work.
class compensated_sum {
public:
  compensated_sum() = default;
  explicit compensated_sum(double init) : sum_(init) {}

  compensated_sum &operator+=(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
    return *this;
  }

  compensated_sum &operator-=(double x) { return *this += -x; }

  double value() const { return sum_ + comp_; }
  explicit operator double() const { return value(); }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

} // namespace ergolab
