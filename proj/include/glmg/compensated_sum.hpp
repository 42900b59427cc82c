#pragma once

#include <cmath>

namespace glmg {

/// Neumaier variant of Kahan summation. Keeps the running error term so long
/// reductions (up to ~1e8 addends) lose no more than a few ulp overall.
template <typename Value>
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(Value init) : sum_(init) {}

  CompensatedSum& operator+=(Value value) {
    const Value t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  CompensatedSum& operator+=(const CompensatedSum& other) {
    *this += other.sum_;
    *this += other.compensation_;
    return *this;
  }

  Value value() const { return sum_ + compensation_; }

 private:
  Value sum_{0};
  Value compensation_{0};
};

}  // namespace glmg
