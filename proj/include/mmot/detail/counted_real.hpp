// A double that tallies every multiply and add it takes part in. Used to
// instantiate the FTVP sweeps for operation counting.

#ifndef MMOT_DETAIL_COUNTED_REAL_HPP_
#define MMOT_DETAIL_COUNTED_REAL_HPP_

#include <cstdint>

namespace mmot::detail {

struct OpCounter {
  std::uint64_t mul = 0;
  std::uint64_t add = 0;
  std::uint64_t total() const { return mul + add; }
};

inline thread_local OpCounter op_counter;

struct CountedReal {
  double v = 0.0;

  CountedReal() = default;
  explicit CountedReal(double x) : v(x) {}

  friend CountedReal operator*(CountedReal a, CountedReal b) {
    ++op_counter.mul;
    return CountedReal(a.v * b.v);
  }
  friend CountedReal operator+(CountedReal a, CountedReal b) {
    ++op_counter.add;
    return CountedReal(a.v + b.v);
  }
  friend CountedReal operator-(CountedReal a, CountedReal b) {
    ++op_counter.add;
    return CountedReal(a.v - b.v);
  }
};

}  // namespace mmot::detail

#endif  // MMOT_DETAIL_COUNTED_REAL_HPP_
