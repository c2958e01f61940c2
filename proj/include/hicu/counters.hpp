#pragma once

#include <atomic>
#include <cstdint>

namespace hicu {

/// Number of single-kernel convolutions performed, by kind. A batched call with k columns counts k.
struct ConvCounts {
  std::uint64_t forward = 0;
  std::uint64_t adjoint = 0;
  std::uint64_t scatter = 0;

  ConvCounts operator-(ConvCounts const &o) const {
    return {forward - o.forward, adjoint - o.adjoint, scatter - o.scatter};
  }
  bool operator==(ConvCounts const &) const = default;
};

/// Process-wide instrumented counters for the convolution primitives.
ConvCounts conv_counts();
void reset_conv_counts();

namespace detail {
void count_forward(std::uint64_t k);
void count_adjoint(std::uint64_t k);
void count_scatter(std::uint64_t k);
} // namespace detail

/// Tracks auxiliary complex values held by an algorithm and their high-water mark.
class AuxMemoryMeter {
public:
  void acquire(std::uint64_t values) {
    current_ += values;
    if (current_ > peak_)
      peak_ = current_;
  }
  void release(std::uint64_t values) { current_ -= values; }
  std::uint64_t current() const { return current_; }
  std::uint64_t peak() const { return peak_; }

private:
  std::uint64_t current_ = 0;
  std::uint64_t peak_ = 0;
};

} // namespace hicu
