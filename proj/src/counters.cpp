#include "hicu/counters.hpp"

namespace hicu {

namespace {
std::atomic<std::uint64_t> forward_count{0};
std::atomic<std::uint64_t> adjoint_count{0};
std::atomic<std::uint64_t> scatter_count{0};
} // namespace

ConvCounts conv_counts() { return {forward_count.load(), adjoint_count.load(), scatter_count.load()}; }

void reset_conv_counts() {
  forward_count = 0;
  adjoint_count = 0;
  scatter_count = 0;
}

namespace detail {
void count_forward(std::uint64_t k) { forward_count += k; }
void count_adjoint(std::uint64_t k) { adjoint_count += k; }
void count_scatter(std::uint64_t k) { scatter_count += k; }
} // namespace detail

} // namespace hicu
