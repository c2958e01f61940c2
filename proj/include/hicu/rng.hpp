#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "hicu/tensor.hpp"

namespace hicu {

/// Purpose tags keep draws for different uses of the same (stage, iteration) independent.
enum class StreamPurpose : std::uint64_t { Sketch = 1, Compress = 2, Phantom = 3, Mask = 4, Noise = 5, Test = 6 };

/// Seeded random stream identified by (seed, stage, iteration, step, purpose).
/// Identical identifiers reproduce identical draws bit-exactly on every platform: the engine is
/// mt19937_64 and normals come from an explicit Box-Muller transform rather than
/// std::normal_distribution, whose output is implementation-defined.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stage = 0;
  std::uint64_t iteration = 0;
  std::uint64_t step = 0;
  StreamPurpose purpose = StreamPurpose::Test;
};

class Rng {
public:
  explicit Rng(RngStream const &stream);

  /// Uniform on [0, 1).
  double uniform();
  /// Standard normal.
  double normal();
  /// Complex normal with E|z|^2 = variance (real and imaginary parts each variance/2).
  cplx complex_normal(double variance = 1.0);
  std::uint64_t next_u64() { return engine_(); }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

Eigen::MatrixXcd complex_gaussian_matrix(Index rows, Index cols, double variance, RngStream const &stream);
CTensor complex_gaussian_tensor(Dims dims, double variance, RngStream const &stream);

} // namespace hicu
