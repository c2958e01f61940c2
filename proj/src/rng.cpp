#include "hicu/rng.hpp"

#include <cmath>
#include <numbers>

namespace hicu {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_key(RngStream const &s) {
  std::uint64_t h = splitmix64(s.seed);
  h = splitmix64(h ^ s.stage);
  h = splitmix64(h ^ s.iteration);
  h = splitmix64(h ^ s.step);
  return splitmix64(h ^ static_cast<std::uint64_t>(s.purpose));
}

} // namespace

Rng::Rng(RngStream const &stream) : engine_{stream_key(stream)} {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  while (u1 <= 0.0)
    u1 = uniform();
  double const u2 = uniform();
  double const rad = std::sqrt(-2.0 * std::log(u1));
  double const ang = 2.0 * std::numbers::pi * u2;
  spare_ = rad * std::sin(ang);
  has_spare_ = true;
  return rad * std::cos(ang);
}

cplx Rng::complex_normal(double variance) {
  double const s = std::sqrt(variance / 2.0);
  double const re = normal();
  double const im = normal();
  return {s * re, s * im};
}

Eigen::MatrixXcd complex_gaussian_matrix(Index rows, Index cols, double variance, RngStream const &stream) {
  Rng rng(stream);
  Eigen::MatrixXcd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i)
      m(i, j) = rng.complex_normal(variance);
  return m;
}

CTensor complex_gaussian_tensor(Dims dims, double variance, RngStream const &stream) {
  Rng rng(stream);
  CTensor t(std::move(dims));
  for (auto &v : t.span())
    v = rng.complex_normal(variance);
  return t;
}

} // namespace hicu
