#include <numbers>

#include "hicu/metrics.hpp"
#include "hicu/simdata.hpp"
#include "support.hpp"

using namespace hicu;
using hicu::test::Gen;

namespace {

RTensor smooth_image(Gen &g, Index n) {
  RTensor img({n, n});
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y)
      img.at({x, y}) = std::sin(0.3 * x) * std::cos(0.2 * y) + ((x - n / 2) * (x - n / 2) + (y - n / 3) * (y - n / 3) < n * n / 10 ? 1.0 : 0.0);
  for (auto &v : img.span())
    v += 0.01 * g.uniform();
  return img;
}

CTensor phantom_images() {
  PhantomSpec spec;
  spec.nx = 40;
  spec.ny = 40;
  spec.ncoils = 3;
  return gen_phantom(spec).coil_images;
}

} // namespace

TEST_CASE("SER trivial cases") {
  Gen g(51);
  auto X = g.tensor({8, 8, 2});
  CHECK(ser(X, X) == infinite_db);
  CHECK(ser(X, CTensor(X.dims())) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ser(X, cplx{1.1, 0.0} * X) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK_THROWS_AS(ser(CTensor({3}), X), ShapeError);
  CHECK_THROWS_AS(ser(CTensor({2}), CTensor({2}, std::vector<cplx>{1, 1})), DegenerateInputError);
}

TEST_CASE("SER is invariant to a joint unitary transform") {
  Gen g(52);
  auto X = g.tensor({12, 10, 3});
  auto Y = X;
  for (auto &v : Y.span())
    v += 0.1 * g.cnormal();
  CHECK(std::abs(ser(X, Y) - ser(ifft_image(X, {0, 1}), ifft_image(Y, {0, 1}))) <= 1e-10);
}

TEST_CASE("LoG kernel has zero sum") {
  auto k = log_kernel();
  CHECK(k.dims() == Dims{15, 15});
  double sum = 0.0;
  for (auto v : k.span())
    sum += v;
  CHECK(std::abs(sum) <= 1e-14);
  CHECK(k.at({7, 7}) < 0.0);
}

TEST_CASE("HFEN trivial cases") {
  Gen g(53);
  auto ref = smooth_image(g, 32);
  CHECK(hfen(ref, ref) == infinite_db);
  auto shifted = ref;
  for (auto &v : shifted.span())
    v += 3.0;
  CHECK(hfen(ref, shifted) == infinite_db);
  auto scaled = ref;
  for (auto &v : scaled.span())
    v *= 1.1;
  CHECK(hfen(ref, scaled) == doctest::Approx(20.0).epsilon(1e-9));
  CHECK_THROWS_AS(hfen(RTensor({4, 4, 2}), RTensor({4, 4, 2})), ShapeError);
  CHECK_THROWS_AS(hfen(RTensor({4, 4}), RTensor({4, 5})), ShapeError);

  RTensor stack({32, 32, 2});
  for (Index i = 0; i < 32 * 32; ++i) {
    stack[2 * i] = ref[i];
    stack[2 * i + 1] = ref[i];
  }
  auto stack_scaled = stack;
  for (auto &v : stack_scaled.span())
    v *= 1.1;
  CHECK(hfen_slices(stack, stack_scaled) == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("SSIM trivial cases") {
  auto ref = phantom_images();
  CHECK(ssim_coil_avg(ref, ref) == doctest::Approx(1.0).epsilon(1e-12));
  Gen g(54);
  auto noise = g.tensor(ref.dims());
  double const s = ssim_coil_avg(ref, noise);
  CHECK(s < 0.5);
  auto rot = ref;
  auto est = ref;
  for (auto &v : est.span())
    v += 0.05 * g.cnormal();
  rot = est;
  Index const nc = ref.dims().back();
  for (Index c = 0; c < nc; ++c) {
    cplx const ph = std::polar(1.0, 0.7 + c);
    for (Index i = c; i < rot.size(); i += nc)
      rot[i] *= ph;
  }
  CHECK(std::abs(ssim_coil_avg(ref, est) - ssim_coil_avg(ref, rot)) <= 1e-12);
  CHECK(ssim_coil_avg(ref, est) < 1.0);
  CHECK_THROWS_AS(ssim_coil_avg(ref, CTensor({4, 4, 3})), ShapeError);
}

TEST_CASE("HFEN is invariant to per-coil phase on SSoS images") {
  auto ref = phantom_images();
  Gen g(55);
  auto est = ref;
  for (auto &v : est.span())
    v += 0.05 * g.cnormal();
  auto rot = est;
  Index const nc = ref.dims().back();
  for (Index c = 0; c < nc; ++c)
    for (Index i = c; i < rot.size(); i += nc)
      rot[i] *= std::polar(1.0, 1.3 * c);
  double const a = hfen(ssos_combine(ref), ssos_combine(est));
  double const b = hfen(ssos_combine(ref), ssos_combine(rot));
  CHECK(std::abs(a - b) <= 1e-10);
}
