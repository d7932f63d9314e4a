#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "proxflow/kernels.hpp"
#include "proxflow/rng.hpp"
#include "proxflow/threads.hpp"

using namespace proxflow;

namespace {
std::vector<double> randn(std::size_t n, std::uint64_t stream) {
  Philox rng(0x7357, stream);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}
}  // namespace

TEST_CASE("parallel kernels agree bitwise with the serial reference") {
  set_max_threads(3);
  const std::size_t rows = 37, cols = 53;
  const auto m = randn(rows * cols, 1);
  const auto x = randn(cols, 2);
  std::vector<double> ys(rows), yp(rows);
  kernels::serial::matvec(rows, cols, m.data(), x.data(), ys.data());
  kernels::par::matvec(rows, cols, m.data(), x.data(), yp.data());
  for (std::size_t i = 0; i < rows; ++i) CHECK(ys[i] == yp[i]);

  GridShape shape({5, 7});
  const auto img = randn(shape.size(), 3);
  std::vector<double> gs(shape.size() * 2), gp(shape.size() * 2);
  kernels::serial::grad_apply(shape, img.data(), gs.data());
  kernels::par::grad_apply(shape, img.data(), gp.data());
  for (std::size_t i = 0; i < gs.size(); ++i) CHECK(gs[i] == gp[i]);

  std::vector<double> bs(shape.size()), bp(shape.size());
  kernels::serial::grad_adjoint(shape, gs.data(), bs.data());
  kernels::par::grad_adjoint(shape, gs.data(), bp.data());
  for (std::size_t i = 0; i < bs.size(); ++i) CHECK(bs[i] == bp[i]);

  const auto v = randn(101, 4);
  std::vector<double> ss(101), sp(101);
  kernels::serial::soft_threshold(101, v.data(), 0.7, ss.data());
  kernels::par::soft_threshold(101, v.data(), 0.7, sp.data());
  for (std::size_t i = 0; i < ss.size(); ++i) CHECK(ss[i] == sp[i]);

  const auto vg = randn(100, 5);
  std::vector<double> gss(100), gsp(100);
  kernels::serial::group_soft_threshold(50, 2, vg.data(), 0.9, gss.data());
  kernels::par::group_soft_threshold(50, 2, vg.data(), 0.9, gsp.data());
  for (std::size_t i = 0; i < gss.size(); ++i) CHECK(gss[i] == gsp[i]);
  set_max_threads(1);
}

TEST_CASE("matvec matches a naive triple loop") {
  const std::size_t rows = 9, cols = 14;
  const auto m = randn(rows * cols, 6);
  const auto x = randn(cols, 7);
  std::vector<double> y(rows);
  kernels::matvec(rows, cols, m.data(), x.data(), y.data());
  for (std::size_t i = 0; i < rows; ++i) {
    double acc = 0;
    for (std::size_t j = 0; j < cols; ++j) acc += m[i * cols + j] * x[j];
    CHECK(y[i] == doctest::Approx(acc).epsilon(1e-14));
  }
}

TEST_CASE("dot handles remainder lanes") {
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u}) {
    const auto a = randn(n, 8);
    const auto b = randn(n, 9);
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    CHECK(kernels::dot(n, a.data(), b.data()) == doctest::Approx(acc).epsilon(1e-13));
  }
}
