#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "proxflow/errors.hpp"
#include "proxflow/operators.hpp"
#include "proxflow/rng.hpp"

using namespace proxflow;

namespace {
std::vector<double> randn(std::size_t n, std::uint64_t stream) {
  Philox rng(0x0b5, stream);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

const std::vector<GridShape> kShapes = {GridShape({8}), GridShape({3}), GridShape({4, 4}),
                                        GridShape({2, 3}), GridShape({2, 2}), GridShape({2, 2, 2}),
                                        GridShape({3, 4, 2})};
}  // namespace

TEST_CASE("grid shape validation") {
  CHECK_THROWS_AS(GridShape({}), DimensionError);
  CHECK_THROWS_AS(GridShape({4, 4, 4, 4}), DimensionError);
  CHECK_THROWS_AS(GridShape({1, 4}), DimensionError);
  CHECK(GridShape({2, 3}).size() == 6);
}

TEST_CASE("gradient of a constant image is exactly zero") {
  for (const auto& shape : kShapes) {
    GradientOperator k(shape);
    std::vector<double> x(shape.size(), 3.25), g(k.rows());
    k.apply(x, g);
    for (double v : g) CHECK(v == 0.0);
  }
}

TEST_CASE("1d gradient by hand") {
  GradientOperator k(GridShape({3}));
  const std::vector<double> x = {1, 2, 4};
  const auto g = k.apply(x);
  CHECK(g[0] == 1.0);   // x2 - x1
  CHECK(g[1] == 2.0);   // x3 - x2
  CHECK(g[2] == -3.0);  // x1 - x3 (periodic)
}

TEST_CASE("2d gradient groups, fastest axis first") {
  // image ((a,b),(c,d)) row-major
  const double a = 1.5, b = -2.0, c = 0.25, d = 7.0;
  GradientOperator k(GridShape({2, 2}));
  const auto g = k.apply(std::vector<double>{a, b, c, d});
  // site (0,0)
  CHECK(g[0] == b - a);
  CHECK(g[1] == c - a);
  // site (0,1)
  CHECK(g[2] == a - b);
  CHECK(g[3] == d - b);
  // site (1,0)
  CHECK(g[4] == d - c);
  CHECK(g[5] == a - c);
  // site (1,1)
  CHECK(g[6] == c - d);
  CHECK(g[7] == b - d);
}

TEST_CASE("adjoint on zero input and shape checks") {
  GradientOperator k(GridShape({4, 4}));
  std::vector<double> zero(k.rows(), 0.0);
  for (double v : k.apply_adjoint(zero)) CHECK(v == 0.0);
  std::vector<double> bad(5), out(k.cols());
  CHECK_THROWS_AS(k.apply_adjoint(bad, out), DimensionError);
  CHECK_THROWS_AS(k.apply(bad, out), DimensionError);
}

TEST_CASE("1d laplacian against the dense circulant") {
  // grad^T grad on dims=(3) is the circulant [[2,-1,-1],[-1,2,-1],[-1,-1,2]];
  // applied to (1,2,4) it gives (-4,-1,5).
  GradientOperator k(GridShape({3}));
  const std::vector<double> x = {1, 2, 4};
  const auto lap = k.apply_adjoint(k.apply(x));
  const auto kd = oracles::materialize(k);
  const Eigen::Vector3d expect = kd.transpose() * kd * oracles::to_eigen(x);
  CHECK(expect[0] == doctest::Approx(-4.0).epsilon(1e-15));
  CHECK(expect[1] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(expect[2] == doctest::Approx(5.0).epsilon(1e-15));
  for (int i = 0; i < 3; ++i) CHECK(lap[i] == doctest::Approx(expect[i]).epsilon(1e-14));
}

TEST_CASE("adjoint identity <Kx,g> = <x,K^T g>") {
  std::uint64_t stream = 100;
  for (const auto& shape : kShapes) {
    GradientOperator k(shape);
    for (int rep = 0; rep < 100; ++rep) {
      const auto x = randn(k.cols(), ++stream);
      const auto g = randn(k.rows(), ++stream);
      const auto kx = k.apply(x);
      const auto ktg = k.apply_adjoint(g);
      double lhs = 0, rhs = 0;
      for (std::size_t i = 0; i < kx.size(); ++i) lhs += kx[i] * g[i];
      for (std::size_t i = 0; i < x.size(); ++i) rhs += x[i] * ktg[i];
      CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, std::fabs(lhs)));
    }
  }
}

TEST_CASE("dense equivalence of apply and adjoint") {
  for (const auto& shape : kShapes) {
    if (shape.size() > 64) continue;
    GradientOperator k(shape);
    const auto kd = oracles::materialize(k);
    const auto x = randn(k.cols(), 900 + shape.size());
    const auto g = randn(k.rows(), 901 + shape.size());
    const auto kx = k.apply(x);
    const Eigen::VectorXd kx_d = kd * oracles::to_eigen(x);
    for (std::size_t i = 0; i < kx.size(); ++i) CHECK(std::fabs(kx[i] - kx_d[i]) <= 1e-14);
    const auto ktg = k.apply_adjoint(g);
    const Eigen::VectorXd ktg_d = kd.transpose() * oracles::to_eigen(g);
    for (std::size_t i = 0; i < ktg.size(); ++i) CHECK(std::fabs(ktg[i] - ktg_d[i]) <= 1e-14);
  }
}

TEST_CASE("laplacian spectrum matches the dense eigenvalues as a multiset") {
  for (const auto& shape : kShapes) {
    if (shape.size() > 64) continue;
    GradientOperator k(shape);
    const auto kd = oracles::materialize(k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kd.transpose() * kd);
    auto spec = laplacian_spectrum(shape);
    std::sort(spec.begin(), spec.end());
    for (std::size_t i = 0; i < spec.size(); ++i)
      CHECK(std::fabs(spec[i] - es.eigenvalues()[static_cast<Eigen::Index>(i)]) <= 1e-10);
  }
}

TEST_CASE("laplacian spectrum closed forms") {
  // 2x2: eigenvalues {0, 4, 4, 8}
  auto s = laplacian_spectrum(GridShape({2, 2}));
  std::sort(s.begin(), s.end());
  CHECK(s[0] == doctest::Approx(0.0));
  CHECK(s[1] == doctest::Approx(4.0));
  CHECK(s[2] == doctest::Approx(4.0));
  CHECK(s[3] == doctest::Approx(8.0));

  // 1d ring: 2 - 2 cos(2 pi k / L), in DFT order
  const int L = 7;
  const auto s1 = laplacian_spectrum(GridShape({L}));
  for (int k = 0; k < L; ++k)
    CHECK(s1[k] == doctest::Approx(2 - 2 * std::cos(2 * M_PI * k / L)).epsilon(1e-14));

  for (const auto& shape : kShapes) {
    const auto sp = laplacian_spectrum(shape);
    int zeros = 0;
    for (double v : sp) {
      CHECK(v >= 0.0);
      CHECK(v <= 4.0 * shape.ndim() + 1e-12);
      if (v == 0.0) ++zeros;
    }
    CHECK(zeros == 1);
    CHECK(*std::min_element(sp.begin(), sp.end()) == 0.0);
  }
}

TEST_CASE("dense map validates entries and shapes") {
  CHECK_THROWS_AS(DenseMap(2, 2, {1, 2, 3}), DimensionError);
  CHECK_THROWS_AS(DenseMap(1, 2, {1.0, std::nan("")}), ParameterError);
  DenseMap a(2, 3, {1, 2, 3, 4, 5, 6});
  const auto y = a.apply(std::vector<double>{1, 0, -1});
  CHECK(y[0] == doctest::Approx(-2.0));
  CHECK(y[1] == doctest::Approx(-2.0));
  const auto at = a.apply_adjoint(std::vector<double>{1, 1});
  CHECK(at[0] == doctest::Approx(5.0));
  CHECK(at[1] == doctest::Approx(7.0));
  CHECK(at[2] == doctest::Approx(9.0));
}
