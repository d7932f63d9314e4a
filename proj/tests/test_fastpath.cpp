#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "proxflow/datagen.hpp"
#include "proxflow/errors.hpp"
#include "proxflow/fastpath.hpp"
#include "proxflow/fft.hpp"
#include "proxflow/rng.hpp"

#include <thread>

using namespace proxflow;
using oracles::MatrixXd;
using oracles::VectorXd;

namespace {

std::vector<double> randn(std::size_t n, std::uint64_t stream) {
  Philox rng(0xfa57, stream);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

std::shared_ptr<DenseMap> random_map(std::size_t n, std::size_t p, std::uint64_t stream) {
  return std::make_shared<DenseMap>(n, p, randn(n * p, stream));
}

double rel_err(const std::vector<double>& got, const VectorXd& want) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    num += (got[i] - want[i]) * (got[i] - want[i]);
    den += want[i] * want[i];
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

}  // namespace

TEST_CASE("fft round trip is exact to 1e-12") {
  for (const auto& shape : {GridShape({8}), GridShape({4, 6}), GridShape({3, 4, 5})}) {
    FftPlan plan(shape);
    const auto x = randn(shape.size(), 11 + shape.size());
    std::vector<std::complex<double>> spec(plan.spectrum_size());
    std::vector<double> back(shape.size());
    plan.forward(x.data(), spec.data());
    plan.inverse(spec.data(), back.data());
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::fabs(back[i] - x[i]) <= 1e-12);
  }
}

TEST_CASE("precompute reconstructs A A^T and is deterministic") {
  auto a = random_map(20, 50, 1);
  auto pre = precompute(a, SeparableL1{});
  CHECK_FALSE(pre.tv_mode);
  CHECK(pre.build_seconds >= 0.0);
  const auto ad = oracles::dense_from(*a);
  const MatrixXd aat = ad * ad.transpose();
  // U diag(d) U^T == A A^T
  MatrixXd u(20, 20);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) u(i, j) = pre.eigvecs[i * 20 + j];
  Eigen::VectorXd d = oracles::to_eigen(pre.eigvals);
  CHECK((u * d.asDiagonal() * u.transpose() - aat).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((u.transpose() * u - MatrixXd::Identity(20, 20)).cwiseAbs().maxCoeff() <= 1e-10);
  for (double v : pre.eigvals) CHECK(v >= 0.0);

  auto pre2 = precompute(a, SeparableL1{});
  for (std::size_t i = 0; i < pre.eigvals.size(); ++i) CHECK(pre.eigvals[i] == pre2.eigvals[i]);
}

TEST_CASE("identity matrix gives unit spectrum") {
  std::vector<double> eye(16, 0.0);
  for (int i = 0; i < 4; ++i) eye[i * 4 + i] = 1.0;
  auto pre = precompute(std::make_shared<DenseMap>(4, 4, eye), SeparableL1{});
  for (double d : pre.eigvals) CHECK(d == doctest::Approx(1.0).epsilon(1e-12));
  // u=0, A=I, rho=1 -> y/2
  const auto y = randn(4, 2);
  const auto x = ridge_solve_woodbury(pre, y, std::vector<double>(4, 0.0), 1.0);
  for (int i = 0; i < 4; ++i) CHECK(x[i] == doctest::Approx(y[i] / 2).epsilon(1e-12));
  // A=I, rho=1: sigma_x = 1/2
  CHECK(sigma_x_spectral(pre, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("woodbury ridge solve matches the dense oracle") {
  for (auto [n, p] : {std::pair<std::size_t, std::size_t>{15, 40}, {10, 25}, {25, 10}, {20, 500}}) {
    auto a = random_map(n, p, 100 + n);
    auto pre = precompute(a, SeparableL1{});
    const auto ad = oracles::dense_from(*a);
    for (double rho : {0.01, 1.0, 100.0}) {
      const auto y = randn(n, 200 + n);
      const auto u = randn(p, 300 + n);
      const auto x = ridge_solve_woodbury(pre, y, u, rho);
      const VectorXd want = oracles::dense_ridge_solve(
          ad, MatrixXd::Identity(p, p), rho, ad.transpose() * oracles::to_eigen(y) + oracles::to_eigen(u));
      CHECK(rel_err(x, want) <= 1e-9);
    }
  }
  auto pre = precompute(random_map(5, 8, 7), SeparableL1{});
  CHECK_THROWS_AS(ridge_solve_woodbury(pre, randn(5, 1), randn(8, 2), 0.0), ParameterError);
}

TEST_CASE("ridge solve large-rho asymptotics") {
  auto a = random_map(6, 12, 17);
  auto pre = precompute(a, SeparableL1{});
  const auto y = randn(6, 18);
  const auto u = randn(12, 19);
  const auto x = ridge_solve_woodbury(pre, y, u, 1e12);
  for (std::size_t j = 0; j < 12; ++j) CHECK(std::fabs(x[j]) <= 1e-9);
}

TEST_CASE("spectral sigma_x against dense traces (n vs p convention)") {
  for (auto [n, p] : {std::pair<std::size_t, std::size_t>{10, 25}, {15, 40}, {25, 10}}) {
    auto a = random_map(n, p, 500 + n);
    auto pre = precompute(a, SeparableL1{});
    const auto ad = oracles::dense_from(*a);
    for (double rho : {0.01, 1.0, 100.0}) {
      // n-term sum == (1/n) Tr (A A^T + rho I_n)^{-1}
      const MatrixXd mn = (ad * ad.transpose() + rho * MatrixXd::Identity(n, n)).inverse();
      CHECK(sigma_x_spectral(pre, rho) == doctest::Approx(mn.trace() / n).epsilon(1e-10));
      // the full p-dimensional trace carries the extra (p-n)/rho zero modes
      const MatrixXd mp = (ad.transpose() * ad + rho * MatrixXd::Identity(p, p)).inverse();
      CHECK(sigma_x_trace_full(pre, rho) == doctest::Approx(mp.trace() / n).epsilon(1e-10));
      CHECK(sigma_x_trace_full(pre, rho) ==
            doctest::Approx(sigma_x_spectral(pre, rho) + (double(p) - double(n)) / (n * rho)).epsilon(1e-12));
    }
  }
  // rho -> infinity decay
  auto pre = precompute(random_map(8, 20, 900), SeparableL1{});
  CHECK(sigma_x_spectral(pre, 1e9) <= 2e-9);
}

TEST_CASE("tv solve matches the dense oracle (DC mode included)") {
  const GridShape grid({4, 4});
  GradientOperator k(grid);
  const MatrixXd kd = oracles::materialize(k);
  const MatrixXd lap = kd.transpose() * kd;
  for (std::uint64_t inst = 0; inst < 3; ++inst) {
    auto a = random_map(8, 16, 600 + inst);
    auto pre = precompute(a, TvPenalty{grid});
    const auto ad = oracles::dense_from(*a);
    for (double rho : {0.01, 0.7, 1.0, 100.0}) {
      const auto y = randn(8, 700 + inst);
      const auto u = randn(32, 800 + inst);
      const auto x = tv_solve_fft(pre, y, u, rho);
      const VectorXd rhs = ad.transpose() * oracles::to_eigen(y) + kd.transpose() * oracles::to_eigen(u);
      const VectorXd want = oracles::dense_ridge_solve(ad, lap, rho, rhs);
      CHECK(rel_err(x, want) <= 1e-8);
    }
  }
}

TEST_CASE("tv solve: zero inputs and constant shifts") {
  const GridShape grid({4, 4});
  auto a = random_map(8, 16, 611);
  auto pre = precompute(a, TvPenalty{grid});
  const auto x0 = tv_solve_fft(pre, std::vector<double>(8, 0.0), std::vector<double>(32, 0.0), 0.7);
  for (double v : x0) CHECK(std::fabs(v) <= 1e-14);

  // shifting the truth by c*1 moves only the DC mode; both right-hand sides
  // must come back exactly through the fast path
  GradientOperator k(grid);
  const MatrixXd kd = oracles::materialize(k);
  const MatrixXd lap = kd.transpose() * kd;
  const auto ad = oracles::dense_from(*a);
  const double rho = 0.7, c = 3.7;
  const auto xt = randn(16, 612);
  VectorXd xt_e = oracles::to_eigen(xt);
  const MatrixXd m = ad.transpose() * ad + rho * lap;
  const VectorXd b1 = m * xt_e;
  const VectorXd b2 = m * (xt_e + c * VectorXd::Ones(16));
  const auto s1 = tv_solve_rhs(pre, oracles::from_eigen(b1), rho);
  const auto s2 = tv_solve_rhs(pre, oracles::from_eigen(b2), rho);
  for (int i = 0; i < 16; ++i) {
    CHECK(s1[i] == doctest::Approx(xt_e[i]).epsilon(1e-8));
    CHECK(s2[i] == doctest::Approx(xt_e[i] + c).epsilon(1e-8));
  }
}

TEST_CASE("tv solve flags the singular DC system") {
  // A annihilating the constant vector makes A^T A + rho Delta singular.
  const GridShape grid({2, 2});
  std::vector<double> a_entries = {1, -1, 0, 0, 0, 0, 1, -1};
  auto a = std::make_shared<DenseMap>(2, 4, a_entries);
  auto pre = precompute(a, TvPenalty{grid});
  // DC-free rhs: minimum-norm solution, matched against the dense pseudo-inverse
  GradientOperator k(grid);
  const MatrixXd kd = oracles::materialize(k);
  const auto ad = oracles::dense_from(*a);
  const MatrixXd m = ad.transpose() * ad + 0.5 * kd.transpose() * kd;
  VectorXd b(4);
  b << 1, -0.25, -0.5, -0.25;
  const VectorXd want = m.completeOrthogonalDecomposition().pseudoInverse() * b;
  const auto got = tv_solve_rhs(pre, oracles::from_eigen(b), 0.5);
  for (int i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-8));
  // rhs with a DC component cannot be solved
  CHECK_THROWS_AS(tv_solve_rhs(pre, std::vector<double>{1, 1, 1, 1}, 0.5), SingularSystemError);
}

TEST_CASE("sigma_x_tv equals the dense trace") {
  for (const auto& grid : {GridShape({4, 4}), GridShape({2, 8}), GridShape({10})}) {
    GradientOperator k(grid);
    const MatrixXd kd = oracles::materialize(k);
    const MatrixXd lap = kd.transpose() * kd;
    const std::size_t p = grid.size();
    auto a = random_map(8, p, 650 + p);
    auto pre = precompute(a, TvPenalty{grid});
    const auto ad = oracles::dense_from(*a);
    for (double rho : {0.01, 0.7, 1.0, 100.0}) {
      const MatrixXd minv = (ad.transpose() * ad + rho * lap).inverse();
      const double r = static_cast<double>(p) * grid.ndim();
      const double want = (kd * minv * kd.transpose()).trace() / r;
      CHECK(sigma_x_tv(pre, rho) == doctest::Approx(want).epsilon(1e-8));
    }
  }
}

TEST_CASE("sigma_x_tv pseudo-inverse convention at A=0 and decay") {
  const GridShape grid({4, 4});
  auto a = std::make_shared<DenseMap>(3, 16, std::vector<double>(48, 0.0));
  auto pre = precompute(a, TvPenalty{grid});
  // rank(K) / (r rho) with rank(K) = p - 1 and r = d*p
  for (double rho : {0.5, 2.0})
    CHECK(sigma_x_tv(pre, rho) == doctest::Approx(15.0 / (32 * rho)).epsilon(1e-10));
  auto pre2 = precompute(random_map(8, 16, 777), TvPenalty{grid});
  CHECK(sigma_x_tv(pre2, 1e9) <= 1e-8);
}

TEST_CASE("half-spectrum sigma cross-check identity") {
  // The simplified per-eigenvalue formula differs from the exact trace by
  // the DC mode and the rank-one border; both corrections are explicit.
  const GridShape grid({4, 4});
  auto a = random_map(8, 16, 801);
  auto pre = precompute(a, TvPenalty{grid});
  for (double rho : {0.3, 1.0, 5.0}) {
    const double d = 2.0, p = 16.0;
    double kappa = 0, q = 0;
    for (std::size_t i = 0; i < pre.eigvals.size(); ++i) {
      const double den = pre.eigvals[i] + rho;
      kappa += pre.a_dc[i] * pre.a_dc[i] / den;
      q += pre.a_dc[i] * pre.a_dc[i] * pre.eigvals[i] / (den * den);
    }
    const double exact = sigma_x_tv(pre, rho);
    const double appendix = sigma_x_tv_appendix(pre, rho);
    CHECK(exact ==
          doctest::Approx(appendix - 1.0 / (p * d * rho) + q / (kappa * p * d * rho)).epsilon(1e-10));
  }
}

TEST_CASE("tv precompute exposes the laplacian spectrum") {
  const GridShape grid({4, 4});
  auto pre = precompute(random_map(6, 16, 901), TvPenalty{grid});
  GradientOperator k(grid);
  const MatrixXd kd = oracles::materialize(k);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(kd.transpose() * kd);
  auto spec = pre.laplacian_eigs;
  std::sort(spec.begin(), spec.end());
  REQUIRE(spec.size() == 16);
  for (int i = 0; i < 16; ++i) CHECK(std::fabs(spec[i] - es.eigenvalues()[i]) <= 1e-10);
}

TEST_CASE("solve calls are safe to run concurrently on a shared precomputation") {
  const GridShape grid({4, 4});
  auto pre = precompute(random_map(8, 16, 902), TvPenalty{grid});
  const auto y = randn(8, 903);
  const auto u = randn(32, 904);
  const auto want = tv_solve_fft(pre, y, u, 0.9);
  std::vector<std::vector<double>> got(4);
  std::vector<std::thread> workers;
  for (int t = 0; t < 4; ++t)
    workers.emplace_back([&, t] { got[t] = tv_solve_fft(pre, y, u, 0.9); });
  for (auto& w : workers) w.join();
  for (const auto& g : got) CHECK(g == want);
}

TEST_CASE("non-finite input is rejected") {
  std::vector<double> bad = {1.0, std::numeric_limits<double>::infinity(), 0.0, 1.0};
  CHECK_THROWS_AS(DenseMap(2, 2, bad), ParameterError);
}
