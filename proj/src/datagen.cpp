#include "proxflow/datagen.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "proxflow/errors.hpp"
#include "proxflow/rng.hpp"

namespace proxflow {
namespace datagen {

std::vector<double> bernoulli_gaussian(std::size_t p, double sparsity, std::uint64_t seed) {
  if (sparsity < 0 || sparsity > 1) throw ParameterError("bernoulli_gaussian: sparsity must be in [0,1]");
  Philox rng(seed, streams::kSignal);
  std::vector<double> x(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    if (rng.uniform() < sparsity) x[j] = rng.normal();
  }
  return x;
}

std::shared_ptr<DenseMap> gaussian_matrix(std::size_t n, std::size_t p, std::uint64_t seed) {
  if (n < 1 || p < 1) throw ParameterError("gaussian_matrix: empty shape");
  Philox rng(seed, streams::kMatrix);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> a(n * p);
  for (auto& v : a) v = scale * rng.normal();
  return std::make_shared<DenseMap>(n, p, std::move(a));
}

std::shared_ptr<DenseMap> product_matrix(std::size_t n, std::size_t p, std::size_t r, std::uint64_t seed) {
  if (n < 1 || p < 1 || r < 1) throw ParameterError("product_matrix: empty shape");
  Philox rng_u(seed, streams::kMatrixU);
  Philox rng_v(seed, streams::kMatrixV);
  Eigen::MatrixXd u(n, r), v(p, r);
  const double su = 1.0 / std::sqrt(static_cast<double>(n));
  const double sv = 1.0 / std::sqrt(static_cast<double>(r));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < r; ++k) u(i, k) = su * rng_u.normal();
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < r; ++k) v(j, k) = sv * rng_v.normal();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> a = u * v.transpose();
  std::vector<double> entries(a.data(), a.data() + n * p);
  return std::make_shared<DenseMap>(n, p, std::move(entries));
}

std::vector<double> noisy_measurements(const DenseMap& a, std::span<const double> x, double noise_variance,
                                       std::uint64_t seed) {
  if (noise_variance < 0) throw ParameterError("noisy_measurements: negative variance");
  std::vector<double> y(a.rows());
  a.apply(x, y);
  if (noise_variance > 0) {
    Philox rng(seed, streams::kNoise);
    const double sd = std::sqrt(noise_variance);
    for (auto& v : y) v += sd * rng.normal();
  }
  return y;
}

namespace {

struct Ellipse {
  double intensity, a, b, x0, y0, phi_deg;
};

// Ten-ellipse head phantom, high-contrast variant (values stay in [0,1]).
constexpr Ellipse kSheppLogan[10] = {
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
    {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},
    {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
    {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},
    {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
    {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},
    {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
    {0.1, 0.023, 0.023, 0.0, -0.605, 0.0},
    {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
};

}  // namespace

std::vector<double> shepp_logan(int L) {
  if (L < 16) throw ParameterError("shepp_logan: L must be at least 16");
  std::vector<double> img(static_cast<std::size_t>(L) * L, 0.0);
  const double deg = 0.017453292519943295;
  for (int i = 0; i < L; ++i) {
    const double y = (i + 0.5) * 2.0 / L - 1.0;
    for (int j = 0; j < L; ++j) {
      const double x = (j + 0.5) * 2.0 / L - 1.0;
      double v = 0;
      for (const auto& e : kSheppLogan) {
        const double ct = std::cos(e.phi_deg * deg), st = std::sin(e.phi_deg * deg);
        const double dx = x - e.x0, dy = y - e.y0;
        const double xr = dx * ct + dy * st;
        const double yr = -dx * st + dy * ct;
        if ((xr * xr) / (e.a * e.a) + (yr * yr) / (e.b * e.b) <= 1.0) v += e.intensity;
      }
      img[static_cast<std::size_t>(i) * L + j] = std::clamp(v, 0.0, 1.0);
    }
  }
  return img;
}

std::shared_ptr<DenseMap> radon_matrix(int L, std::span<const double> angles) {
  if (L < 2) throw ParameterError("radon_matrix: image side too small");
  const std::size_t p = static_cast<std::size_t>(L) * L;
  const std::size_t rows = angles.size() * static_cast<std::size_t>(L);
  std::vector<double> a(rows * p, 0.0);
  const double half = L / 2.0;

  std::vector<double> crossings;
  crossings.reserve(2 * L + 4);
  for (std::size_t ai = 0; ai < angles.size(); ++ai) {
    const double ct = std::cos(angles[ai]);
    const double st = std::sin(angles[ai]);
    // Ray through t * (ct, st) with direction (-st, ct).
    for (int bin = 0; bin < L; ++bin) {
      const double t = bin + 0.5 - half;
      const double px = t * ct, py = t * st;
      // Entry/exit of the ray into the square [-L/2, L/2]^2 (slab test).
      double s_lo = -1e30, s_hi = 1e30;
      bool miss = false;
      const double dir[2] = {-st, ct};
      const double pos[2] = {px, py};
      for (int axis = 0; axis < 2 && !miss; ++axis) {
        if (std::fabs(dir[axis]) < 1e-14) {
          if (pos[axis] <= -half || pos[axis] >= half) miss = true;
        } else {
          double s0 = (-half - pos[axis]) / dir[axis];
          double s1 = (half - pos[axis]) / dir[axis];
          if (s0 > s1) std::swap(s0, s1);
          s_lo = std::max(s_lo, s0);
          s_hi = std::min(s_hi, s1);
        }
      }
      if (miss || s_hi <= s_lo) continue;

      crossings.clear();
      crossings.push_back(s_lo);
      crossings.push_back(s_hi);
      for (int axis = 0; axis < 2; ++axis) {
        if (std::fabs(dir[axis]) < 1e-14) continue;
        for (int m = 0; m <= L; ++m) {
          const double s = ((m - half) - pos[axis]) / dir[axis];
          if (s > s_lo && s < s_hi) crossings.push_back(s);
        }
      }
      std::sort(crossings.begin(), crossings.end());

      double* row = a.data() + (ai * L + bin) * p;
      for (std::size_t k = 0; k + 1 < crossings.size(); ++k) {
        const double ds = crossings[k + 1] - crossings[k];
        if (ds <= 1e-12) continue;
        const double sm = 0.5 * (crossings[k] + crossings[k + 1]);
        const double x = px + sm * dir[0];
        const double y = py + sm * dir[1];
        int j = static_cast<int>(std::floor(x + half));
        int i = static_cast<int>(std::floor(y + half));
        j = std::clamp(j, 0, L - 1);
        i = std::clamp(i, 0, L - 1);
        row[static_cast<std::size_t>(i) * L + j] += ds;
      }
    }
  }
  return std::make_shared<DenseMap>(rows, p, std::move(a));
}

SyntheticInstance make_synthetic(MatrixKind kind, std::size_t n, std::size_t p, std::size_t rank,
                                 double sparsity, double noise_variance, std::uint64_t seed) {
  SyntheticInstance inst;
  inst.seed = seed;
  inst.noise_variance = noise_variance;
  inst.x_true = bernoulli_gaussian(p, sparsity, seed);
  inst.A = kind == MatrixKind::Gaussian ? gaussian_matrix(n, p, seed) : product_matrix(n, p, rank, seed);
  inst.y = noisy_measurements(*inst.A, inst.x_true, noise_variance, seed);
  return inst;
}

TomoInstance make_tomo(int L, int n_angles, double noise_percent, std::uint64_t seed) {
  if (n_angles < 1) throw ParameterError("make_tomo: need at least one angle");
  if (noise_percent < 0) throw ParameterError("make_tomo: negative noise level");
  TomoInstance inst;
  inst.L = L;
  inst.phantom = shepp_logan(L);
  inst.angles.resize(n_angles);
  const double pi = 3.14159265358979323846;
  for (int k = 0; k < n_angles; ++k) inst.angles[k] = k * pi / n_angles;
  inst.radon = radon_matrix(L, inst.angles);
  std::vector<double> clean(inst.radon->rows());
  inst.radon->apply(inst.phantom, clean);
  double energy = 0;
  for (double v : clean) energy += v * v;
  inst.noise_variance = (noise_percent / 100.0) * energy / static_cast<double>(clean.size());
  inst.y = noisy_measurements(*inst.radon, inst.phantom, inst.noise_variance, seed);
  return inst;
}

}  // namespace datagen
}  // namespace proxflow
