#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "proxflow/operators.hpp"

namespace proxflow {
namespace datagen {

// Every generator is a pure function of (parameters, seed). Each one draws
// from its own Philox stream so that, for a fixed seed, adding or reordering
// calls never perturbs another generator's output.
namespace streams {
inline constexpr std::uint64_t kSignal = 0x01;
inline constexpr std::uint64_t kMatrix = 0x02;
inline constexpr std::uint64_t kMatrixU = 0x03;
inline constexpr std::uint64_t kMatrixV = 0x04;
inline constexpr std::uint64_t kNoise = 0x05;
}  // namespace streams

/// Entries are standard normal with probability `sparsity`, zero otherwise.
std::vector<double> bernoulli_gaussian(std::size_t p, double sparsity, std::uint64_t seed);

/// i.i.d. N(0, 1/n) entries.
std::shared_ptr<DenseMap> gaussian_matrix(std::size_t n, std::size_t p, std::uint64_t seed);

/// A = U V^T with U (n x r) ~ N(0, 1/n) and V (p x r) ~ N(0, 1/r), so the
/// entries keep variance 1/n while the rank is capped at r.
std::shared_ptr<DenseMap> product_matrix(std::size_t n, std::size_t p, std::size_t r, std::uint64_t seed);

/// y = A x + N(0, noise_variance I).
std::vector<double> noisy_measurements(const DenseMap& a, std::span<const double> x, double noise_variance,
                                       std::uint64_t seed);

/// Ten-ellipse Shepp-Logan head phantom on the unit square, L x L pixels
/// sampled at pixel centers, intensities clipped to [0, 1]. Row index
/// increases with the vertical coordinate.
std::vector<double> shepp_logan(int L);

/// Explicit discrete Radon matrix: one row per (angle, detector bin) holding
/// the exact intersection lengths of that ray with each pixel (Siddon
/// traversal). L detector bins per angle, spacing one pixel, rays through bin
/// centers. Rows are indexed angle-major.
std::shared_ptr<DenseMap> radon_matrix(int L, std::span<const double> angles);

enum class MatrixKind { Gaussian, Product };

struct SyntheticInstance {
  std::shared_ptr<const DenseMap> A;
  std::vector<double> x_true;
  std::vector<double> y;
  double noise_variance = 0;
  std::uint64_t seed = 0;
};

SyntheticInstance make_synthetic(MatrixKind kind, std::size_t n, std::size_t p, std::size_t rank,
                                 double sparsity, double noise_variance, std::uint64_t seed);

struct TomoInstance {
  std::vector<double> phantom;  ///< L*L, row-major
  std::shared_ptr<const DenseMap> radon;
  std::vector<double> y;  ///< noisy sinogram, angle-major
  std::vector<double> angles;
  double noise_variance = 0;
  int L = 0;
};

/// Equally spaced angles in [0, pi); noise variance is set relative to the
/// clean sinogram energy: noise_variance = (noise_percent/100) ||A x||^2 / n.
TomoInstance make_tomo(int L, int n_angles, double noise_percent, std::uint64_t seed);

}  // namespace datagen
}  // namespace proxflow
