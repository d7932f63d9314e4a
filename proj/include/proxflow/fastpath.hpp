#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "proxflow/fft.hpp"
#include "proxflow/problem.hpp"

namespace proxflow {

/// Cached spectral data driving the O(np)-per-iteration x-updates.
///
/// Separable penalty: eigendecomposition A A^T = U diag(d) U^T.
/// TV penalty: eigendecomposition of B = A Dtilde^{-1} A^T where
/// Dtilde is the periodic Laplacian with its zero (DC) eigenvalue replaced
/// by one, plus the Laplacian spectrum and an FFT plan for the lattice. The
/// DC direction is carried explicitly through a = A e (e the unit constant
/// vector) and solved as a rank-one border alongside the Woodbury system.
///
/// Immutable after construction and shareable across threads; the solve
/// functions below are pure given the precomputation.
struct Precomputation {
  std::shared_ptr<const DenseMap> A;
  std::vector<double> eigvecs;    ///< U, row-major n x n, columns are eigenvectors
  std::vector<double> eigvecs_t;  ///< U^T, row-major
  std::vector<double> eigvals;    ///< d, ascending, clamped to be non-negative

  bool tv_mode = false;
  std::optional<GridShape> grid;
  std::vector<double> laplacian_eigs;       ///< full spectrum, DFT order
  std::vector<double> laplacian_eigs_half;  ///< r2c half-spectrum layout
  std::shared_ptr<const FftPlan> fft;
  std::vector<double> a_dc;  ///< U^T (A e)
  double a_dc_norm2 = 0;     ///< ||A e||^2

  double build_seconds = 0;

  std::size_t n() const { return A->rows(); }
  std::size_t p() const { return A->cols(); }
};

Precomputation precompute(std::shared_ptr<const DenseMap> A, const Penalty& penalty);

/// x = (A^T A + rho I)^{-1} (A^T y + u), evaluated as
/// u/rho + A^T U [ U^T(y - A u/rho) / (d + rho) ].
std::vector<double> ridge_solve_woodbury(const Precomputation& pre, std::span<const double> y,
                                         std::span<const double> u, double rho);

/// (1/n) sum_i 1/(d_i + rho) over the n eigenvalues of A A^T; equals
/// (1/n) Tr (A A^T + rho I_n)^{-1}. The p-dimensional trace
/// (1/n) Tr (A^T A + rho I_p)^{-1} adds (p - n)/rho on top, see
/// sigma_x_trace_full.
double sigma_x_spectral(const Precomputation& pre, double rho);

/// (1/n) Tr (A^T A + rho I_p)^{-1} = sigma_x_spectral + (p - n)/(n rho).
double sigma_x_trace_full(const Precomputation& pre, double rho);

/// x = (A^T A + rho K^T K)^{-1} (A^T y + K^T u) for the TV penalty,
/// via FFT diagonalization of the Laplacian and the bordered Woodbury
/// system; u has length d*p.
std::vector<double> tv_solve_fft(const Precomputation& pre, std::span<const double> y,
                                 std::span<const double> u, double rho);

/// Same solve for an arbitrary right-hand side b (length p). When A
/// annihilates the constant vector the system is singular on the DC mode:
/// a DC-free b yields the minimum-norm solution, otherwise this throws
/// SingularSystemError.
std::vector<double> tv_solve_rhs(const Precomputation& pre, std::span<const double> b, double rho);

/// (1/r) Tr[ K (A^T A + rho K^T K)^{-1} K^T ] with r = d*p the length of the
/// split variable: its per-component variance, evaluated spectrally (exact;
/// pseudo-inverse convention when the system is singular on the DC mode).
double sigma_x_tv(const Precomputation& pre, double rho);

/// Cross-check variant patterned on the half-spectrum sum
/// (1/(p d)) [ p/rho - (1/rho) sum_i d_i/(d_i + rho) ]; differs from
/// sigma_x_tv/d by the DC and rank-one border corrections.
double sigma_x_tv_appendix(const Precomputation& pre, double rho);

}  // namespace proxflow
