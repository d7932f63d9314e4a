#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "proxflow/grid.hpp"
#include "proxflow/kernels.hpp"

namespace proxflow {

/// Linear operator with an explicit adjoint. Implementations are immutable
/// after construction and safe to share across threads; apply/adjoint are
/// pure functions of their input.
class LinearMap {
 public:
  virtual ~LinearMap() = default;

  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;

  /// out = M * in, in.size() == cols(), out.size() == rows().
  virtual void apply(std::span<const double> in, std::span<double> out) const = 0;

  /// out = M^T * in, in.size() == rows(), out.size() == cols().
  virtual void apply_adjoint(std::span<const double> in, std::span<double> out) const = 0;

  std::vector<double> apply(std::span<const double> in) const {
    std::vector<double> out(rows());
    apply(in, out);
    return out;
  }

  std::vector<double> apply_adjoint(std::span<const double> in) const {
    std::vector<double> out(cols());
    apply_adjoint(in, out);
    return out;
  }

 protected:
  void check_apply(std::size_t in, std::size_t out) const;
  void check_adjoint(std::size_t in, std::size_t out) const;
};

/// Dense row-major matrix. The transpose is materialized lazily the first
/// time the adjoint is applied so both directions stream contiguously.
class DenseMap final : public LinearMap {
 public:
  DenseMap(std::size_t rows, std::size_t cols, std::vector<double> entries);

  using LinearMap::apply;
  using LinearMap::apply_adjoint;

  std::size_t rows() const override { return rows_; }
  std::size_t cols() const override { return cols_; }
  void apply(std::span<const double> in, std::span<double> out) const override;
  void apply_adjoint(std::span<const double> in, std::span<double> out) const override;

  const std::vector<double>& entries() const { return data_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

 private:
  const std::vector<double>& transposed() const;

  std::size_t rows_, cols_;
  std::vector<double> data_;
  mutable std::vector<double> transpose_;
  mutable std::once_flag transpose_once_;
};

/// d-dimensional forward-difference gradient on a periodic lattice.
/// Output has one group of ndim components per site (site-major, fastest
/// axis first); applied to a constant image it is exactly zero.
class GradientOperator final : public LinearMap {
 public:
  explicit GradientOperator(GridShape shape) : shape_(std::move(shape)) {}

  using LinearMap::apply;
  using LinearMap::apply_adjoint;

  const GridShape& shape() const { return shape_; }
  std::size_t rows() const override { return shape_.size() * shape_.ndim(); }
  std::size_t cols() const override { return shape_.size(); }
  void apply(std::span<const double> in, std::span<double> out) const override;
  void apply_adjoint(std::span<const double> in, std::span<double> out) const override;

 private:
  GridShape shape_;
};

/// Eigenvalues of the periodic Laplacian grad^T grad, ordered by the
/// row-major multidimensional DFT index: 2d - 2 sum_a cos(2 pi k_a / L_a).
/// Exactly one entry (the DC mode) is zero.
std::vector<double> laplacian_spectrum(const GridShape& shape);

}  // namespace proxflow
