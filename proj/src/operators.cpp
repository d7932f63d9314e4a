#include "proxflow/operators.hpp"

#include <cmath>

#include "proxflow/errors.hpp"

namespace proxflow {

void LinearMap::check_apply(std::size_t in, std::size_t out) const {
  if (in != cols() || out != rows()) throw DimensionError("LinearMap::apply: shape mismatch");
}

void LinearMap::check_adjoint(std::size_t in, std::size_t out) const {
  if (in != rows() || out != cols()) throw DimensionError("LinearMap::apply_adjoint: shape mismatch");
}

DenseMap::DenseMap(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) throw DimensionError("DenseMap: entry count does not match rows*cols");
  for (double v : data_)
    if (!std::isfinite(v)) throw ParameterError("DenseMap: non-finite entry");
}

void DenseMap::apply(std::span<const double> in, std::span<double> out) const {
  check_apply(in.size(), out.size());
  kernels::matvec(rows_, cols_, data_.data(), in.data(), out.data());
}

const std::vector<double>& DenseMap::transposed() const {
  std::call_once(transpose_once_, [this] {
    transpose_.resize(data_.size());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) transpose_[j * rows_ + i] = data_[i * cols_ + j];
  });
  return transpose_;
}

void DenseMap::apply_adjoint(std::span<const double> in, std::span<double> out) const {
  check_adjoint(in.size(), out.size());
  kernels::matvec(cols_, rows_, transposed().data(), in.data(), out.data());
}

void GradientOperator::apply(std::span<const double> in, std::span<double> out) const {
  check_apply(in.size(), out.size());
  kernels::grad_apply(shape_, in.data(), out.data());
}

void GradientOperator::apply_adjoint(std::span<const double> in, std::span<double> out) const {
  check_adjoint(in.size(), out.size());
  kernels::grad_adjoint(shape_, in.data(), out.data());
}

std::vector<double> laplacian_spectrum(const GridShape& shape) {
  const int d = shape.ndim();
  const std::size_t n = shape.size();
  std::vector<double> eigs(n);
  std::vector<int> k(d, 0);
  const double two_pi = 6.283185307179586476925286766559;
  for (std::size_t idx = 0; idx < n; ++idx) {
    double v = 0;
    for (int a = 0; a < d; ++a) v += 2.0 - 2.0 * std::cos(two_pi * k[a] / shape.dims[a]);
    eigs[idx] = v;
    for (int a = d - 1; a >= 0; --a) {
      if (++k[a] < shape.dims[a]) break;
      k[a] = 0;
    }
  }
  return eigs;
}

}  // namespace proxflow
