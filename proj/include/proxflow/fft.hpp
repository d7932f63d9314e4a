#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "proxflow/grid.hpp"

namespace proxflow {

/// Real-to-complex DFT plans for a periodic lattice (FFTW backend,
/// conjugate-symmetric half-spectrum storage along the last axis).
/// Plan creation is serialized internally; forward/inverse execution on
/// caller-owned buffers is thread-safe. inverse() clobbers its input and
/// scales by 1/n so that inverse(forward(x)) == x.
class FftPlan {
 public:
  explicit FftPlan(GridShape shape);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  const GridShape& shape() const { return shape_; }
  std::size_t real_size() const { return shape_.size(); }
  std::size_t spectrum_size() const { return spectrum_size_; }

  void forward(const double* in, std::complex<double>* out) const;
  void inverse(std::complex<double>* in, double* out) const;

 private:
  GridShape shape_;
  std::size_t spectrum_size_;
  void* fwd_;  // fftw_plan
  void* bwd_;
};

}  // namespace proxflow
