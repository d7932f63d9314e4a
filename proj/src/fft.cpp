#include "proxflow/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace proxflow {

namespace {
// The FFTW planner is not thread-safe; executing plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftPlan::FftPlan(GridShape shape) : shape_(std::move(shape)) {
  const int d = shape_.ndim();
  int dims[3];
  for (int a = 0; a < d; ++a) dims[a] = shape_.dims[a];
  spectrum_size_ = 1;
  for (int a = 0; a < d - 1; ++a) spectrum_size_ *= static_cast<std::size_t>(dims[a]);
  spectrum_size_ *= static_cast<std::size_t>(dims[d - 1] / 2 + 1);

  std::vector<double> rbuf(shape_.size());
  std::vector<std::complex<double>> cbuf(spectrum_size_);
  std::lock_guard<std::mutex> lock(planner_mutex());
  // FFTW_UNALIGNED lets the plans run on any caller buffer later.
  fwd_ = fftw_plan_dft_r2c(d, dims, rbuf.data(), reinterpret_cast<fftw_complex*>(cbuf.data()),
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
  bwd_ = fftw_plan_dft_c2r(d, dims, reinterpret_cast<fftw_complex*>(cbuf.data()), rbuf.data(),
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
}

FftPlan::~FftPlan() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void FftPlan::forward(const double* in, std::complex<double>* out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void FftPlan::inverse(std::complex<double>* in, double* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(bwd_), reinterpret_cast<fftw_complex*>(in), out);
  const double scale = 1.0 / static_cast<double>(shape_.size());
  const std::size_t n = shape_.size();
  for (std::size_t i = 0; i < n; ++i) out[i] *= scale;
}

}  // namespace proxflow
