#include "proxflow/kernels.hpp"

#include <cmath>

#include "proxflow/threads.hpp"

namespace proxflow::kernels {

namespace {

inline double row_dot(const double* r, const double* x, std::size_t n) {
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    a0 += r[j] * x[j];
    a1 += r[j + 1] * x[j + 1];
    a2 += r[j + 2] * x[j + 2];
    a3 += r[j + 3] * x[j + 3];
  }
  double acc = (a0 + a1) + (a2 + a3);
  for (; j < n; ++j) acc += r[j] * x[j];
  return acc;
}

// Forward difference of one site along one axis, periodic.
inline double site_diff(const double* x, std::size_t s, std::size_t stride, int extent, int coord) {
  const std::size_t nb = (coord == extent - 1) ? s - stride * static_cast<std::size_t>(extent - 1) : s + stride;
  return x[nb] - x[s];
}

// Backward neighbour difference used by the adjoint.
inline double site_adj(const double* g, std::size_t s, std::size_t stride, int extent, int coord, int d, int comp) {
  const std::size_t prev = (coord == 0) ? s + stride * static_cast<std::size_t>(extent - 1) : s - stride;
  return g[prev * d + comp] - g[s * d + comp];
}

inline void grad_apply_site(const GridShape& shape, const double* x, double* out, std::size_t s) {
  const int d = shape.ndim();
  std::size_t rem = s;
  // coords computed most-significant axis first
  int coord[3];
  for (int a = 0; a < d; ++a) {
    const std::size_t str = shape.stride(a);
    coord[a] = static_cast<int>(rem / str);
    rem %= str;
  }
  // component 0 is the fastest-varying axis
  for (int c = 0; c < d; ++c) {
    const int axis = d - 1 - c;
    out[s * d + c] = site_diff(x, s, shape.stride(axis), shape.dims[axis], coord[axis]);
  }
}

inline void grad_adjoint_site(const GridShape& shape, const double* g, double* out, std::size_t s) {
  const int d = shape.ndim();
  std::size_t rem = s;
  int coord[3];
  for (int a = 0; a < d; ++a) {
    const std::size_t str = shape.stride(a);
    coord[a] = static_cast<int>(rem / str);
    rem %= str;
  }
  double acc = 0;
  for (int c = 0; c < d; ++c) {
    const int axis = d - 1 - c;
    acc += site_adj(g, s, shape.stride(axis), shape.dims[axis], coord[axis], d, c);
  }
  out[s] = acc;
}

inline double soft_one(double v, double theta) {
  const double a = std::fabs(v);
  return a > theta ? (1.0 - theta / a) * v : 0.0;
}

inline void group_soft_one(const double* v, int gdim, double theta, double* out) {
  double n2 = 0;
  for (int c = 0; c < gdim; ++c) n2 += v[c] * v[c];
  const double nrm = std::sqrt(n2);
  if (nrm > theta) {
    const double scale = 1.0 - theta / nrm;
    for (int c = 0; c < gdim; ++c) out[c] = scale * v[c];
  } else {
    for (int c = 0; c < gdim; ++c) out[c] = 0.0;
  }
}

}  // namespace

namespace serial {

void matvec(std::size_t rows, std::size_t cols, const double* m, const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = row_dot(m + i * cols, x, cols);
}

void grad_apply(const GridShape& shape, const double* x, double* out) {
  const std::size_t n = shape.size();
  for (std::size_t s = 0; s < n; ++s) grad_apply_site(shape, x, out, s);
}

void grad_adjoint(const GridShape& shape, const double* g, double* out) {
  const std::size_t n = shape.size();
  for (std::size_t s = 0; s < n; ++s) grad_adjoint_site(shape, g, out, s);
}

void soft_threshold(std::size_t n, const double* v, double theta, double* out) {
  if (theta == 0.0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = v[i];
    return;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = soft_one(v[i], theta);
}

void group_soft_threshold(std::size_t groups, int gdim, const double* v, double theta, double* out) {
  if (theta == 0.0) {
    for (std::size_t i = 0; i < groups * static_cast<std::size_t>(gdim); ++i) out[i] = v[i];
    return;
  }
  for (std::size_t g = 0; g < groups; ++g) group_soft_one(v + g * gdim, gdim, theta, out + g * gdim);
}

}  // namespace serial

namespace par {

void matvec(std::size_t rows, std::size_t cols, const double* m, const double* x, double* y) {
  const int nt = max_threads();
  const std::ptrdiff_t r = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static) num_threads(nt)
  for (std::ptrdiff_t i = 0; i < r; ++i) y[i] = row_dot(m + static_cast<std::size_t>(i) * cols, x, cols);
}

void grad_apply(const GridShape& shape, const double* x, double* out) {
  const int nt = max_threads();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(shape.size());
#pragma omp parallel for schedule(static) num_threads(nt)
  for (std::ptrdiff_t s = 0; s < n; ++s) grad_apply_site(shape, x, out, static_cast<std::size_t>(s));
}

void grad_adjoint(const GridShape& shape, const double* g, double* out) {
  const int nt = max_threads();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(shape.size());
#pragma omp parallel for schedule(static) num_threads(nt)
  for (std::ptrdiff_t s = 0; s < n; ++s) grad_adjoint_site(shape, g, out, static_cast<std::size_t>(s));
}

void soft_threshold(std::size_t n, const double* v, double theta, double* out) {
  if (theta == 0.0) {
    serial::soft_threshold(n, v, theta, out);
    return;
  }
  const int nt = max_threads();
  const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) num_threads(nt)
  for (std::ptrdiff_t i = 0; i < nn; ++i) out[i] = soft_one(v[i], theta);
}

void group_soft_threshold(std::size_t groups, int gdim, const double* v, double theta, double* out) {
  if (theta == 0.0) {
    serial::group_soft_threshold(groups, gdim, v, theta, out);
    return;
  }
  const int nt = max_threads();
  const std::ptrdiff_t ng = static_cast<std::ptrdiff_t>(groups);
#pragma omp parallel for schedule(static) num_threads(nt)
  for (std::ptrdiff_t g = 0; g < ng; ++g)
    group_soft_one(v + static_cast<std::size_t>(g) * gdim, gdim, theta, out + static_cast<std::size_t>(g) * gdim);
}

}  // namespace par

void matvec(std::size_t rows, std::size_t cols, const double* m, const double* x, double* y) {
  if (max_threads() > 1)
    par::matvec(rows, cols, m, x, y);
  else
    serial::matvec(rows, cols, m, x, y);
}

void grad_apply(const GridShape& shape, const double* x, double* out) {
  if (max_threads() > 1)
    par::grad_apply(shape, x, out);
  else
    serial::grad_apply(shape, x, out);
}

void grad_adjoint(const GridShape& shape, const double* g, double* out) {
  if (max_threads() > 1)
    par::grad_adjoint(shape, g, out);
  else
    serial::grad_adjoint(shape, g, out);
}

void soft_threshold(std::size_t n, const double* v, double theta, double* out) {
  if (max_threads() > 1)
    par::soft_threshold(n, v, theta, out);
  else
    serial::soft_threshold(n, v, theta, out);
}

void group_soft_threshold(std::size_t groups, int gdim, const double* v, double theta, double* out) {
  if (max_threads() > 1)
    par::group_soft_threshold(groups, gdim, v, theta, out);
  else
    serial::group_soft_threshold(groups, gdim, v, theta, out);
}

double dot(std::size_t n, const double* a, const double* b) { return row_dot(a, b, n); }

double nrm2_squared(std::size_t n, const double* a) { return row_dot(a, a, n); }

}  // namespace proxflow::kernels
