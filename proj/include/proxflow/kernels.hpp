#pragma once

#include <cstddef>

#include "proxflow/grid.hpp"

namespace proxflow::kernels {

// Data-parallel inner loops. Each kernel exists twice: a serial reference
// (namespace serial) and an OpenMP variant (namespace par) that splits the
// independent-output loop across threads. Per-element arithmetic is identical
// in both, so outputs agree bitwise for any thread count. The unqualified
// entry points dispatch on proxflow::max_threads(). Reductions (dot products,
// derivative averages) are deliberately kept serial so results never depend
// on the thread count.

namespace serial {

/// y = M x, M row-major rows x cols.
void matvec(std::size_t rows, std::size_t cols, const double* m, const double* x, double* y);

/// Forward differences with periodic wraparound; out has shape.size()*ndim
/// entries, one group of ndim components per site, fastest axis first.
void grad_apply(const GridShape& shape, const double* x, double* out);

/// Adjoint of grad_apply.
void grad_adjoint(const GridShape& shape, const double* g, double* out);

/// out_i = (1 - theta/|v_i|)_+ v_i.
void soft_threshold(std::size_t n, const double* v, double theta, double* out);

/// Per group of gdim entries: (1 - theta/||v_g||)_+ v_g.
void group_soft_threshold(std::size_t groups, int gdim, const double* v, double theta, double* out);

}  // namespace serial

namespace par {

void matvec(std::size_t rows, std::size_t cols, const double* m, const double* x, double* y);
void grad_apply(const GridShape& shape, const double* x, double* out);
void grad_adjoint(const GridShape& shape, const double* g, double* out);
void soft_threshold(std::size_t n, const double* v, double theta, double* out);
void group_soft_threshold(std::size_t groups, int gdim, const double* v, double theta, double* out);

}  // namespace par

void matvec(std::size_t rows, std::size_t cols, const double* m, const double* x, double* y);
void grad_apply(const GridShape& shape, const double* x, double* out);
void grad_adjoint(const GridShape& shape, const double* g, double* out);
void soft_threshold(std::size_t n, const double* v, double theta, double* out);
void group_soft_threshold(std::size_t groups, int gdim, const double* v, double theta, double* out);

// Serial vector helpers (fixed summation order).
double dot(std::size_t n, const double* a, const double* b);
double nrm2_squared(std::size_t n, const double* a);

}  // namespace proxflow::kernels
