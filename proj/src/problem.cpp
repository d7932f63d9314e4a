#include "proxflow/problem.hpp"

#include <algorithm>
#include <cmath>

#include "proxflow/errors.hpp"
#include "proxflow/kernels.hpp"

namespace proxflow {

Problem::Problem(std::vector<double> y, std::shared_ptr<const DenseMap> A, double lambda, Penalty penalty)
    : y_(std::move(y)), A_(std::move(A)), lambda_(lambda), penalty_(std::move(penalty)) {
  if (!A_) throw ParameterError("Problem: null feature matrix");
  if (A_->rows() != y_.size()) throw DimensionError("Problem: response length does not match the matrix");
  // lambda == 0 is admitted as the pure least-squares edge case.
  if (!(lambda_ >= 0)) throw ParameterError("Problem: lambda must be non-negative");
  if (is_tv()) {
    const auto& g = std::get<TvPenalty>(penalty_).grid;
    if (g.size() != A_->cols()) throw DimensionError("Problem: grid size does not match the number of columns");
    grad_.emplace(g);
  }
}

std::size_t Problem::r() const { return is_tv() ? grad_->rows() : p(); }

const GridShape& Problem::grid() const {
  if (!is_tv()) throw ParameterError("Problem: no grid for a separable penalty");
  return std::get<TvPenalty>(penalty_).grid;
}

void Problem::apply_k(std::span<const double> x, std::span<double> out) const {
  if (is_tv()) {
    grad_->apply(x, out);
  } else {
    if (x.size() != p() || out.size() != p()) throw DimensionError("apply_k: shape mismatch");
    std::copy(x.begin(), x.end(), out.begin());
  }
}

void Problem::apply_kt(std::span<const double> g, std::span<double> out) const {
  if (is_tv()) {
    grad_->apply_adjoint(g, out);
  } else {
    if (g.size() != p() || out.size() != p()) throw DimensionError("apply_kt: shape mismatch");
    std::copy(g.begin(), g.end(), out.begin());
  }
}

std::vector<double> Problem::apply_k(std::span<const double> x) const {
  std::vector<double> out(r());
  apply_k(x, out);
  return out;
}

std::vector<double> Problem::apply_kt(std::span<const double> g) const {
  std::vector<double> out(p());
  apply_kt(g, out);
  return out;
}

double objective(const Problem& prob, std::span<const double> x) {
  if (x.size() != prob.p()) throw DimensionError("objective: x has the wrong length");
  std::vector<double> ax(prob.n());
  prob.A().apply(x, ax);
  double loss = 0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    const double d = prob.y()[i] - ax[i];
    loss += d * d;
  }
  loss *= 0.5;

  double pen = 0;
  if (prob.is_tv()) {
    const auto kx = prob.apply_k(x);
    const int d = prob.group_dim();
    const std::size_t groups = kx.size() / d;
    for (std::size_t g = 0; g < groups; ++g)
      pen += std::sqrt(kernels::nrm2_squared(d, kx.data() + g * d));
  } else {
    for (double v : x) pen += std::fabs(v);
  }
  return loss + prob.lambda() * pen;
}

namespace {

// Residual of the separable problem has a closed form per coordinate.
double kkt_separable(const Problem& prob, std::span<const double> x, const std::vector<double>& v) {
  double xmax = 0;
  for (double xi : x) xmax = std::max(xmax, std::fabs(xi));
  const double act_tol = 1e-6 * std::max(1.0, xmax);
  const double lam = prob.lambda();
  double r2 = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double g;
    if (std::fabs(x[j]) > act_tol) {
      g = v[j] + (x[j] > 0 ? lam : -lam);
    } else {
      g = std::fabs(v[j]) > lam ? v[j] - (v[j] > 0 ? lam : -lam) : 0.0;
    }
    r2 += g * g;
  }
  return std::sqrt(r2);
}

// TV case: minimize ||v + lambda K^T w||^2 with w pinned to the exact
// subgradient on clearly active groups and constrained to the unit ball on
// the rest. Projected FISTA; the returned value is an upper bound on the
// true minimum that tightens as the inner iteration converges.
double kkt_tv(const Problem& prob, std::span<const double> x, const std::vector<double>& v) {
  const int d = prob.group_dim();
  const std::size_t r = prob.r();
  const std::size_t groups = r / d;
  const double lam = prob.lambda();

  auto kx = prob.apply_k(x);
  double gmax = 0;
  for (std::size_t g = 0; g < groups; ++g)
    gmax = std::max(gmax, std::sqrt(kernels::nrm2_squared(d, kx.data() + g * d)));
  const double act_tol = 1e-4 * std::max(1.0, gmax);

  std::vector<char> active(groups, 0);
  std::vector<double> w(r, 0.0);
  for (std::size_t g = 0; g < groups; ++g) {
    const double nrm = std::sqrt(kernels::nrm2_squared(d, kx.data() + g * d));
    if (nrm > act_tol) {
      active[g] = 1;
      for (int c = 0; c < d; ++c) w[g * d + c] = kx[g * d + c] / nrm;
    }
  }

  const auto spec = laplacian_spectrum(prob.grid());
  const double lap_max = *std::max_element(spec.begin(), spec.end());
  const double lip = lam * lam * std::max(lap_max, 1e-12);
  const double step = 1.0 / lip;

  auto project = [&](std::vector<double>& wv) {
    for (std::size_t g = 0; g < groups; ++g) {
      if (active[g]) {
        const double nrm = std::sqrt(kernels::nrm2_squared(d, kx.data() + g * d));
        for (int c = 0; c < d; ++c) wv[g * d + c] = kx[g * d + c] / nrm;
      } else {
        const double nrm = std::sqrt(kernels::nrm2_squared(d, wv.data() + g * d));
        if (nrm > 1.0)
          for (int c = 0; c < d; ++c) wv[g * d + c] /= nrm;
      }
    }
  };

  std::vector<double> resid(prob.p()), grad_w(r), w_prev = w, yv = w;
  double t = 1.0;
  const int max_inner = 5000;
  for (int it = 0; it < max_inner; ++it) {
    // grad = lam * K (v + lam K^T y)
    prob.apply_kt(yv, resid);
    for (std::size_t j = 0; j < resid.size(); ++j) resid[j] = v[j] + lam * resid[j];
    prob.apply_k(resid, grad_w);
    w_prev = w;
    for (std::size_t i = 0; i < r; ++i) w[i] = yv[i] - step * lam * grad_w[i];
    project(w);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    double delta2 = 0;
    for (std::size_t i = 0; i < r; ++i) {
      const double dw = w[i] - w_prev[i];
      yv[i] = w[i] + ((t - 1.0) / t_next) * dw;
      delta2 += dw * dw;
    }
    t = t_next;
    if (delta2 <= 1e-24 * static_cast<double>(r)) break;
  }

  prob.apply_kt(w, resid);
  double r2 = 0;
  for (std::size_t j = 0; j < resid.size(); ++j) {
    const double g = v[j] + lam * resid[j];
    r2 += g * g;
  }
  return std::sqrt(r2);
}

}  // namespace

double kkt_residual(const Problem& prob, std::span<const double> x) {
  if (x.size() != prob.p()) throw DimensionError("kkt_residual: x has the wrong length");
  std::vector<double> ax(prob.n());
  prob.A().apply(x, ax);
  for (std::size_t i = 0; i < ax.size(); ++i) ax[i] -= prob.y()[i];
  std::vector<double> v(prob.p());
  prob.A().apply_adjoint(ax, v);
  if (prob.lambda() == 0.0) return std::sqrt(kernels::nrm2_squared(v.size(), v.data()));
  return prob.is_tv() ? kkt_tv(prob, x, v) : kkt_separable(prob, x, v);
}

}  // namespace proxflow
