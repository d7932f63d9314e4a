#include "proxflow/fastpath.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>

#include "proxflow/errors.hpp"
#include "proxflow/kernels.hpp"

namespace proxflow {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Symmetric eigendecomposition; eigenvalues ascending, tiny/negative values
// clamped to zero (numerical rank).
void eigh(const Eigen::MatrixXd& m, std::vector<double>& vecs, std::vector<double>& vecs_t,
          std::vector<double>& vals) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const std::size_t n = static_cast<std::size_t>(m.rows());
  vals.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  double dmax = 0;
  for (double v : vals) dmax = std::max(dmax, v);
  const double floor = 1e-12 * dmax;
  for (double& v : vals)
    if (v < floor) v = 0.0;
  vecs.resize(n * n);
  vecs_t.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      vecs[i * n + j] = es.eigenvectors()(i, j);
      vecs_t[j * n + i] = es.eigenvectors()(i, j);
    }
}

std::vector<double> half_spectrum(const GridShape& shape) {
  const int d = shape.ndim();
  std::vector<int> ext(d);
  for (int a = 0; a < d; ++a) ext[a] = shape.dims[a];
  ext[d - 1] = ext[d - 1] / 2 + 1;
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(ext[a]);
  std::vector<double> out(total);
  std::vector<int> k(d, 0);
  const double two_pi = 6.283185307179586476925286766559;
  for (std::size_t idx = 0; idx < total; ++idx) {
    double v = 0;
    for (int a = 0; a < d; ++a) v += 2.0 - 2.0 * std::cos(two_pi * k[a] / shape.dims[a]);
    out[idx] = v;
    for (int a = d - 1; a >= 0; --a) {
      if (++k[a] < ext[a]) break;
      k[a] = 0;
    }
  }
  return out;
}

// g = (rho * Dtilde)^{-1} b via the FFT; Dtilde has eigenvalue 1 on the DC
// mode in place of the Laplacian's zero.
void apply_ginv(const Precomputation& pre, std::span<const double> b, double rho, std::vector<double>& out,
                std::vector<std::complex<double>>& spec) {
  spec.resize(pre.fft->spectrum_size());
  pre.fft->forward(b.data(), spec.data());
  const auto& lam = pre.laplacian_eigs_half;
  spec[0] /= rho;  // DC: Dtilde eigenvalue is 1
  for (std::size_t i = 1; i < spec.size(); ++i) spec[i] /= rho * lam[i];
  out.resize(pre.p());
  pre.fft->inverse(spec.data(), out.data());
}

inline void matvec_U(const Precomputation& pre, const double* x, double* out) {
  kernels::matvec(pre.n(), pre.n(), pre.eigvecs.data(), x, out);
}

inline void matvec_Ut(const Precomputation& pre, const double* x, double* out) {
  kernels::matvec(pre.n(), pre.n(), pre.eigvecs_t.data(), x, out);
}

inline bool dc_coupled(const Precomputation& pre) {
  const double scale = std::max(1.0, pre.eigvals.empty() ? 0.0 : pre.eigvals.back());
  return pre.a_dc_norm2 > 1e-20 * scale;
}

}  // namespace

Precomputation precompute(std::shared_ptr<const DenseMap> A, const Penalty& penalty) {
  const auto t0 = Clock::now();
  Precomputation pre;
  pre.A = std::move(A);
  const std::size_t n = pre.n();
  const std::size_t p = pre.p();
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> a(
      pre.A->entries().data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));

  if (std::holds_alternative<TvPenalty>(penalty)) {
    pre.tv_mode = true;
    pre.grid = std::get<TvPenalty>(penalty).grid;
    if (pre.grid->size() != p) throw DimensionError("precompute: grid does not match the matrix columns");
    pre.laplacian_eigs = laplacian_spectrum(*pre.grid);
    pre.laplacian_eigs_half = half_spectrum(*pre.grid);
    pre.fft = std::make_shared<FftPlan>(*pre.grid);

    // B = A Dtilde^{-1} A^T, built column-by-column through the FFT.
    Eigen::MatrixXd c(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(n));
    std::vector<double> col(p), sol;
    std::vector<std::complex<double>> spec;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) col[j] = (*pre.A)(i, j);
      apply_ginv(pre, col, 1.0, sol, spec);
      for (std::size_t j = 0; j < p; ++j) c(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = sol[j];
    }
    Eigen::MatrixXd b = a * c;
    Eigen::MatrixXd bs = 0.5 * (b + b.transpose());  // symmetrize roundoff
    eigh(bs, pre.eigvecs, pre.eigvecs_t, pre.eigvals);

    // a_dc = U^T (A e), e = 1/sqrt(p)
    std::vector<double> ones(p, 1.0 / std::sqrt(static_cast<double>(p)));
    std::vector<double> ae(n);
    pre.A->apply(ones, ae);
    pre.a_dc_norm2 = kernels::nrm2_squared(n, ae.data());
    pre.a_dc.resize(n);
    matvec_Ut(pre, ae.data(), pre.a_dc.data());
  } else {
    Eigen::MatrixXd aat = a * a.transpose();
    Eigen::MatrixXd aats = 0.5 * (aat + aat.transpose());
    eigh(aats, pre.eigvecs, pre.eigvecs_t, pre.eigvals);
  }
  pre.build_seconds = seconds_since(t0);
  return pre;
}

std::vector<double> ridge_solve_woodbury(const Precomputation& pre, std::span<const double> y,
                                         std::span<const double> u, double rho) {
  if (pre.tv_mode) throw ParameterError("ridge_solve_woodbury: precomputation is for a TV penalty");
  if (!(rho > 0)) throw ParameterError("ridge_solve_woodbury: rho must be positive");
  const std::size_t n = pre.n();
  const std::size_t p = pre.p();
  if (y.size() != n || u.size() != p) throw DimensionError("ridge_solve_woodbury: shape mismatch");

  std::vector<double> x(p), t(n), t2(n), t3(n);
  for (std::size_t j = 0; j < p; ++j) x[j] = u[j] / rho;
  pre.A->apply(x, t);  // A u/rho
  for (std::size_t i = 0; i < n; ++i) t[i] = y[i] - t[i];
  matvec_Ut(pre, t.data(), t2.data());
  for (std::size_t i = 0; i < n; ++i) t2[i] /= pre.eigvals[i] + rho;
  matvec_U(pre, t2.data(), t3.data());
  std::vector<double> back(p);
  pre.A->apply_adjoint(t3, back);
  for (std::size_t j = 0; j < p; ++j) x[j] += back[j];
  return x;
}

double sigma_x_spectral(const Precomputation& pre, double rho) {
  if (!(rho > 0)) throw ParameterError("sigma_x_spectral: rho must be positive");
  const std::size_t n = pre.n();
  double s = 0;
  for (double d : pre.eigvals) s += 1.0 / (d + rho);
  return s / static_cast<double>(n);
}

double sigma_x_trace_full(const Precomputation& pre, double rho) {
  const double n = static_cast<double>(pre.n());
  const double p = static_cast<double>(pre.p());
  return sigma_x_spectral(pre, rho) + (p - n) / (n * rho);
}

std::vector<double> tv_solve_rhs(const Precomputation& pre, std::span<const double> b, double rho) {
  if (!pre.tv_mode) throw ParameterError("tv_solve_rhs: precomputation is for a separable penalty");
  if (!(rho > 0)) throw ParameterError("tv_solve_rhs: rho must be positive");
  const std::size_t n = pre.n();
  const std::size_t p = pre.p();
  if (b.size() != p) throw DimensionError("tv_solve_rhs: shape mismatch");
  const double sqrtp = std::sqrt(static_cast<double>(p));

  std::vector<double> g, h;
  std::vector<std::complex<double>> spec;
  apply_ginv(pre, b, rho, g, spec);

  std::vector<double> w1(n), what(n), s1hat(n), s1(n);
  pre.A->apply(g, w1);
  double w2 = 0;
  for (double v : g) w2 += v;
  w2 /= sqrtp;

  // Solve [[rho I + B, a], [a^T, 0]] (s1; s2) = rho (w1; w2) in the U basis.
  matvec_Ut(pre, w1.data(), what.data());
  for (std::size_t i = 0; i < n; ++i) what[i] = rho * what[i] / (pre.eigvals[i] + rho);
  double s2 = 0;
  if (dc_coupled(pre)) {
    double kappa = 0, num = 0;
    for (std::size_t i = 0; i < n; ++i) {
      kappa += pre.a_dc[i] * pre.a_dc[i] / (pre.eigvals[i] + rho);
      num += pre.a_dc[i] * what[i];
    }
    s2 = (num - rho * w2) / kappa;
    for (std::size_t i = 0; i < n; ++i) s1hat[i] = what[i] - s2 * pre.a_dc[i] / (pre.eigvals[i] + rho);
  } else {
    // A annihilates the constant mode: solvable only for DC-free b.
    double bdc = 0;
    for (double v : b) bdc += v;
    bdc /= sqrtp;
    const double bn = std::sqrt(kernels::nrm2_squared(p, b.data()));
    if (std::fabs(bdc) > 1e-10 * std::max(1.0, bn))
      throw SingularSystemError("tv_solve_rhs: right-hand side has a DC component on a singular system");
    s1hat = what;
  }
  matvec_U(pre, s1hat.data(), s1.data());

  std::vector<double> ats(p);
  pre.A->apply_adjoint(s1, ats);
  apply_ginv(pre, ats, rho, h, spec);
  const double dc_term = s2 / (rho * sqrtp);
  std::vector<double> x(p);
  for (std::size_t j = 0; j < p; ++j) x[j] = g[j] - h[j] - dc_term;
  return x;
}

std::vector<double> tv_solve_fft(const Precomputation& pre, std::span<const double> y,
                                 std::span<const double> u, double rho) {
  if (!pre.tv_mode) throw ParameterError("tv_solve_fft: precomputation is for a separable penalty");
  const std::size_t n = pre.n();
  const std::size_t p = pre.p();
  const std::size_t d = static_cast<std::size_t>(pre.grid->ndim());
  if (y.size() != n || u.size() != p * d) throw DimensionError("tv_solve_fft: shape mismatch");
  std::vector<double> b(p);
  kernels::grad_adjoint(*pre.grid, u.data(), b.data());
  std::vector<double> aty(p);
  pre.A->apply_adjoint(y, aty);
  for (std::size_t j = 0; j < p; ++j) b[j] += aty[j];
  return tv_solve_rhs(pre, b, rho);
}

double sigma_x_tv(const Precomputation& pre, double rho) {
  if (!pre.tv_mode) throw ParameterError("sigma_x_tv: precomputation is for a separable penalty");
  if (!(rho > 0)) throw ParameterError("sigma_x_tv: rho must be positive");
  const std::size_t n = pre.n();
  const double p = static_cast<double>(pre.p());
  // Tr[Delta M^{-1}] = (p-1)/rho - (1/rho) [ sum_i d_i/(d_i+rho) - q/kappa ]
  // with q = sum a_i^2 d_i/(d_i+rho)^2, kappa = sum a_i^2/(d_i+rho); the
  // q/kappa term is the rank-one DC border, dropped when A e = 0 (the
  // pseudo-inverse convention).
  double sum_d = 0;
  for (double di : pre.eigvals) sum_d += di / (di + rho);
  double correction = 0;
  if (dc_coupled(pre)) {
    double kappa = 0, q = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double denom = pre.eigvals[i] + rho;
      kappa += pre.a_dc[i] * pre.a_dc[i] / denom;
      q += pre.a_dc[i] * pre.a_dc[i] * pre.eigvals[i] / (denom * denom);
    }
    correction = q / kappa;
  }
  const double trace = (p - 1.0) / rho - (sum_d - correction) / rho;
  // Averaged over all r = d*p components of the split variable, pairing it
  // with the denoiser's derivative average over the same components.
  return trace / (p * pre.grid->ndim());
}

double sigma_x_tv_appendix(const Precomputation& pre, double rho) {
  if (!pre.tv_mode) throw ParameterError("sigma_x_tv_appendix: precomputation is for a separable penalty");
  const double p = static_cast<double>(pre.p());
  const double d = static_cast<double>(pre.grid->ndim());
  double sum_d = 0;
  for (double di : pre.eigvals) sum_d += di / (di + rho);
  return (p / rho - sum_d / rho) / (p * d);
}

}  // namespace proxflow
