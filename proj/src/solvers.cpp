#include "proxflow/solvers.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>

#include "proxflow/errors.hpp"
#include "proxflow/kernels.hpp"
#include "proxflow/prox.hpp"
#include "proxflow/rng.hpp"

namespace proxflow {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

ProxResult penalty_prox(const Problem& prob, const std::vector<double>& v, double theta) {
  return prob.is_tv() ? group_soft_threshold(v, theta, prob.group_dim()) : soft_threshold(v, theta);
}

}  // namespace

std::string to_string(SolverKind k) {
  switch (k) {
    case SolverKind::Ista: return "ista";
    case SolverKind::Amp: return "amp";
    case SolverKind::Vamp: return "vamp";
    case SolverKind::Admm: return "admm";
    case SolverKind::Prs: return "prs";
  }
  return "unknown";
}

SolverKind solver_kind_from_string(const std::string& s) {
  if (s == "ista") return SolverKind::Ista;
  if (s == "amp") return SolverKind::Amp;
  if (s == "vamp") return SolverKind::Vamp;
  if (s == "admm") return SolverKind::Admm;
  if (s == "prs") return SolverKind::Prs;
  throw ConfigError("unknown solver '" + s + "'");
}

VampState init_vamp(const Problem& prob, const SolverOptions& opts) {
  VampState st;
  st.x.assign(prob.p(), 0.0);
  st.z.assign(prob.r(), 0.0);
  st.u.assign(prob.r(), 0.0);
  st.rho = opts.rho.value_or(opts.rho_init);
  st.sigma_x = st.sigma_z = 0.5;
  st.gamma = opts.gamma.value_or(0.6);
  st.adapt_variances = opts.adapt_variances;
  if (!(st.rho > 0)) throw ParameterError("init_vamp: initial rho must be positive");
  if (!(st.gamma > 0) || st.gamma > 1) throw ParameterError("init_vamp: gamma must be in (0, 1]");
  if (!st.adapt_variances) {
    st.sigma_x = st.sigma_z = 0.5 / st.rho;
  }
  return st;
}

AmpState init_amp(const Problem& prob, const SolverOptions& opts) {
  if (prob.is_tv()) throw ParameterError("init_amp: AMP requires a separable penalty");
  AmpState st;
  st.x.assign(prob.p(), 0.0);
  st.z.assign(prob.n(), 0.0);
  st.sigma = opts.amp_sigma0;
  st.alpha = static_cast<double>(prob.n()) / static_cast<double>(prob.p());
  if (!(st.sigma > 0)) throw ParameterError("init_amp: sigma0 must be positive");
  return st;
}

namespace {
SplitState init_split(const Problem& prob, const SolverOptions& opts, double default_gamma) {
  if (!opts.rho) throw ConfigError("ADMM/PRS require a fixed stepsize rho");
  if (!(*opts.rho > 0)) throw ParameterError("init: rho must be positive");
  SplitState st;
  st.x.assign(prob.p(), 0.0);
  st.z.assign(prob.r(), 0.0);
  st.u.assign(prob.r(), 0.0);
  st.rho = *opts.rho;
  st.gamma = opts.gamma.value_or(default_gamma);
  return st;
}
}  // namespace

SplitState init_admm(const Problem& prob, const SolverOptions& opts) { return init_split(prob, opts, 1.0); }

SplitState init_prs(const Problem& prob, const SolverOptions& opts) { return init_split(prob, opts, 0.95); }

double lipschitz_estimate(const DenseMap& a) {
  const std::size_t p = a.cols();
  Philox rng(0x9E3779B97F4A7C15ull, 0x10);
  std::vector<double> v(p), w(a.rows()), atw(p);
  for (auto& vi : v) vi = rng.normal();
  double nrm = std::sqrt(kernels::nrm2_squared(p, v.data()));
  for (auto& vi : v) vi /= nrm;
  double lam = 0;
  for (int it = 0; it < 100; ++it) {
    a.apply(v, w);
    a.apply_adjoint(w, atw);
    const double lam_next = std::sqrt(kernels::nrm2_squared(p, atw.data()));
    if (lam_next == 0) return 1.0;  // zero matrix
    for (std::size_t j = 0; j < p; ++j) v[j] = atw[j] / lam_next;
    const bool done = std::fabs(lam_next - lam) <= 1e-6 * lam_next;
    lam = lam_next;
    if (done) break;
  }
  return lam * 1.001;
}

IstaState init_ista(const Problem& prob, double* power_seconds) {
  if (prob.is_tv()) throw ParameterError("init_ista: ISTA requires a separable penalty");
  const auto t0 = Clock::now();
  IstaState st;
  st.x.assign(prob.p(), 0.0);
  st.lipschitz = lipschitz_estimate(prob.A());
  if (power_seconds) *power_seconds = seconds_since(t0);
  return st;
}

void ista_step(IstaState& st, const Problem& prob) {
  const std::size_t n = prob.n(), p = prob.p();
  std::vector<double> ax(n), grad(p);
  prob.A().apply(st.x, ax);
  for (std::size_t i = 0; i < n; ++i) ax[i] = prob.y()[i] - ax[i];
  prob.A().apply_adjoint(ax, grad);
  const double step = 1.0 / st.lipschitz;
  std::vector<double> v(p);
  for (std::size_t j = 0; j < p; ++j) v[j] = st.x[j] + step * grad[j];
  st.x = soft_threshold(v, prob.lambda() * step).value;
}

void amp_step(AmpState& st, const Problem& prob) {
  const std::size_t n = prob.n(), p = prob.p();
  std::vector<double> g(p);
  prob.A().apply_adjoint(st.z, g);
  for (std::size_t j = 0; j < p; ++j) g[j] += st.x[j];
  auto prox = soft_threshold(g, prob.lambda() * st.sigma);
  const double deriv = prox.avg_derivative;
  st.x = std::move(prox.value);

  std::vector<double> ax(n);
  prob.A().apply(st.x, ax);
  const double onsager = deriv / st.alpha;
  for (std::size_t i = 0; i < n; ++i) st.z[i] = prob.y()[i] - ax[i] + onsager * st.z[i];
  st.sigma = 1.0 + st.sigma * deriv / st.alpha;

  if (!all_finite(st.x) || !all_finite(st.z) || !std::isfinite(st.sigma) ||
      kernels::nrm2_squared(p, st.x.data()) > 1e200)
    st.diverged = true;
}

namespace {

// Shared tail of both VAMP variants: given x and Kx, apply the denoiser and
// the relaxed dual/stepsize updates.
void vamp_denoise_and_dual(VampState& st, const Problem& prob, const std::vector<double>& kx, double sx) {
  const std::size_t r = kx.size();
  if (!st.adapt_variances) sx = 0.5 / st.rho;
  sx = std::max(sx, kSigmaMin);
  double denom = 1.0 - sx * st.rho;
  if (denom < kDenomGuard) denom = kDenomGuard;

  std::vector<double> arg(r);
  for (std::size_t i = 0; i < r; ++i) arg[i] = (kx[i] - sx * st.u[i]) / denom;
  auto prox = penalty_prox(prob, arg, prob.lambda() * sx / denom);

  double sz;
  if (st.adapt_variances) {
    sz = std::max((sx / denom) * prox.avg_derivative, kSigmaMin);
  } else {
    sz = sx;
  }
  st.z = std::move(prox.value);
  for (std::size_t i = 0; i < r; ++i) st.u[i] += st.gamma * (st.z[i] / sz - kx[i] / sx);
  st.rho = std::max(st.rho + st.gamma * (1.0 / sz - 1.0 / sx), kRhoMin);
  st.sigma_x = sx;
  st.sigma_z = sz;

  if (!all_finite(st.u) || !std::isfinite(st.rho)) st.diverged = true;
}

}  // namespace

void vamp_sep_step(VampState& st, const Problem& prob, const Precomputation& pre) {
  if (prob.is_tv()) throw ParameterError("vamp_sep_step: problem has a TV penalty");
  st.x = ridge_solve_woodbury(pre, prob.y(), st.u, st.rho);
  const double sx = st.adapt_variances ? sigma_x_spectral(pre, st.rho) : st.sigma_x;
  vamp_denoise_and_dual(st, prob, st.x, sx);
}

void vamp_tv_step(VampState& st, const Problem& prob, const Precomputation& pre) {
  if (!prob.is_tv()) throw ParameterError("vamp_tv_step: problem has a separable penalty");
  st.x = tv_solve_fft(pre, prob.y(), st.u, st.rho);
  const auto kx = prob.apply_k(st.x);
  const double sx = st.adapt_variances ? sigma_x_tv(pre, st.rho) : st.sigma_x;
  vamp_denoise_and_dual(st, prob, kx, sx);
}

void vamp_step(VampState& st, const Problem& prob, const Precomputation& pre) {
  if (prob.is_tv())
    vamp_tv_step(st, prob, pre);
  else
    vamp_sep_step(st, prob, pre);
}

namespace {

std::vector<double> split_x_solve(const Problem& prob, const Precomputation& pre,
                                  const std::vector<double>& w, double rho) {
  return prob.is_tv() ? tv_solve_fft(pre, prob.y(), w, rho) : ridge_solve_woodbury(pre, prob.y(), w, rho);
}

}  // namespace

void admm_step(SplitState& st, const Problem& prob, const Precomputation& pre) {
  const std::size_t r = prob.r();
  std::vector<double> w(r);
  for (std::size_t i = 0; i < r; ++i) w[i] = st.u[i] + st.rho * st.z[i];
  st.x = split_x_solve(prob, pre, w, st.rho);
  const auto kx = prob.apply_k(st.x);
  std::vector<double> arg(r);
  for (std::size_t i = 0; i < r; ++i) arg[i] = kx[i] - st.u[i] / st.rho;
  st.z = penalty_prox(prob, arg, prob.lambda() / st.rho).value;
  for (std::size_t i = 0; i < r; ++i) st.u[i] += st.rho * (st.z[i] - kx[i]);
}

void prs_step(SplitState& st, const Problem& prob, const Precomputation& pre) {
  const std::size_t r = prob.r();
  st.x = split_x_solve(prob, pre, st.u, st.rho);
  const auto kx = prob.apply_k(st.x);
  std::vector<double> arg(r);
  for (std::size_t i = 0; i < r; ++i) arg[i] = 2.0 * kx[i] - st.u[i] / st.rho;
  st.z = penalty_prox(prob, arg, prob.lambda() / st.rho).value;
  const double step = 2.0 * st.rho * st.gamma;
  for (std::size_t i = 0; i < r; ++i) st.u[i] += step * (st.z[i] - kx[i]);
}

namespace {

struct StopWindow {
  std::deque<double> vals;
  int window;
  double tol;

  bool push_and_check(double obj) {
    vals.push_back(obj);
    if (static_cast<int>(vals.size()) > window + 1) vals.pop_front();
    if (static_cast<int>(vals.size()) < window + 1) return false;
    double lo = vals.front(), hi = vals.front();
    for (double v : vals) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double scale = std::max(std::fabs(vals.back()), 1e-300);
    return (hi - lo) / scale < tol;
  }
};

}  // namespace

Trace run(const Problem& prob, SolverKind kind, const SolverOptions& opts, const Budget& budget,
          const Precomputation* shared_pre) {
  const auto t0 = Clock::now();
  Trace trace;
  trace.solver = to_string(kind);

  // Preprocessing: spectral caches for the splitting solvers, the power
  // iteration for ISTA. Shared precomputations count their own build time.
  const Precomputation* pre = shared_pre;
  Precomputation local_pre;
  double prep = 0;
  const bool needs_pre = kind == SolverKind::Vamp || kind == SolverKind::Admm || kind == SolverKind::Prs;
  if (needs_pre) {
    if (!pre) {
      local_pre = precompute(prob.A_ptr(), prob.penalty());
      pre = &local_pre;
    }
    prep = pre->build_seconds;
  }

  VampState vamp;
  AmpState amp;
  SplitState split;
  IstaState ista;
  switch (kind) {
    case SolverKind::Vamp: vamp = init_vamp(prob, opts); break;
    case SolverKind::Amp: amp = init_amp(prob, opts); break;
    case SolverKind::Admm: split = init_admm(prob, opts); break;
    case SolverKind::Prs: split = init_prs(prob, opts); break;
    case SolverKind::Ista: {
      double power_secs = 0;
      ista = init_ista(prob, &power_secs);
      prep = power_secs;
      break;
    }
  }
  trace.preprocessing_seconds = prep;

  auto current_x = [&]() -> const std::vector<double>& {
    switch (kind) {
      case SolverKind::Vamp: return vamp.x;
      case SolverKind::Amp: return amp.x;
      case SolverKind::Admm:
      case SolverKind::Prs: return split.x;
      default: return ista.x;
    }
  };

  const auto loop_start = Clock::now();
  auto record = [&](std::int64_t iter, double obj) {
    TraceRow row;
    row.iter = iter;
    row.seconds = prep + seconds_since(loop_start);
    row.objective = obj;
    if (kind == SolverKind::Vamp) {
      row.sigma_x = vamp.sigma_x;
      row.sigma_z = vamp.sigma_z;
      row.rho = vamp.rho;
    } else if (kind == SolverKind::Amp) {
      row.sigma_x = amp.sigma;
    } else if (kind == SolverKind::Admm || kind == SolverKind::Prs) {
      row.rho = split.rho;
    }
    if (opts.kkt_every > 0 && iter % opts.kkt_every == 0) row.kkt = kkt_residual(prob, current_x());
    trace.rows.push_back(row);
  };

  StopWindow stop{{}, budget.stop_window, budget.stop_tol};
  trace.status = RunStatus::BudgetExhausted;
  record(0, objective(prob, current_x()));
  stop.push_and_check(trace.rows[0].objective);

  for (std::int64_t iter = 1; iter <= budget.max_iters; ++iter) {
    switch (kind) {
      case SolverKind::Vamp: vamp_step(vamp, prob, *pre); break;
      case SolverKind::Amp: amp_step(amp, prob); break;
      case SolverKind::Admm: admm_step(split, prob, *pre); break;
      case SolverKind::Prs: prs_step(split, prob, *pre); break;
      case SolverKind::Ista: ista_step(ista, prob); break;
    }
    const bool diverged_flag = (kind == SolverKind::Vamp && vamp.diverged) || (kind == SolverKind::Amp && amp.diverged);
    double obj = diverged_flag ? std::numeric_limits<double>::quiet_NaN() : objective(prob, current_x());
    if (diverged_flag || !std::isfinite(obj)) {
      trace.status = RunStatus::Diverged;
      break;
    }
    record(iter, obj);
    if (stop.push_and_check(obj)) {
      trace.status = RunStatus::Converged;
      break;
    }
    if (budget.max_seconds && seconds_since(loop_start) + prep > *budget.max_seconds) break;
  }

  // Optimality certificate on the final iterate unless disabled.
  if (opts.kkt_every == 0 && !trace.rows.empty() && trace.status != RunStatus::Diverged)
    trace.rows.back().kkt = kkt_residual(prob, current_x());
  return trace;
}

}  // namespace proxflow
