#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "proxflow/fastpath.hpp"
#include "proxflow/problem.hpp"
#include "proxflow/trace.hpp"

namespace proxflow {

enum class SolverKind { Ista, Amp, Vamp, Admm, Prs };

std::string to_string(SolverKind k);
SolverKind solver_kind_from_string(const std::string& s);

// Numerical guards shared by the adaptive iterations. The clamps keep the
// scalings finite through transients without moving any fixed point.
inline constexpr double kSigmaMin = 1e-11;
inline constexpr double kRhoMin = 1e-11;
inline constexpr double kDenomGuard = 1e-8;

struct SolverOptions {
  std::optional<double> rho;    ///< fixed stepsize, required for ADMM/PRS
  std::optional<double> gamma;  ///< relaxation; defaults 0.6 (VAMP) / 0.95 (PRS)
  bool adapt_variances = true;  ///< VAMP only; false freezes sigma = 1/(2 rho)
  double rho_init = 1.0;        ///< VAMP initial stepsize
  double amp_sigma0 = 1.0;      ///< AMP initial variance estimate
  int kkt_every = 0;            ///< 0: final row only; k>0: every k-th row; <0: never
};

struct Budget {
  std::int64_t max_iters = 1000;
  std::optional<double> max_seconds;
  /// Stop when the relative objective spread over a trailing window falls
  /// below this (the objective need not be monotone).
  double stop_tol = 1e-10;
  int stop_window = 10;
};

/// VAMP iterate bundle (both the separable and the TV variant).
struct VampState {
  std::vector<double> x;  ///< p
  std::vector<double> z;  ///< r
  std::vector<double> u;  ///< r, dual
  double rho = 1.0;
  double sigma_x = 0.5;
  double sigma_z = 0.5;
  double gamma = 0.6;
  bool adapt_variances = true;
  bool diverged = false;
};

struct AmpState {
  std::vector<double> x;  ///< p
  std::vector<double> z;  ///< n, residual
  double sigma = 1.0;
  double alpha = 1.0;  ///< n/p
  bool diverged = false;
};

/// ADMM / PRS iterate bundle; rho stays fixed across iterations.
struct SplitState {
  std::vector<double> x;  ///< p
  std::vector<double> z;  ///< r
  std::vector<double> u;  ///< r, dual
  double rho = 1.0;
  double gamma = 1.0;  ///< PRS dual relaxation; unused by ADMM
};

struct IstaState {
  std::vector<double> x;
  double lipschitz = 1.0;
};

VampState init_vamp(const Problem& prob, const SolverOptions& opts);
AmpState init_amp(const Problem& prob, const SolverOptions& opts);
SplitState init_admm(const Problem& prob, const SolverOptions& opts);
SplitState init_prs(const Problem& prob, const SolverOptions& opts);
/// Times the power iteration for the stepsize into *power_seconds if given.
IstaState init_ista(const Problem& prob, double* power_seconds = nullptr);

void ista_step(IstaState& st, const Problem& prob);
void amp_step(AmpState& st, const Problem& prob);
void vamp_sep_step(VampState& st, const Problem& prob, const Precomputation& pre);
void vamp_tv_step(VampState& st, const Problem& prob, const Precomputation& pre);
void vamp_step(VampState& st, const Problem& prob, const Precomputation& pre);
void admm_step(SplitState& st, const Problem& prob, const Precomputation& pre);
void prs_step(SplitState& st, const Problem& prob, const Precomputation& pre);

/// Largest eigenvalue of A^T A by power iteration (100 iterations max,
/// 1e-6 relative tolerance), inflated by 0.1% so 1/L is a safe ISTA step.
double lipschitz_estimate(const DenseMap& a);

/// Run one solver under a budget, recording one trace row per iteration
/// (row 0 is the initial point). Deterministic apart from the seconds
/// column. A divergence signal ends the run and is recorded in the trace
/// status, never thrown.
Trace run(const Problem& prob, SolverKind kind, const SolverOptions& opts, const Budget& budget,
          const Precomputation* shared_pre = nullptr);

}  // namespace proxflow
