#pragma once

#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "proxflow/operators.hpp"

namespace proxflow {

struct SeparableL1 {};

struct TvPenalty {
  GridShape grid;
};

using Penalty = std::variant<SeparableL1, TvPenalty>;

/// Immutable description of the objective
///   1/2 ||y - A x||^2 + lambda sum_k f((K x)_k)
/// with f = |.| and K = I for the separable penalty, or f = ||.||_2 over
/// per-site gradient groups and K = grad for the TV penalty.
class Problem {
 public:
  Problem(std::vector<double> y, std::shared_ptr<const DenseMap> A, double lambda, Penalty penalty);

  std::size_t n() const { return y_.size(); }
  std::size_t p() const { return A_->cols(); }
  /// Length of the split variable z = K x (p when separable, d*p for TV).
  std::size_t r() const;

  const std::vector<double>& y() const { return y_; }
  const DenseMap& A() const { return *A_; }
  std::shared_ptr<const DenseMap> A_ptr() const { return A_; }
  double lambda() const { return lambda_; }
  const Penalty& penalty() const { return penalty_; }

  bool is_tv() const { return std::holds_alternative<TvPenalty>(penalty_); }
  const GridShape& grid() const;
  /// Gradient group size (d for TV, 1 for separable).
  int group_dim() const { return is_tv() ? grid().ndim() : 1; }

  void apply_k(std::span<const double> x, std::span<double> out) const;
  void apply_kt(std::span<const double> g, std::span<double> out) const;
  std::vector<double> apply_k(std::span<const double> x) const;
  std::vector<double> apply_kt(std::span<const double> g) const;

 private:
  std::vector<double> y_;
  std::shared_ptr<const DenseMap> A_;
  double lambda_;
  Penalty penalty_;
  std::optional<GradientOperator> grad_;
};

double objective(const Problem& prob, std::span<const double> x);

/// Norm of the minimal element of A^T(Ax - y) + lambda K^T df(Kx) over the
/// (slightly relaxed) subdifferential: clearly active groups contribute their
/// exact gradient, near-zero groups are free within the unit ball. Zero at an
/// exact optimum; for TV the ball-constrained least-squares over the free
/// groups is solved by projected FISTA.
double kkt_residual(const Problem& prob, std::span<const double> x);

}  // namespace proxflow
