#pragma once

#include <span>
#include <vector>

namespace proxflow {

/// Output of a proximal map together with the averaged diagonal of its
/// Jacobian (1-Lipschitz and monotone, so the average lies in [0, 1]).
struct ProxResult {
  std::vector<double> value;
  double avg_derivative = 0.0;
};

/// Elementwise (1 - theta/|v_i|)_+ v_i. avg_derivative is the fraction of
/// entries strictly above the threshold; entries with |v_i| == theta map to
/// zero and count as inactive.
ProxResult soft_threshold(std::span<const double> v, double theta);

/// Per group g of group_dim consecutive entries: (1 - theta/||v_g||)_+ v_g.
/// avg_derivative is the Jacobian-trace average over all components,
/// including the curvature term theta*v_i^2/||v_g||^3 of active groups;
/// inactive groups contribute zero.
ProxResult group_soft_threshold(std::span<const double> v, double theta, int group_dim);

enum class PenaltyFn { Abs, GroupL2 };

/// min_x { weight*f(x) + 1/2 ||x - v||^2 } evaluated in closed form through
/// the corresponding prox; its gradient in v is v - prox(v).
double moreau_envelope(PenaltyFn f, std::span<const double> v, double weight);

}  // namespace proxflow
