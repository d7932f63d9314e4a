#include "proxflow/prox.hpp"

#include <cmath>

#include "proxflow/errors.hpp"
#include "proxflow/kernels.hpp"

namespace proxflow {

ProxResult soft_threshold(std::span<const double> v, double theta) {
  if (theta < 0) throw ParameterError("soft_threshold: negative threshold");
  ProxResult res;
  res.value.resize(v.size());
  kernels::soft_threshold(v.size(), v.data(), theta, res.value.data());
  if (v.empty()) return res;
  if (theta == 0.0) {
    res.avg_derivative = 1.0;
    return res;
  }
  std::size_t active = 0;
  for (double x : v)
    if (std::fabs(x) > theta) ++active;
  res.avg_derivative = static_cast<double>(active) / static_cast<double>(v.size());
  return res;
}

ProxResult group_soft_threshold(std::span<const double> v, double theta, int group_dim) {
  if (theta < 0) throw ParameterError("group_soft_threshold: negative threshold");
  if (group_dim < 1 || v.size() % static_cast<std::size_t>(group_dim) != 0)
    throw DimensionError("group_soft_threshold: length not a multiple of the group size");
  const std::size_t groups = v.size() / group_dim;
  ProxResult res;
  res.value.resize(v.size());
  kernels::group_soft_threshold(groups, group_dim, v.data(), theta, res.value.data());
  if (v.empty()) return res;
  if (theta == 0.0) {
    res.avg_derivative = 1.0;
    return res;
  }
  // Trace of the group Jacobian: active groups contribute
  // sum_i [1 - theta/||v|| + theta v_i^2/||v||^3] = d - (d-1) theta/||v||.
  double trace = 0;
  const double d = static_cast<double>(group_dim);
  for (std::size_t g = 0; g < groups; ++g) {
    const double n2 = kernels::nrm2_squared(group_dim, v.data() + g * group_dim);
    const double nrm = std::sqrt(n2);
    if (nrm > theta) trace += d - (d - 1.0) * theta / nrm;
  }
  res.avg_derivative = trace / static_cast<double>(v.size());
  return res;
}

double moreau_envelope(PenaltyFn f, std::span<const double> v, double weight) {
  if (weight <= 0) throw ParameterError("moreau_envelope: weight must be positive");
  ProxResult p;
  double fval = 0;
  switch (f) {
    case PenaltyFn::Abs: {
      p = soft_threshold(v, weight);
      for (double x : p.value) fval += std::fabs(x);
      break;
    }
    case PenaltyFn::GroupL2: {
      p = group_soft_threshold(v, weight, static_cast<int>(v.size()));
      fval = std::sqrt(kernels::nrm2_squared(p.value.size(), p.value.data()));
      break;
    }
    default:
      throw ParameterError("moreau_envelope: unknown penalty function");
  }
  double dist2 = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = p.value[i] - v[i];
    dist2 += d * d;
  }
  return weight * fval + 0.5 * dist2;
}

}  // namespace proxflow
