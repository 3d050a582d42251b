#pragma once

#include <Eigen/Core>
#include <vector>

#include "flmc/random.hpp"

namespace flmc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Ground-truth coefficients used by the synthetic regression experiments.
VectorXd default_theta_star();

/// Shape of the synthetic Bayesian linear regression problem.
struct ModelSpec {
  int m = 5;
  VectorXd theta_star = default_theta_star();
  int n_total = 1200;
  int k_devices = 20;
  /// Samples held by each device; empty means an even split of n_total.
  std::vector<int> partition_sizes;

  /// Partition actually used: partition_sizes, or the even split when unset.
  std::vector<int> resolved_partition() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Columns of `inputs` are the u_n; device k owns the contiguous column range
/// [offsets[k], offsets[k+1]).
struct Dataset {
  MatrixXd inputs;
  VectorXd labels;
  std::vector<Eigen::Index> offsets;

  int dimension() const { return static_cast<int>(inputs.rows()); }
  Eigen::Index size() const { return inputs.cols(); }
  int device_count() const { return static_cast<int>(offsets.size()) - 1; }
  /// Owning device (0-based) of column n.
  int owner(Eigen::Index n) const;

  auto device_inputs(int k) const {
    return inputs.middleCols(offsets[k], offsets[k + 1] - offsets[k]);
  }
  auto device_labels(int k) const {
    return labels.segment(offsets[k], offsets[k + 1] - offsets[k]);
  }
};

struct GaussianDist {
  VectorXd mean;
  MatrixXd cov;
};

struct GradientBound {
  double ell = 30.0;
};

/// u_n ~ N(0, I_m), v_n = theta*^T u_n + w_n with w_n ~ N(0, 1).
Dataset generate_dataset(const ModelSpec& spec, RandomStream& rng);

/// Posterior N((UU^T + I)^{-1} U v, (UU^T + I)^{-1}) under the N(0, I) prior.
GaussianDist exact_posterior(const Dataset& data);

/// Gradient of the device-local cost -log p(D_k | theta) - (1/K) log p(theta):
/// sum over the device's samples of (theta^T u - v) u, plus theta / K.
VectorXd local_gradient(const VectorXd& theta, const Dataset& data, int device, int k_devices);

/// Entrywise min{1, ell / |g_i|} g_i.
VectorXd clip_gradient(const VectorXd& g, GradientBound bound);

}  // namespace flmc
