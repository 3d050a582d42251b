#include "flmc/model.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "flmc/errors.hpp"

namespace flmc {

VectorXd default_theta_star() {
  VectorXd t(5);
  t << 0.418, -0.289, 0.3982, 0.8231, 0.5251;
  return t;
}

std::vector<int> ModelSpec::resolved_partition() const {
  if (!partition_sizes.empty()) return partition_sizes;
  std::vector<int> sizes(static_cast<std::size_t>(std::max(k_devices, 0)), 0);
  for (int k = 0; k < k_devices; ++k) {
    sizes[k] = n_total / k_devices + (k < n_total % k_devices ? 1 : 0);
  }
  return sizes;
}

void ModelSpec::validate() const {
  if (m < 1) throw ConfigError("model.m must be >= 1");
  if (k_devices < 1) throw ConfigError("model.k_devices must be >= 1");
  if (n_total < 0) throw ConfigError("model.n_total must be >= 0");
  if (theta_star.size() != m) {
    throw ConfigError("model.theta_star length " + std::to_string(theta_star.size()) +
                      " does not match model.m = " + std::to_string(m));
  }
  if (!partition_sizes.empty()) {
    if (static_cast<int>(partition_sizes.size()) != k_devices) {
      throw ConfigError("model.partition_sizes must have k_devices entries");
    }
    if (std::any_of(partition_sizes.begin(), partition_sizes.end(), [](int s) { return s < 0; })) {
      throw ConfigError("model.partition_sizes entries must be >= 0");
    }
    if (std::accumulate(partition_sizes.begin(), partition_sizes.end(), 0) != n_total) {
      throw ConfigError("model.partition_sizes must sum to model.n_total");
    }
  }
}

int Dataset::owner(Eigen::Index n) const {
  auto it = std::upper_bound(offsets.begin(), offsets.end(), n);
  return static_cast<int>(it - offsets.begin()) - 1;
}

Dataset generate_dataset(const ModelSpec& spec, RandomStream& rng) {
  spec.validate();
  Dataset data;
  data.inputs.resize(spec.m, spec.n_total);
  data.labels.resize(spec.n_total);
  for (int n = 0; n < spec.n_total; ++n) {
    for (int i = 0; i < spec.m; ++i) data.inputs(i, n) = rng.normal();
    data.labels(n) = spec.theta_star.dot(data.inputs.col(n)) + rng.normal();
  }
  const auto sizes = spec.resolved_partition();
  data.offsets.assign(1, 0);
  for (int s : sizes) data.offsets.push_back(data.offsets.back() + s);
  return data;
}

GaussianDist exact_posterior(const Dataset& data) {
  const int m = data.dimension();
  MatrixXd precision = MatrixXd::Identity(m, m);
  precision.selfadjointView<Eigen::Lower>().rankUpdate(data.inputs);
  precision.triangularView<Eigen::StrictlyUpper>() = precision.transpose();

  const Eigen::LLT<MatrixXd> llt(precision);
  GaussianDist post;
  post.mean = llt.solve(data.inputs * data.labels);
  post.cov = llt.solve(MatrixXd::Identity(m, m));
  post.cov = 0.5 * (post.cov + post.cov.transpose()).eval();
  return post;
}

VectorXd local_gradient(const VectorXd& theta, const Dataset& data, int device, int k_devices) {
  if (device < 0 || device >= data.device_count()) {
    throw ConfigError("device index " + std::to_string(device) + " out of range [0, " +
                      std::to_string(data.device_count()) + ")");
  }
  if (k_devices < 1) throw ConfigError("k_devices must be >= 1");
  if (theta.size() != data.dimension()) throw ConfigError("theta length does not match data dimension");

  const auto u = data.device_inputs(device);
  const VectorXd residual = u.transpose() * theta - data.device_labels(device);
  return u * residual + theta / static_cast<double>(k_devices);
}

VectorXd clip_gradient(const VectorXd& g, GradientBound bound) {
  VectorXd out(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double mag = std::abs(g(i));
    out(i) = mag > bound.ell ? std::copysign(bound.ell, g(i)) : g(i);
  }
  return out;
}

}  // namespace flmc
