#include "flmc/quantizer.hpp"

#include <cmath>

#include "flmc/errors.hpp"

namespace flmc {

double phi(double x, const QuantizerSpec& spec) {
  if (!(spec.a > 0.0)) throw ConfigError("quantizer.a must be > 0");
  const double t = spec.a * x;
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double log_odds(double x, const QuantizerSpec& spec) {
  if (!(spec.a > 0.0)) throw ConfigError("quantizer.a must be > 0");
  return spec.a * x;
}

Eigen::VectorXd quantize(const Eigen::VectorXd& g, const QuantizerSpec& spec, RandomStream& rng) {
  Eigen::VectorXd out(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    out(i) = rng.uniform() < phi(g(i), spec) ? 1.0 : -1.0;
  }
  return out;
}

}  // namespace flmc
