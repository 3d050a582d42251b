#pragma once

#include <Eigen/Core>

#include "flmc/random.hpp"

namespace flmc {

enum class QuantizerFamily { sigmoid };

struct QuantizerSpec {
  double a = 0.05;
  QuantizerFamily family = QuantizerFamily::sigmoid;
};

/// Probability that an entry of value x is sent as +1. For the sigmoid family
/// this is 1 / (1 + exp(-a x)), evaluated on the branch that keeps both tails accurate.
double phi(double x, const QuantizerSpec& spec);

/// ln(phi(x) / phi(-x)) in closed form; equals a x for the sigmoid family.
double log_odds(double x, const QuantizerSpec& spec);

/// One-bit stochastic quantizer: entry i becomes +1 with probability phi(g_i),
/// -1 otherwise. Consumes exactly one uniform draw per entry, in entry order.
Eigen::VectorXd quantize(const Eigen::VectorXd& g, const QuantizerSpec& spec, RandomStream& rng);

}  // namespace flmc
