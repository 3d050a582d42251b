#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "flmc/quantizer.hpp"
#include "flmc/random.hpp"

namespace flmc {

struct PrivacyBudget {
  double epsilon = 5.0;
  double delta = 0.01;

  void validate() const;
};

/// Monte Carlo estimate of Pr(|L| > epsilon) with its binomial standard error.
struct DeltaEstimate {
  double delta = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
};

/// Worst-case digital privacy loss setting for one device at one round.
struct DigitalLossParams {
  double a_gain = 0.0;
  int k_devices = 20;
  int m = 5;
  double n0 = 1.0;
  double ell = 30.0;
  QuantizerSpec qspec;
};

/// Worst-case loss magnitudes |L*| together with the setting that produced them.
struct LossSampleSet {
  std::vector<double> samples;
  DigitalLossParams params;
  std::uint64_t seed = 0;
};

/// Frozen standard-normal draws (m x n_samples) reused across candidate gains,
/// so that estimates for different gains share the same noise realisation.
struct NoiseBank {
  Eigen::MatrixXd standard;

  static NoiseBank draw(int m, std::size_t n_samples, RandomStream& rng);
  std::size_t size() const { return static_cast<std::size_t>(standard.cols()); }
};

/// Upper bound on every digital loss sample: m ln(Phi(ell) / Phi(-ell)).
double digital_loss_cap(const DigitalLossParams& p);

/// |L*| for standard-normal draws xi (z_i = sqrt(N0) xi_i). Both interferer
/// offsets +A(K-1) and -A(K-1) are evaluated and the larger magnitude returned.
double digital_loss_from_noise(const DigitalLossParams& p, std::span<const double> standard_noise);

/// Draws z ~ N(0, N0 I_m) and evaluates the worst-case loss.
double digital_loss_sample(const DigitalLossParams& p, RandomStream& rng);

LossSampleSet sample_digital_loss(const DigitalLossParams& p, std::size_t n_samples, std::uint64_t seed);

DeltaEstimate estimate_delta_digital(const DigitalLossParams& p, const PrivacyBudget& budget,
                                     std::size_t n_mc, RandomStream& rng);
DeltaEstimate estimate_delta_digital(const DigitalLossParams& p, const PrivacyBudget& budget,
                                     const NoiseBank& noise);

enum class TMode {
  /// erf(.) - erf(.) exactly as printed; takes values in (0, 2).
  paper,
  /// Half of the paper form: the exact probability Pr(-eps <= L <= eps); values in (0, 1).
  corrected,
};

/// Mean of the Gaussian analog privacy loss at worst-case sensitivity 2 ell: 2 m A^2 ell^2 / N0.
double analog_loss_mean(double a_gain, int m, double n0, double ell);

/// T(x) = erf((eps - x) / (2 sqrt x)) - erf((-eps - x) / (2 sqrt x)), halved in corrected mode.
double analog_T(double x, double epsilon, TMode mode);

/// Largest value analog_T approaches as x -> 0+.
double analog_T_supremum(TMode mode);

/// Solves analog_T(x) = p by bisection on the decreasing branch.
/// Throws InfeasibleError when p lies outside (0, analog_T_supremum(mode)).
double analog_T_inverse(double p, double epsilon, TMode mode, double tol = 1e-10);

/// Pr(|L| > eps) by simulation of L = sum_i (2 z_i A D + (A D)^2) / (2 N0), D = 2 ell.
DeltaEstimate analog_delta_mc(double a_gain, int m, double n0, double ell, double epsilon,
                              std::size_t n_mc, RandomStream& rng);

}  // namespace flmc
