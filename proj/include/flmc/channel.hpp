#pragma once

#include <Eigen/Core>
#include <vector>

#include "flmc/random.hpp"

namespace flmc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// One uplink block of m symbols shared by all devices.
struct ChannelConfig {
  /// Homogeneous channel gain, used when device_gains is empty.
  double h = 0.04;
  /// Optional K x m per-device, per-symbol gains h_{k,i}.
  MatrixXd device_gains;
  double n0 = 1.0;
  double p0 = 316.22776601683796;
  int m = 5;

  /// P0 = N0 * 10^(snr_db / 10).
  static ChannelConfig from_snr_db(double h, double n0, double snr_db, int m);

  double snr_db() const;
  /// Gain of device k on symbol i.
  double gain(int k, int i) const;
  void validate() const;
};

/// Diagonal of the receive-side power gain matrix A, one entry per symbol.
struct PowerGains {
  VectorXd a;

  static PowerGains uniform(int m, double value) { return {VectorXd::Constant(m, value)}; }
};

enum class NoiseMode { awgn, noiseless };

/// Multiple-access uplink with channel-inversion precoding P_k = A H_k^{-1}.
/// The receiver sees y = A sum_k x_k + z with z ~ N(0, N0 I); in noiseless
/// mode z is identically zero and no random draws are consumed.
class Channel {
 public:
  explicit Channel(ChannelConfig cfg, NoiseMode mode = NoiseMode::awgn);

  const ChannelConfig& config() const { return cfg_; }
  NoiseMode noise_mode() const { return mode_; }

  /// Superposition of +-1 symbol blocks from every device.
  VectorXd transmit_digital(const std::vector<VectorXd>& symbols, const PowerGains& gains,
                            RandomStream& rng) const;

  /// Superposition of clipped real-valued gradients; every entry must lie in [-ell, ell].
  VectorXd transmit_analog(const std::vector<VectorXd>& clipped_gradients, const PowerGains& gains,
                           double ell, RandomStream& rng) const;

 private:
  VectorXd superpose(const std::vector<VectorXd>& blocks, const PowerGains& gains,
                     RandomStream& rng) const;

  ChannelConfig cfg_;
  NoiseMode mode_;
};

/// theta - eta * A^{-1} y.
VectorXd server_update(const VectorXd& theta, const VectorXd& y, const PowerGains& gains, double eta);

/// Average per-block power (1/m) sum_i (A_i x_i / h_{k,i})^2 <= P0 for device k.
bool check_power_constraint(const VectorXd& x, const PowerGains& gains, const ChannelConfig& cfg,
                            int device = 0);

}  // namespace flmc
