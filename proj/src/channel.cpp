#include "flmc/channel.hpp"

#include <cmath>
#include <string>

#include "flmc/errors.hpp"

namespace flmc {

ChannelConfig ChannelConfig::from_snr_db(double h, double n0, double snr_db, int m) {
  ChannelConfig cfg;
  cfg.h = h;
  cfg.n0 = n0;
  cfg.p0 = n0 * std::pow(10.0, snr_db / 10.0);
  cfg.m = m;
  return cfg;
}

double ChannelConfig::snr_db() const { return 10.0 * std::log10(p0 / n0); }

double ChannelConfig::gain(int k, int i) const {
  return device_gains.size() == 0 ? h : device_gains(k, i);
}

void ChannelConfig::validate() const {
  if (!(n0 > 0.0)) throw ConfigError("channel.n0 must be > 0");
  if (!(p0 > 0.0)) throw ConfigError("channel.p0 must be > 0");
  if (m < 1) throw ConfigError("channel.m must be >= 1");
  if (device_gains.size() == 0) {
    if (h == 0.0 || !std::isfinite(h)) throw SingularGainError("channel.h must be finite and nonzero");
    return;
  }
  if (device_gains.cols() != m) throw ConfigError("channel.device_gains must have m columns");
  if ((device_gains.array() == 0.0).any()) {
    throw SingularGainError("channel.device_gains contains a zero gain");
  }
}

Channel::Channel(ChannelConfig cfg, NoiseMode mode) : cfg_(std::move(cfg)), mode_(mode) {
  cfg_.validate();
}

VectorXd Channel::superpose(const std::vector<VectorXd>& blocks, const PowerGains& gains,
                            RandomStream& rng) const {
  const int m = cfg_.m;
  if (gains.a.size() != m) {
    throw ConfigError("power gain length " + std::to_string(gains.a.size()) +
                      " does not match block length " + std::to_string(m));
  }
  if (cfg_.device_gains.size() != 0 &&
      cfg_.device_gains.rows() != static_cast<Eigen::Index>(blocks.size())) {
    throw ConfigError("channel.device_gains rows do not match the number of transmitting devices");
  }
  VectorXd sum = VectorXd::Zero(m);
  for (const auto& x : blocks) {
    if (x.size() != m) throw ConfigError("device block length does not match channel block length");
    sum += x;
  }
  // Channel inversion: h_{k,i} * (A_i / h_{k,i}) = A_i for every device.
  VectorXd y = gains.a.cwiseProduct(sum);
  if (mode_ == NoiseMode::awgn) {
    const double sd = std::sqrt(cfg_.n0);
    for (int i = 0; i < m; ++i) y(i) += sd * rng.normal();
  }
  return y;
}

VectorXd Channel::transmit_digital(const std::vector<VectorXd>& symbols, const PowerGains& gains,
                                   RandomStream& rng) const {
  for (const auto& x : symbols) {
    if (((x.array() != 1.0) && (x.array() != -1.0)).any()) {
      throw ContractError("digital symbols must be +1 or -1");
    }
  }
  return superpose(symbols, gains, rng);
}

VectorXd Channel::transmit_analog(const std::vector<VectorXd>& clipped_gradients,
                                  const PowerGains& gains, double ell, RandomStream& rng) const {
  for (const auto& g : clipped_gradients) {
    if (g.size() > 0 && g.cwiseAbs().maxCoeff() > ell + 1e-9) {
      throw ContractError("analog input exceeds the clipping bound " + std::to_string(ell));
    }
  }
  return superpose(clipped_gradients, gains, rng);
}

VectorXd server_update(const VectorXd& theta, const VectorXd& y, const PowerGains& gains, double eta) {
  if (theta.size() != y.size() || gains.a.size() != y.size()) {
    throw ConfigError("server_update: theta, y and gains must have equal length");
  }
  if ((gains.a.array() <= 0.0).any()) throw SingularGainError("server_update: power gains must be > 0");
  return theta - eta * y.cwiseQuotient(gains.a);
}

bool check_power_constraint(const VectorXd& x, const PowerGains& gains, const ChannelConfig& cfg,
                            int device) {
  if (x.size() != gains.a.size()) throw ConfigError("check_power_constraint: length mismatch");
  double power = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double tx = gains.a(i) * x(i) / cfg.gain(device, static_cast<int>(i));
    power += tx * tx;
  }
  power /= static_cast<double>(x.size());
  return power <= cfg.p0 * (1.0 + 1e-9);
}

}  // namespace flmc
