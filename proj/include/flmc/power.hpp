#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "flmc/channel.hpp"
#include "flmc/privacy.hpp"
#include "flmc/quantizer.hpp"

namespace flmc {

struct PowerSolverConfig {
  std::size_t n_mc = 100000;
  double bisection_tol = 1e-9;
  int max_iters = 60;

  void validate() const;
};

/// Which constraint determines the returned gain.
enum class BindingConstraint { power, lmc_noise, privacy };

std::string_view to_string(BindingConstraint b);

struct GainSolution {
  double gain = 0.0;
  BindingConstraint binding = BindingConstraint::power;
  /// Digital only: privacy estimate at the returned gain on the solver's noise bank.
  DeltaEstimate delta_hat;
  /// Set when the returned gain is below the bisection tolerance.
  bool starved = false;
};

/// sqrt(eta N0 / 2): the largest gain whose channel noise still supplies the 2 eta LMC variance.
double lmc_noise_cap(double eta, double n0);

/// |h| sqrt(P0), the transmit-power limit for +-1 symbols.
double digital_power_cap(double h, double p0);

/// |h| sqrt(P0) / ell, the transmit-power limit for entries bounded by ell.
double analog_power_cap(double h, double p0, double ell);

/// Largest gain below min(power cap, LMC-noise cap) whose estimated privacy
/// failure probability on a frozen noise bank does not exceed budget.delta.
GainSolution solve_digital_gain(const ChannelConfig& cfg, double eta, int k_devices, int m, double ell,
                                const QuantizerSpec& qspec, const PrivacyBudget& budget,
                                const PowerSolverConfig& solver, RandomStream& rng);

/// min{|h| sqrt(P0) / ell, sqrt(eta N0 / 2), sqrt(N0 T^{-1}(1 - delta) / (2 m ell^2))}.
GainSolution solve_analog_gain(const ChannelConfig& cfg, double eta, int m, double ell,
                               const PrivacyBudget& budget, TMode mode);

}  // namespace flmc
