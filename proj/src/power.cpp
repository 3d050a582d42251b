#include "flmc/power.hpp"

#include <cmath>
#include <limits>

#include "flmc/errors.hpp"

namespace flmc {

void PowerSolverConfig::validate() const {
  if (n_mc < 1000) throw ConfigError("solver.n_mc must be >= 1000");
  if (!(bisection_tol > 0.0)) throw ConfigError("solver.bisection_tol must be > 0");
  if (max_iters < 1) throw ConfigError("solver.max_iters must be >= 1");
}

std::string_view to_string(BindingConstraint b) {
  switch (b) {
    case BindingConstraint::power:
      return "power";
    case BindingConstraint::lmc_noise:
      return "lmc-noise";
    case BindingConstraint::privacy:
      return "privacy";
  }
  return "unknown";
}

double lmc_noise_cap(double eta, double n0) {
  if (!(eta > 0.0) || !(n0 > 0.0)) throw ConfigError("lmc_noise_cap: eta and n0 must be > 0");
  return std::sqrt(eta * n0 / 2.0);
}

double digital_power_cap(double h, double p0) {
  if (h == 0.0) throw SingularGainError("digital_power_cap: channel gain is zero");
  if (!(p0 > 0.0)) throw ConfigError("digital_power_cap: p0 must be > 0");
  return std::abs(h) * std::sqrt(p0);
}

double analog_power_cap(double h, double p0, double ell) {
  if (!(ell > 0.0)) throw ConfigError("analog_power_cap: ell must be > 0");
  return digital_power_cap(h, p0) / ell;
}

namespace {

// Deterministic part of the solution: the smaller of the two caps and its name.
GainSolution deterministic_cap(double power_cap, double noise_cap) {
  GainSolution s;
  if (power_cap <= noise_cap) {
    s.gain = power_cap;
    s.binding = BindingConstraint::power;
  } else {
    s.gain = noise_cap;
    s.binding = BindingConstraint::lmc_noise;
  }
  return s;
}

}  // namespace

GainSolution solve_digital_gain(const ChannelConfig& cfg, double eta, int k_devices, int m, double ell,
                                const QuantizerSpec& qspec, const PrivacyBudget& budget,
                                const PowerSolverConfig& solver, RandomStream& rng) {
  cfg.validate();
  budget.validate();
  solver.validate();
  GainSolution sol = deterministic_cap(digital_power_cap(cfg.h, cfg.p0), lmc_noise_cap(eta, cfg.n0));

  DigitalLossParams params{sol.gain, k_devices, m, cfg.n0, ell, qspec};
  // Losses never exceed the cap, so the privacy constraint cannot bind.
  if (budget.epsilon >= digital_loss_cap(params)) {
    sol.delta_hat = {0.0, 0.0, 0};
    return sol;
  }

  const NoiseBank bank = NoiseBank::draw(m, solver.n_mc, rng);
  sol.delta_hat = estimate_delta_digital(params, budget, bank);
  if (sol.delta_hat.delta <= budget.delta) return sol;

  // Invariant: lo is feasible (delta_hat(0) = 0), hi is not.
  double lo = 0.0;
  double hi = sol.gain;
  DeltaEstimate lo_est{0.0, 0.0, bank.size()};
  for (int it = 0; it < solver.max_iters && hi - lo > solver.bisection_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    params.a_gain = mid;
    const DeltaEstimate est = estimate_delta_digital(params, budget, bank);
    if (est.delta <= budget.delta) {
      lo = mid;
      lo_est = est;
    } else {
      hi = mid;
    }
  }
  sol.gain = lo;
  sol.binding = BindingConstraint::privacy;
  sol.delta_hat = lo_est;
  sol.starved = lo < solver.bisection_tol;
  return sol;
}

GainSolution solve_analog_gain(const ChannelConfig& cfg, double eta, int m, double ell,
                               const PrivacyBudget& budget, TMode mode) {
  cfg.validate();
  budget.validate();
  if (m < 1) throw ConfigError("solve_analog_gain: m must be >= 1");
  GainSolution sol = deterministic_cap(analog_power_cap(cfg.h, cfg.p0, ell), lmc_noise_cap(eta, cfg.n0));

  // T decreases to 0, so as delta -> 1 the privacy term grows without bound.
  const double target = 1.0 - budget.delta;
  const double privacy_cap =
      target <= 0.0 ? std::numeric_limits<double>::infinity()
                    : std::sqrt(cfg.n0 * analog_T_inverse(target, budget.epsilon, mode) / (2.0 * m * ell * ell));
  if (privacy_cap < sol.gain) {
    sol.gain = privacy_cap;
    sol.binding = BindingConstraint::privacy;
  }
  return sol;
}

}  // namespace flmc
