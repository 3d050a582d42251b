#include "flmc/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flmc/errors.hpp"

namespace flmc {

namespace {

DeltaEstimate make_estimate(std::size_t exceed, std::size_t n) {
  DeltaEstimate e;
  e.n_samples = n;
  e.delta = static_cast<double>(exceed) / static_cast<double>(n);
  e.std_error = std::sqrt(e.delta * (1.0 - e.delta) / static_cast<double>(n));
  return e;
}

// ln[(p e^t + q) / (q e^t + p)], q = 1 - p, written so that neither branch overflows.
double log_ratio_term(double t, double p, double q) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return std::log(p + q * e) - std::log(q + p * e);
  }
  const double e = std::exp(t);
  return std::log(p * e + q) - std::log(q * e + p);
}

void check_params(const DigitalLossParams& p) {
  if (p.a_gain < 0.0) throw ConfigError("privacy: power gain must be >= 0");
  if (p.k_devices < 1) throw ConfigError("privacy: k_devices must be >= 1");
  if (p.m < 1) throw ConfigError("privacy: m must be >= 1");
  if (!(p.n0 > 0.0)) throw ConfigError("privacy: n0 must be > 0");
  if (!(p.ell > 0.0)) throw ConfigError("privacy: ell must be > 0");
}

}  // namespace

void PrivacyBudget::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("privacy.epsilon must be > 0");
  if (!(delta >= 0.0 && delta < 1.0)) throw ConfigError("privacy.delta must lie in [0, 1)");
}

NoiseBank NoiseBank::draw(int m, std::size_t n_samples, RandomStream& rng) {
  NoiseBank bank;
  bank.standard.resize(m, static_cast<Eigen::Index>(n_samples));
  for (Eigen::Index j = 0; j < bank.standard.cols(); ++j) {
    for (int i = 0; i < m; ++i) bank.standard(i, j) = rng.normal();
  }
  return bank;
}

double digital_loss_cap(const DigitalLossParams& p) {
  return static_cast<double>(p.m) * log_odds(p.ell, p.qspec);
}

double digital_loss_from_noise(const DigitalLossParams& p, std::span<const double> standard_noise) {
  check_params(p);
  if (static_cast<int>(standard_noise.size()) != p.m) {
    throw ConfigError("digital loss: noise length must equal m");
  }
  const double hi = phi(p.ell, p.qspec);
  const double lo = phi(-p.ell, p.qspec);
  const double term_cap = log_odds(p.ell, p.qspec);
  const double sd = std::sqrt(p.n0);
  const double offset = p.a_gain * static_cast<double>(p.k_devices - 1);

  double plus = 0.0;
  double minus = 0.0;
  for (int i = 0; i < p.m; ++i) {
    const double z = sd * standard_noise[i];
    const double t_plus = 2.0 * p.a_gain * (z + offset) / p.n0;
    const double t_minus = 2.0 * p.a_gain * (z - offset) / p.n0;
    // Each term is bounded by the log-odds at ell; clamp away rounding overshoot.
    plus += std::clamp(log_ratio_term(t_plus, hi, lo), -term_cap, term_cap);
    minus += std::clamp(log_ratio_term(t_minus, hi, lo), -term_cap, term_cap);
  }
  return std::max(std::abs(plus), std::abs(minus));
}

double digital_loss_sample(const DigitalLossParams& p, RandomStream& rng) {
  std::vector<double> xi(static_cast<std::size_t>(std::max(p.m, 0)));
  for (auto& v : xi) v = rng.normal();
  return digital_loss_from_noise(p, xi);
}

LossSampleSet sample_digital_loss(const DigitalLossParams& p, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw ConfigError("privacy: n_samples must be >= 1");
  RandomStream rng(seed);
  LossSampleSet set{{}, p, seed};
  set.samples.reserve(n_samples);
  for (std::size_t j = 0; j < n_samples; ++j) set.samples.push_back(digital_loss_sample(p, rng));
  return set;
}

DeltaEstimate estimate_delta_digital(const DigitalLossParams& p, const PrivacyBudget& budget,
                                     std::size_t n_mc, RandomStream& rng) {
  if (n_mc < 1) throw ConfigError("privacy: n_mc must be >= 1");
  std::size_t exceed = 0;
  for (std::size_t j = 0; j < n_mc; ++j) {
    if (digital_loss_sample(p, rng) > budget.epsilon) ++exceed;
  }
  return make_estimate(exceed, n_mc);
}

DeltaEstimate estimate_delta_digital(const DigitalLossParams& p, const PrivacyBudget& budget,
                                     const NoiseBank& noise) {
  if (noise.size() < 1) throw ConfigError("privacy: noise bank is empty");
  if (noise.standard.rows() != p.m) throw ConfigError("privacy: noise bank rows must equal m");
  std::size_t exceed = 0;
  for (Eigen::Index j = 0; j < noise.standard.cols(); ++j) {
    const double* col = noise.standard.col(j).data();
    if (digital_loss_from_noise(p, {col, static_cast<std::size_t>(p.m)}) > budget.epsilon) ++exceed;
  }
  return make_estimate(exceed, noise.size());
}

double analog_loss_mean(double a_gain, int m, double n0, double ell) {
  return 2.0 * m * a_gain * a_gain * ell * ell / n0;
}

double analog_T(double x, double epsilon, TMode mode) {
  if (!(x > 0.0)) throw DomainError("analog_T: x must be > 0, got " + std::to_string(x));
  const double root = 2.0 * std::sqrt(x);
  const double upper = (epsilon - x) / root;
  const double lower = (-epsilon - x) / root;
  // lower < 0 always; when upper < 0 too, the erf difference cancels, so use erfc tails.
  const double diff = upper >= 0.0 ? std::erf(upper) - std::erf(lower)
                                   : std::erfc(-upper) - std::erfc(-lower);
  return mode == TMode::paper ? diff : 0.5 * diff;
}

double analog_T_supremum(TMode mode) { return mode == TMode::paper ? 2.0 : 1.0; }

double analog_T_inverse(double p, double epsilon, TMode mode, double tol) {
  if (!(epsilon > 0.0)) throw DomainError("analog_T_inverse: epsilon must be > 0");
  if (!(p > 0.0 && p < analog_T_supremum(mode))) {
    throw InfeasibleError("analog_T_inverse: target " + std::to_string(p) +
                          " outside the attained range of T");
  }
  double lo = 1e-12;
  if (analog_T(lo, epsilon, mode) < p) {
    throw InfeasibleError("analog_T_inverse: target " + std::to_string(p) +
                          " not attained on the bracket start");
  }
  double hi = 1.0;
  for (int i = 0; analog_T(hi, epsilon, mode) >= p; ++i) {
    if (i > 1100) throw InfeasibleError("analog_T_inverse: no upper bracket found");
    lo = hi;
    hi *= 2.0;
  }
  // Invariant: T(lo) >= p > T(hi). Bisect to machine resolution.
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (analog_T(mid, epsilon, mode) >= p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double x = std::abs(analog_T(lo, epsilon, mode) - p) <= std::abs(analog_T(hi, epsilon, mode) - p)
                       ? lo
                       : hi;
  if (std::abs(analog_T(x, epsilon, mode) - p) > tol) {
    throw InfeasibleError("analog_T_inverse: could not reach tolerance for target " + std::to_string(p));
  }
  return x;
}

DeltaEstimate analog_delta_mc(double a_gain, int m, double n0, double ell, double epsilon,
                              std::size_t n_mc, RandomStream& rng) {
  if (n_mc < 1) throw ConfigError("privacy: n_mc must be >= 1");
  if (!(n0 > 0.0)) throw ConfigError("privacy: n0 must be > 0");
  const double ad = a_gain * 2.0 * ell;
  const double sd = std::sqrt(n0);
  std::size_t exceed = 0;
  for (std::size_t j = 0; j < n_mc; ++j) {
    double loss = 0.0;
    for (int i = 0; i < m; ++i) {
      const double z = sd * rng.normal();
      loss += (2.0 * z * ad + ad * ad) / (2.0 * n0);
    }
    if (std::abs(loss) > epsilon) ++exceed;
  }
  return make_estimate(exceed, n_mc);
}

}  // namespace flmc
