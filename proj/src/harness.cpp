#include "flmc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "flmc/errors.hpp"

namespace flmc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Replication index reserved for experiment-level streams such as the gain solver.
constexpr std::uint64_t kExperimentStream = ~std::uint64_t{0};

template <class Fn>
void parallel_for(int n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(n, 1)));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (int i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::digital:
      return "digital";
    case Scheme::analog:
      return "analog";
    case Scheme::digital_no_dp:
      return "digital_no_dp";
    case Scheme::analog_no_dp:
      return "analog_no_dp";
    case Scheme::centralized_lmc:
      return "centralized_lmc";
  }
  return "unknown";
}

Scheme scheme_from_string(std::string_view name) {
  for (Scheme s : {Scheme::digital, Scheme::analog, Scheme::digital_no_dp, Scheme::analog_no_dp,
                   Scheme::centralized_lmc}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::none:
      return "none";
    case SweepAxis::snr_db:
      return "snr_db";
    case SweepAxis::epsilon:
      return "epsilon";
    case SweepAxis::a:
      return "a";
  }
  return "unknown";
}

SweepAxis sweep_axis_from_string(std::string_view name) {
  for (SweepAxis a : {SweepAxis::none, SweepAxis::snr_db, SweepAxis::epsilon, SweepAxis::a}) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("unknown sweep axis '" + std::string(name) + "'");
}

ChannelConfig ExperimentConfig::channel() const {
  return ChannelConfig::from_snr_db(h, n0, snr_db, model.m);
}

double ExperimentConfig::eta_for(Scheme s) const {
  switch (s) {
    case Scheme::digital:
    case Scheme::digital_no_dp:
      return eta_digital;
    case Scheme::analog:
    case Scheme::analog_no_dp:
      return eta_analog;
    case Scheme::centralized_lmc:
      return eta_centralized;
  }
  return eta_digital;
}

void ExperimentConfig::validate() const {
  model.validate();
  if (h == 0.0 || !std::isfinite(h)) throw ConfigError("channel.h must be finite and nonzero");
  if (!(n0 > 0.0)) throw ConfigError("channel.n0 must be > 0");
  if (!std::isfinite(snr_db)) throw ConfigError("channel.snr_db must be finite");
  if (!(quantizer.a > 0.0)) throw ConfigError("quantizer.a must be > 0");
  budget.validate();
  if (!(bound.ell > 0.0)) throw ConfigError("privacy.ell must be > 0");
  if (!(eta_digital > 0.0)) throw ConfigError("eta_digital must be > 0");
  if (!(eta_analog > 0.0)) throw ConfigError("eta_analog must be > 0");
  if (!(eta_centralized > 0.0)) throw ConfigError("eta_centralized must be > 0");
  if (s_total < 1) throw ConfigError("s_total must be >= 1");
  if (s_burnin < 0 || s_burnin >= s_total) throw ConfigError("s_burnin must satisfy 0 <= s_burnin < s_total");
  if (replications < 1) throw ConfigError("replications must be >= 1");
  solver.validate();
  for (std::size_t i = 1; i < sweep.grid.size(); ++i) {
    if (!(sweep.grid[i] > sweep.grid[i - 1])) throw ConfigError("sweep.grid must be strictly increasing");
  }
  if (sweep.axis != SweepAxis::none && sweep.schemes.empty()) {
    throw ConfigError("sweep.schemes must not be empty");
  }
}

ChainStreams ChainStreams::for_replication(std::uint64_t seed, std::uint64_t replication) {
  return {RandomStream(seed, replication, StreamId::init),
          RandomStream(seed, replication, StreamId::quantizer),
          RandomStream(seed, replication, StreamId::channel_noise)};
}

GainSolution solve_gain(const ExperimentConfig& cfg) {
  const ChannelConfig channel = cfg.channel();
  const double eta = cfg.eta();
  const double ell = cfg.bound.ell;
  GainSolution sol;
  switch (cfg.scheme) {
    case Scheme::digital: {
      RandomStream rng(cfg.seed, kExperimentStream, StreamId::privacy_mc);
      return solve_digital_gain(channel, eta, cfg.model.k_devices, cfg.model.m, ell, cfg.quantizer,
                                cfg.budget, cfg.solver, rng);
    }
    case Scheme::analog:
      return solve_analog_gain(channel, eta, cfg.model.m, ell, cfg.budget, cfg.t_mode);
    case Scheme::digital_no_dp:
    case Scheme::analog_no_dp: {
      const double power = cfg.scheme == Scheme::digital_no_dp ? digital_power_cap(channel.h, channel.p0)
                                                                : analog_power_cap(channel.h, channel.p0, ell);
      const double noise = lmc_noise_cap(eta, channel.n0);
      sol.gain = std::min(power, noise);
      sol.binding = power <= noise ? BindingConstraint::power : BindingConstraint::lmc_noise;
      return sol;
    }
    case Scheme::centralized_lmc:
      sol.gain = kNaN;
      sol.binding = BindingConstraint::lmc_noise;
      return sol;
  }
  return sol;
}

ChainResult run_chain(const ExperimentConfig& cfg, const Dataset& data, const GaussianDist& posterior,
                      double gain, ChainStreams& streams, NoiseMode noise) {
  const int m = data.dimension();
  const int k_devices = data.device_count();
  const double eta = cfg.eta();
  if (!(eta >= 0.0)) throw ConfigError("eta must be >= 0");
  if (cfg.s_burnin < 0 || cfg.s_burnin >= cfg.s_total) {
    throw ConfigError("s_burnin must satisfy 0 <= s_burnin < s_total");
  }
  if (posterior.mean.size() != m) throw ConfigError("posterior dimension does not match data");

  const bool centralized = cfg.scheme == Scheme::centralized_lmc;
  const bool digital = cfg.scheme == Scheme::digital || cfg.scheme == Scheme::digital_no_dp;
  if (!centralized && !(gain > 0.0)) throw ConfigError("power gain must be > 0");

  ChannelConfig ch = cfg.channel();
  ch.m = m;
  const Channel channel(ch, noise);
  const PowerGains gains = PowerGains::uniform(m, centralized ? 1.0 : gain);

  ChainResult result;
  result.gain_used = centralized ? kNaN : gain;
  result.samples.reserve(static_cast<std::size_t>(cfg.s_total - cfg.s_burnin));
  result.diagnostics.clipped_entries.reserve(static_cast<std::size_t>(cfg.s_total));
  result.diagnostics.noise_energy.reserve(static_cast<std::size_t>(cfg.s_total));

  VectorXd theta(m);
  for (int i = 0; i < m; ++i) theta(i) = streams.init.normal();

  std::vector<VectorXd> blocks(static_cast<std::size_t>(k_devices));
  for (int s = 0; s < cfg.s_total; ++s) {
    int clipped = 0;
    double noise_energy = 0.0;
    if (centralized) {
      VectorXd grad = VectorXd::Zero(m);
      for (int k = 0; k < k_devices; ++k) grad += local_gradient(theta, data, k, k_devices);
      VectorXd xi(m);
      for (int i = 0; i < m; ++i) xi(i) = streams.channel.normal();
      const double scale = std::sqrt(2.0 * eta);
      theta = theta - eta * grad + scale * xi;
      noise_energy = scale * scale * xi.squaredNorm();
    } else {
      VectorXd sum = VectorXd::Zero(m);
      for (int k = 0; k < k_devices; ++k) {
        const VectorXd g = local_gradient(theta, data, k, k_devices);
        clipped += static_cast<int>((g.array().abs() > cfg.bound.ell).count());
        const VectorXd gc = clip_gradient(g, cfg.bound);
        blocks[k] = digital ? quantize(gc, cfg.quantizer, streams.quantizer) : gc;
        sum += blocks[k];
      }
      const VectorXd y = digital ? channel.transmit_digital(blocks, gains, streams.channel)
                                 : channel.transmit_analog(blocks, gains, cfg.bound.ell, streams.channel);
      noise_energy = (y - gains.a.cwiseProduct(sum)).squaredNorm();
      theta = server_update(theta, y, gains, eta);
    }
    if (!theta.allFinite()) {
      throw DivergenceError(static_cast<std::size_t>(s),
                            "chain diverged at round " + std::to_string(s) + " (scheme " +
                                std::string(to_string(cfg.scheme)) + ")");
    }
    result.diagnostics.clipped_entries.push_back(clipped);
    result.diagnostics.noise_energy.push_back(noise_energy);
    if (s >= cfg.s_burnin) result.samples.push_back(theta);
  }
  result.mse = compute_mse(result.samples, posterior.mean);
  return result;
}

double compute_mse(const std::vector<VectorXd>& samples, const VectorXd& mu) {
  if (samples.empty()) throw ContractError("compute_mse: no samples");
  double total = 0.0;
  for (const auto& s : samples) total += (s - mu).squaredNorm();
  return total / static_cast<double>(samples.size());
}

double batch_means_stderr(const std::vector<VectorXd>& samples, int coordinate, int n_batches) {
  const std::size_t batch = samples.size() / static_cast<std::size_t>(std::max(n_batches, 2));
  if (batch < 1) throw ContractError("batch_means_stderr: too few samples for the batch count");
  const int b = static_cast<int>(samples.size() / batch);
  std::vector<double> means(static_cast<std::size_t>(b), 0.0);
  for (int j = 0; j < b; ++j) {
    for (std::size_t t = 0; t < batch; ++t) means[j] += samples[j * batch + t](coordinate);
    means[j] /= static_cast<double>(batch);
  }
  double grand = 0.0;
  for (double v : means) grand += v;
  grand /= b;
  double var = 0.0;
  for (double v : means) var += (v - grand) * (v - grand);
  var /= (b - 1);
  return std::sqrt(var / b);
}

ReplicationSummary run_replications(const ExperimentConfig& cfg, unsigned threads) {
  cfg.validate();
  ReplicationSummary summary;
  summary.gain = solve_gain(cfg);
  summary.replications = cfg.replications;

  std::vector<double> mse(static_cast<std::size_t>(cfg.replications));
  parallel_for(cfg.replications, threads, [&](int r) {
    const std::uint64_t data_rep = cfg.freeze_dataset ? 0 : static_cast<std::uint64_t>(r);
    RandomStream data_rng(cfg.seed, data_rep, StreamId::data);
    const Dataset data = generate_dataset(cfg.model, data_rng);
    const GaussianDist posterior = exact_posterior(data);
    ChainStreams streams = ChainStreams::for_replication(cfg.seed, static_cast<std::uint64_t>(r));
    mse[r] = run_chain(cfg, data, posterior, summary.gain.gain, streams).mse;
  });

  const double n = static_cast<double>(mse.size());
  double mean = 0.0;
  for (double v : mse) mean += v;
  mean /= n;
  summary.mean_mse = mean;
  if (mse.size() > 1) {
    double var = 0.0;
    for (double v : mse) var += (v - mean) * (v - mean);
    var /= (n - 1.0);
    summary.stderr_mse = std::sqrt(var / n);
  }
  return summary;
}

ExperimentConfig apply_sweep_value(ExperimentConfig cfg, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::snr_db:
      cfg.snr_db = value;
      break;
    case SweepAxis::epsilon:
      cfg.budget.epsilon = value;
      break;
    case SweepAxis::a:
      cfg.quantizer.a = value;
      break;
    case SweepAxis::none:
      break;
  }
  return cfg;
}

SweepResult run_sweep(const ExperimentConfig& cfg, unsigned threads) {
  cfg.validate();
  if (cfg.sweep.axis == SweepAxis::none) throw ConfigError("sweep.axis must be set for a sweep");
  if (cfg.sweep.grid.empty()) throw ConfigError("sweep.grid must not be empty");

  SweepResult result;
  result.axis = cfg.sweep.axis;
  result.seed = cfg.seed;
  for (double value : cfg.sweep.grid) {
    for (Scheme scheme : cfg.sweep.schemes) {
      ExperimentConfig point = apply_sweep_value(cfg, cfg.sweep.axis, value);
      point.scheme = scheme;
      SweepRow row;
      row.value = value;
      row.scheme = scheme;
      row.replications = point.replications;
      try {
        const ReplicationSummary s = run_replications(point, threads);
        row.mean_mse = s.mean_mse;
        row.stderr_mse = s.stderr_mse;
        row.gain_used = s.gain.gain;
        row.binding = s.gain.binding;
      } catch (const InfeasibleError&) {
        row.feasible = false;
        row.mean_mse = kNaN;
        row.gain_used = kNaN;
      }
      result.rows.push_back(row);
    }
  }
  return result;
}

}  // namespace flmc
