#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "flmc/channel.hpp"
#include "flmc/model.hpp"
#include "flmc/power.hpp"
#include "flmc/privacy.hpp"
#include "flmc/quantizer.hpp"
#include "flmc/random.hpp"

namespace flmc {

enum class Scheme { digital, analog, digital_no_dp, analog_no_dp, centralized_lmc };

std::string_view to_string(Scheme s);
/// Throws ConfigError for unknown names.
Scheme scheme_from_string(std::string_view name);

enum class SweepAxis { none, snr_db, epsilon, a };

std::string_view to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(std::string_view name);

struct SweepSpec {
  SweepAxis axis = SweepAxis::none;
  std::vector<double> grid;
  std::vector<Scheme> schemes{Scheme::digital, Scheme::analog};
};

struct ExperimentConfig {
  Scheme scheme = Scheme::digital;
  ModelSpec model;

  double h = 0.04;
  double n0 = 1.0;
  double snr_db = 25.0;

  QuantizerSpec quantizer;
  PrivacyBudget budget;
  GradientBound bound;
  TMode t_mode = TMode::paper;

  double eta_digital = 8.28e-3;
  double eta_analog = 1.28e-4;
  double eta_centralized = 1.28e-4;

  int s_total = 300;
  int s_burnin = 200;
  int replications = 200;
  std::uint64_t seed = 20221031;
  /// Reuse the replication-0 dataset for every replication.
  bool freeze_dataset = false;

  PowerSolverConfig solver;
  SweepSpec sweep;

  ChannelConfig channel() const;
  double eta() const { return eta_for(scheme); }
  double eta_for(Scheme s) const;
  /// Throws ConfigError naming the offending key.
  void validate() const;
};

struct ChainDiagnostics {
  /// Gradient entries clipped in each round, summed over devices.
  std::vector<int> clipped_entries;
  /// Squared norm of the injected noise in each round.
  std::vector<double> noise_energy;
};

struct ChainResult {
  std::vector<VectorXd> samples;
  double mse = 0.0;
  double gain_used = 0.0;
  ChainDiagnostics diagnostics;
};

/// Independent random streams consumed by one chain.
struct ChainStreams {
  RandomStream init;
  RandomStream quantizer;
  RandomStream channel;

  static ChainStreams for_replication(std::uint64_t seed, std::uint64_t replication);
};

/// Power gain for cfg.scheme from the solvers; the gain is NaN for centralized_lmc.
GainSolution solve_gain(const ExperimentConfig& cfg);

/// One chain of s_total rounds starting from a prior draw; the s_total - s_burnin
/// post-burn-in states are kept and scored against posterior.mean.
ChainResult run_chain(const ExperimentConfig& cfg, const Dataset& data, const GaussianDist& posterior,
                      double gain, ChainStreams& streams, NoiseMode noise = NoiseMode::awgn);

/// (1 / S_u) sum_s ||theta_s - mu||^2.
double compute_mse(const std::vector<VectorXd>& samples, const VectorXd& mu);

/// Standard error of the mean of one coordinate estimated from n_batches batch means.
double batch_means_stderr(const std::vector<VectorXd>& samples, int coordinate, int n_batches = 20);

struct ReplicationSummary {
  double mean_mse = 0.0;
  /// Unavailable for a single replication.
  std::optional<double> stderr_mse;
  GainSolution gain;
  int replications = 0;
};

/// Runs cfg.replications independent chains in parallel. Results depend only on cfg.
ReplicationSummary run_replications(const ExperimentConfig& cfg, unsigned threads = 0);

struct SweepRow {
  double value = 0.0;
  Scheme scheme = Scheme::digital;
  bool feasible = true;
  double mean_mse = 0.0;
  std::optional<double> stderr_mse;
  double gain_used = 0.0;
  BindingConstraint binding = BindingConstraint::power;
  int replications = 0;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::none;
  std::uint64_t seed = 0;
  std::vector<SweepRow> rows;
};

/// Copy of cfg with the swept parameter set to value.
ExperimentConfig apply_sweep_value(ExperimentConfig cfg, SweepAxis axis, double value);

/// One row per (grid value, scheme); every row uses cfg.seed.
SweepResult run_sweep(const ExperimentConfig& cfg, unsigned threads = 0);

}  // namespace flmc
