// Acceptance suite: one line per criterion, nonzero exit if any criterion fails.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "flmc/channel.hpp"
#include "flmc/config.hpp"
#include "flmc/harness.hpp"
#include "flmc/power.hpp"
#include "flmc/privacy.hpp"

using namespace flmc;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double pooled(const SweepRow& a, const SweepRow& b) {
  return std::hypot(a.stderr_mse.value_or(0.0), b.stderr_mse.value_or(0.0));
}

const SweepRow& find(const SweepResult& r, double value, Scheme s) {
  for (const auto& row : r.rows) {
    if (row.scheme == s && std::abs(row.value - value) < 1e-12) return row;
  }
  throw std::runtime_error(fmt::format("no row for value {} scheme {}", value, to_string(s)));
}

ExperimentConfig paper_setup() {
  ExperimentConfig cfg;  // experiment defaults: K=20, m=5, N=1200, h=0.04, N0=1, ell=30, a=0.05
  cfg.replications = 200;
  cfg.budget = {5.0, 0.01};
  cfg.snr_db = 25.0;
  cfg.t_mode = TMode::paper;
  return cfg;
}

std::string row_summary(const SweepRow& r) {
  return fmt::format("{}@{:g}: mse={:.4e}+-{:.1e} A={:.4e}", to_string(r.scheme), r.value, r.mean_mse,
                     r.stderr_mse.value_or(0.0), r.gain_used);
}

// 1. Centralized LMC sample mean matches the closed-form posterior mean.
Verdict sampler_fidelity() {
  Verdict v;
  ExperimentConfig cfg;
  cfg.scheme = Scheme::centralized_lmc;
  cfg.eta_centralized = 1e-3;
  cfg.s_total = 5000;
  cfg.s_burnin = 1000;
  const auto t0 = Clock::now();
  RandomStream data_rng(cfg.seed, 0, StreamId::data);
  const Dataset data = generate_dataset(cfg.model, data_rng);
  const GaussianDist post = exact_posterior(data);
  ChainStreams streams = ChainStreams::for_replication(cfg.seed, 0);
  const ChainResult r = run_chain(cfg, data, post, 0.0, streams);
  const double elapsed = seconds_since(t0);
  for (int i = 0; i < 5; ++i) {
    double mean = 0.0;
    for (const auto& s : r.samples) mean += s(i);
    mean /= static_cast<double>(r.samples.size());
    const double se = batch_means_stderr(r.samples, i);
    const double z = std::abs(mean - post.mean(i)) / se;
    v.require(z <= 4.0, fmt::format("coord {} |dev|/se={:.2f}", i, z));
  }
  v.require(elapsed < 10.0, fmt::format("runtime {:.2f}s < 10s", elapsed));
  return v;
}

// 2. Channel noise passed through the server update has variance 2 eta at the LMC cap.
Verdict noise_matching() {
  Verdict v;
  for (double eta : {8.28e-3, 1.28e-4}) {
    const double n0 = 1.0;
    const double a = lmc_noise_cap(eta, n0);
    ChannelConfig ch;
    ch.n0 = n0;
    const Channel channel(ch);
    const PowerGains gains = PowerGains::uniform(5, a);
    RandomStream rng(31337);
    const VectorXd theta = VectorXd::Zero(5);
    const std::vector<VectorXd> silent{VectorXd::Ones(5), VectorXd(-VectorXd::Ones(5))};
    const int n = 100000;
    double sum = 0.0, sq = 0.0;
    for (int t = 0; t < n; ++t) {
      const double noise = server_update(theta, channel.transmit_digital(silent, gains, rng), gains, eta)(0);
      sum += noise;
      sq += noise * noise;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    const double rel = std::abs(var / (2.0 * eta) - 1.0);
    v.require(rel <= 0.02, fmt::format("eta={:g} var/2eta-1={:.4f}", eta, var / (2.0 * eta) - 1.0));
  }
  return v;
}

// 3. Digital loss never exceeds m a ell = 7.5; delta is exactly 0 for epsilon = 8.
Verdict digital_cap() {
  Verdict v;
  const auto t0 = Clock::now();
  const ExperimentConfig cfg = paper_setup();
  const QuantizerSpec q{0.05};
  double worst = 0.0;
  std::uint64_t seed = 1;
  for (double gain : {lmc_noise_cap(cfg.eta_digital, 1.0), 1.0, 1e3}) {
    const DigitalLossParams p{gain, 20, 5, 1.0, 30.0, q};
    const LossSampleSet set = sample_digital_loss(p, 1000000, seed++);
    for (double s : set.samples) worst = std::max(worst, s);
  }
  v.require(worst <= 7.5, fmt::format("max loss over 3x1e6 samples {:.15g} <= 7.5", worst));
  for (double snr : {0.0, 25.0, 50.0}) {
    const ChannelConfig ch = ChannelConfig::from_snr_db(cfg.h, cfg.n0, snr, 5);
    RandomStream rng(cfg.seed, 0, StreamId::privacy_mc);
    const GainSolution sol = solve_digital_gain(ch, cfg.eta_digital, 20, 5, 30.0, q, {8.0, 0.01}, cfg.solver, rng);
    double max_delta = 0.0;
    for (double gain : {sol.gain, digital_power_cap(ch.h, ch.p0)}) {
      RandomStream mc(cfg.seed, 1, StreamId::privacy_mc);
      max_delta = std::max(max_delta, estimate_delta_digital({gain, 20, 5, 1.0, 30.0, q}, {8.0, 0.01}, 100000, mc).delta);
    }
    v.require(max_delta == 0.0, fmt::format("snr={:g}dB delta_hat={:g}", snr, max_delta));
  }
  const double elapsed = seconds_since(t0);
  v.require(elapsed < 30.0, fmt::format("runtime {:.2f}s < 30s", elapsed));
  return v;
}

// 4. Corrected closed form agrees with simulation of the Gaussian loss; T inverse round-trips.
Verdict analog_consistency() {
  Verdict v;
  const std::size_t n = 100000;
  RandomStream rng(4242);
  double worst_z = 0.0;
  int failures = 0;
  for (double gain : {0.004, 0.008, 0.012, 0.016, 0.024}) {
    for (double eps : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      const double x = analog_loss_mean(gain, 5, 1.0, 30.0);
      const double closed = 1.0 - analog_T(x, eps, TMode::corrected);
      const DeltaEstimate mc = analog_delta_mc(gain, 5, 1.0, 30.0, eps, n, rng);
      const double se = std::sqrt(closed * (1.0 - closed) / n);
      const double diff = std::abs(mc.delta - closed);
      if (diff > 3.0 * se) ++failures;
      if (se > 0.0) worst_z = std::max(worst_z, diff / se);
    }
  }
  v.require(failures == 0, fmt::format("5x5 grid within 3 SE (worst {:.2f} SE)", worst_z));
  double worst = 0.0;
  for (TMode mode : {TMode::paper, TMode::corrected}) {
    for (double p : {0.5, 0.9, 0.95, 0.99, 0.999}) {
      for (double eps : {0.5, 1.0, 2.0, 5.0, 10.0, 15.0, 25.0}) {
        worst = std::max(worst, std::abs(analog_T(analog_T_inverse(p, eps, mode), eps, mode) - p));
      }
    }
  }
  v.require(worst <= 1e-9, fmt::format("T-inverse round-trip error {:.2e} <= 1e-9", worst));
  return v;
}

// 5. SNR sweep: analog ahead at 10 dB, digital ahead at 25 dB.
Verdict snr_crossover() {
  Verdict v;
  const auto t0 = Clock::now();
  ExperimentConfig cfg = paper_setup();
  cfg.sweep = {SweepAxis::snr_db, {10.0, 12.5, 15.0, 17.5, 20.0, 22.5, 25.0}, {Scheme::digital, Scheme::analog}};
  const SweepResult r = run_sweep(cfg);
  const auto& d10 = find(r, 10.0, Scheme::digital);
  const auto& a10 = find(r, 10.0, Scheme::analog);
  const auto& d25 = find(r, 25.0, Scheme::digital);
  const auto& a25 = find(r, 25.0, Scheme::analog);
  v.require(d10.mean_mse - a10.mean_mse >= 2.0 * pooled(d10, a10),
            fmt::format("10dB digital > analog by 2 SE [{} | {}]", row_summary(d10), row_summary(a10)));
  v.require(a25.mean_mse - d25.mean_mse >= 2.0 * pooled(d25, a25),
            fmt::format("25dB digital < analog by 2 SE [{} | {}]", row_summary(d25), row_summary(a25)));
  const double elapsed = seconds_since(t0);
  v.require(elapsed < 300.0, fmt::format("runtime {:.1f}s < 300s", elapsed));
  return v;
}

// 6. Epsilon sweep at 25 dB: saturation points and the strict-privacy ordering.
Verdict epsilon_saturation() {
  Verdict v;
  ExperimentConfig cfg = paper_setup();
  cfg.sweep = {SweepAxis::epsilon, {5.0, 7.5, 15.0, 25.0}, {Scheme::digital, Scheme::analog}};
  const SweepResult r = run_sweep(cfg);
  const auto& d75 = find(r, 7.5, Scheme::digital);
  const auto& d15 = find(r, 15.0, Scheme::digital);
  const auto& a15 = find(r, 15.0, Scheme::analog);
  const auto& a25 = find(r, 25.0, Scheme::analog);
  const auto& d5 = find(r, 5.0, Scheme::digital);
  const auto& a5 = find(r, 5.0, Scheme::analog);
  v.require(std::abs(d75.mean_mse / d15.mean_mse - 1.0) <= 0.10,
            fmt::format("digital eps 7.5 vs 15 within 10% (ratio {:.4f})", d75.mean_mse / d15.mean_mse));
  v.require(std::abs(a15.mean_mse / a25.mean_mse - 1.0) <= 0.10,
            fmt::format("analog eps 15 vs 25 within 10% (ratio {:.4f})", a15.mean_mse / a25.mean_mse));
  v.require(a5.mean_mse - d5.mean_mse >= 2.0 * pooled(d5, a5),
            fmt::format("eps 5 digital < analog by 2 SE [{} | {}]", row_summary(d5), row_summary(a5)));
  return v;
}

// 7. Quantizer sharpness: a = 0.01 ahead under strict privacy, a = 0.05 ahead under loose privacy.
Verdict quantizer_ordering() {
  Verdict v;
  for (double eps : {1.0, 10.0}) {
    ExperimentConfig cfg = paper_setup();
    cfg.budget.epsilon = eps;
    cfg.sweep = {SweepAxis::a, {0.01, 0.05}, {Scheme::digital}};
    const SweepResult r = run_sweep(cfg);
    const auto& soft = find(r, 0.01, Scheme::digital);
    const auto& sharp = find(r, 0.05, Scheme::digital);
    const double gap = eps < 5.0 ? sharp.mean_mse - soft.mean_mse : soft.mean_mse - sharp.mean_mse;
    v.require(gap >= 2.0 * pooled(soft, sharp),
              fmt::format("eps={:g}: {} ahead by 2 SE [{} | {}]", eps, eps < 5.0 ? "a=0.01" : "a=0.05",
                          row_summary(soft), row_summary(sharp)));
  }
  return v;
}

// 8. Identical seeds give byte-identical CSV.
Verdict determinism() {
  Verdict v;
  ExperimentConfig cfg = paper_setup();
  cfg.replications = 20;
  cfg.sweep = {SweepAxis::snr_db, {10.0, 17.5, 25.0}, {Scheme::digital, Scheme::analog}};
  const auto dir = std::filesystem::temp_directory_path();
  const auto a = dir / "flmc_acceptance_a.csv";
  const auto b = dir / "flmc_acceptance_b.csv";
  emit_csv(run_sweep(cfg), a);
  emit_csv(run_sweep(cfg, 1), b);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  const std::string x = slurp(a), y = slurp(b);
  v.require(!x.empty() && x == y, fmt::format("two sweeps byte-identical ({} bytes)", x.size()));
  std::filesystem::remove(a);
  std::filesystem::remove(b);
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 sampler fidelity", sampler_fidelity},
      {"2 noise-matching identity", noise_matching},
      {"3 digital privacy cap", digital_cap},
      {"4 analog accountant consistency", analog_consistency},
      {"5 SNR crossover", snr_crossover},
      {"6 epsilon saturation", epsilon_saturation},
      {"7 quantizer ordering", quantizer_ordering},
      {"8 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    if (!v.pass) ++failed;
    std::printf("[%s] %s (%.1fs): %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), seconds_since(t0),
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
