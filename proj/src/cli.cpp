#include "flmc/cli.hpp"

#include <fmt/format.h>

#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "flmc/config.hpp"
#include "flmc/errors.hpp"

namespace flmc {

namespace {

struct Options {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  std::string mode;
  std::string scheme;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<double> snr_db;
  std::optional<double> a;
  std::optional<double> gain;
  std::vector<double> grid;
  std::vector<std::string> schemes;
  unsigned threads = 0;
};

ExperimentConfig resolve(const Options& o) {
  ExperimentConfig cfg = o.config_path.empty() ? parse_config_text("{}") : parse_config(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.replications) cfg.replications = *o.replications;
  if (!o.mode.empty()) cfg.t_mode = o.mode == "paper" ? TMode::paper : TMode::corrected;
  if (!o.scheme.empty()) cfg.scheme = scheme_from_string(o.scheme);
  if (o.epsilon) cfg.budget.epsilon = *o.epsilon;
  if (o.delta) cfg.budget.delta = *o.delta;
  if (o.snr_db) cfg.snr_db = *o.snr_db;
  if (o.a) cfg.quantizer.a = *o.a;
  if (!o.schemes.empty()) {
    cfg.sweep.schemes.clear();
    for (const auto& s : o.schemes) cfg.sweep.schemes.push_back(scheme_from_string(s));
  }
  cfg.validate();
  return cfg;
}

void write_result(const SweepResult& result, const Options& o, std::ostream& out) {
  if (o.out_path.empty()) {
    out << format_csv(result);
  } else {
    emit_csv(result, o.out_path);
  }
}

std::vector<double> default_grid(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::snr_db:
      return {10.0, 12.5, 15.0, 17.5, 20.0, 22.5, 25.0};
    case SweepAxis::epsilon:
      return {1.0, 2.5, 5.0, 7.5, 10.0, 15.0, 20.0, 25.0};
    case SweepAxis::a:
      return {0.01, 0.05, 0.1};
    case SweepAxis::none:
      break;
  }
  return {};
}

int run_sweep_command(SweepAxis axis, const Options& o, std::ostream& out, std::ostream& err,
                      const std::string& name) {
  ExperimentConfig cfg = resolve(o);
  cfg.sweep.axis = axis;
  if (!o.grid.empty()) {
    cfg.sweep.grid = o.grid;
  } else if (cfg.sweep.grid.empty() || cfg.sweep.axis != axis) {
    cfg.sweep.grid = default_grid(axis);
  }
  cfg.validate();
  err << manifest_line({o.config_path, o.out_path, cfg}, name) << '\n';
  write_result(run_sweep(cfg, o.threads), o, out);
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Federated Langevin Monte Carlo over a simulated noisy uplink", "flmc"};
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--config", o.config_path, "JSON experiment config (defaults when omitted)");
  app.add_option("--out", o.out_path, "CSV output path (stdout when omitted)");
  app.add_option("--seed", o.seed, "Master seed");
  app.add_option("--replications", o.replications, "Independent chains per row");
  app.add_option("--mode", o.mode, "Analog T form")->check(CLI::IsMember({"paper", "corrected"}));
  app.add_option("--scheme", o.scheme, "digital|analog|digital_no_dp|analog_no_dp|centralized_lmc");
  app.add_option("--epsilon", o.epsilon, "Privacy level epsilon");
  app.add_option("--delta", o.delta, "Privacy failure probability delta");
  app.add_option("--snr-db", o.snr_db, "Maximum SNR P0/N0 in dB");
  app.add_option("--a", o.a, "Quantizer sharpness");
  app.add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)");

  auto* run = app.add_subcommand("run", "Run one configuration and emit a single CSV row");
  auto* sweep_snr = app.add_subcommand("sweep-snr", "Sweep the maximum SNR");
  auto* sweep_eps = app.add_subcommand("sweep-epsilon", "Sweep the privacy level epsilon");
  auto* sweep_q = app.add_subcommand("sweep-quantizer", "Sweep the quantizer sharpness a");
  for (auto* sub : {sweep_snr, sweep_eps, sweep_q}) {
    sub->add_option("--grid", o.grid, "Comma-separated grid values")->delimiter(',');
    sub->add_option("--schemes", o.schemes, "Comma-separated schemes")->delimiter(',');
  }
  auto* solve = app.add_subcommand("solve-gain", "Print the power gain and the binding constraint");
  auto* dp = app.add_subcommand("dp-check", "Estimate delta for a given gain and epsilon");
  dp->add_option("--gain", o.gain, "Power gain A")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (run->parsed()) {
      const ExperimentConfig cfg = resolve(o);
      err << manifest_line({o.config_path, o.out_path, cfg}, "run") << '\n';
      const ReplicationSummary s = run_replications(cfg, o.threads);
      SweepResult result;
      result.seed = cfg.seed;
      result.rows.push_back({std::numeric_limits<double>::quiet_NaN(), cfg.scheme, true, s.mean_mse,
                             s.stderr_mse, s.gain.gain, s.gain.binding, s.replications});
      write_result(result, o, out);
      return 0;
    }
    if (sweep_snr->parsed()) return run_sweep_command(SweepAxis::snr_db, o, out, err, "sweep-snr");
    if (sweep_eps->parsed()) return run_sweep_command(SweepAxis::epsilon, o, out, err, "sweep-epsilon");
    if (sweep_q->parsed()) return run_sweep_command(SweepAxis::a, o, out, err, "sweep-quantizer");
    if (solve->parsed()) {
      const ExperimentConfig cfg = resolve(o);
      err << manifest_line({o.config_path, o.out_path, cfg}, "solve-gain") << '\n';
      const GainSolution g = solve_gain(cfg);
      out << fmt::format("scheme={} gain={:.17e} binding={}", to_string(cfg.scheme), g.gain,
                         to_string(g.binding));
      if (cfg.scheme == Scheme::digital) {
        out << fmt::format(" delta_hat={:.17e} stderr={:.17e}", g.delta_hat.delta, g.delta_hat.std_error);
      }
      if (g.starved) out << " warning=starved";
      out << '\n';
      return 0;
    }
    if (dp->parsed()) {
      const ExperimentConfig cfg = resolve(o);
      err << manifest_line({o.config_path, o.out_path, cfg}, "dp-check") << '\n';
      if (*o.gain < 0.0) throw ConfigError("--gain must be >= 0");
      RandomStream rng(cfg.seed, 0, StreamId::privacy_mc);
      const bool analog = cfg.scheme == Scheme::analog || cfg.scheme == Scheme::analog_no_dp;
      DeltaEstimate est;
      if (analog) {
        est = analog_delta_mc(*o.gain, cfg.model.m, cfg.n0, cfg.bound.ell, cfg.budget.epsilon, cfg.solver.n_mc, rng);
      } else {
        const DigitalLossParams p{*o.gain, cfg.model.k_devices, cfg.model.m, cfg.n0, cfg.bound.ell, cfg.quantizer};
        est = estimate_delta_digital(p, cfg.budget, cfg.solver.n_mc, rng);
      }
      out << fmt::format("scheme={} gain={:.17e} epsilon={:.17e} delta_hat={:.17e} stderr={:.17e}",
                         analog ? "analog" : "digital", *o.gain, cfg.budget.epsilon, est.delta, est.std_error);
      if (analog && *o.gain > 0.0) {
        const double x = analog_loss_mean(*o.gain, cfg.model.m, cfg.n0, cfg.bound.ell);
        out << fmt::format(" delta_closed_form={:.17e}", 1.0 - analog_T(x, cfg.budget.epsilon, TMode::corrected));
      }
      out << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace flmc
