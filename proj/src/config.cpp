#include "flmc/config.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "flmc/errors.hpp"
#include "json.hpp"

namespace flmc {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& prefix, std::initializer_list<const char*> known) {
  if (!obj.is_object()) throw ConfigError("config key '" + prefix + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool found = false;
    for (const char* k : known) found = found || key == k;
    if (!found) throw ConfigError("unknown config key '" + prefix + (prefix.empty() ? "" : ".") + key + "'");
  }
}

template <class T>
void read(const json& obj, const char* key, const std::string& path, T& out) {
  if (!obj.contains(key)) return;
  const std::string full = path.empty() ? key : path + "." + key;
  const json& v = obj.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ConfigError("config key '" + full + "' must be a boolean");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw ConfigError("config key '" + full + "' must be an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (v.is_number_integer() && !v.is_number_unsigned()) {
        throw ConfigError("config key '" + full + "' must be non-negative");
      }
    }
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw ConfigError("config key '" + full + "' must be a number");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw ConfigError("config key '" + full + "' must be a string");
  }
  try {
    out = v.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + full + "': " + e.what());
  }
}

std::vector<double> read_numbers(const json& v, const std::string& full) {
  if (!v.is_array()) throw ConfigError("config key '" + full + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError("config key '" + full + "' must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

TMode t_mode_from_string(const std::string& s) {
  if (s == "paper") return TMode::paper;
  if (s == "corrected") return TMode::corrected;
  throw ConfigError("config key 'privacy.t_mode' must be \"paper\" or \"corrected\"");
}

const char* t_mode_name(TMode m) { return m == TMode::paper ? "paper" : "corrected"; }

// Invariant violations are reported against the config key that owns them.
void validate_with_keys(const ExperimentConfig& cfg) {
  if (cfg.s_burnin < 0 || cfg.s_burnin >= cfg.s_total) {
    throw ConfigError("config key 's_burnin' must satisfy 0 <= s_burnin < s_total (got s_burnin=" +
                      std::to_string(cfg.s_burnin) + ", s_total=" + std::to_string(cfg.s_total) + ")");
  }
  cfg.validate();
}

json to_json(const ExperimentConfig& cfg) {
  json theta = json::array();
  for (Eigen::Index i = 0; i < cfg.model.theta_star.size(); ++i) theta.push_back(cfg.model.theta_star(i));
  json schemes = json::array();
  for (Scheme s : cfg.sweep.schemes) schemes.push_back(std::string(to_string(s)));
  return json{
      {"scheme", std::string(to_string(cfg.scheme))},
      {"model",
       {{"m", cfg.model.m},
        {"n_total", cfg.model.n_total},
        {"k_devices", cfg.model.k_devices},
        {"theta_star", theta},
        {"partition_sizes", cfg.model.resolved_partition()}}},
      {"channel", {{"h", cfg.h}, {"n0", cfg.n0}, {"snr_db", cfg.snr_db}}},
      {"quantizer", {{"a", cfg.quantizer.a}, {"family", "sigmoid"}}},
      {"privacy",
       {{"epsilon", cfg.budget.epsilon},
        {"delta", cfg.budget.delta},
        {"ell", cfg.bound.ell},
        {"t_mode", t_mode_name(cfg.t_mode)}}},
      {"eta_digital", cfg.eta_digital},
      {"eta_analog", cfg.eta_analog},
      {"eta_centralized", cfg.eta_centralized},
      {"s_total", cfg.s_total},
      {"s_burnin", cfg.s_burnin},
      {"replications", cfg.replications},
      {"seed", cfg.seed},
      {"freeze_dataset", cfg.freeze_dataset},
      {"solver",
       {{"n_mc", cfg.solver.n_mc}, {"bisection_tol", cfg.solver.bisection_tol}, {"max_iters", cfg.solver.max_iters}}},
      {"sweep",
       {{"axis", std::string(to_string(cfg.sweep.axis))}, {"grid", cfg.sweep.grid}, {"schemes", schemes}}},
  };
}

ExperimentConfig from_json(const json& root) {
  reject_unknown(root, "",
                 {"scheme", "model", "channel", "quantizer", "privacy", "eta_digital", "eta_analog",
                  "eta_centralized", "s_total", "s_burnin", "replications", "seed", "freeze_dataset", "solver",
                  "sweep"});
  ExperimentConfig cfg;
  std::string scheme = std::string(to_string(cfg.scheme));
  read(root, "scheme", "", scheme);
  cfg.scheme = scheme_from_string(scheme);

  if (root.contains("model")) {
    const json& m = root.at("model");
    reject_unknown(m, "model", {"m", "n_total", "k_devices", "theta_star", "partition_sizes"});
    read(m, "m", "model", cfg.model.m);
    read(m, "n_total", "model", cfg.model.n_total);
    read(m, "k_devices", "model", cfg.model.k_devices);
    if (m.contains("theta_star")) {
      const auto t = read_numbers(m.at("theta_star"), "model.theta_star");
      cfg.model.theta_star = Eigen::Map<const VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
    }
    if (m.contains("partition_sizes")) {
      const json& p = m.at("partition_sizes");
      if (!p.is_array()) throw ConfigError("config key 'model.partition_sizes' must be an array of integers");
      for (const auto& e : p) {
        if (!e.is_number_integer()) {
          throw ConfigError("config key 'model.partition_sizes' must be an array of integers");
        }
        cfg.model.partition_sizes.push_back(e.get<int>());
      }
    }
  }
  if (root.contains("channel")) {
    const json& c = root.at("channel");
    reject_unknown(c, "channel", {"h", "n0", "snr_db"});
    read(c, "h", "channel", cfg.h);
    read(c, "n0", "channel", cfg.n0);
    read(c, "snr_db", "channel", cfg.snr_db);
  }
  if (root.contains("quantizer")) {
    const json& q = root.at("quantizer");
    reject_unknown(q, "quantizer", {"a", "family"});
    read(q, "a", "quantizer", cfg.quantizer.a);
    std::string family = "sigmoid";
    read(q, "family", "quantizer", family);
    if (family != "sigmoid") throw ConfigError("config key 'quantizer.family' must be \"sigmoid\"");
  }
  if (root.contains("privacy")) {
    const json& p = root.at("privacy");
    reject_unknown(p, "privacy", {"epsilon", "delta", "ell", "t_mode"});
    read(p, "epsilon", "privacy", cfg.budget.epsilon);
    read(p, "delta", "privacy", cfg.budget.delta);
    read(p, "ell", "privacy", cfg.bound.ell);
    std::string mode = t_mode_name(cfg.t_mode);
    read(p, "t_mode", "privacy", mode);
    cfg.t_mode = t_mode_from_string(mode);
  }
  read(root, "eta_digital", "", cfg.eta_digital);
  read(root, "eta_analog", "", cfg.eta_analog);
  read(root, "eta_centralized", "", cfg.eta_centralized);
  read(root, "s_total", "", cfg.s_total);
  read(root, "s_burnin", "", cfg.s_burnin);
  read(root, "replications", "", cfg.replications);
  read(root, "seed", "", cfg.seed);
  read(root, "freeze_dataset", "", cfg.freeze_dataset);
  if (root.contains("solver")) {
    const json& s = root.at("solver");
    reject_unknown(s, "solver", {"n_mc", "bisection_tol", "max_iters"});
    read(s, "n_mc", "solver", cfg.solver.n_mc);
    read(s, "bisection_tol", "solver", cfg.solver.bisection_tol);
    read(s, "max_iters", "solver", cfg.solver.max_iters);
  }
  if (root.contains("sweep")) {
    const json& s = root.at("sweep");
    reject_unknown(s, "sweep", {"axis", "grid", "schemes"});
    std::string axis = "none";
    read(s, "axis", "sweep", axis);
    cfg.sweep.axis = sweep_axis_from_string(axis);
    if (s.contains("grid")) cfg.sweep.grid = read_numbers(s.at("grid"), "sweep.grid");
    if (s.contains("schemes")) {
      const json& list = s.at("schemes");
      if (!list.is_array()) throw ConfigError("config key 'sweep.schemes' must be an array of strings");
      cfg.sweep.schemes.clear();
      for (const auto& e : list) {
        if (!e.is_string()) throw ConfigError("config key 'sweep.schemes' must be an array of strings");
        cfg.sweep.schemes.push_back(scheme_from_string(e.get<std::string>()));
      }
    }
  }
  validate_with_keys(cfg);
  return cfg;
}

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.17e}", v);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(root);
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) { return to_json(cfg).dump(); }

bool operator==(const ExperimentConfig& lhs, const ExperimentConfig& rhs) {
  return to_json(lhs) == to_json(rhs);
}

std::string manifest_line(const RunManifest& manifest, const std::string& command) {
  const json line{{"tool", "flmc"},
                  {"version", manifest.version},
                  {"command", command},
                  {"config_path", manifest.config_path.string()},
                  {"output_path", manifest.output_path.string()},
                  {"config", to_json(manifest.config)}};
  return line.dump();
}

std::string format_csv(const SweepResult& result) {
  std::string out = "sweep_axis,sweep_value,scheme,mean_mse,stderr_mse,gain_used,replications,seed\n";
  for (const auto& row : result.rows) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", to_string(result.axis),
                       result.axis == SweepAxis::none ? std::string("nan") : number(row.value),
                       to_string(row.scheme), number(row.mean_mse),
                       row.stderr_mse ? number(*row.stderr_mse) : std::string("nan"), number(row.gain_used),
                       row.replications, result.seed);
  }
  return out;
}

void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
  if (result.rows.empty()) throw ContractError("emit_csv: result has no rows");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << format_csv(result);
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace flmc
