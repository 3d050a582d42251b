#pragma once

#include <filesystem>
#include <string>

#include "flmc/harness.hpp"

namespace flmc {

inline constexpr const char* kToolVersion = "1.0.0";

/// Parses a JSON experiment config. Missing keys take their defaults; unknown
/// keys, wrong types and invariant violations throw ConfigError naming the key.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& path);

/// Fully resolved config as compact JSON; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

bool operator==(const ExperimentConfig& lhs, const ExperimentConfig& rhs);

struct RunManifest {
  std::filesystem::path config_path;
  std::filesystem::path output_path;
  ExperimentConfig config;
  std::string version = kToolVersion;
};

/// Single-line JSON provenance record.
std::string manifest_line(const RunManifest& manifest, const std::string& command);

/// Header plus one line per row; doubles in round-trip scientific notation.
std::string format_csv(const SweepResult& result);
void emit_csv(const SweepResult& result, const std::filesystem::path& path);

}  // namespace flmc
