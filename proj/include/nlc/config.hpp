#pragma once

// Run configuration: YAML file -> fully resolved RunConfig.

#include "nlc/devices.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nlc {

enum class DeviceKind { kCoupler, kTwoModeSqueezer, kSingleShg };

std::string_view to_string(DeviceKind k);

struct OutputSpec {
  std::string directory = "nlcoupler_out";
  std::string prefix = "run";
  bool svg = false;
};

struct RunConfig {
  DeviceKind kind = DeviceKind::kCoupler;
  CouplerDevice coupler;
  TwoModeSqueezerDevice squeezer;
  /// single_shg range; power, g and step come from `squeezer`, the output
  /// stride from `coupler.grid`.
  double shg_zeta_end = kShgPresetZetaEnd;
  OutputSpec output;
  std::optional<Figure> figure;
};

/// Throws ConfigError (with a line number where one is known).
RunConfig parse_config(std::string_view yaml_text);
RunConfig load_config(const std::filesystem::path& path);

/// Replaces device and numerics with the figure's preset; keeps output.
RunConfig with_figure(RunConfig cfg, Figure f);

/// Flattened "section.key" -> value pairs of everything that affects a run.
std::vector<std::pair<std::string, std::string>> describe(const RunConfig& cfg);

/// Shortest representation that reads back to the same double.
std::string format_double(double x);

}  // namespace nlc
