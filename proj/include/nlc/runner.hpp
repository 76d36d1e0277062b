#pragma once

// Command implementations behind the CLI; they return process exit codes and
// never call exit() themselves.

#include "nlc/config.hpp"
#include "nlc/output.hpp"
#include "nlc/selfcheck.hpp"

#include <filesystem>
#include <functional>
#include <limits>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nlc {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2, kExitInvariant = 3 };

struct SimulateRequest {
  std::filesystem::path config;
  std::optional<std::string> figure;
  bool svg = false;
};

int cmd_simulate(const SimulateRequest& req, std::ostream& out, std::ostream& err);

inline const std::vector<std::string> kSweepParameters{"kappa", "P", "C", "g", "zeta_end", "gamma_f", "gamma_h"};

struct SweepRequest {
  std::filesystem::path config;
  std::string param;
  std::vector<double> values;
  int jobs = 1;
};

int cmd_sweep(const SweepRequest& req, std::ostream& out, std::ostream& err);

int cmd_selfcheck(const SelfcheckOptions& opts, std::ostream& out, std::ostream& err);

/// "1.13,0.8" -> {1.13, 0.8}. Throws InvalidArgument on an empty list or a
/// malformed entry.
std::vector<double> parse_value_list(std::string_view text);

/// Throws InvalidArgument for unknown or inapplicable parameters.
RunConfig apply_sweep_value(RunConfig cfg, const std::string& param, double value);

/// One summary row per sweep value: peak E_N (and where) for every pair, the
/// largest single-colour peak, and the longest all-violated VLF window.
struct SweepPoint {
  double value = 0.0;
  double kappa = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> peaks;     // pair order of PairReport
  std::vector<double> peaks_at;  // zeta (coupler) or z_mm (squeezer)
  double single_color_peak = 0.0;
  double vlf_window_start = std::numeric_limits<double>::quiet_NaN();
  double vlf_window_end = std::numeric_limits<double>::quiet_NaN();
};

SweepPoint summarize(double value, const CouplerReport& r);
SweepPoint summarize(double value, const SqueezerReport& r);
Table sweep_table(const std::string& param, const std::vector<SweepPoint>& points);

/// Runs `fn(i)` for i in [0, n) on `jobs` threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace nlc
