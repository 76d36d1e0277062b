#pragma once

// CSV/SVG artifacts for a run, built fully in memory and then written with
// temp-file + rename so a failed run leaves nothing behind.

#include "nlc/config.hpp"
#include "nlc/devices.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace nlc {

/// Column-major numeric table with named columns.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view name) const;  // throws InvalidArgument
  std::vector<double> values(std::string_view name) const;
  Table select(std::span<const std::string> names) const;
};

/// "# key: value" lines.
std::string comment_block(const std::vector<std::pair<std::string, std::string>>& kv);

/// Header comment, column line, rows, then an optional comment footer.
std::string to_csv(const Table& t, const std::string& header,
                   const std::vector<std::pair<std::string, std::string>>& footer = {});

Table trajectory_table(const CouplerReport& r);
Table covariance_table(const std::vector<double>& coordinate, std::string_view coordinate_name,
                       const std::vector<CovarianceMatrix>& vs, std::span<const std::string> mode_names);
Table entanglement_table(const CouplerReport& r);
Table shg_table(const ShgReport& r);
Table squeezer_table(const SqueezerReport& r);

std::vector<std::pair<std::string, std::string>> epr_footer(const CouplerReport& r);
std::vector<std::pair<std::string, std::string>> run_diagnostics(const CouplerReport& r);

/// Column selection of each figure, taken from the tables above.
std::vector<std::string> figure_columns(Figure f);

struct OutputFile {
  std::string name;
  std::string content;
};

std::vector<OutputFile> coupler_artifacts(const RunConfig& cfg, const CouplerReport& r);
std::vector<OutputFile> squeezer_artifacts(const RunConfig& cfg, const SqueezerReport& r);
std::vector<OutputFile> shg_artifacts(const RunConfig& cfg, const ShgReport& r);

/// NLCOUPLER_OUTPUT_ROOT, when set, prefixes relative output directories.
inline constexpr const char* kOutputRootEnv = "NLCOUPLER_OUTPUT_ROOT";
std::filesystem::path resolve_output_dir(const OutputSpec& spec);

/// Writes every file to a temporary name first and renames only when all
/// writes succeeded.
void write_atomically(const std::filesystem::path& dir, const std::vector<OutputFile>& files);

}  // namespace nlc
