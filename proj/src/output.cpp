#include "nlc/output.hpp"

#include "nlc/errors.hpp"
#include "nlc/svg.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace nlc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string>& pair_columns() {
  static const std::vector<std::string> cols{"E_fa_fb", "E_ha_hb",     "E_fa_ha",    "E_fa_hb",
                                             "E_ffhh",  "E_faha_fbhb", "E_fahb_fbha"};
  return cols;
}

std::vector<double> pair_values(const PairReport& p) {
  return {p.fa_fb, p.ha_hb, p.fa_ha, p.fa_hb, p.ff_hh, p.fa_ha_fb_hb, p.fa_hb_fb_ha};
}

std::vector<std::string> vlf_columns() {
  return {"vlf1", "vlf2", "vlf3", "vlf_threshold", "vlf_all_violated", "g1_1", "g1_2", "g2_1", "g2_2", "g3_1",
          "g3_2"};
}

void append_vlf(std::vector<double>& row, const VlfRow& v) {
  for (double x : v.values) row.push_back(x);
  row.push_back(kVlfThreshold);
  row.push_back(v.all_violated() ? 1.0 : 0.0);
  for (const auto& g : v.gains) {
    row.push_back(g[0]);
    row.push_back(g[1]);
  }
}

double phase_or_nan(cplx a) { return std::abs(a) < kPhaseEpsilon ? kNaN : std::arg(a); }

std::string header_for(const RunConfig& cfg, std::string_view what,
                       const std::vector<std::pair<std::string, std::string>>& extra = {}) {
  std::string h = "# nlcoupler " + std::string(what) + "\n" + comment_block(describe(cfg));
  return h + comment_block(extra);
}

std::string metadata_file(const RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& extra,
                          const std::vector<OutputFile>& files) {
  std::string out;
  for (const auto& [k, v] : describe(cfg)) out += k + ": " + v + "\n";
  for (const auto& [k, v] : extra) out += k + ": " + v + "\n";
  for (const auto& f : files) out += "artifact: " + f.name + "\n";
  return out;
}

void add_figure(std::vector<OutputFile>& files, const RunConfig& cfg, const Table& source, const std::string& x_name,
                const std::string& x_label, const std::vector<std::pair<std::string, std::string>>& extra) {
  if (!cfg.figure) return;
  const Figure f = *cfg.figure;
  const auto cols = figure_columns(f);
  const Table t = source.select(cols);
  const std::string tag(to_string(f));
  files.push_back({tag + ".csv", to_csv(t, header_for(cfg, tag + " data", extra))});
  if (!cfg.output.svg) return;
  std::vector<PlotSeries> series;
  for (const auto& c : cols) {
    if (c == x_name || c == "zeta" || c == "z_mm" || c == "vlf_threshold") continue;
    series.push_back({c, t.values(c)});
  }
  std::optional<double> ref;
  if (f == Figure::kFig6) ref = kVlfThreshold;
  files.push_back({tag + ".svg", render_svg(tag, x_label, t.values(x_name), series, ref)});
}

}  // namespace

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw InvalidArgument("no column named '" + std::string(name) + "'");
}

std::vector<double> Table::values(std::string_view name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

Table Table::select(std::span<const std::string> names) const {
  std::vector<std::size_t> idx;
  for (const auto& n : names) idx.push_back(column(n));
  Table t;
  t.columns.assign(names.begin(), names.end());
  t.rows.reserve(rows.size());
  for (const auto& r : rows) {
    std::vector<double> row;
    row.reserve(idx.size());
    for (std::size_t i : idx) row.push_back(r[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string comment_block(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += "# " + k + ": " + v + "\n";
  return out;
}

std::string to_csv(const Table& t, const std::string& header,
                   const std::vector<std::pair<std::string, std::string>>& footer) {
  std::string out = header;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += format_double(r[i]);
    }
    out += "\n";
  }
  return out + comment_block(footer);
}

Table trajectory_table(const CouplerReport& r) {
  Table t;
  t.columns = {"zeta",    "z_mm",  "uf2",  "vf2",  "uh2",  "vh2",  "theta_f", "phi_f",
               "theta_h", "phi_h", "dtheta", "dphi", "dtheta_unwrapped", "dphi_unwrapped"};
  std::vector<std::optional<double>> wa, wb;
  for (const auto& s : r.samples) {
    const auto m = phase_mismatch(s.state);
    wa.push_back(m.a);
    wb.push_back(m.b);
  }
  const auto ua = unwrap_phases(wa);
  const auto ub = unwrap_phases(wb);
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const auto& s = r.samples[i];
    const auto& c = s.state;
    t.rows.push_back({s.zeta, s.z_mm, std::norm(c.a_f), std::norm(c.b_f), std::norm(c.a_h), std::norm(c.b_h),
                      phase_or_nan(c.a_f), phase_or_nan(c.b_f), phase_or_nan(c.a_h), phase_or_nan(c.b_h),
                      wa[i].value_or(kNaN), wb[i].value_or(kNaN), ua[i], ub[i]});
  }
  return t;
}

Table covariance_table(const std::vector<double>& coordinate, std::string_view coordinate_name,
                       const std::vector<CovarianceMatrix>& vs, std::span<const std::string> mode_names) {
  if (coordinate.size() != vs.size()) throw InvalidArgument("covariance_table: length mismatch");
  const auto labels = quadrature_labels(mode_names);
  Table t;
  t.columns.emplace_back(coordinate_name);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i; j < labels.size(); ++j) t.columns.push_back(labels[i] + ":" + labels[j]);
  }
  for (std::size_t k = 0; k < vs.size(); ++k) {
    if (static_cast<std::size_t>(2 * vs[k].n_modes()) != labels.size()) {
      throw InvalidArgument("covariance_table: mode count does not match names");
    }
    std::vector<double> row{coordinate[k]};
    for (std::size_t i = 0; i < labels.size(); ++i) {
      for (std::size_t j = i; j < labels.size(); ++j) {
        row.push_back(vs[k](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table entanglement_table(const CouplerReport& r) {
  Table t;
  t.columns = {"zeta", "z_mm"};
  for (const auto& c : pair_columns()) t.columns.push_back(c);
  for (const auto& c : pair_columns()) t.columns.push_back(c + "_lossy");
  for (const auto& c : vlf_columns()) t.columns.push_back(c);
  for (const char* c : {"hierarchy_margin", "harmonic_power", "harmonic_power_lossy", "purity_h", "var_min_ha",
                        "var_min_hb", "var_min_h_plus", "var_min_h_minus"}) {
    t.columns.emplace_back(c);
  }
  const int ha = index(Mode::kHa), hb = index(Mode::kHb);
  for (const auto& s : r.samples) {
    std::vector<double> row{s.zeta, s.z_mm};
    for (double x : pair_values(s.pairs)) row.push_back(x);
    for (double x : pair_values(s.pairs_lossy)) row.push_back(x);
    append_vlf(row, s.vlf);
    const auto var = squeezing_variances(s.v);
    row.push_back(s.hierarchy_margin);
    row.push_back(s.state.harmonic_power());
    row.push_back(s.lossy_state.harmonic_power());
    row.push_back(purity(reduce(s.v, {ha, hb})));
    row.push_back(var[static_cast<std::size_t>(ha)].min_variance);
    row.push_back(var[static_cast<std::size_t>(hb)].min_variance);
    row.push_back(supermode_variances(s.v, ha, hb, 1).min_variance);
    row.push_back(supermode_variances(s.v, ha, hb, -1).min_variance);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table shg_table(const ShgReport& r) {
  Table t;
  t.columns = {"zeta", "z_mm", "uf2", "uh2", "theta_f", "theta_h", "dtheta", "E_f_h", "var_min_f", "var_min_h"};
  for (const auto& s : r.samples) {
    const auto var = squeezing_variances(s.v);
    t.rows.push_back({s.zeta, s.z_mm, std::norm(s.a_f), std::norm(s.a_h), phase_or_nan(s.a_f), phase_or_nan(s.a_h),
                      s.delta_theta.value_or(kNaN), log_negativity(s.v, Bipartition{{0}, {1}}), var[0].min_variance,
                      var[1].min_variance});
  }
  return t;
}

Table squeezer_table(const SqueezerReport& r) {
  Table t;
  t.columns = {"z_mm"};
  for (const auto& c : pair_columns()) t.columns.push_back(c);
  for (const auto& c : vlf_columns()) t.columns.push_back(c);
  for (const auto& s : r.samples) {
    std::vector<double> row{s.z_mm};
    for (double x : pair_values(s.pairs)) row.push_back(x);
    append_vlf(row, s.vlf);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<std::pair<std::string, std::string>> epr_footer(const CouplerReport& r) {
  if (!r.epr) return {{"epr", "none (" + r.epr_note + ")"}};
  const EprFinding& e = *r.epr;
  return {{"epr.zeta0", format_double(e.zeta0)},
          {"epr.harmonic_power", format_double(e.harmonic_power)},
          {"epr.zero_mean", e.zero_mean ? "true" : "false"},
          {"epr.mu_h", format_double(e.purity_h)},
          {"epr.E_ha_hb", format_double(e.en_hh)},
          {"epr.r_star", format_double(e.r_star)},
          {"epr.F_star", format_double(e.fidelity)},
          {"epr.r_negativity_matched", format_double(e.r_negativity_matched)},
          {"epr.F_negativity_matched", format_double(e.fidelity_negativity_matched)},
          {"epr.var_min_h_local", format_double(e.harmonic_local_min_variance)},
          {"epr.var_min_h_supermode", format_double(e.harmonic_supermode_min_variance)}};
}

std::vector<std::pair<std::string, std::string>> run_diagnostics(const CouplerReport& r) {
  return {{"run.kappa", format_double(r.kappa)},
          {"run.max_symplectic_defect", format_double(r.max_defect)},
          {"run.richardson_error_estimate", format_double(r.richardson.error_estimate)},
          {"run.richardson_observed_order", format_double(r.richardson.observed_order)},
          {"run.richardson_degraded", r.richardson.degraded ? "true" : "false"}};
}

std::vector<std::string> figure_columns(Figure f) {
  switch (f) {
    case Figure::kFig2: return {"zeta", "uf2", "vf2", "uh2", "vh2", "dtheta", "dphi"};
    case Figure::kFig3: return {"zeta", "E_fa_fb", "E_ha_hb", "E_fa_ha", "E_fa_hb"};
    case Figure::kFig4: return {"zeta", "E_ffhh", "E_faha_fbhb", "E_fahb_fbha", "E_fa_fb", "E_ha_hb"};
    case Figure::kFig5:
      return {"zeta",    "z_mm",          "E_fa_fb", "E_fa_fb_lossy", "E_ha_hb",
              "E_ha_hb_lossy", "E_fa_ha", "E_fa_ha_lossy", "E_fa_hb", "E_fa_hb_lossy"};
    case Figure::kFig6: return {"zeta", "vlf1", "vlf2", "vlf3", "vlf_threshold"};
    case Figure::kFig7: return {"zeta", "z_mm", "uf2", "uh2", "dtheta", "E_f_h"};
    case Figure::kFig8: return {"z_mm", "E_fa_fb", "E_ha_hb", "E_fa_ha", "E_fa_hb"};
  }
  return {};
}

std::vector<OutputFile> coupler_artifacts(const RunConfig& cfg, const CouplerReport& r) {
  const auto diag = run_diagnostics(r);
  const std::string& p = cfg.output.prefix;
  const Table traj = trajectory_table(r);
  const Table ent = entanglement_table(r);
  std::vector<double> zeta;
  std::vector<CovarianceMatrix> vs;
  for (const auto& s : r.samples) {
    zeta.push_back(s.zeta);
    vs.push_back(s.v);
  }
  std::vector<OutputFile> files;
  files.push_back({p + "_trajectory.csv", to_csv(traj, header_for(cfg, "trajectory", diag))});
  files.push_back({p + "_covariance.csv",
                   to_csv(covariance_table(zeta, "zeta", vs, csv_mode_names()), header_for(cfg, "covariance", diag))});
  files.push_back({p + "_entanglement.csv", to_csv(ent, header_for(cfg, "entanglement", diag), epr_footer(r))});
  if (cfg.figure) {
    const bool classical = *cfg.figure == Figure::kFig2;
    add_figure(files, cfg, classical ? traj : ent, "zeta", "zeta", diag);
  }
  auto extra = diag;
  for (const auto& kv : epr_footer(r)) extra.push_back(kv);
  files.push_back({p + "_metadata.txt", metadata_file(cfg, extra, files)});
  return files;
}

std::vector<OutputFile> squeezer_artifacts(const RunConfig& cfg, const SqueezerReport& r) {
  const std::string& p = cfg.output.prefix;
  const std::vector<std::pair<std::string, std::string>> diag{
      {"run.stage1_zeta", format_double(r.device.stage1_zeta())},
      {"run.beat_length_mm", format_double(beat_length(r.device.coupling))},
      {"run.stage1_max_symplectic_defect", format_double(r.stage1.max_defect)}};
  const Table ent = squeezer_table(r);
  std::vector<double> z;
  std::vector<CovarianceMatrix> vs;
  for (const auto& s : r.samples) {
    z.push_back(s.z_mm);
    vs.push_back(s.v);
  }
  std::vector<OutputFile> files;
  files.push_back({p + "_stage1.csv", to_csv(shg_table(r.stage1), header_for(cfg, "stage-1 trajectory", diag))});
  files.push_back({p + "_covariance.csv",
                   to_csv(covariance_table(z, "z_mm", vs, csv_mode_names()), header_for(cfg, "covariance", diag))});
  files.push_back({p + "_entanglement.csv", to_csv(ent, header_for(cfg, "entanglement", diag))});
  add_figure(files, cfg, ent, "z_mm", "z (mm)", diag);
  files.push_back({p + "_metadata.txt", metadata_file(cfg, diag, files)});
  return files;
}

std::vector<OutputFile> shg_artifacts(const RunConfig& cfg, const ShgReport& r) {
  const std::string& p = cfg.output.prefix;
  const std::vector<std::pair<std::string, std::string>> diag{
      {"run.max_symplectic_defect", format_double(r.max_defect)}};
  const Table traj = shg_table(r);
  std::vector<double> zeta;
  std::vector<CovarianceMatrix> vs;
  for (const auto& s : r.samples) {
    zeta.push_back(s.zeta);
    vs.push_back(s.v);
  }
  const std::vector<std::string> names{"f", "h"};
  std::vector<OutputFile> files;
  files.push_back({p + "_trajectory.csv", to_csv(traj, header_for(cfg, "single-waveguide trajectory", diag))});
  files.push_back({p + "_covariance.csv",
                   to_csv(covariance_table(zeta, "zeta", vs, names), header_for(cfg, "covariance", diag))});
  add_figure(files, cfg, traj, "zeta", "zeta", diag);
  files.push_back({p + "_metadata.txt", metadata_file(cfg, diag, files)});
  return files;
}

std::filesystem::path resolve_output_dir(const OutputSpec& spec) {
  std::filesystem::path dir(spec.directory);
  if (dir.is_relative()) {
    if (const char* root = std::getenv(kOutputRootEnv); root && *root) dir = std::filesystem::path(root) / dir;
  }
  return dir;
}

void write_atomically(const std::filesystem::path& dir, const std::vector<OutputFile>& files) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
  const std::string suffix = ".tmp." + std::to_string(::getpid());
  std::vector<fs::path> temps;
  auto cleanup = [&] {
    for (const auto& t : temps) fs::remove(t, ec);
  };
  for (const auto& f : files) {
    const fs::path tmp = dir / (f.name + suffix);
    temps.push_back(tmp);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << f.content;
    out.close();
    if (!out) {
      cleanup();
      throw std::runtime_error("cannot write '" + tmp.string() + "'");
    }
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    fs::rename(temps[i], dir / files[i].name, ec);
    if (ec) {
      cleanup();
      throw std::runtime_error("cannot rename into '" + (dir / files[i].name).string() + "': " + ec.message());
    }
  }
}

}  // namespace nlc
