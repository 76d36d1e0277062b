#include "nlc/runner.hpp"

#include "nlc/errors.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

namespace nlc {

namespace {

struct RunOutput {
  std::vector<OutputFile> files;
  std::string summary;
  std::optional<SweepPoint> point;
};

std::vector<double> pair_vector(const PairReport& p) {
  return {p.fa_fb, p.ha_hb, p.fa_ha, p.fa_hb, p.ff_hh, p.fa_ha_fb_hb, p.fa_hb_fb_ha};
}

// Longest run of samples with every VLF value below threshold.
template <class Samples, class Coord>
std::pair<double, double> longest_window(const Samples& samples, Coord coord) {
  double best_len = -1.0, start = std::nan(""), end = std::nan("");
  std::optional<std::size_t> open;
  for (std::size_t i = 0; i <= samples.size(); ++i) {
    const bool inside = i < samples.size() && samples[i].vlf.all_violated();
    if (inside && !open) open = i;
    if (!inside && open) {
      const double a = coord(samples[*open]), b = coord(samples[i - 1]);
      if (b - a > best_len) {
        best_len = b - a;
        start = a;
        end = b;
      }
      open.reset();
    }
  }
  return {start, end};
}

template <class Samples, class Coord>
void fill_peaks(SweepPoint& p, const Samples& samples, Coord coord) {
  p.peaks.assign(7, 0.0);
  p.peaks_at.assign(7, std::nan(""));
  for (const auto& s : samples) {
    const auto v = pair_vector(s.pairs);
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (v[k] > p.peaks[k] || std::isnan(p.peaks_at[k])) {
        p.peaks[k] = v[k];
        p.peaks_at[k] = coord(s);
      }
    }
  }
  p.single_color_peak = std::max(p.peaks[0], p.peaks[1]);
  std::tie(p.vlf_window_start, p.vlf_window_end) = longest_window(samples, coord);
}

std::string fmt(double x) { return format_double(std::round(x * 1e4) / 1e4); }

RunOutput execute(const RunConfig& cfg, double sweep_value) {
  RunOutput out;
  switch (cfg.kind) {
    case DeviceKind::kCoupler: {
      const CouplerReport r = run_coupler(cfg.coupler);
      out.files = coupler_artifacts(cfg, r);
      out.point = summarize(sweep_value, r);
      out.summary = "kappa = " + fmt(r.kappa) + ", peak E_N(f_a,f_b) = " + fmt(out.point->peaks[0]) +
                    ", peak E_N(h_a,h_b) = " + fmt(out.point->peaks[1]);
      if (r.epr) {
        out.summary += "; zeta0 = " + fmt(r.epr->zeta0) + ", mu_h = " + fmt(r.epr->purity_h) +
                       ", r* = " + fmt(r.epr->r_star) + ", F* = " + fmt(r.epr->fidelity);
      }
      break;
    }
    case DeviceKind::kTwoModeSqueezer: {
      const SqueezerReport r = run_two_mode_squeezer(cfg.squeezer);
      out.files = squeezer_artifacts(cfg, r);
      out.point = summarize(sweep_value, r);
      out.summary = "stage-1 zeta = " + fmt(r.device.stage1_zeta()) + ", L_ab = " +
                    fmt(beat_length(r.device.coupling)) + " mm, peak E_N(f_a,f_b) = " + fmt(out.point->peaks[0]) +
                    " at z = " + fmt(out.point->peaks_at[0]) + " mm";
      break;
    }
    case DeviceKind::kSingleShg: {
      const ShgReport r = run_single_shg(cfg.squeezer.power_per_waveguide_mw, cfg.squeezer.nonlinearity,
                                         IntegrationGrid{cfg.shg_zeta_end, cfg.squeezer.step, cfg.coupler.grid.stride},
                                         cfg.squeezer.propagator);
      out.files = shg_artifacts(cfg, r);
      out.summary = "single waveguide, zeta_end = " + fmt(cfg.shg_zeta_end);
      break;
    }
  }
  return out;
}

// Maps library exceptions onto exit codes; returns nullopt when fn succeeded.
template <class Fn>
std::optional<int> guarded(std::ostream& err, Fn&& fn) {
  try {
    fn();
    return std::nullopt;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const InvalidState& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace

int cmd_simulate(const SimulateRequest& req, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  RunOutput result;
  std::filesystem::path dir;
  if (auto code = guarded(err, [&] {
        cfg = load_config(req.config);
        if (req.figure) cfg = with_figure(cfg, figure_from_string(*req.figure));
        else if (cfg.figure) cfg = with_figure(cfg, *cfg.figure);
        cfg.output.svg = cfg.output.svg || req.svg;
        result = execute(cfg, std::nan(""));
        dir = resolve_output_dir(cfg.output);
        write_atomically(dir, result.files);
      })) {
    return *code;
  }
  out << result.summary << '\n';
  for (const auto& f : result.files) out << "wrote " << (dir / f.name).string() << '\n';
  return kExitOk;
}

std::vector<double> parse_value_list(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view item = text.substr(pos, comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      double v = 0.0;
      const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
      if (res.ec != std::errc() || res.ptr != item.data() + item.size() || !std::isfinite(v)) {
        throw InvalidArgument("cannot parse sweep value '" + std::string(item) + "'");
      }
      out.push_back(v);
    } else if (comma != text.size() || pos != 0) {
      throw InvalidArgument("empty entry in sweep value list '" + std::string(text) + "'");
    }
    pos = comma + 1;
  }
  if (out.empty()) throw InvalidArgument("sweep value list is empty");
  return out;
}

RunConfig apply_sweep_value(RunConfig cfg, const std::string& param, double value) {
  if (std::ranges::find(kSweepParameters, param) == kSweepParameters.end()) {
    std::string names;
    for (const auto& p : kSweepParameters) names += (names.empty() ? "" : ", ") + p;
    throw InvalidArgument("unknown sweep parameter '" + param + "' (expected one of " + names + ")");
  }
  auto& c = cfg.coupler;
  auto& q = cfg.squeezer;
  const bool coupler = cfg.kind == DeviceKind::kCoupler;
  auto coupler_only = [&] {
    if (!coupler) throw InvalidArgument("sweep parameter '" + param + "' applies to coupler devices only");
  };
  if (param == "kappa") {
    coupler_only();
    c.params = CouplerParams::from_kappa(value, c.params.coupling, c.params.nonlinearity);
  } else if (param == "P") {
    c.params.power_mw = value;
    q.power_per_waveguide_mw = value / 2.0;
  } else if (param == "C") {
    c.params.coupling = value;
    q.coupling = value;
  } else if (param == "g") {
    c.params.nonlinearity = value;
    q.nonlinearity = value;
  } else if (param == "zeta_end") {
    if (cfg.kind == DeviceKind::kTwoModeSqueezer) {
      throw InvalidArgument("sweep parameter 'zeta_end' does not apply to the two-mode squeezer");
    }
    c.grid.zeta_end = value;
    cfg.shg_zeta_end = value;
  } else if (param == "gamma_f") {
    coupler_only();
    c.loss.gamma_f = value;
  } else {
    coupler_only();
    c.loss.gamma_h = value;
  }
  if (coupler) c.validate();
  else q.validate();
  return cfg;
}

SweepPoint summarize(double value, const CouplerReport& r) {
  SweepPoint p;
  p.value = value;
  p.kappa = r.kappa;
  fill_peaks(p, r.samples, [](const CouplerSample& s) { return s.zeta; });
  return p;
}

SweepPoint summarize(double value, const SqueezerReport& r) {
  SweepPoint p;
  p.value = value;
  fill_peaks(p, r.samples, [](const SqueezerSample& s) { return s.z_mm; });
  return p;
}

Table sweep_table(const std::string& param, const std::vector<SweepPoint>& points) {
  static const std::vector<std::string> pairs{"E_fa_fb", "E_ha_hb",     "E_fa_ha",    "E_fa_hb",
                                              "E_ffhh",  "E_faha_fbhb", "E_fahb_fbha"};
  Table t;
  t.columns = {param, "kappa"};
  for (const auto& n : pairs) {
    t.columns.push_back(n + "_peak");
    t.columns.push_back(n + "_peak_at");
  }
  for (const char* c : {"single_color_peak", "vlf_window_start", "vlf_window_end"}) t.columns.emplace_back(c);
  for (const auto& p : points) {
    std::vector<double> row{p.value, p.kappa};
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      row.push_back(p.peaks.at(k));
      row.push_back(p.peaks_at.at(k));
    }
    row.push_back(p.single_color_peak);
    row.push_back(p.vlf_window_start);
    row.push_back(p.vlf_window_end);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

int cmd_sweep(const SweepRequest& req, std::ostream& out, std::ostream& err) {
  if (req.jobs < 1) {
    err << "invalid argument: --jobs must be >= 1\n";
    return kExitUsage;
  }
  RunConfig base;
  std::vector<RunConfig> configs;
  if (auto code = guarded(err, [&] {
        if (req.values.empty()) throw InvalidArgument("sweep value list is empty");
        base = load_config(req.config);
        if (base.figure) base = with_figure(base, *base.figure);
        for (double v : req.values) configs.push_back(apply_sweep_value(base, req.param, v));
      })) {
    return *code;
  }

  std::vector<RunOutput> results(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  parallel_for(configs.size(), req.jobs, [&](std::size_t i) {
    try {
      results[i] = execute(configs[i], req.values[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    err << req.param << " = " << format_double(req.values[i]) << ": ";
    return *guarded(err, [&] { std::rethrow_exception(errors[i]); });
  }

  const std::filesystem::path root = resolve_output_dir(base.output);
  std::vector<SweepPoint> points;
  if (auto code = guarded(err, [&] {
        for (std::size_t i = 0; i < configs.size(); ++i) {
          const auto sub = root / (req.param + "_" + format_double(req.values[i]));
          write_atomically(sub, results[i].files);
          out << req.param << " = " << format_double(req.values[i]) << ": " << results[i].summary << '\n';
          if (results[i].point) points.push_back(*results[i].point);
        }
        if (!points.empty()) {
          auto meta = describe(base);
          meta.emplace_back("sweep.parameter", req.param);
          const std::string name = base.output.prefix + "_sweep_" + req.param + ".csv";
          write_atomically(root, {{name, to_csv(sweep_table(req.param, points),
                                                "# nlcoupler sweep summary\n" + comment_block(meta))}});
          out << "wrote " << (root / name).string() << '\n';
        }
      })) {
    return *code;
  }
  return kExitOk;
}

int cmd_selfcheck(const SelfcheckOptions& opts, std::ostream& out, std::ostream& err) {
  std::vector<CheckResult> results;
  if (auto code = guarded(err, [&] { results = run_selfcheck(opts); })) return *code;
  out << "seed " << opts.seed << ", step " << format_double(opts.step) << '\n' << format_results(results);
  return all_passed(results) ? kExitOk : kExitInvariant;
}

}  // namespace nlc
