#include "nlc/config.hpp"

#include "nlc/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace nlc {

namespace {

int line_of(const YAML::Mark& m) { return m.is_null() ? 0 : m.line + 1; }

// One mapping section; remembers which keys were consumed so leftovers can be
// reported as unknown.
class Section {
 public:
  Section(const YAML::Node& node, std::string name) : node_(node), name_(std::move(name)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) {
      throw ConfigError("section '" + name_ + "' must be a mapping", line_of(node_.Mark()));
    }
  }

  bool present() const { return node_ && node_.IsMap(); }

  YAML::Node raw(const std::string& key) {
    used_.insert(key);
    if (!present()) return YAML::Node();
    return node_[key];
  }

  template <class T>
  std::optional<T> get(const std::string& key) {
    const YAML::Node n = raw(key);
    if (!n || n.IsNull()) return std::nullopt;
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(where(key) + ": cannot read '" + (n.IsScalar() ? n.Scalar() : std::string("<non-scalar>")) +
                            "' as " + type_name<T>(),
                        line_of(n.Mark()));
    }
  }

  double number(const std::string& key, double fallback, bool positive, bool allow_zero = false) {
    const auto v = get<double>(key);
    if (!v) return fallback;
    const bool ok = std::isfinite(*v) && (!positive || *v > 0.0 || (allow_zero && *v == 0.0));
    if (!ok) {
      throw ConfigError(where(key) + " must be " + (allow_zero ? "finite and >= 0" : positive ? "finite and > 0" : "finite"),
                        line_of(node_[key].Mark()));
    }
    return *v;
  }

  int line(const std::string& key) const { return present() && node_[key] ? line_of(node_[key].Mark()) : 0; }

  std::string where(const std::string& key) const { return name_ + "." + key; }

  void finish() const {
    if (!present()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!used_.count(key)) {
        throw ConfigError("unknown key '" + where(key) + "'", line_of(kv.first.Mark()));
      }
    }
  }

 private:
  template <class T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, double>) return "a number";
    if constexpr (std::is_same_v<T, int>) return "an integer";
    if constexpr (std::is_same_v<T, bool>) return "true/false";
    return "a string";
  }

  YAML::Node node_;
  std::string name_;
  std::set<std::string> used_;
};

template <class Fn>
auto convert(Fn&& fn, int line) {
  try {
    return fn();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what(), line);
  }
}

void parse_device(Section& s, RunConfig& cfg) {
  if (auto kind = s.get<std::string>("kind")) {
    if (*kind == "coupler") cfg.kind = DeviceKind::kCoupler;
    else if (*kind == "two_mode_squeezer") cfg.kind = DeviceKind::kTwoModeSqueezer;
    else if (*kind == "single_shg") cfg.kind = DeviceKind::kSingleShg;
    else {
      throw ConfigError("device.kind '" + *kind + "' (expected coupler, two_mode_squeezer or single_shg)",
                        s.line("kind"));
    }
  }
  const double c = s.number("coupling_per_mm", kDefaultCoupling, true);
  const double g = s.number("nonlinearity", kDefaultNonlinearity, true);
  const auto kappa = s.get<double>("kappa");
  const auto power = s.get<double>("power_mw");
  if (kappa && power) throw ConfigError("give either device.kappa or device.power_mw, not both", s.line("kappa"));
  if (power) {
    if (!(*power > 0.0)) throw ConfigError("device.power_mw must be > 0", s.line("power_mw"));
    cfg.coupler.params = CouplerParams{c, g, *power};
  } else {
    const double k = kappa.value_or(kDefaultKappa);
    if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("device.kappa must be > 0", s.line("kappa"));
    cfg.coupler.params = CouplerParams::from_kappa(k, c, g);
  }
  cfg.coupler.power_ratio = s.number("power_ratio", kDefaultPowerRatio, true, true);
  cfg.coupler.theta_f0 = s.number("theta_f0", 0.0, false);
  cfg.coupler.phi_f0 = s.number("phi_f0", 0.0, false);
  cfg.coupler.grid.zeta_end = s.number("zeta_end", cfg.coupler.grid.zeta_end, true);

  cfg.squeezer.nonlinearity = g;
  cfg.squeezer.coupling = c;
  cfg.squeezer.power_per_waveguide_mw =
      s.number("power_per_waveguide_mw", cfg.coupler.params.power_mw / 2.0, true);
  cfg.squeezer.stage1_length_mm = s.number("stage1_length_mm", cfg.squeezer.stage1_length_mm, true, true);
  cfg.squeezer.coupler_length_mm = s.number("coupler_length_mm", 4.0 * beat_length(c), true, true);
  if (auto n = s.get<int>("coupler_points")) {
    if (*n < 2) throw ConfigError("device.coupler_points must be >= 2", s.line("coupler_points"));
    cfg.squeezer.coupler_points = *n;
  }
  cfg.shg_zeta_end = s.number("shg_zeta_end", cfg.shg_zeta_end, true);
  s.finish();
}

void parse_losses(Section& s, RunConfig& cfg) {
  cfg.coupler.loss.gamma_f = s.number("gamma_f", 0.0, true, true);
  cfg.coupler.loss.gamma_h = s.number("gamma_h", 0.0, true, true);
  if (auto conv = s.get<std::string>("convention")) {
    cfg.coupler.loss.convention = convert([&] { return loss_convention_from_string(*conv); }, s.line("convention"));
  }
  s.finish();
}

void parse_numerics(Section& s, RunConfig& cfg) {
  const double step = s.number("step", 1e-3, true);
  cfg.coupler.grid.step = step;
  cfg.squeezer.step = step;
  if (auto stride = s.get<int>("stride")) {
    if (*stride < 1) throw ConfigError("numerics.stride must be >= 1", s.line("stride"));
    cfg.coupler.grid.stride = *stride;
  }
  if (auto p = s.get<std::string>("propagator")) {
    const Propagator scheme = convert([&] { return propagator_from_string(*p); }, s.line("propagator"));
    cfg.coupler.propagator = scheme;
    cfg.squeezer.propagator = scheme;
  }
  cfg.coupler.defect_limit = s.number("defect_limit", kDefectAbortLimit, true);
  cfg.coupler.richardson_tolerance = s.number("richardson_tolerance", cfg.coupler.richardson_tolerance, true);
  s.finish();
}

void parse_vlf(const YAML::Node& node, RunConfig& cfg) {
  if (!node || node.IsNull()) return;
  if (!node.IsSequence() || node.size() != 3) {
    throw ConfigError("vlf must be a list of three combinations like \"h_a,f_a|f_b,h_b\"", line_of(node.Mark()));
  }
  VlfSet set;
  for (std::size_t i = 0; i < 3; ++i) {
    const YAML::Node item = node[i];
    if (!item.IsScalar()) throw ConfigError("vlf entries must be strings", line_of(item.Mark()));
    set[i] = convert([&] { return parse_vlf_combination(item.Scalar()); }, line_of(item.Mark()));
  }
  cfg.coupler.vlf = set;
  cfg.squeezer.vlf = set;
}

void parse_output(Section& s, RunConfig& cfg) {
  if (auto d = s.get<std::string>("directory")) {
    if (d->empty()) throw ConfigError("output.directory must not be empty", s.line("directory"));
    cfg.output.directory = *d;
  }
  if (auto p = s.get<std::string>("prefix")) {
    if (p->empty() || p->find('/') != std::string::npos) {
      throw ConfigError("output.prefix must be a non-empty file name", s.line("prefix"));
    }
    cfg.output.prefix = *p;
  }
  if (auto svg = s.get<bool>("svg")) cfg.output.svg = *svg;
  s.finish();
}

}  // namespace

std::string_view to_string(DeviceKind k) {
  switch (k) {
    case DeviceKind::kCoupler: return "coupler";
    case DeviceKind::kTwoModeSqueezer: return "two_mode_squeezer";
    case DeviceKind::kSingleShg: return "single_shg";
  }
  return "coupler";
}

RunConfig parse_config(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, line_of(e.mark));
  }
  if (root && !root.IsNull() && !root.IsMap()) throw ConfigError("top level must be a mapping", line_of(root.Mark()));

  RunConfig cfg;
  static const std::set<std::string> sections{"device", "losses", "numerics", "vlf", "output", "figure"};
  if (root.IsMap()) {
    for (const auto& kv : root) {
      const auto key = kv.first.as<std::string>();
      if (!sections.count(key)) throw ConfigError("unknown section '" + key + "'", line_of(kv.first.Mark()));
    }
  }
  auto child = [&](const char* name) { return root.IsMap() ? root[name] : YAML::Node(); };

  Section device(child("device"), "device");
  parse_device(device, cfg);
  Section losses(child("losses"), "losses");
  parse_losses(losses, cfg);
  Section numerics(child("numerics"), "numerics");
  parse_numerics(numerics, cfg);
  parse_vlf(child("vlf"), cfg);
  Section output(child("output"), "output");
  parse_output(output, cfg);

  if (const YAML::Node fig = child("figure"); fig && !fig.IsNull()) {
    if (!fig.IsScalar()) throw ConfigError("figure must be a tag like fig3", line_of(fig.Mark()));
    cfg.figure = convert([&] { return figure_from_string(fig.Scalar()); }, line_of(fig.Mark()));
  }

  convert(
      [&] {
        cfg.coupler.validate();
        cfg.squeezer.validate();
        return 0;
      },
      0);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

RunConfig with_figure(RunConfig cfg, Figure f) {
  cfg.figure = f;
  if (is_coupler_figure(f)) {
    cfg.kind = DeviceKind::kCoupler;
    cfg.coupler = coupler_preset(f);
  } else {
    cfg.kind = f == Figure::kFig7 ? DeviceKind::kSingleShg : DeviceKind::kTwoModeSqueezer;
    cfg.squeezer = squeezer_preset();
    cfg.coupler = CouplerDevice{};
    cfg.shg_zeta_end = kShgPresetZetaEnd;
  }
  return cfg;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::vector<std::pair<std::string, std::string>> describe(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  auto add = [&](std::string k, std::string v) { out.emplace_back(std::move(k), std::move(v)); };
  auto num = [&](std::string k, double v) { add(std::move(k), format_double(v)); };

  add("figure", cfg.figure ? std::string(to_string(*cfg.figure)) : "none");
  add("device.kind", std::string(to_string(cfg.kind)));
  const auto& c = cfg.coupler;
  const auto& q = cfg.squeezer;
  switch (cfg.kind) {
    case DeviceKind::kCoupler:
      num("device.coupling_per_mm", c.params.coupling);
      num("device.nonlinearity", c.params.nonlinearity);
      num("device.power_mw", c.params.power_mw);
      num("device.kappa", c.params.kappa());
      num("device.zeta_per_mm", c.params.zeta_per_mm());
      num("device.power_ratio", c.power_ratio);
      num("device.theta_f0", c.theta_f0);
      num("device.phi_f0", c.phi_f0);
      num("device.zeta_end", c.grid.zeta_end);
      num("losses.gamma_f", c.loss.gamma_f);
      num("losses.gamma_h", c.loss.gamma_h);
      add("losses.convention", std::string(to_string(c.loss.convention)));
      num("numerics.step", c.grid.step);
      num("numerics.effective_step", c.grid.effective_step());
      add("numerics.stride", std::to_string(c.grid.stride));
      add("numerics.propagator", std::string(to_string(c.propagator)));
      num("numerics.defect_limit", c.defect_limit);
      num("numerics.richardson_tolerance", c.richardson_tolerance);
      for (std::size_t i = 0; i < 3; ++i) add("vlf." + std::to_string(i + 1), describe(c.vlf[i]));
      break;
    case DeviceKind::kTwoModeSqueezer:
      num("device.stage1_length_mm", q.stage1_length_mm);
      num("device.nonlinearity", q.nonlinearity);
      num("device.power_per_waveguide_mw", q.power_per_waveguide_mw);
      num("device.stage1_zeta", q.stage1_zeta());
      num("device.coupling_per_mm", q.coupling);
      num("device.beat_length_mm", beat_length(q.coupling));
      num("device.coupler_length_mm", q.coupler_length_mm);
      add("device.coupler_points", std::to_string(q.coupler_points));
      num("numerics.step", q.step);
      add("numerics.propagator", std::string(to_string(q.propagator)));
      for (std::size_t i = 0; i < 3; ++i) add("vlf." + std::to_string(i + 1), describe(q.vlf[i]));
      break;
    case DeviceKind::kSingleShg:
      num("device.nonlinearity", q.nonlinearity);
      num("device.power_per_waveguide_mw", q.power_per_waveguide_mw);
      num("device.zeta_per_mm", std::sqrt(2.0 * q.power_per_waveguide_mw) * q.nonlinearity);
      num("device.shg_zeta_end", cfg.shg_zeta_end);
      num("numerics.step", q.step);
      add("numerics.stride", std::to_string(c.grid.stride));
      add("numerics.propagator", std::string(to_string(q.propagator)));
      break;
  }
  add("conventions.mode_order", "f_a f_b h_a h_b");
  add("conventions.vacuum_variance", "0.5");
  add("conventions.log_negativity_base", "2");
  add("conventions.loss_model", "eta at the analysis plane; decibel: 10^(-gamma z/10), natural_exponent: "
                                "exp(-gamma z), amplitude_decibel: 10^(-gamma z/20)");
  add("conventions.fidelity", "1/sqrt(det(V + V_tmsv(r))), approximate");
  add("conventions.vlf", "Var(X_j - X_k) + min_g Var(Y_j + Y_k + g1 Y_l + g2 Y_m), threshold 2");
  add("output.directory", cfg.output.directory);
  add("output.prefix", cfg.output.prefix);
  add("output.svg", cfg.output.svg ? "true" : "false");
  return out;
}

}  // namespace nlc
