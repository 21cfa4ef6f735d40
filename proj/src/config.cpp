#include "dburgers/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "dburgers/errors.hpp"
#include "dburgers/snapshot.hpp"

namespace dburgers {

bool operator==(const CosineMode& a, const CosineMode& b) {
  return a.k == b.k && a.amplitude == b.amplitude && a.phase == b.phase;
}

std::string to_string(IcKind k) {
  switch (k) {
    case IcKind::random_smooth: return "random_smooth";
    case IcKind::modes: return "modes";
    case IcKind::file: return "file";
  }
  return "?";
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& s) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

template <class Int>
Int to_int(const std::string& s) {
  const std::string t = trim(s);
  Int v{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) throw ConfigError("not an integer: '" + s + "'");
  return v;
}

bool to_bool(const std::string& s) {
  const std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError("not a boolean: '" + s + "'");
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

template <class T, class F>
std::string join(const std::vector<T>& v, F f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + f(v[i]);
  return out;
}

/// Rethrows library parse errors (InvalidArgument) as ConfigError.
template <class F>
auto as_config(F f) {
  try {
    return f();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

struct Key {
  std::string section, name;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define DB_KEY(sec, key, expr, parse, format)                                         \
  Key {                                                                               \
    sec, key, [](const RunConfig& c) { return format(c.expr); },                     \
        [](RunConfig& c, const std::string& v) { c.expr = parse(v); }                 \
  }

std::string fmt_size(std::size_t v) { return std::to_string(v); }
std::string fmt_int(long long v) { return std::to_string(v); }
std::string fmt_str(const std::string& s) { return s; }
std::string parse_str(const std::string& s) { return trim(s); }

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = {
      {"model", "form", [](const RunConfig& c) { return to_string(c.model.form); },
       [](RunConfig& c, const std::string& v) { c.model.form = as_config([&] { return form_from_string(trim(v)); }); }},
      {"model", "symbol", [](const RunConfig& c) { return to_string(c.model.symbol); },
       [](RunConfig& c, const std::string& v) {
         c.model.symbol = as_config([&] { return symbol_kind_from_string(trim(v)); });
       }},
      DB_KEY("model", "alpha", model.alpha, to_double, fmt_double),
      DB_KEY("model", "L", model.length, to_double, fmt_double),
      DB_KEY("model", "d", model.d, to_int<int>, fmt_int),
      DB_KEY("model", "N", model.n, to_int<int>, fmt_int),
      {"model", "dealias", [](const RunConfig& c) { return to_string(c.model.dealias); },
       [](RunConfig& c, const std::string& v) {
         c.model.dealias = as_config([&] { return dealias_rule_from_string(trim(v)); });
       }},
      {"model", "forcing", [](const RunConfig& c) { return format_modes(c.model.forcing); },
       [](RunConfig& c, const std::string& v) { c.model.forcing = parse_modes(v, 2); }},

      {"solver", "scheme", [](const RunConfig& c) { return to_string(c.solver.scheme); },
       [](RunConfig& c, const std::string& v) {
         c.solver.scheme = as_config([&] { return scheme_from_string(trim(v)); });
       }},
      DB_KEY("solver", "dt", solver.dt, to_double, fmt_double),
      DB_KEY("solver", "t_end", solver.t_end, to_double, fmt_double),
      DB_KEY("solver", "snapshot_every", solver.snapshot_every, to_int<std::size_t>, fmt_size),
      DB_KEY("solver", "diag_every", solver.diag_every, to_int<std::size_t>, fmt_size),
      DB_KEY("solver", "blowup_threshold", solver.blowup_threshold, to_double, fmt_double),
      DB_KEY("solver", "diag_p", solver.diag_p, to_int<int>, fmt_int),

      {"ic", "kind", [](const RunConfig& c) { return to_string(c.ic.kind); },
       [](RunConfig& c, const std::string& v) {
         const std::string t = trim(v);
         if (t == "random_smooth") c.ic.kind = IcKind::random_smooth;
         else if (t == "modes") c.ic.kind = IcKind::modes;
         else if (t == "file") c.ic.kind = IcKind::file;
         else throw ConfigError("unknown ic kind '" + t + "'");
       }},
      DB_KEY("ic", "seed", ic.seed, to_int<std::uint64_t>, fmt_size),
      DB_KEY("ic", "amplitude", ic.amplitude, to_double, fmt_double),
      DB_KEY("ic", "slope", ic.slope, to_double, fmt_double),
      DB_KEY("ic", "mean", ic.mean, to_double, fmt_double),
      {"ic", "modes", [](const RunConfig& c) { return format_modes(c.ic.modes); },
       [](RunConfig& c, const std::string& v) { c.ic.modes = parse_modes(v, 2); }},
      DB_KEY("ic", "path", ic.path, parse_str, fmt_str),
      DB_KEY("ic", "members", ic.members, to_int<std::size_t>, fmt_size),

      DB_KEY("output", "directory", output.directory, parse_str, fmt_str),
      {"output", "formats",
       [](const RunConfig& c) {
         std::vector<std::string> f;
         if (c.output.csv) f.push_back("csv");
         if (c.output.json) f.push_back("json");
         if (c.output.snapshots) f.push_back("snapshots");
         return join(f, fmt_str);
       },
       [](RunConfig& c, const std::string& v) {
         c.output.csv = c.output.json = c.output.snapshots = false;
         for (const auto& f : split(v, ',')) {
           if (f == "csv") c.output.csv = true;
           else if (f == "json") c.output.json = true;
           else if (f == "snapshots") c.output.snapshots = true;
           else throw ConfigError("unknown output format '" + f + "'");
         }
       }},

      {"analysis", "scales", [](const RunConfig& c) { return join(c.analysis.scales, fmt_double); },
       [](RunConfig& c, const std::string& v) {
         c.analysis.scales.clear();
         for (const auto& s : split(v, ',')) c.analysis.scales.push_back(to_double(s));
       }},
      DB_KEY("analysis", "burn_in", analysis.burn_in, to_double, fmt_double),
      DB_KEY("analysis", "equivalence_every", analysis.equivalence_every, to_double, fmt_double),
      {"analysis", "dispersion_modes", [](const RunConfig& c) { return join(c.analysis.dispersion_modes, fmt_int); },
       [](RunConfig& c, const std::string& v) {
         c.analysis.dispersion_modes.clear();
         for (const auto& s : split(v, ',')) c.analysis.dispersion_modes.push_back(to_int<int>(s));
       }},
      DB_KEY("analysis", "dispersion_amplitude", analysis.dispersion_amplitude, to_double, fmt_double),
      DB_KEY("analysis", "spectrum_cutoff", analysis.spectrum_cutoff, to_int<std::int64_t>, fmt_int),
      {"analysis", "gap_targets", [](const RunConfig& c) { return join(c.analysis.gap_targets, fmt_double); },
       [](RunConfig& c, const std::string& v) {
         c.analysis.gap_targets.clear();
         for (const auto& s : split(v, ',')) c.analysis.gap_targets.push_back(to_double(s));
       }},
      DB_KEY("analysis", "probe_pairs", analysis.probe_pairs, to_int<std::size_t>, fmt_size),
      DB_KEY("analysis", "probe_seed", analysis.probe_seed, to_int<std::uint64_t>, fmt_size),
      DB_KEY("analysis", "gap_safety", analysis.gap_safety, to_double, fmt_double),
      DB_KEY("analysis", "n", analysis.n, to_int<std::size_t>, fmt_size),
      DB_KEY("analysis", "auto_n", analysis.auto_n, to_bool, fmt_bool),
      {"analysis", "method", [](const RunConfig& c) { return to_string(c.analysis.method); },
       [](RunConfig& c, const std::string& v) {
         c.analysis.method = as_config([&] { return graph_method_from_string(trim(v)); });
       }},
      DB_KEY("analysis", "depth", analysis.depth, to_int<std::size_t>, fmt_size),
      DB_KEY("analysis", "tol", analysis.tol, to_double, fmt_double),
      DB_KEY("analysis", "attraction_ics", analysis.attraction_ics, to_int<std::size_t>, fmt_size),
      DB_KEY("analysis", "attraction_t_end", analysis.attraction_t_end, to_double, fmt_double),
      DB_KEY("analysis", "prepared_dt", analysis.prepared_dt, to_double, fmt_double),
      DB_KEY("analysis", "squeeze_pairs", analysis.squeeze_pairs, to_int<std::size_t>, fmt_size),
      DB_KEY("analysis", "squeeze_separation", analysis.squeeze_separation, to_double, fmt_double),
      DB_KEY("analysis", "squeeze_t_end", analysis.squeeze_t_end, to_double, fmt_double),
  };
  return keys;
}

#undef DB_KEY

const Key& find_key(const std::string& section, const std::string& name) {
  for (const auto& k : registry())
    if (k.section == section && k.name == name) return k;
  throw ConfigError("unknown key '" + name + "' in section [" + section + "]");
}

void set_key(RunConfig& c, const std::string& section, const std::string& name, const std::string& value) {
  const Key& k = find_key(section, name);
  try {
    k.set(c, value);
  } catch (const ConfigError& e) {
    throw ConfigError("[" + section + "] " + name + ": " + e.what());
  }
}

RunConfig parse_unvalidated(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  RunConfig c;
  for (const auto& [section, body] : tree) {
    if (section != "model" && section != "solver" && section != "ic" && section != "output" && section != "analysis")
      throw ConfigError(body.empty() ? "key '" + section + "' outside any section"
                                     : "unknown section [" + section + "]");
    for (const auto& [name, value] : body) set_key(c, section, name, value.data());
  }
  return c;
}

}  // namespace

std::vector<CosineMode> parse_modes(const std::string& text, int d) {
  std::vector<CosineMode> out;
  for (const auto& item : split(text, ';')) {
    std::vector<std::string> f;
    std::istringstream in(item);
    for (std::string w; in >> w;) f.push_back(w);
    if (f.size() < 3 || f.size() > 4)
      throw ConfigError("mode '" + item + "' must read 'k1 k2 amplitude [phase]'");
    CosineMode m;
    m.k = {to_int<int>(f[0]), to_int<int>(f[1])};
    if (d == 1 && m.k[1] != 0) throw ConfigError("mode '" + item + "' has k2 != 0 in 1D");
    m.amplitude = to_double(f[2]);
    m.phase = f.size() == 4 ? to_double(f[3]) : 0.0;
    out.push_back(m);
  }
  return out;
}

std::string format_modes(const std::vector<CosineMode>& modes) {
  std::string out;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& m = modes[i];
    out += (i ? "; " : "") + std::to_string(m.k[0]) + " " + std::to_string(m.k[1]) + " " + fmt_double(m.amplitude) +
           " " + fmt_double(m.phase);
  }
  return out;
}

GridSpec RunConfig::grid() const { return GridSpec{model.d, model.n, model.length, model.dealias}; }

MultiplierSymbol RunConfig::symbol() const {
  switch (model.symbol) {
    case MultiplierSymbol::Kind::zero: return MultiplierSymbol::zero();
    case MultiplierSymbol::Kind::bse: return MultiplierSymbol::bse(model.alpha);
    case MultiplierSymbol::Kind::qse: return MultiplierSymbol::qse(model.alpha);
    case MultiplierSymbol::Kind::kse: return MultiplierSymbol::kse(model.alpha);
    case MultiplierSymbol::Kind::custom: break;
  }
  throw ConfigError("custom symbols are not configurable from a file");
}

ModelSpec RunConfig::model_spec() const {
  return as_config([&] {
    const GridSpec g = grid();
    SpectralField G = cosine_potential(g, model.forcing);
    G.set_zero_mean(true);
    return ModelSpec::make(model.form, symbol(), G);
  });
}

SolverConfig RunConfig::solver_config() const {
  SolverConfig s;
  s.scheme = solver.scheme;
  s.dt = solver.dt;
  s.t_end = solver.t_end;
  s.snapshot_every = solver.snapshot_every;
  s.diag_every = solver.diag_every;
  s.blowup_threshold = solver.blowup_threshold;
  s.diag_p = solver.diag_p;
  return s;
}

void RunConfig::validate() const {
  if (model.symbol == MultiplierSymbol::Kind::kse && is_colehopf(model.form))
    throw ConfigError("symbol kse is unbounded, so the Cole-Hopf forms are undefined for it; use a primal or "
                      "integrated form");
  if (model.n % 2 != 0) throw ConfigError("N must be even (got " + std::to_string(model.n) + ")");
  if (model.d != 1 && model.d != 2) throw ConfigError("d must be 1 or 2");
  if (model.n < 8) throw ConfigError("N must be at least 8");
  if (!(model.length > 0.0)) throw ConfigError("L must be positive");
  if (model.symbol == MultiplierSymbol::Kind::custom) throw ConfigError("custom symbols are not configurable");
  if (!(solver.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(solver.t_end >= 0.0)) throw ConfigError("t_end must be nonnegative");
  if (!(solver.blowup_threshold > 0.0)) throw ConfigError("blowup_threshold must be positive");
  if (solver.diag_p <= 2) throw ConfigError("diag_p must exceed 2");
  if (ic.members == 0) throw ConfigError("ic.members must be at least 1");
  for (const auto& m : model.forcing) {
    if (m.k == Wavevector{0, 0}) throw ConfigError("forcing must have zero mean (k = 0 entry)");
    if (model.d == 1 && m.k[1] != 0) throw ConfigError("forcing mode with k2 != 0 in 1D");
  }
  for (const auto& m : ic.modes)
    if (model.d == 1 && m.k[1] != 0) throw ConfigError("ic mode with k2 != 0 in 1D");
  if (ic.kind == IcKind::modes && ic.modes.empty()) throw ConfigError("ic kind 'modes' needs a mode list");
  if (ic.kind == IcKind::file) {
    if (ic.path.empty()) throw ConfigError("ic kind 'file' needs a path");
    if (!std::filesystem::exists(ic.path)) throw ConfigError("ic file not found: " + ic.path);
  }
  if (analysis.scales.empty()) throw ConfigError("analysis.scales is empty");
  if (!(analysis.tol > 0.0)) throw ConfigError("analysis.tol must be positive");
  if (!(analysis.prepared_dt > 0.0)) throw ConfigError("analysis.prepared_dt must be positive");
  if (analysis.spectrum_cutoff < 1) throw ConfigError("analysis.spectrum_cutoff must be positive");
  const GridSpec g = grid();
  for (const auto& m : model.forcing)
    if (!g.representable(m.k)) throw ConfigError("forcing mode not representable on the grid");
  for (const auto& m : ic.modes)
    if (!g.representable(m.k)) throw ConfigError("ic mode not representable on the grid");
}

RunConfig parse_config(const std::string& text) {
  RunConfig c = parse_unvalidated(text);
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

RunConfig apply_overrides(const std::string& text, const std::vector<std::string>& overrides) {
  RunConfig c = parse_unvalidated(text);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError("override '" + o + "' must read section.key=value");
    set_key(c, trim(o.substr(0, dot)), trim(o.substr(dot + 1, eq - dot - 1)), o.substr(eq + 1));
  }
  c.validate();
  return c;
}

std::string emit_config(const RunConfig& config) {
  std::string out, section;
  for (const auto& k : registry()) {
    if (k.section != section) {
      out += (section.empty() ? "[" : "\n[") + k.section + "]\n";
      section = k.section;
    }
    out += k.name + " = " + k.get(config) + "\n";
  }
  return out;
}

SpectralField initial_potential(const RunConfig& config, std::size_t member, double amplitude_scale) {
  const GridSpec g = config.grid();
  SpectralField phi(g, false);
  switch (config.ic.kind) {
    case IcKind::random_smooth:
      phi = random_smooth_potential(g, split_seed(config.ic.seed, member), amplitude_scale * config.ic.amplitude,
                                    config.ic.slope);
      break;
    case IcKind::modes:
      phi = cosine_potential(g, config.ic.modes);
      phi *= amplitude_scale;
      break;
    case IcKind::file: {
      const Snapshot snap = as_config([&] { return read_snapshot(config.ic.path); });
      if (!(snap.field.grid() == g)) throw ConfigError("ic file grid does not match the model grid");
      phi = snap.field;
      phi *= amplitude_scale;
      break;
    }
  }
  phi.set_zero_mean(false);
  phi[0] += config.ic.mean;
  return phi;
}

}  // namespace dburgers
