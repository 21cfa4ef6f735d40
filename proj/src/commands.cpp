#include "dburgers/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <map>
#include <random>
#include <sstream>

#include "dburgers/colehopf.hpp"
#include "dburgers/diagnostics.hpp"
#include "dburgers/errors.hpp"
#include "dburgers/manifold.hpp"
#include "dburgers/snapshot.hpp"
#include "dburgers/spectrum.hpp"
#include "json.hpp"

#ifndef DBURGERS_VERSION
#define DBURGERS_VERSION "unknown"
#endif

namespace dburgers {

namespace fs = std::filesystem;
using nlohmann::json;

std::string code_version() { return DBURGERS_VERSION; }

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"simulate", "equivalence", "dispersion", "gaps",
                                              "absorb",   "prepare",     "manifold",   "squeeze"};
  return names;
}

fs::path resolve_output_dir(const RunConfig& config) {
  const fs::path dir = config.output.directory;
  const char* root = std::getenv("DBURGERS_OUTPUT_ROOT");
  if (root && *root && dir.is_relative()) return fs::path(root) / dir;
  return dir;
}

int exit_code_for(const std::exception_ptr& error) {
  if (!error) return 0;
  try {
    std::rethrow_exception(error);
  } catch (const ConfigError&) {
    return 2;
  } catch (const BlowUp&) {
    return 3;
  } catch (const PositivityLost&) {
    return 4;
  } catch (const NoConvergence&) {
    return 5;
  } catch (...) {
    return 1;
  }
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Output directory with a schema of every CSV column written through it.
class RunDir {
 public:
  RunDir(fs::path root, const RunConfig& config) : root_(std::move(root)), config_(config) {
    fs::create_directories(root_);
  }

  const fs::path& root() const { return root_; }

  struct Column {
    std::string name, description;
  };

  void csv(const fs::path& rel, const std::vector<Column>& columns, const std::vector<std::vector<double>>& rows) {
    if (!config_.output.csv) return;
    std::string text;
    json cols = json::object();
    for (std::size_t i = 0; i < columns.size(); ++i) {
      text += (i ? "," : "") + columns[i].name;
      cols[columns[i].name] = columns[i].description;
    }
    text += '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + num(row[i]);
      text += '\n';
    }
    write(rel, text);
    schema_[rel.generic_string()] = cols;
  }

  void json_file(const fs::path& rel, const json& value) {
    if (!config_.output.json) return;
    write(rel, value.dump(2) + "\n");
  }

  void snapshot(const fs::path& rel, const Snapshot& snap) {
    if (!config_.output.snapshots) return;
    fs::create_directories((root_ / rel).parent_path());
    write_snapshot(root_ / rel, snap);
  }

  void manifest(const std::string& command) {
    json resolved = json::object();
    std::istringstream in(emit_config(config_));
    std::string line, section;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (line.front() == '[') {
        section = line.substr(1, line.size() - 2);
        resolved[section] = json::object();
        continue;
      }
      const auto eq = line.find(" = ");
      resolved[section][line.substr(0, eq)] = line.substr(eq + 3);
    }
    const json m = {{"command", command},
                    {"version", code_version()},
                    {"config", resolved},
                    {"config_text", emit_config(config_)}};
    write("manifest.json", m.dump(2) + "\n");
  }

  void finish() {
    if (schema_.empty()) return;
    write("schema.json", schema_.dump(2) + "\n");
  }

 private:
  void write(const fs::path& rel, const std::string& text) {
    const fs::path p = root_ / rel;
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << text;
  }

  fs::path root_;
  const RunConfig& config_;
  json schema_ = json::object();
};

const std::vector<RunDir::Column> kDiagColumns{
    {"t", "time"},
    {"l2_U", "||U||_{L^2}"},
    {"h1_U", "||U||_{\\dot H^1}"},
    {"linf_phi", "||phi - <phi>||_{L^inf}"},
    {"alpha_p", "sum_i ||(d_i U_i)^+||_{L^p}^p with p = solver.diag_p"},
    {"mean", "<phi>"},
    {"mean_residual", "pointwise residual of the mean equation (0 at the ends)"},
    {"curl_residual", "||curl U|| / ||U|| (2D; 0 in 1D)"},
};

std::vector<std::vector<double>> diag_rows(const std::vector<DiagnosticsRecord>& records) {
  std::vector<std::vector<double>> rows;
  for (const auto& r : records)
    rows.push_back({r.t, r.norm("l2_U"), r.norm("h1_U"), r.norm("linf_phi"), r.alpha_p, r.mean_value,
                    r.mean_residual, r.curl_residual});
  return rows;
}

std::string step_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", i);
  return buf;
}

std::string scale_name(double s) {
  std::ostringstream o;
  o << "scale_" << s;
  return o.str();
}

void write_state(RunDir& dir, const fs::path& stem, double t, const State& s) {
  for (std::size_t c = 0; c < s.fields.size(); ++c) {
    Snapshot snap{s.fields[c], t, to_string(s.form)};
    if (is_integrated(s.form)) {
      snap.field.set_zero_mean(false);
      snap.field[0] = s.mean;
    }
    const std::string suffix = s.fields.size() > 1 ? "_u" + std::to_string(c + 1) : "";
    dir.snapshot(stem.string() + suffix + ".json", snap);
  }
}

/// Writes snapshots as integrate produces them.
class SnapshotSink : public TrajectorySink {
 public:
  SnapshotSink(RunDir& dir, fs::path sub) : dir_(dir), sub_(std::move(sub)) {}
  void on_snapshot(double t, const State& s) override { write_state(dir_, sub_ / ("snap_" + step_name(count_++)), t, s); }

 private:
  RunDir& dir_;
  fs::path sub_;
  std::size_t count_ = 0;
};

State initial_state(const RunConfig& c, std::size_t member, double scale = 1.0) {
  return state_from_potential(initial_potential(c, member, scale), c.model.form);
}

// simulate ------------------------------------------------------------------------------

void cmd_simulate(const RunConfig& c, RunDir& dir) {
  const ModelSpec spec = c.model_spec();
  SolverConfig cfg = c.solver_config();
  json summary = json::array();
  for (std::size_t m = 0; m < c.ic.members; ++m) {
    const fs::path sub = c.ic.members > 1 ? fs::path("member_" + std::to_string(m)) : fs::path();
    const State s0 = initial_state(c, m);
    if (c.solver.t_end == 0.0) {
      write_state(dir, sub / "snapshots" / ("snap_" + step_name(0)), 0.0, s0);
      continue;
    }
    SnapshotSink sink(dir, sub / "snapshots");
    TrajectorySink* sinks[] = {&sink};
    Trajectory tr = integrate(s0, spec, cfg, sinks);
    if (is_integrated(c.model.form)) annotate_mean_residuals(tr.records, has_mean_coupling(c.model.form) ? 1.0 : 0.0);
    dir.csv(sub / "diagnostics.csv", kDiagColumns, diag_rows(tr.records));
    const DiagnosticsRecord last = compute_record(tr.final_state, tr.final_time, spec, c.solver.diag_p);
    summary.push_back({{"member", m},
                       {"final_time", tr.final_time},
                       {"steps", tr.steps},
                       {"cfl_warnings", tr.cfl_warnings},
                       {"final_norms", last.norms},
                       {"final_alpha_p", last.alpha_p},
                       {"final_mean", last.mean_value},
                       {"final_time_derivative_l2", time_derivative_norm(tr.final_state, spec)}});
  }
  if (c.solver.t_end > 0.0) dir.json_file("summary.json", {{"members", summary}});
}

// equivalence -------------------------------------------------------------------------------

void cmd_equivalence(const RunConfig& c, RunDir& dir) {
  const ModelSpec base = c.model_spec();
  const bool plain = c.model.form == Form::integrated_plain || c.model.form == Form::colehopf_plain;
  const Form fi = plain ? Form::integrated_plain : Form::integrated_adopted;
  const Form fc = plain ? Form::colehopf_plain : Form::colehopf;
  const bool with_ch = c.symbol().bounded();
  const SpectralField phi0 = initial_potential(c, 0);

  std::vector<Form> forms{Form::primal, fi};
  if (with_ch) forms.push_back(fc);
  std::vector<ModelSpec> specs;
  std::vector<State> states;
  std::vector<Stepper> steppers;
  for (Form f : forms) {
    specs.push_back(base.with_form(f));
    states.push_back(state_from_potential(phi0, f));
    steppers.emplace_back(specs.back(), c.solver.scheme, c.solver.dt);
  }
  const double dt = c.solver.dt;
  const auto steps = std::size_t(std::llround(c.solver.t_end / dt));
  const auto every = std::max<std::size_t>(1, std::size_t(std::llround(c.analysis.equivalence_every / dt)));
  std::vector<std::vector<double>> rows;
  double worst_i = 0.0, worst_c = 0.0;
  const auto record = [&](double t) {
    const VectorField u = velocity_of(states[0]);
    const double un = norm(u, Norm::l2());
    const double scale = un > 0.0 ? un : 1.0;
    const double di = norm(u - velocity_of(states[1]), Norm::l2()) / scale;
    const double dc = with_ch ? norm(u - velocity_of(states[2]), Norm::l2()) / scale : std::nan("");
    worst_i = std::max(worst_i, di);
    if (with_ch) worst_c = std::max(worst_c, dc);
    rows.push_back({t, un, di, dc});
  };
  record(0.0);
  for (std::size_t n = 1; n <= steps; ++n) {
    for (std::size_t f = 0; f < forms.size(); ++f) {
      states[f] = steppers[f].step(states[f]);
      guard_state(states[f], n * dt, c.solver.blowup_threshold);
    }
    if (n % every == 0 || n == steps) record(n * dt);
  }
  dir.csv("equivalence.csv",
          {{"t", "time"},
           {"l2_U", "||U_primal||_{L^2}"},
           {"dev_integrated", "||U_primal - grad phi||_{L^2} / ||U_primal||_{L^2}"},
           {"dev_colehopf", "||U_primal - (-2 grad psi / psi)||_{L^2} / ||U_primal||_{L^2} (NaN when not run)"}},
          rows);
  json report = {{"forms", json::array()},
                 {"max_deviation_integrated", worst_i},
                 {"max_deviation_colehopf", with_ch ? json(worst_c) : json(nullptr)}};
  for (Form f : forms) report["forms"].push_back(to_string(f));
  dir.json_file("equivalence.json", report);
  for (std::size_t f = 0; f < forms.size(); ++f)
    write_state(dir, fs::path("snapshots") / ("final_" + to_string(forms[f])), steps * dt, states[f]);
}

// dispersion -----------------------------------------------------------------------------

void cmd_dispersion(const RunConfig& c, RunDir& dir) {
  const GridSpec g = c.grid();
  const ModelSpec spec = c.model_spec().with_form(Form::primal);
  const double dt = c.solver.dt;
  const auto steps = std::size_t(std::llround(c.solver.t_end / dt));
  const std::size_t every = std::max<std::size_t>(1, c.solver.diag_every);
  std::vector<std::vector<double>> rows;
  json table = json::array();
  double worst = 0.0;
  for (int k : c.analysis.dispersion_modes) {
    const Wavevector kv{k, 0};
    if (k <= 0 || !g.representable(kv)) throw ConfigError("dispersion mode " + std::to_string(k) + " not on the grid");
    SpectralField phi(g, true);
    phi.set_coeff(kv, c.analysis.dispersion_amplitude);
    State s = state_from_potential(phi, Form::primal);
    Stepper st(spec, c.solver.scheme, dt);
    std::vector<double> t{0.0}, amp{std::abs(s.fields[0].coeff(kv))};
    for (std::size_t n = 1; n <= steps; ++n) {
      s = st.step(s);
      if (n % every) continue;
      const double a = std::abs(s.fields[0].coeff(kv));
      if (a > 1e-6) break;  // left the linear regime
      t.push_back(n * dt);
      amp.push_back(a);
    }
    const double exact = linear_dispersion(spec.symbol, kv, g.length);
    const GrowthFit fit = growth_rate_fit(t, amp, 1e-6);
    const double rel = exact != 0.0 ? std::abs(fit.omega - exact) / std::abs(exact) : std::abs(fit.omega);
    worst = std::max(worst, rel);
    rows.push_back({double(k), g.kappa_unit() * k, fit.omega, exact, rel, fit.residual, double(fit.points)});
    table.push_back({{"k", k}, {"omega_fit", fit.omega}, {"omega_exact", exact}, {"relative_error", rel}});
  }
  dir.csv("dispersion.csv",
          {{"k", "integer wavenumber along axis 1"},
           {"kappa", "2 pi k / L"},
           {"omega_fit", "least-squares growth rate of |c_k(t)|"},
           {"omega_exact", "-kappa^2 + m(kappa)"},
           {"relative_error", "|omega_fit - omega_exact| / |omega_exact|"},
           {"fit_rms", "RMS residual of the log-linear fit"},
           {"points", "samples used by the fit"}},
          rows);
  dir.json_file("dispersion.json", {{"symbol", to_string(c.model.symbol)}, {"modes", table},
                                    {"max_relative_error", worst}});
}

// gaps ---------------------------------------------------------------------------------------

void cmd_gaps(const RunConfig& c, RunDir& dir) {
  const SpectrumTable t = enumerate(c.model.d, c.model.length, c.analysis.spectrum_cutoff);
  const auto g = gaps(t);
  std::vector<std::vector<double>> rows;
  double max_gap = 0.0;
  for (const auto& e : g) {
    rows.push_back({double(e.n), double(t[e.n].k2), t[e.n].lambda, double(t[e.n].multiplicity), e.gap});
    max_gap = std::max(max_gap, e.gap);
  }
  dir.csv("gaps.csv",
          {{"n", "index of the distinct eigenvalue"},
           {"k2", "integer |k|^2"},
           {"lambda_n", "(2 pi / L)^2 |k|^2"},
           {"multiplicity", "lattice points with this |k|^2"},
           {"gap", "lambda_{n+1} - lambda_n"}},
          rows);
  json first = json::object();
  for (double target : c.analysis.gap_targets) {
    const auto n = first_index_with_gap(t, target);
    first[num(target)] = n ? json(*n) : json(nullptr);
  }
  dir.json_file("gaps.json", {{"d", c.model.d},
                              {"L", c.model.length},
                              {"cutoff", c.analysis.spectrum_cutoff},
                              {"eigenvalues", t.size()},
                              {"max_gap", max_gap},
                              {"first_n_for", first}});
}

// absorb ----------------------------------------------------------------------------------------

void cmd_absorb(const RunConfig& c, RunDir& dir) {
  const ModelSpec spec = c.model_spec();
  const SolverConfig cfg = c.solver_config();
  std::vector<std::vector<double>> rows;
  json per_scale = json::array();
  std::vector<double> radii, entries;
  for (double scale : c.analysis.scales) {
    // Members run concurrently; each writes only inside its own directory.
    std::vector<std::future<Trajectory>> jobs;
    for (std::size_t m = 0; m < c.ic.members; ++m)
      jobs.push_back(std::async(std::launch::async, [&, m] { return integrate(initial_state(c, m, scale), spec, cfg); }));
    std::vector<NormSeries> ensemble;
    for (std::size_t m = 0; m < c.ic.members; ++m) {
      const Trajectory tr = jobs[m].get();
      const fs::path sub = fs::path(scale_name(scale)) / ("member_" + std::to_string(m));
      dir.csv(sub / "diagnostics.csv", kDiagColumns, diag_rows(tr.records));
      write_state(dir, sub / "final", tr.final_time, tr.final_state);
      ensemble.push_back({"member_" + std::to_string(m), times(tr.records), series(tr.records, "h1_U")});
    }
    const AbsorbingBallEstimate est = absorbing_entry(ensemble, c.analysis.burn_in);
    radii.push_back(est.radius);
    entries.push_back(est.entry_time);
    rows.push_back({scale, est.radius, est.entry_time, est.plateau, est.window});
    per_scale.push_back({{"scale", scale},
                         {"radius", est.radius},
                         {"entry_time", est.entry_time},
                         {"plateau", est.plateau},
                         {"window", est.window}});
  }
  dir.csv("absorbing.csv",
          {{"scale", "IC amplitude multiplier"},
           {"radius", "rho_emp: ensemble sup of ||U||_{\\dot H^1} after entry"},
           {"entry_time", "T_emp: first time the tail supremum is within 5% of the plateau"},
           {"plateau", "ensemble sup over the trailing window"},
           {"window", "length of the trailing window"}},
          rows);
  const auto [lo, hi] = std::minmax_element(radii.begin(), radii.end());
  dir.json_file("absorbing.json", {{"scales", per_scale},
                                   {"radius_spread", *hi / *lo - 1.0},
                                   {"entry_nondecreasing", std::is_sorted(entries.begin(), entries.end())}});
}

// prepare / manifold / squeeze -----------------------------------------------------------------------

struct PreparedSetup {
  Preparation prep;
  std::vector<SpectralField> potentials;
};

PreparedSetup run_preparation(const RunConfig& c, RunDir& dir) {
  if (!c.symbol().bounded()) throw ConfigError("preparation needs a bounded symbol (not kse)");
  const ModelSpec spec = c.model_spec();
  SolverConfig cfg = c.solver_config();
  cfg.diag_every = 0;
  PreparedSetup out;
  std::vector<std::vector<double>> rows;
  for (std::size_t m = 0; m < c.ic.members; ++m) {
    const Trajectory tr = integrate(initial_state(c, m), spec, cfg);
    for (const auto& [t, st] : tr.snapshots) {
      if (t < c.analysis.burn_in) continue;
      auto [phi, mean] = potential_of(st);
      phi.set_zero_mean(false);
      phi[0] = mean;
      rows.push_back({double(out.potentials.size()), double(m), t, norm(phi, Norm::hs(2.0)),
                      max_abs(to_physical(subtract_mean(phi)))});
      dir.snapshot(fs::path("potentials") / ("phi_" + step_name(out.potentials.size()) + ".json"),
                   Snapshot{phi, t, "potential"});
      out.potentials.push_back(std::move(phi));
    }
  }
  if (out.potentials.empty())
    throw ConfigError("no states at t >= analysis.burn_in; raise solver.t_end or lower the burn-in");
  dir.csv("potentials.csv",
          {{"index", "potential index"},
           {"member", "ensemble member"},
           {"t", "time"},
           {"h2_phi", "||phi||_{\\dot H^2}"},
           {"linf_phi", "||phi - <phi>||_{L^inf}"}},
          rows);
  const Form ch = has_mean_coupling(c.model.form) || c.model.form == Form::primal ? Form::colehopf
                                                                                   : Form::colehopf_plain;
  out.prep = prepare(spec.with_form(ch), out.potentials, c.analysis.probe_pairs, c.analysis.probe_seed);
  const TransformRadii& r = out.prep.prep.radii;
  dir.json_file("radii.json", {{"r", r.r},
                               {"r_inf", r.r_inf},
                               {"r0", r.r0},
                               {"r1", r.r1},
                               {"r2", r.r2},
                               {"chain_constant", r.chain_constant},
                               {"samples", r.samples},
                               {"inner_radius", out.prep.prep.inner_radius},
                               {"outer_radius", out.prep.prep.outer_radius}});
  dir.json_file("probe.json", json::parse(probe_report_to_json(out.prep.probe)));
  return out;
}

void cmd_prepare(const RunConfig& c, RunDir& dir) {
  const PreparedSetup s = run_preparation(c, dir);
  const auto n = select_n(c.grid(), s.prep.probe.C_est, c.analysis.gap_safety);
  dir.json_file("prepare.json", {{"C_est", s.prep.probe.C_est},
                                 {"potentials", s.potentials.size()},
                                 {"gap_safety", c.analysis.gap_safety},
                                 {"selected_n", n ? json(*n) : json(nullptr)}});
}

ManifoldGraph build_graph(const RunConfig& c, const Preparation& prep, json& info) {
  const GridSpec g = c.grid();
  std::size_t n = c.analysis.n;
  if (c.analysis.auto_n) {
    const auto sel = select_n(g, prep.probe.C_est, c.analysis.gap_safety);
    if (!sel)
      throw ConfigError("no resolved spectral gap >= 4 * gap_safety * C_est on this grid (C_est = " +
                        num(prep.probe.C_est) + "); raise N or set analysis.n with auto_n = false");
    n = *sel;
  }
  const long long half = g.n / 2;
  const SpectrumTable table = enumerate(g.d, g.length, half * half * g.d);
  ManifoldGraph graph{[&] {
                        try {
                          return ProjectionPair::make(g, table, n);
                        } catch (const InvalidArgument& e) {
                          throw ConfigError(e.what());
                        }
                      }(),
                      prep.prep};
  graph.method = c.analysis.method;
  graph.depth = c.analysis.depth;
  graph.tol = c.analysis.tol;
  info = {{"n", n},
          {"lambda_n", graph.proj.lambda_n},
          {"lambda_n1", graph.proj.lambda_n1},
          {"dim_p", graph.proj.dim_p},
          {"C_est", prep.probe.C_est},
          {"method", to_string(graph.method)},
          {"depth", graph.depth},
          {"tol", graph.tol}};
  return graph;
}

SpectralField random_psi(const RunConfig& c, std::uint64_t seed) {
  return psi_from_phi(random_smooth_potential(c.grid(), seed, c.ic.amplitude, c.ic.slope), 0.0);
}

/// Gaussian coefficients on the dealiased band, weight 1 / (1 + |k|^2), zero mean.
SpectralField random_band_field(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  SpectralField f(g, true);
  const int K = g.dealias_cutoff();
  const int K2 = g.d == 2 ? K : 0;
  for (int a = 0; a <= K; ++a)
    for (int b = -K2; b <= K2; ++b) {
      if (a == 0 && b <= 0) continue;
      const double w = 1.0 / (1.0 + double(a) * a + double(b) * b);
      f.set_coeff({a, b}, {w * n01(rng), w * n01(rng)});
    }
  return f;
}

void cmd_manifold(const RunConfig& c, RunDir& dir) {
  const PreparedSetup s = run_preparation(c, dir);
  json info;
  const ManifoldGraph graph = build_graph(c, s.prep, info);

  // Graph samples over P-projections of the transformed potentials.
  json samples = json::array();
  const std::size_t stride = std::max<std::size_t>(1, s.prep.sampler.centers.size() / 8);
  double worst_residual = 0.0;
  for (std::size_t i = 0; i < s.prep.sampler.centers.size(); i += stride) {
    SpectralField p = project(s.prep.sampler.centers[i], Part::P, graph.proj);
    p.set_zero_mean(false);
    const GraphEvaluation e = evaluate_graph_detailed(p, graph);
    worst_residual = std::max(worst_residual, e.residuals.empty() ? 0.0 : e.residuals.back());
    samples.push_back({{"center", i},
                       {"p_h1", norm(p, Norm::h1_full())},
                       {"phi_h1", norm(e.q, Norm::hs(1.0))},
                       {"iterations", e.iterations},
                       {"contraction_ratio", e.contraction_ratio},
                       {"residuals", e.residuals}});
    dir.snapshot(fs::path("graph") / ("point_" + step_name(i) + ".json"), Snapshot{p + e.q, 0.0, "colehopf"});
  }
  dir.json_file("graph_samples.json", {{"graph", info}, {"max_final_residual", worst_residual}, {"samples", samples}});

  // Attraction from seeded ICs.
  const double dt = c.analysis.prepared_dt;
  const auto steps = std::size_t(std::llround(c.analysis.attraction_t_end / dt));
  const std::size_t every = std::max<std::size_t>(1, steps / 200);
  std::vector<std::vector<double>> dist_rows, fit_rows;
  bool all_pass = true;
  double min_mu = INFINITY;
  for (std::size_t i = 0; i < c.analysis.attraction_ics; ++i) {
    const PreparedRun run = run_prepared(random_psi(c, split_seed(c.ic.seed + 1, i)), graph.prep, dt, steps, every);
    std::vector<double> d;
    for (std::size_t k = 0; k < run.states.size(); ++k) {
      d.push_back(graph_distance(run.states[k], graph));
      dist_rows.push_back({double(i), run.t[k], d.back()});
    }
    AttractionFit f;
    try {
      f = attraction_fit(run.t, d, 10 * graph.tol);
    } catch (const InvalidArgument&) {
      // Started within the floor: nothing to fit.
    }
    all_pass &= f.pass;
    min_mu = std::min(min_mu, f.mu);
    fit_rows.push_back({double(i), f.C_U, f.mu, f.r_squared, double(f.points), f.pass ? 1.0 : 0.0});
  }

  // Linear reference: N_P = 0 decays at lambda_{n+1}.
  ManifoldGraph lin = graph;
  lin.prep = PreparedNonlinearity::zero_nonlinearity(graph.prep.model);
  // Lowest Q shell only, so the distance is a single exponential.
  SpectralField u0(c.grid(), false);
  const double unit = c.grid().kappa_unit();
  const auto k2_n1 = std::llround(graph.proj.lambda_n1 / (unit * unit));
  for (std::size_t f = 0; f < u0.size(); ++f)
    if (c.grid().k_squared(f) == k2_n1 && !c.grid().is_nyquist(c.grid().wavevector(f))) {
      u0.set_coeff(c.grid().wavevector(f), 0.01);
      break;
    }
  u0[0] = 1.0;
  const std::size_t lin_steps = std::max<std::size_t>(20, std::size_t(std::llround(5.0 / graph.proj.lambda_n1 / dt)));
  const PreparedRun lr = run_prepared(u0, lin.prep, dt, lin_steps, std::max<std::size_t>(1, lin_steps / 50));
  std::vector<double> ld;
  for (const auto& u : lr.states) ld.push_back(graph_distance(u, lin));
  const AttractionFit lf = attraction_fit(lr.t, ld, 1e-13);

  dir.csv("attraction.csv",
          {{"ic", "initial condition index"}, {"t", "time"}, {"distance", "||Q u - Phi(P u)||_{\\dot H^1}"}},
          dist_rows);
  dir.csv("attraction_fit.csv",
          {{"ic", "initial condition index"},
           {"C_U", "fitted prefactor"},
           {"mu", "fitted decay rate"},
           {"r_squared", "R^2 of the log-linear fit"},
           {"points", "points above the floor"},
           {"pass", "1 when mu > 0 and R^2 >= 0.95"}},
          fit_rows);

  // Squeezing on a small batch.
  json squeeze = json::array();
  for (std::size_t i = 0; i < std::min<std::size_t>(c.analysis.squeeze_pairs, 10); ++i) {
    const SpectralField a = random_psi(c, split_seed(c.ic.seed + 2, 2 * i));
    SpectralField w = random_band_field(c.grid(), split_seed(c.ic.seed + 2, 2 * i + 1));
    w *= c.analysis.squeeze_separation / norm(w, Norm::h1_full());
    const SqueezingReport r = squeezing_test(a, a + w, graph, c.analysis.squeeze_t_end, dt);
    squeeze.push_back({{"pair", i},
                       {"started_in_cone", r.started_in_cone},
                       {"cone_invariant", r.cone_invariant},
                       {"q_rate", r.q_rate ? json(*r.q_rate) : json(nullptr)},
                       {"max_cone_ratio", r.max_cone_ratio},
                       {"pass", r.pass}});
  }
  dir.json_file("squeezing.json", {{"pairs", squeeze}});
  const GraphLipschitz l = graph_lipschitz_probe(graph, s.prep.sampler, 200, c.analysis.probe_seed);
  dir.json_file("manifold.json", {{"graph", info},
                                  {"graph_lipschitz_estimate", l.l_est},
                                  {"attraction_all_pass", all_pass},
                                  {"attraction_min_mu", min_mu},
                                  {"linear_mu", lf.mu},
                                  {"linear_mu_relative_error", std::abs(lf.mu - graph.proj.lambda_n1) /
                                                                   graph.proj.lambda_n1}});
}

void cmd_squeeze(const RunConfig& c, RunDir& dir) {
  const PreparedSetup s = run_preparation(c, dir);
  json info;
  const ManifoldGraph graph = build_graph(c, s.prep, info);
  const double dt = c.analysis.prepared_dt;
  const std::size_t pairs = c.analysis.squeeze_pairs;
  std::vector<std::vector<double>> rows;
  std::size_t cone = 0, exterior = 0, failures = 0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const SpectralField u0 = random_psi(c, split_seed(c.ic.seed + 2, 2 * i));
    // Sweep the difference from range P into range Q.
    const SpectralField wp = project(random_psi(c, split_seed(c.ic.seed + 2, 2 * i + 1)) - u0, Part::P, graph.proj);
    const SpectralField wq = project(random_band_field(c.grid(), split_seed(c.ic.seed + 3, i)), Part::Q, graph.proj);
    const double a = 0.5 * std::numbers::pi * double(i) / double(std::max<std::size_t>(pairs, 1));
    SpectralField w = (std::cos(a) / norm(wp, Norm::h1_full())) * wp;
    w += (std::sin(a) / norm(wq, Norm::h1_full())) * wq;
    const SqueezingReport r = squeezing_test(u0, u0 + c.analysis.squeeze_separation * w, graph,
                                             c.analysis.squeeze_t_end, dt);
    (r.started_in_cone ? cone : exterior) += 1;
    failures += r.pass ? 0 : 1;
    rows.push_back({double(i), a, r.started_in_cone ? 1.0 : 0.0, r.cone_invariant ? 1.0 : 0.0, r.max_cone_ratio,
                    r.q_rate ? *r.q_rate : std::nan(""), r.entry_time ? *r.entry_time : std::nan(""),
                    r.pass ? 1.0 : 0.0});
  }
  dir.csv("squeezing.csv",
          {{"pair", "pair index"},
           {"angle", "mixing angle between the P and Q directions of u0 - v0"},
           {"started_in_cone", "1 when ||Q w|| <= ||P w|| at t = 0"},
           {"cone_invariant", "1 when the cone held afterwards (cone starts)"},
           {"max_cone_ratio", "max ||Q w|| / ||P w||_{H^1}"},
           {"q_rate", "fitted decay rate of ||Q w|| (exterior starts; NaN otherwise)"},
           {"entry_time", "time the difference entered the cone (NaN if never)"},
           {"pass", "1 when the squeezing property held"}},
          rows);
  dir.json_file("squeezing.json",
                {{"graph", info}, {"pairs", pairs}, {"cone_starts", cone}, {"exterior_starts", exterior},
                 {"failures", failures}});
}

}  // namespace

fs::path run_command(const std::string& name, const RunConfig& config) {
  using Fn = void (*)(const RunConfig&, RunDir&);
  static const std::map<std::string, Fn> table{
      {"simulate", cmd_simulate}, {"equivalence", cmd_equivalence}, {"dispersion", cmd_dispersion},
      {"gaps", cmd_gaps},         {"absorb", cmd_absorb},           {"prepare", cmd_prepare},
      {"manifold", cmd_manifold}, {"squeeze", cmd_squeeze}};
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown subcommand '" + name + "'");
  config.validate();
  RunDir dir(resolve_output_dir(config), config);
  dir.manifest(name);
  it->second(config, dir);
  dir.finish();
  return dir.root();
}

}  // namespace dburgers
