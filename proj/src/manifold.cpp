#include "dburgers/manifold.hpp"

#include <algorithm>
#include <cmath>

#include "dburgers/errors.hpp"
#include "dburgers/initial.hpp"

namespace dburgers {

// Projections ------------------------------------------------------------------------

ProjectionPair ProjectionPair::make(const GridSpec& grid, const SpectrumTable& table, std::size_t n) {
  if (table.d != grid.d || table.length != grid.length)
    throw InvalidArgument("ProjectionPair: spectrum table does not match the grid");
  if (n + 1 >= table.size()) throw InvalidArgument("ProjectionPair: n + 1 beyond the spectrum table");
  ProjectionPair pp;
  pp.grid = grid;
  pp.n = n;
  pp.k2_n = table[n].k2;
  pp.lambda_n = table[n].lambda;
  pp.lambda_n1 = table[n + 1].lambda;
  pp.in_p.assign(grid.size(), false);
  bool resolved = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const long long k2 = grid.k_squared(i);
    if (k2 <= pp.k2_n) {
      pp.in_p[i] = true;
      ++pp.dim_p;
    }
    if (k2 == table[n + 1].k2) resolved = true;
  }
  if (!resolved) throw InvalidArgument("ProjectionPair: lambda_{n+1} is not resolved by the grid");
  return pp;
}

SpectralField project(const SpectralField& u, Part which, const ProjectionPair& proj) {
  if (!(u.grid() == proj.grid)) throw InvalidArgument("project: field grid differs from the projection grid");
  SpectralField out = u;
  const bool keep_p = which == Part::P;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (proj.in_p[i] != keep_p) out[i] = 0.0;
  return out;
}

namespace {

std::vector<double> heat_rates(const GridSpec& grid) {
  std::vector<double> r(grid.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = -grid.kappa_squared(i);
  return r;
}

State psi_state(SpectralField f) {
  State s;
  s.form = Form::colehopf;
  s.fields = {std::move(f)};
  return s;
}

}  // namespace

Stepper prepared_stepper(const PreparedNonlinearity& prep, double dt, Scheme scheme) {
  return Stepper(
      heat_rates(prep.model.grid), 0.0,
      [prep](const State& s) { return psi_state(prepared_N_P(s.fields[0], prep)); }, scheme, dt);
}

// Graph -------------------------------------------------------------------------------

std::string to_string(GraphMethod m) {
  return m == GraphMethod::aim_fixed_point ? "aim_fixed_point" : "lyapunov_perron";
}

GraphMethod graph_method_from_string(const std::string& name) {
  if (name == "aim_fixed_point" || name == "aim") return GraphMethod::aim_fixed_point;
  if (name == "lyapunov_perron" || name == "lp") return GraphMethod::lyapunov_perron;
  throw InvalidArgument("unknown graph method '" + name + "'");
}

double ManifoldGraph::backward_horizon() const {
  if (T_back > 0.0) return T_back;
  const double floor = 5.0 / proj.lambda_n1;
  const double denom = proj.lambda_n1 - 4.0 * prep.lipschitz_estimate;
  return denom > 0.0 ? std::max(10.0 / denom, floor) : floor;
}

namespace {

double contraction_of(const std::vector<double>& res) {
  double log_sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 1; i < res.size(); ++i)
    if (res[i - 1] < 1.0 && res[i - 1] > 0.0 && res[i] > 0.0) {
      log_sum += std::log(res[i] / res[i - 1]);
      ++count;
    }
  return count ? std::exp(log_sum / double(count)) : 0.0;
}

GraphEvaluation aim(const SpectralField& p, const ManifoldGraph& g) {
  const GridSpec& grid = g.proj.grid;
  GraphEvaluation ev;
  ev.q = SpectralField(grid, false);
  for (std::size_t j = 0; j < g.depth; ++j) {
    const SpectralField f = prepared_N_P(p + ev.q, g.prep);
    SpectralField next(grid, false);
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (!g.proj.in_p[i]) next[i] = f[i] / grid.kappa_squared(i);
    const double res = norm(next - ev.q, Norm::hs(1.0));
    ev.q = std::move(next);
    ev.residuals.push_back(res);
    ev.iterations = j + 1;
    if (res <= g.tol) {
      ev.contraction_ratio = contraction_of(ev.residuals);
      return ev;
    }
  }
  throw NoConvergence(ev.residuals, "aim fixed point did not reach tol within depth iterations");
}

/// Exact weights of the exponentially weighted integral of a linear
/// interpolant over one interval of length h: int_0^h e^{-lam(h-s)} f(s) ds
/// = wa f(0) + wb f(h).
void exp_weights(double lam, double h, double& wa, double& wb) {
  const double x = lam * h;
  if (std::abs(x) < 1e-3) {
    wa = h * (0.5 - x / 3.0 + x * x / 8.0 - x * x * x / 30.0);
    wb = h * (0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0);
    return;
  }
  const double one_minus_e = -std::expm1(-x);
  const double e = 1.0 - one_minus_e;
  const double total = h * one_minus_e / x;
  wb = h * (one_minus_e / x - (one_minus_e - x * e) / (x * x));
  wa = total - wb;
}

GraphEvaluation lyapunov_perron(const SpectralField& p, const ManifoldGraph& g) {
  const GridSpec& grid = g.proj.grid;
  const std::size_t M = std::max<std::size_t>(g.lp_steps, 2);
  const double T = g.backward_horizon();
  const double h = T / double(M);
  const std::size_t S = grid.size();

  std::vector<double> decay(S), wa(S), wb(S);
  for (std::size_t i = 0; i < S; ++i) {
    const double lam = grid.kappa_squared(i);
    decay[i] = std::exp(-lam * h);
    exp_weights(lam, h, wa[i], wb[i]);
  }

  // Linear backward p-flow as the starting trajectory, s_m = -T + m h.
  std::vector<SpectralField> u(M + 1, SpectralField(grid, false));
  u[M] = p;
  for (std::size_t m = M; m-- > 0;)
    for (std::size_t i = 0; i < S; ++i)
      if (g.proj.in_p[i]) u[m][i] = u[m + 1][i] / decay[i];

  GraphEvaluation ev;
  ev.q = SpectralField(grid, false);
  std::vector<SpectralField> f(M + 1);
  for (std::size_t j = 0; j < g.depth; ++j) {
    for (std::size_t m = 0; m <= M; ++m) f[m] = prepared_N_P(u[m], g.prep);
    std::vector<SpectralField> next(M + 1, SpectralField(grid, false));
    next[M] = p;
    for (std::size_t m = M; m-- > 0;)
      for (std::size_t i = 0; i < S; ++i)
        if (g.proj.in_p[i]) next[m][i] = (next[m + 1][i] - wa[i] * f[m][i] - wb[i] * f[m + 1][i]) / decay[i];
    SpectralField q(grid, false);
    for (std::size_t m = 0; m < M; ++m) {
      for (std::size_t i = 0; i < S; ++i)
        if (!g.proj.in_p[i]) q[i] = decay[i] * q[i] + wa[i] * f[m][i] + wb[i] * f[m + 1][i];
      for (std::size_t i = 0; i < S; ++i)
        if (!g.proj.in_p[i]) next[m + 1][i] = q[i];
    }
    const double res = norm(q - ev.q, Norm::hs(1.0));
    ev.q = std::move(q);
    ev.residuals.push_back(res);
    ev.iterations = j + 1;
    u = std::move(next);
    if (res <= g.tol) {
      ev.contraction_ratio = contraction_of(ev.residuals);
      return ev;
    }
  }
  throw NoConvergence(ev.residuals, "Lyapunov-Perron iteration did not reach tol within depth iterations");
}

}  // namespace

GraphEvaluation evaluate_graph_detailed(const SpectralField& p, const ManifoldGraph& graph) {
  SpectralField pp = project(p, Part::P, graph.proj);
  pp.set_zero_mean(false);
  if (graph.prep.zero) {
    GraphEvaluation ev;
    ev.q = SpectralField(graph.proj.grid, false);
    ev.residuals = {0.0};
    ev.iterations = 1;
    return ev;
  }
  return graph.method == GraphMethod::aim_fixed_point ? aim(pp, graph) : lyapunov_perron(pp, graph);
}

SpectralField evaluate_graph(const SpectralField& p, const ManifoldGraph& graph) {
  return evaluate_graph_detailed(p, graph).q;
}

SpectralField inertial_form_rhs(const SpectralField& p, const ManifoldGraph& graph) {
  SpectralField pp = project(p, Part::P, graph.proj);
  pp.set_zero_mean(false);
  const SpectralField f = prepared_N_P(pp + evaluate_graph(pp, graph), graph.prep);
  SpectralField out = project(f, Part::P, graph.proj);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= graph.proj.grid.kappa_squared(i) * pp[i];
  return out;
}

std::vector<SpectralField> integrate_inertial_form(const SpectralField& p0, const ManifoldGraph& graph, double dt,
                                                   std::size_t steps) {
  Stepper stepper(
      heat_rates(graph.proj.grid), 0.0,
      [&graph](const State& s) {
        const SpectralField& p = s.fields[0];
        return psi_state(project(prepared_N_P(p + evaluate_graph(p, graph), graph.prep), Part::P, graph.proj));
      },
      Scheme::ifrk4, dt);
  SpectralField p = project(p0, Part::P, graph.proj);
  p.set_zero_mean(false);
  std::vector<SpectralField> out{p};
  State s = psi_state(std::move(p));
  for (std::size_t k = 0; k < steps; ++k) {
    s = stepper.step(s);
    out.push_back(s.fields[0]);
  }
  return out;
}

double graph_distance(const SpectralField& u, const ManifoldGraph& graph) {
  const SpectralField q = project(u, Part::Q, graph.proj);
  return norm(q - evaluate_graph(project(u, Part::P, graph.proj), graph), Norm::hs(1.0));
}

AttractionFit attraction_fit(const std::vector<double>& t, const std::vector<double>& distance, double floor) {
  if (t.size() != distance.size()) throw InvalidArgument("attraction_fit: size mismatch");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size() && distance[i] > floor; ++i) {
    x.push_back(t[i]);
    y.push_back(std::log(distance[i]));
  }
  if (x.size() < 3) throw InvalidArgument("attraction_fit: fewer than three points above the floor");
  const LineFit f = fit_line(x, y);
  AttractionFit out;
  out.mu = -f.slope;
  out.C_U = std::exp(f.intercept);
  out.r_squared = f.r_squared;
  out.points = x.size();
  out.pass = out.mu > 0.0 && out.r_squared >= 0.95;
  return out;
}

PreparedRun run_prepared(const SpectralField& psi0, const PreparedNonlinearity& prep, double dt, std::size_t steps,
                         std::size_t every) {
  Stepper stepper = prepared_stepper(prep, dt);
  PreparedRun run;
  SpectralField init = psi0;
  init.set_zero_mean(false);
  State s = psi_state(std::move(init));
  run.t.push_back(0.0);
  run.states.push_back(s.fields[0]);
  for (std::size_t k = 1; k <= steps; ++k) {
    s = stepper.step(s);
    guard_state(s, double(k) * dt, 1e8);
    if (every == 0 || k % every == 0 || k == steps) {
      run.t.push_back(double(k) * dt);
      run.states.push_back(s.fields[0]);
    }
  }
  return run;
}

SqueezingReport squeezing_test(const SpectralField& u0, const SpectralField& v0, const ManifoldGraph& graph,
                               double t_end, double dt, double cone_slack) {
  const std::size_t steps = std::size_t(std::ceil(t_end / dt - 1e-9));
  const PreparedRun ru = run_prepared(u0, graph.prep, dt, steps, 1);
  const PreparedRun rv = run_prepared(v0, graph.prep, dt, steps, 1);

  SqueezingReport rep;
  std::vector<double> tq, logq;
  const double scale0 = norm(u0 - v0, Norm::h1_full());
  const double abs_slack = 1e-13 * std::max(scale0, 1e-300);
  bool inside = false;
  for (std::size_t k = 0; k < ru.t.size(); ++k) {
    const SpectralField w = ru.states[k] - rv.states[k];
    const double pn = norm(project(w, Part::P, graph.proj), Norm::h1_full());
    const double qn = norm(project(w, Part::Q, graph.proj), Norm::h1_full());
    if (k == 0) {
      inside = qn <= pn;
      rep.started_in_cone = inside;
      if (pn == 0.0 && qn == 0.0) return rep;
    }
    if (!inside) {
      if (qn > 0.0) {
        tq.push_back(ru.t[k]);
        logq.push_back(std::log(qn));
      }
      if (qn <= pn) {
        inside = true;
        rep.entry_time = ru.t[k];
      }
      continue;
    }
    if (pn > 0.0) rep.max_cone_ratio = std::max(rep.max_cone_ratio, qn / pn);
    if (qn > pn * (1.0 + cone_slack) + abs_slack) rep.cone_invariant = false;
  }
  if (!rep.started_in_cone) {
    if (tq.size() >= 2) rep.q_rate = -fit_line(tq, logq).slope;
    rep.pass = rep.q_rate.has_value() && *rep.q_rate > 0.0 && rep.cone_invariant;
  } else {
    rep.pass = rep.cone_invariant;
  }
  return rep;
}

LiftResult lift_to_U(const ManifoldGraph& graph, const std::vector<SpectralField>& p_samples) {
  LiftResult out;
  for (std::size_t i = 0; i < p_samples.size(); ++i) {
    SpectralField p = project(p_samples[i], Part::P, graph.proj);
    p.set_zero_mean(false);
    try {
      out.velocities.push_back(velocity_from_psi(p + evaluate_graph(p, graph)));
    } catch (const PositivityLost&) {
      out.skipped.push_back(i);
    }
  }
  return out;
}

GraphLipschitz graph_lipschitz_probe(const ManifoldGraph& graph, const ProbeSampler& sampler, std::size_t n_pairs,
                                     std::uint64_t seed) {
  GraphLipschitz out;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    auto [a, b] = sampler.draw(ProbeStratum::in_ball, graph.prep.inner_radius, split_seed(seed, i));
    SpectralField p1 = project(a, Part::P, graph.proj), p2 = project(b, Part::P, graph.proj);
    p1.set_zero_mean(false);
    p2.set_zero_mean(false);
    const double dp = norm(p1 - p2, Norm::h1_full());
    if (dp < 1e-12) continue;
    const double dq = norm(evaluate_graph(p1, graph) - evaluate_graph(p2, graph), Norm::h1_full());
    out.l_est = std::max(out.l_est, dq / dp);
    ++out.pairs;
  }
  return out;
}

std::optional<std::size_t> select_n(const GridSpec& grid, double C_est, double safety) {
  const long long half = grid.n / 2;
  const SpectrumTable table = enumerate(grid.d, grid.length, half * half * grid.d);
  const auto n = check_sgc(table, safety * C_est, 1.0, 1.0, GapComparator::nonstrict);
  if (!n) return std::nullopt;
  try {
    ProjectionPair::make(grid, table, *n);
  } catch (const InvalidArgument&) {
    return std::nullopt;
  }
  return n;
}

CompletenessProbe completeness_probe(const SpectralField& u0, const ManifoldGraph& graph, double t1, double horizon,
                                     double dt, std::size_t every) {
  CompletenessProbe out;
  out.t1 = t1;
  const std::size_t s1 = std::size_t(std::llround(t1 / dt));
  const PreparedRun first = run_prepared(u0, graph.prep, dt, s1, 0);
  const SpectralField& u1 = first.states.back();
  const SpectralField p1 = project(u1, Part::P, graph.proj);
  SpectralField v1 = p1 + evaluate_graph(p1, graph);

  const std::size_t s2 = std::size_t(std::llround(horizon / dt));
  const PreparedRun ru = run_prepared(u1, graph.prep, dt, s2, every);
  const PreparedRun rv = run_prepared(v1, graph.prep, dt, s2, every);
  for (std::size_t k = 0; k < ru.t.size(); ++k) {
    out.t.push_back(t1 + ru.t[k]);
    out.difference.push_back(norm(ru.states[k] - rv.states[k], Norm::h1_full()));
  }
  try {
    out.fit = attraction_fit(out.t, out.difference, 1e-12);
  } catch (const InvalidArgument&) {
  }
  return out;
}

}  // namespace dburgers
