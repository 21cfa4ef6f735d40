#include "dburgers/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dburgers/errors.hpp"

namespace dburgers {

double DiagnosticsRecord::norm(const std::string& key) const {
  auto it = norms.find(key);
  if (it == norms.end()) throw InvalidArgument("diagnostics record has no norm '" + key + "'");
  return it->second;
}

DiagnosticsRecord compute_record(const State& state, double t, const ModelSpec& spec, int p) {
  (void)spec;
  DiagnosticsRecord r;
  r.t = t;
  r.p = p;
  const GridSpec& grid = state.grid();
  const VectorField u = velocity_of(state);
  const auto [phi, m] = potential_of(state);

  r.norms["l2_U"] = norm(u, Norm::l2());
  r.norms["h1_U"] = norm(u, Norm::hs(1.0));
  r.norms["h2_U"] = norm(u, Norm::hs(2.0));
  r.norms["linf_U"] = norm(u, Norm::linf());
  r.norms["l2_phi"] = norm(phi, Norm::l2());
  PhysicalField phi_s = to_physical(phi);
  for (double& v : phi_s.values) v += m;
  r.norms["linf_phi"] = max_abs(phi_s);
  r.norms["divplus_l2"] = norm(positive_part(divergence(u)), Norm::l2());
  if (is_colehopf(state.form)) {
    r.norms["h1_psi"] = norm(state.fields[0], Norm::h1_full());
    r.norms["min_psi"] = min_value(to_physical(state.fields[0]));
  }

  r.alpha_p = alpha_p(u, p);
  r.curl_residual = grid.d == 2 ? curl_residual(u) : 0.0;
  r.mean_value = m;
  const double l2 = r.norms["l2_U"];
  r.grad_sq_mean = l2 * l2 / grid.volume();
  return r;
}

std::vector<double> series(std::span<const DiagnosticsRecord> records, const std::string& key) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (key == "alpha_p")
      out.push_back(r.alpha_p);
    else if (key == "mean")
      out.push_back(r.mean_value);
    else if (key == "mean_residual")
      out.push_back(r.mean_residual);
    else if (key == "curl_residual")
      out.push_back(r.curl_residual);
    else
      out.push_back(r.norm(key));
  }
  return out;
}

std::vector<double> times(std::span<const DiagnosticsRecord> records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.t);
  return out;
}

// Positive parts ---------------------------------------------------------------------

double alpha_p(const VectorField& u, int p) {
  double total = 0.0;
  for (int i = 0; i < u.dim(); ++i) {
    const PhysicalField w = positive_part(differentiate(u[i], i + 1, 1));
    PhysicalField wp = w;
    for (double& v : wp.values) v = std::pow(v, p);
    total += integrate(wp);
  }
  return total;
}

double alpha_upper_bound(double p, double length, double t) {
  if (!(p > 2.0)) throw InvalidArgument("alpha_upper_bound: p must exceed 2");
  if (!(t > 0.0)) throw InvalidArgument("alpha_upper_bound: t must be positive");
  const double base = std::pow(2.0 * length * length, 1.0 / p) * 2.0 * p / (p - 2.0);
  return base * std::max(1.0, 1.0 / t);
}

AlphaInequalityReport check_alpha_inequality(std::span<const DiagnosticsRecord> records, int p, double length,
                                             double tol_fraction, double max_spacing) {
  AlphaInequalityReport rep;
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].t - records[i - 1].t > max_spacing * (1.0 + 1e-9))
      throw InvalidArgument("check_alpha_inequality: record spacing exceeds " + std::to_string(max_spacing));
  const double coef = (p - 2.0) / std::pow(2.0 * length * length, 1.0 / p);
  for (std::size_t i = 1; i + 1 < records.size(); ++i) {
    const double a = records[i].alpha_p;
    const double dadt = (records[i + 1].alpha_p - records[i - 1].alpha_p) / (records[i + 1].t - records[i - 1].t);
    const double rhs = p * a - coef * std::pow(a, (p + 1.0) / p);
    const double residual = dadt - rhs;
    const double tol = tol_fraction * std::max(1.0, p * a);
    ++rep.checked;
    if (rep.checked == 1 || residual > rep.max_residual) rep.max_residual = residual;
    const double ratio = residual / tol;
    if (rep.checked == 1 || ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.t_worst = records[i].t;
    }
    if (residual > tol) rep.pass = false;
  }
  return rep;
}

AlphaBoundReport check_alpha_bound(std::span<const DiagnosticsRecord> records, int p, double length, double t_min,
                                   double margin) {
  AlphaBoundReport rep;
  rep.bound = alpha_upper_bound(p, length, 1.0);
  for (const auto& r : records) {
    if (r.t < t_min) continue;
    const double v = std::pow(r.alpha_p, 1.0 / p);
    const double b = alpha_upper_bound(p, length, r.t);
    rep.max_value = std::max(rep.max_value, v);
    rep.max_ratio = std::max(rep.max_ratio, v / b);
    if (v > margin * b) rep.pass = false;
  }
  return rep;
}

// Absorbing sets ------------------------------------------------------------------------

AbsorbingBallEstimate absorbing_entry(std::span<const NormSeries> ensemble, double burn_in, double window_fraction,
                                      double tolerance, double floor) {
  if (ensemble.empty()) throw InvalidArgument("absorbing_entry: empty ensemble");
  const auto& t = ensemble.front().t;
  if (t.size() < 2) throw InvalidArgument("absorbing_entry: series too short");
  for (const auto& s : ensemble) {
    if (s.t.size() != t.size() || s.value.size() != t.size())
      throw InvalidArgument("absorbing_entry: member '" + s.id + "' has a different time grid");
    for (std::size_t j = 0; j < t.size(); ++j)
      if (std::abs(s.t[j] - t[j]) > 1e-9 * std::max(1.0, std::abs(t[j])))
        throw InvalidArgument("absorbing_entry: member '" + s.id + "' has a different time grid");
    if (!(s.t.back() - s.t.front() > burn_in))
      throw InvalidArgument("absorbing_entry: member '" + s.id + "' is shorter than the burn-in");
  }

  const std::size_t n = t.size();
  std::vector<double> env(n, 0.0);
  for (const auto& s : ensemble)
    for (std::size_t j = 0; j < n; ++j) env[j] = std::max(env[j], s.value[j]);
  std::vector<double> tail(n);
  tail[n - 1] = env[n - 1];
  for (std::size_t j = n - 1; j-- > 0;) tail[j] = std::max(tail[j + 1], env[j]);

  AbsorbingBallEstimate est;
  est.window = window_fraction * (t.back() - t.front());
  const double w0 = t.back() - est.window;
  double hi = 0.0, lo = INFINITY;
  for (std::size_t j = 0; j < n; ++j)
    if (t[j] >= w0) {
      hi = std::max(hi, env[j]);
      lo = std::min(lo, env[j]);
    }
  if (hi > floor && lo < (1.0 - tolerance) * hi)
    throw InvalidArgument("absorbing_entry: no plateau within the trailing window");
  est.plateau = hi;

  const double level = (1.0 + tolerance) * hi + floor;
  for (std::size_t j = 0; j < n; ++j)
    if (tail[j] <= level) {
      est.entry_time = t[j];
      est.radius = tail[j];
      break;
    }
  for (const auto& s : ensemble) est.ensemble.push_back(s.id);
  return est;
}

// Fits ---------------------------------------------------------------------------------------

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_line: need two or more matching points");
  const double n = double(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss += e * e;
  }
  f.rms = std::sqrt(ss / n);
  f.r_squared = syy > 0.0 ? 1.0 - ss / syy : 1.0;
  return f;
}

GrowthFit growth_rate_fit(std::span<const double> t, std::span<const double> amplitude, double max_amplitude) {
  std::vector<double> logs;
  logs.reserve(amplitude.size());
  for (double a : amplitude) {
    if (!(a > 0.0)) throw InvalidArgument("growth_rate_fit: amplitude must be positive");
    if (a > max_amplitude) throw InvalidArgument("growth_rate_fit: amplitude left the linear regime");
    logs.push_back(std::log(a));
  }
  const LineFit f = fit_line(t, logs);
  return {f.slope, f.intercept, f.rms, t.size()};
}

// Mean ODE -------------------------------------------------------------------------------------

namespace {

template <class Visit>
void mean_residuals(std::span<const DiagnosticsRecord> r, double c, Visit visit) {
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    const double h1 = r[i].t - r[i - 1].t, h2 = r[i + 1].t - r[i].t;
    if (!(h1 > 0.0) || std::abs(h1 - h2) > 1e-9 * std::max(1.0, h1)) continue;
    const double h = 0.5 * (h1 + h2);
    const double e1 = std::exp(-c * h), e2 = std::exp(-2.0 * c * h);
    const double integral =
        (h / 3.0) * (e2 * r[i - 1].grad_sq_mean + 4.0 * e1 * r[i].grad_sq_mean + r[i + 1].grad_sq_mean);
    const double res = (r[i + 1].mean_value - e2 * r[i - 1].mean_value + 0.5 * integral) / (2.0 * h);
    visit(i, std::abs(res));
  }
}

}  // namespace

double mean_residual(std::span<const DiagnosticsRecord> records, double coupling) {
  double worst = 0.0;
  mean_residuals(records, coupling, [&](std::size_t, double v) { worst = std::max(worst, v); });
  return worst;
}

void annotate_mean_residuals(std::span<DiagnosticsRecord> records, double coupling) {
  mean_residuals(std::span<const DiagnosticsRecord>(records.data(), records.size()), coupling,
                 [&](std::size_t i, double v) { records[i].mean_residual = v; });
}

double time_derivative_norm(const State& state, const ModelSpec& spec) {
  const State r = rhs(state, spec);
  switch (state.form) {
    case Form::primal:
      return norm(r.velocity_field(), Norm::l2());
    case Form::integrated_adopted:
    case Form::integrated_plain:
      return norm(r.fields[0], Norm::hs(1.0));
    case Form::colehopf:
    case Form::colehopf_plain: {
      const PhysicalField psi = to_physical(state.fields[0]);
      PhysicalField dphi = to_physical(r.fields[0]);
      for (std::size_t i = 0; i < dphi.size(); ++i) dphi[i] = -2.0 * dphi[i] / psi[i];
      return norm(to_spectral(dphi, false), Norm::hs(1.0));
    }
  }
  return 0.0;
}

// CSV ---------------------------------------------------------------------------------------

std::string diagnostics_csv_header() { return "t,l2_U,h1_U,linf_phi,alpha_p,mean,mean_residual,curl_residual"; }

std::string diagnostics_csv_row(const DiagnosticsRecord& r) {
  const double v[] = {r.t, r.norm("l2_U"), r.norm("h1_U"), r.norm("linf_phi"), r.alpha_p, r.mean_value,
                      r.mean_residual, r.curl_residual};
  std::string out;
  char buf[40];
  for (std::size_t i = 0; i < std::size(v); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    if (i) out += ',';
    out += buf;
  }
  return out;
}

}  // namespace dburgers
