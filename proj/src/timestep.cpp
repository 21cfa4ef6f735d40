#include "dburgers/timestep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dburgers/errors.hpp"

namespace dburgers {

std::string to_string(Scheme s) { return s == Scheme::ifrk4 ? "ifrk4" : "imex_cnab2"; }

Scheme scheme_from_string(const std::string& name) {
  if (name == "ifrk4") return Scheme::ifrk4;
  if (name == "imex_cnab2" || name == "cnab2") return Scheme::imex_cnab2;
  throw InvalidArgument("unknown scheme '" + name + "'");
}

void SolverConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (!(t_end >= 0.0)) throw InvalidArgument("t_end must be nonnegative");
  if (!(blowup_threshold > 0.0)) throw InvalidArgument("blowup_threshold must be positive");
  if (diag_p <= 2) throw InvalidArgument("diag_p must exceed 2");
}

// Stepper ----------------------------------------------------------------------------

namespace {

std::vector<double> model_rates(const ModelSpec& spec) {
  std::vector<double> r(spec.grid.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = linear_rate(spec, i);
  return r;
}

void scale(State& s, const std::vector<double>& factor, double mean_factor) {
  for (auto& f : s.fields)
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= factor[i];
  s.mean *= mean_factor;
}

State scaled(State s, const std::vector<double>& factor, double mean_factor) {
  scale(s, factor, mean_factor);
  return s;
}

}  // namespace

Stepper::Stepper(const ModelSpec& spec, Scheme scheme, double dt)
    : Stepper(model_rates(spec), mean_linear_rate(spec),
              [spec](const State& s) { return nonlinear_rate(s, spec); }, scheme, dt) {
  spec.validate();
}

Stepper::Stepper(std::vector<double> rates, double mean_rate, NonlinearFn nonlinear, Scheme scheme, double dt)
    : rates_(std::move(rates)), mean_rate_(mean_rate), nonlinear_(std::move(nonlinear)), scheme_(scheme), dt_(dt) {
  if (!(dt > 0.0)) throw InvalidArgument("Stepper: dt must be positive");
  factors(dt);
}

const Stepper::Factors& Stepper::factors(double h) {
  Factors& slot = (h == dt_) ? cached_ : scratch_;
  if (slot.h == h && !slot.full.empty()) return slot;
  slot.h = h;
  slot.full.resize(rates_.size());
  slot.half.resize(rates_.size());
  if (scheme_ == Scheme::ifrk4) {
    for (std::size_t i = 0; i < rates_.size(); ++i) {
      slot.full[i] = std::exp(h * rates_[i]);
      slot.half[i] = std::exp(0.5 * h * rates_[i]);
    }
    slot.mean_full = std::exp(h * mean_rate_);
    slot.mean_half = std::exp(0.5 * h * mean_rate_);
  } else {
    // full: explicit CN factor (1 + h L/2); half: 1 / (1 - h L/2)
    for (std::size_t i = 0; i < rates_.size(); ++i) {
      slot.full[i] = 1.0 + 0.5 * h * rates_[i];
      slot.half[i] = 1.0 / (1.0 - 0.5 * h * rates_[i]);
    }
    slot.mean_full = 1.0 + 0.5 * h * mean_rate_;
    slot.mean_half = 1.0 / (1.0 - 0.5 * h * mean_rate_);
  }
  return slot;
}

void Stepper::reset_history() {
  history_.clear();
  history_h_ = 0.0;
}

State Stepper::step(const State& u) { return step(u, dt_); }

State Stepper::step(const State& u, double h) {
  if (!(h > 0.0)) throw InvalidArgument("Stepper::step: h must be positive");
  return scheme_ == Scheme::ifrk4 ? ifrk4(u, h) : cnab2(u, h);
}

State Stepper::ifrk4(const State& u, double h) {
  const Factors& f = factors(h);
  const State k1 = nonlinear_(u);

  State a = u;
  a.axpy(0.5 * h, k1);
  scale(a, f.half, f.mean_half);
  const State k2 = nonlinear_(a);

  State b = scaled(u, f.half, f.mean_half);
  b.axpy(0.5 * h, k2);
  const State k3 = nonlinear_(b);

  State c = scaled(u, f.full, f.mean_full);
  c.axpy(h, scaled(k3, f.half, f.mean_half));
  const State k4 = nonlinear_(c);

  State mid = k2;
  mid.axpy(1.0, k3);
  scale(mid, f.half, f.mean_half);

  State out = scaled(u, f.full, f.mean_full);
  out.axpy(h / 6.0, scaled(k1, f.full, f.mean_full));
  out.axpy(h / 3.0, mid);
  out.axpy(h / 6.0, k4);
  return out;
}

State Stepper::cnab2(const State& u, double h) {
  const Factors& f = factors(h);
  State nl = nonlinear_(u);
  State out = scaled(u, f.full, f.mean_full);
  if (!history_.empty() && history_h_ == h) {
    out.axpy(1.5 * h, nl);
    out.axpy(-0.5 * h, history_.front());
  } else {
    out.axpy(h, nl);
  }
  scale(out, f.half, f.mean_half);
  history_.assign(1, std::move(nl));
  history_h_ = h;
  return out;
}

// Guards ------------------------------------------------------------------------------

double monitored_norm(const State& state) {
  switch (state.form) {
    case Form::primal: {
      double s = 0.0;
      for (const auto& c : state.fields) {
        const double v = norm(c, Norm::hs(1.0));
        s += v * v;
      }
      return std::sqrt(s);
    }
    case Form::integrated_adopted:
    case Form::integrated_plain:
      return norm(state.fields[0], Norm::hs(2.0));
    case Form::colehopf:
    case Form::colehopf_plain:
      return norm(state.fields[0], Norm::h1_full());
  }
  return 0.0;
}

void guard_state(const State& state, double t, double threshold) {
  for (const auto& f : state.fields)
    for (const cplx& c : f.coeffs())
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
        std::ostringstream msg;
        msg << "non-finite coefficients at t = " << t;
        throw BlowUp(t, std::numeric_limits<double>::infinity(), msg.str());
      }
  if (!std::isfinite(state.mean)) throw BlowUp(t, state.mean, "non-finite mean");
  const double v = monitored_norm(state);
  if (!(v <= threshold)) {
    std::ostringstream msg;
    msg << "monitored norm " << v << " exceeded " << threshold << " at t = " << t;
    throw BlowUp(t, v, msg.str());
  }
  if (is_colehopf(state.form)) {
    const double lowest = min_value(to_physical(state.fields[0]));
    if (!(lowest >= kPositivityFloor)) {
      std::ostringstream msg;
      msg << "psi fell to " << lowest << " at t = " << t;
      throw PositivityLost(lowest, msg.str());
    }
  }
}

// Integration ---------------------------------------------------------------------------

namespace {

bool cfl_violated(const State& state, double dt) {
  const GridSpec& g = state.grid();
  const VectorField u = velocity_of(state);
  double umax = 0.0;
  for (const auto& c : u.components) umax = std::max(umax, max_abs(to_physical(c)));
  const double dx = g.length / double(g.n);
  return umax > 0.0 && dt > 0.5 * dx / umax;
}

}  // namespace

Trajectory integrate(const State& state0, const ModelSpec& spec, const SolverConfig& cfg,
                     std::span<TrajectorySink* const> sinks) {
  cfg.validate();
  spec.validate();
  if (state0.form != spec.form) throw InvalidArgument("integrate: state form does not match model form");

  Trajectory traj;
  State u = state0;
  double t = 0.0;

  auto record = [&](double time) {
    if (cfg.diag_every == 0) return;
    DiagnosticsRecord r = compute_record(u, time, spec, cfg.diag_p);
    if (cfl_violated(u, cfg.dt)) ++traj.cfl_warnings;
    for (auto* s : sinks) s->on_record(r);
    traj.records.push_back(std::move(r));
  };
  auto snapshot = [&](double time) {
    for (auto* s : sinks) s->on_snapshot(time, u);
    traj.snapshots.emplace_back(time, u);
  };

  guard_state(u, t, cfg.blowup_threshold);
  record(t);
  snapshot(t);

  const double steps_exact = cfg.t_end / cfg.dt;
  std::size_t full_steps = static_cast<std::size_t>(std::floor(steps_exact + 1e-9));
  double remainder = cfg.t_end - double(full_steps) * cfg.dt;
  if (remainder < 1e-12 * std::max(1.0, cfg.t_end)) remainder = 0.0;
  const std::size_t total = full_steps + (remainder > 0.0 ? 1 : 0);

  if (total > 0) {
    Stepper stepper(spec, cfg.scheme, cfg.dt);
    for (std::size_t n = 1; n <= total; ++n) {
      const bool last = n == total;
      const double h = (last && remainder > 0.0) ? remainder : cfg.dt;
      try {
        u = stepper.step(u, h);
      } catch (const BlowUp& e) {
        throw BlowUp(t, e.value(), std::string(e.what()) + " (step from t = " + std::to_string(t) + ")");
      }
      t = last ? cfg.t_end : double(n) * cfg.dt;
      ++traj.steps;
      guard_state(u, t, cfg.blowup_threshold);
      const bool diag_due = cfg.diag_every > 0 && (n % cfg.diag_every == 0 || last);
      if (diag_due) record(t);
      const bool snap_due = (cfg.snapshot_every > 0 && n % cfg.snapshot_every == 0) || last;
      if (snap_due) snapshot(t);
    }
  }

  if (cfg.diag_every > 0 && is_integrated(spec.form))
    annotate_mean_residuals(traj.records, has_mean_coupling(spec.form) ? 1.0 : 0.0);
  traj.final_state = std::move(u);
  traj.final_time = t;
  return traj;
}

}  // namespace dburgers
