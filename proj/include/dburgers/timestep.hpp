#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dburgers/diagnostics.hpp"
#include "dburgers/models.hpp"

namespace dburgers {

enum class Scheme { ifrk4, imex_cnab2 };
std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

struct SolverConfig {
  Scheme scheme = Scheme::ifrk4;
  double dt = 1e-3;
  double t_end = 1.0;
  std::size_t snapshot_every = 0;  // steps; 0 keeps only the initial and final states
  std::size_t diag_every = 0;      // steps; 0 disables diagnostics records
  double blowup_threshold = 1e8;
  int diag_p = 4;

  /// Throws InvalidArgument unless dt > 0, t_end >= 0 and the threshold is positive.
  void validate() const;
};

/// Nonlinear part of a right-hand side split as u_t = Lambda u + F(u).
using NonlinearFn = std::function<State(const State&)>;

/// One-step integrator for u_t = Lambda u + F(u) with diagonal Lambda.
/// ifrk4 is the Lawson (integrating-factor) RK4; imex_cnab2 is Crank-Nicolson
/// on Lambda with second-order Adams-Bashforth on F, bootstrapped by one
/// first-order step. The tracked mean scalar has its own rate.
class Stepper {
 public:
  Stepper(const ModelSpec& spec, Scheme scheme, double dt);
  Stepper(std::vector<double> rates, double mean_rate, NonlinearFn nonlinear, Scheme scheme, double dt);

  /// Advances by h (defaults to dt). A step of another size restarts the
  /// Adams-Bashforth history.
  State step(const State& u);
  State step(const State& u, double h);

  void reset_history();
  double dt() const { return dt_; }
  const std::vector<double>& rates() const { return rates_; }

 private:
  struct Factors {
    double h = 0.0;
    std::vector<double> full, half;
    double mean_full = 1.0, mean_half = 1.0;
  };
  const Factors& factors(double h);
  State ifrk4(const State& u, double h);
  State cnab2(const State& u, double h);

  std::vector<double> rates_;
  double mean_rate_ = 0.0;
  NonlinearFn nonlinear_;
  Scheme scheme_;
  double dt_;
  Factors cached_, scratch_;
  std::vector<State> history_;  // previous F evaluation for AB2
  double history_h_ = 0.0;
};

/// Norm watched by the blow-up guard: ||grad U|| (primal), ||phi||_{\dot H^2}
/// (integrated, the same quantity), ||psi||_{H^1} (Cole-Hopf).
double monitored_norm(const State& state);

/// Throws BlowUp when samples are non-finite or the monitored norm exceeds
/// the threshold, and PositivityLost when a Cole-Hopf state has a grid sample
/// below kPositivityFloor.
void guard_state(const State& state, double t, double threshold);

struct Trajectory {
  std::vector<DiagnosticsRecord> records;
  std::vector<std::pair<double, State>> snapshots;
  State final_state;
  double final_time = 0.0;
  std::size_t steps = 0;
  std::size_t cfl_warnings = 0;  // diagnostics times with dt > 0.5 dx / max|U|
};

/// Receives records and snapshots as integrate produces them.
class TrajectorySink {
 public:
  virtual ~TrajectorySink() = default;
  virtual void on_record(const DiagnosticsRecord&) {}
  virtual void on_snapshot(double, const State&) {}
};

/// Runs steps of cfg.dt up to cfg.t_end (the last step is shortened when
/// t_end is not a multiple of dt). Records are taken at t = 0, every
/// diag_every steps and at the end; snapshots likewise with snapshot_every.
/// Deterministic in its inputs. Errors propagate with the failure time.
Trajectory integrate(const State& state0, const ModelSpec& spec, const SolverConfig& cfg,
                     std::span<TrajectorySink* const> sinks = {});

}  // namespace dburgers
