#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dburgers/colehopf.hpp"
#include "dburgers/spectrum.hpp"
#include "dburgers/timestep.hpp"

namespace dburgers {

// Projections -----------------------------------------------------------------------

/// P_n keeps every mode with |k|^2 <= table[n].k2 (the constant mode included);
/// Q_n = I - P_n.
struct ProjectionPair {
  GridSpec grid;
  std::size_t n = 0;
  std::int64_t k2_n = 0;
  double lambda_n = 0.0;
  double lambda_n1 = 0.0;
  std::vector<bool> in_p;  // per flat index
  std::size_t dim_p = 0;   // real dimension of range P_n on the grid

  /// Throws InvalidArgument when table[n + 1] is not resolved by the grid.
  static ProjectionPair make(const GridSpec& grid, const SpectrumTable& table, std::size_t n);
};

enum class Part { P, Q };
SpectralField project(const SpectralField& u, Part which, const ProjectionPair& proj);

/// Exact-in-time linear flow of the prepared equation, psi_t = Lap psi + F.
/// Rates are -kappa^2; the mean is carried in c(0).
Stepper prepared_stepper(const PreparedNonlinearity& prep, double dt, Scheme scheme = Scheme::ifrk4);

// Graph ------------------------------------------------------------------------------

enum class GraphMethod { aim_fixed_point, lyapunov_perron };
std::string to_string(GraphMethod m);
GraphMethod graph_method_from_string(const std::string& name);

struct ManifoldGraph {
  ProjectionPair proj;
  PreparedNonlinearity prep;
  GraphMethod method = GraphMethod::aim_fixed_point;
  std::size_t depth = 200;  // iteration cap
  double tol = 1e-9;
  double T_back = 0.0;      // 0 picks 10 / (lambda_{n+1} - 4 C_est), floored at 5 / lambda_{n+1}
  std::size_t lp_steps = 400;  // quadrature intervals on [-T_back, 0]

  double backward_horizon() const;
};

struct GraphEvaluation {
  SpectralField q;
  std::vector<double> residuals;  // ||q_{j+1} - q_j||_{\dot H^1}
  std::size_t iterations = 0;
  /// Geometric mean of successive residual ratios once below 1.
  double contraction_ratio = 0.0;
};

/// Phi(p) by the configured method. p is projected onto range P_n first.
/// Throws NoConvergence with the residual history when tol is not reached
/// within depth iterations.
GraphEvaluation evaluate_graph_detailed(const SpectralField& p, const ManifoldGraph& graph);
SpectralField evaluate_graph(const SpectralField& p, const ManifoldGraph& graph);

/// dp/dt = -A p + P_n N_P(p + Phi(p)).
SpectralField inertial_form_rhs(const SpectralField& p, const ManifoldGraph& graph);

/// Integrates the inertial form with IF-RK4; returns the P-states at every step.
std::vector<SpectralField> integrate_inertial_form(const SpectralField& p0, const ManifoldGraph& graph, double dt,
                                                   std::size_t steps);

/// ||Q u - Phi(P u)||_{\dot H^1}.
double graph_distance(const SpectralField& u, const ManifoldGraph& graph);

struct AttractionFit {
  double C_U = 0.0;
  double mu = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;  // points in the fitted pre-floor segment
  bool pass = false;       // mu > 0 and R^2 >= 0.95
};

/// Least-squares fit of log d(t) = log C_U - mu t over the leading points
/// with d > floor. Throws InvalidArgument with fewer than three such points.
AttractionFit attraction_fit(const std::vector<double>& t, const std::vector<double>& distance, double floor);

struct PreparedRun {
  std::vector<double> t;
  std::vector<SpectralField> states;
};

/// Prepared-equation trajectory sampled every `every` steps (t = 0 included).
PreparedRun run_prepared(const SpectralField& psi0, const PreparedNonlinearity& prep, double dt, std::size_t steps,
                         std::size_t every = 1);

struct SqueezingReport {
  bool started_in_cone = false;
  bool cone_invariant = true;      // checked only for cone starts
  std::optional<double> q_rate;    // fitted decay rate of ||Q(u - v)||, cone-exterior starts
  std::optional<double> entry_time;
  double max_cone_ratio = 0.0;     // max ||Q w|| / ||P w|| after entry (or from the start)
  bool pass = true;
};

/// Runs the prepared equation from u0 and v0 up to t_end and checks the cone
/// ||Q w||_{H^1} <= ||P w||_{H^1} for w = u - v, with P and Q measured in the
/// full H^1 norm so the constant mode counts.
SqueezingReport squeezing_test(const SpectralField& u0, const SpectralField& v0, const ManifoldGraph& graph,
                               double t_end, double dt, double cone_slack = 1e-9);

struct LiftResult {
  std::vector<VectorField> velocities;
  std::vector<std::size_t> skipped;  // indices whose psi was not positive
};

/// U = -2 grad psi / psi with psi = p + Phi(p) for each sample.
LiftResult lift_to_U(const ManifoldGraph& graph, const std::vector<SpectralField>& p_samples);

struct GraphLipschitz {
  double l_est = 0.0;
  std::size_t pairs = 0;
};

/// max ||Phi(p1) - Phi(p2)||_{H^1} / ||p1 - p2||_{H^1} over pairs drawn
/// from P_n-projections of the probe sampler.
GraphLipschitz graph_lipschitz_probe(const ManifoldGraph& graph, const ProbeSampler& sampler, std::size_t n_pairs,
                                     std::uint64_t seed);

/// Smallest n with gap >= 4 safety C_est on the grid's 1D/2D spectrum, or
/// nullopt when no resolved gap is large enough.
std::optional<std::size_t> select_n(const GridSpec& grid, double C_est, double safety = 1.5);

struct CompletenessProbe {
  double t1 = 0.0;
  std::vector<double> t;
  std::vector<double> difference;  // ||u(t) - v(t)||_{H^1}
  AttractionFit fit;
};

/// Shadowing probe: runs u from u0 to t1, starts v on the graph at
/// P u(t1) + Phi(P u(t1)) and follows both for another `horizon`.
CompletenessProbe completeness_probe(const SpectralField& u0, const ManifoldGraph& graph, double t1, double horizon,
                                     double dt, std::size_t every = 10);

}  // namespace dburgers
