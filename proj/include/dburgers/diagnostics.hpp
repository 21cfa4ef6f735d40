#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "dburgers/field.hpp"
#include "dburgers/models.hpp"

namespace dburgers {

/// Per-time diagnostics along a trajectory.
///
/// norms keys: l2_U, h1_U, h2_U, linf_U, l2_phi, linf_phi, divplus_l2
/// (||(div U)^+||), and h1_psi / min_psi for Cole-Hopf states.
struct DiagnosticsRecord {
  double t = 0.0;
  std::map<std::string, double> norms;
  int p = 4;
  double alpha_p = 0.0;
  double curl_residual = 0.0;
  double mean_value = 0.0;     // <phi>
  double grad_sq_mean = 0.0;   // <|grad phi|^2> = <|U|^2>
  double mean_residual = 0.0;  // filled by annotate_mean_residuals

  double norm(const std::string& key) const;
};

DiagnosticsRecord compute_record(const State& state, double t, const ModelSpec& spec, int p = 4);

/// Values of records[i].norm(key) (or of alpha_p / mean_value for those keys).
std::vector<double> series(std::span<const DiagnosticsRecord> records, const std::string& key);
std::vector<double> times(std::span<const DiagnosticsRecord> records);

// Positive-part functionals -----------------------------------------------------------

/// alpha_p = sum_i ||(d_i u_i)^+||_{L^p}^p by grid quadrature (one term in 1D).
double alpha_p(const VectorField& u, int p);

/// alpha_bar_p(t)^{1/p} with alpha_bar_p(t) = max(2L^2 (2p/(p-2))^p t^{-p}, 2L^2 (2p/(p-2))^p).
/// For t >= 1 this is (2L^2)^{1/p} 2p/(p-2). Throws InvalidArgument for p <= 2 or t <= 0.
double alpha_upper_bound(double p, double length, double t);

struct AlphaInequalityReport {
  bool pass = true;
  double max_residual = 0.0;  // max of d(alpha)/dt - rhs
  double worst_ratio = 0.0;   // max of residual / tolerance
  double t_worst = 0.0;
  std::size_t checked = 0;
};

/// Checks d(alpha_p)/dt <= p alpha_p - (p-2)/(2L^2)^{1/p} alpha_p^{(p+1)/p} with
/// centered differences; each point passes when the residual is at most
/// tol_fraction * max(1, p alpha_p). Throws InvalidArgument when consecutive
/// records are more than max_spacing apart.
AlphaInequalityReport check_alpha_inequality(std::span<const DiagnosticsRecord> records, int p, double length,
                                             double tol_fraction = 0.05, double max_spacing = 0.01);

struct AlphaBoundReport {
  bool pass = true;
  double bound = 0.0;      // alpha_upper_bound(p, L, 1)
  double max_value = 0.0;  // max alpha_p^{1/p} over t >= t_min
  double max_ratio = 0.0;  // max_value / bound
};

/// alpha_p(t)^{1/p} <= margin * alpha_upper_bound(p, L, t) for every record with t >= t_min.
AlphaBoundReport check_alpha_bound(std::span<const DiagnosticsRecord> records, int p, double length,
                                   double t_min = 1.0, double margin = 1.05);

// Absorbing sets ----------------------------------------------------------------------

struct AbsorbingBallEstimate {
  double radius = 0.0;      // rho_emp
  double entry_time = 0.0;  // T_emp
  double plateau = 0.0;
  double window = 0.0;      // length of the trailing plateau window
  std::vector<std::string> ensemble;
};

struct NormSeries {
  std::string id;
  std::vector<double> t;
  std::vector<double> value;
};

/// rho_emp = max over members of sup_{t >= T_emp} value, where T_emp is the
/// first recorded time at which that ensemble-wide tail supremum is within
/// `tolerance` of the plateau (the supremum over the trailing window).
/// Throws InvalidArgument when a member is shorter than burn_in, the time grids
/// differ, or the ensemble maximum still varies by more than `tolerance` over
/// the window (no plateau). Values below `floor` count as settled.
AbsorbingBallEstimate absorbing_entry(std::span<const NormSeries> ensemble, double burn_in,
                                      double window_fraction = 0.1, double tolerance = 0.05,
                                      double floor = 1e-6);

// Linear growth ---------------------------------------------------------------------------

struct GrowthFit {
  double omega = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the log-linear fit
  std::size_t points = 0;
};

/// Least-squares slope of log|c_k(t)|. Throws InvalidArgument when any
/// amplitude exceeds max_amplitude (left the linear regime) or is zero.
GrowthFit growth_rate_fit(std::span<const double> t, std::span<const double> amplitude,
                          double max_amplitude = 1e-6);

/// Least-squares line through (x, y); returns slope, intercept and R^2.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double rms = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Mean ODE ---------------------------------------------------------------------------------

/// Max over interior records of |d<phi>/dt + c <phi> + <|grad phi|^2>/2| with
/// c = 1 (adopted form) or 0 (plain form). The derivative is taken on
/// [t_{i-1}, t_{i+1}] in integrating-factor form with Simpson's rule for the
/// forcing, so a run with grad phi = 0 has zero residual up to round-off.
/// Triples of records that are not uniformly spaced are skipped.
double mean_residual(std::span<const DiagnosticsRecord> records, double coupling = 1.0);

/// Writes the pointwise residual into each interior record's mean_residual.
void annotate_mean_residuals(std::span<DiagnosticsRecord> records, double coupling = 1.0);

/// ||U_t||_{L^2} estimated from the model right-hand side at a state.
double time_derivative_norm(const State& state, const ModelSpec& spec);

// CSV ---------------------------------------------------------------------------------------

/// Stable column list: t, l2_U, h1_U, linf_phi, alpha_p, mean, mean_residual, curl_residual.
std::string diagnostics_csv_header();
std::string diagnostics_csv_row(const DiagnosticsRecord& r);

}  // namespace dburgers
