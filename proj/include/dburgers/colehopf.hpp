#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dburgers/field.hpp"
#include "dburgers/models.hpp"

namespace dburgers {

// Transform ------------------------------------------------------------------------

/// psi = exp(-(phi + mean)/2) evaluated pointwise on the grid. psi keeps its
/// own mean in c(0).
SpectralField psi_from_phi(const SpectralField& phi, double mean = 0.0);

struct PotentialSplit {
  SpectralField phi;  // zero-mean part
  double mean = 0.0;
};

/// phi = -2 log psi evaluated pointwise. Throws PositivityLost when a grid
/// sample of psi is below kPositivityFloor.
PotentialSplit phi_from_psi(const SpectralField& psi);

/// Transformed nonlinearity with psi_t = Lap psi + N(psi):
/// N(psi) = psi T[log psi] - psi <log psi> - psi G / 2.
SpectralField nonlinearity_N(const SpectralField& psi, const ModelSpec& spec);

// Radii -------------------------------------------------------------------------------

/// Sizes of a numerically estimated absorbing set B for phi and of its image
/// under the transform.
struct TransformRadii {
  double r = 0.0;       // max ||phi||_{\dot H^2}
  double r_inf = 0.0;   // max ||phi||_{L^inf}
  double r0 = 1.0;      // exp(-r_inf / 2): pointwise lower bound of psi
  double r1 = 1.0;      // exp(+r_inf / 2): pointwise upper bound of psi
  double r2 = 0.0;      // max ||psi - <psi>||_{H^2} over the images
  /// Largest observed ||Lap psi|| / (r1 (||Lap phi|| + ||grad phi|| ||Lap phi||)).
  double chain_constant = 0.0;
  std::size_t samples = 0;
};

/// Radii over an ensemble of post-transient potentials (c(0) = mean).
/// Throws InvalidArgument on an empty ensemble.
TransformRadii estimate_radii(const std::vector<SpectralField>& potentials);

// Prepared nonlinearity -------------------------------------------------------------

/// Smoothstep cutoff: 1 on [0, 1], 0 on [2, inf), 1 - (3s^2 - 2s^3) with
/// s = x - 1 in between. |theta'| <= 3/2.
double cutoff_theta(double x);

/// N cut off radially in the \dot H^1 seminorm of psi - <psi> and evaluated
/// on psi clamped pointwise into [r0/2, 2 r1].
struct PreparedNonlinearity {
  ModelSpec model;  // Cole-Hopf form, bounded symbol
  TransformRadii radii;
  double inner_radius = 1.0;
  double outer_radius = 2.0;
  double lipschitz_estimate = 0.0;  // C_est, filled by lipschitz_probe
  /// When set N_P is identically zero (used for linear reference runs).
  bool zero = false;

  /// inner = max(r2, tiny), outer = 2 inner.
  static PreparedNonlinearity make(ModelSpec model, const TransformRadii& radii);
  static PreparedNonlinearity zero_nonlinearity(const ModelSpec& model);

  double clamp_low() const { return 0.5 * radii.r0; }
  double clamp_high() const { return 2.0 * radii.r1; }
};

SpectralField prepared_N_P(const SpectralField& psi, const PreparedNonlinearity& prep);

// Lipschitz probing -------------------------------------------------------------------

enum class ProbeStratum { in_ball, boundary, far_field };
std::string to_string(ProbeStratum s);

/// Draws probe pairs around a set of centers (typically transformed attractor
/// states). The first point of a pair sits at a random \dot H^1 distance from a
/// center, scaled by the inner radius according to its stratum; the second is
/// a small random perturbation of the first, including a mean shift.
struct ProbeSampler {
  std::vector<SpectralField> centers;
  double in_ball_max = 1.0;                 // in units of inner radius
  double boundary_min = 0.8, boundary_max = 2.2;
  double far_min = 2.2, far_max = 4.0;
  double perturbation_min = 1e-3, perturbation_max = 0.3;  // relative to inner radius
  double spectral_slope = 2.0;

  std::pair<SpectralField, SpectralField> draw(ProbeStratum stratum, double inner_radius,
                                              std::uint64_t seed) const;
};

struct StratumStats {
  std::size_t pairs = 0;
  std::size_t skipped = 0;
  double max_ratio = 0.0;
};

struct ProbeReport {
  double C_est = 0.0;
  std::size_t n_pairs = 0;
  std::uint64_t seed = 0;
  std::map<std::string, StratumStats> strata;
  double sup_N = 0.0;  // max ||N_P||_{H^1} over probed points
};

/// C_est = max ||N_P(psi1) - N_P(psi2)||_{H^1} / ||psi1 - psi2||_{H^1} over
/// n_pairs seeded pairs, split evenly over the three strata. Pairs closer
/// than 1e-12 are skipped. Deterministic in (seed, n_pairs).
ProbeReport lipschitz_probe(const PreparedNonlinearity& prep, const ProbeSampler& sampler, std::size_t n_pairs,
                            std::uint64_t seed);

std::string probe_report_to_json(const ProbeReport& report);

// Preparation pipeline -----------------------------------------------------------------

struct Preparation {
  PreparedNonlinearity prep;  // lipschitz_estimate = probe.C_est
  ProbeSampler sampler;       // centered on the transformed potentials
  ProbeReport probe;
};

/// Radii from the potentials, the prepared nonlinearity for `model` (a
/// Cole-Hopf form) and its probed Lipschitz constant.
Preparation prepare(const ModelSpec& model, const std::vector<SpectralField>& potentials, std::size_t n_pairs,
                    std::uint64_t seed);

}  // namespace dburgers
