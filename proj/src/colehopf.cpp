#include "dburgers/colehopf.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dburgers/errors.hpp"
#include "dburgers/initial.hpp"
#include "json.hpp"

namespace dburgers {

SpectralField psi_from_phi(const SpectralField& phi_zero_mean, double mean) {
  PhysicalField s = to_physical(phi_zero_mean);
  for (double& v : s.values) v = std::exp(-0.5 * (v + mean));
  return to_spectral(s, false);
}

PotentialSplit phi_from_psi(const SpectralField& psi) {
  PhysicalField s = to_physical(psi);
  const double lowest = min_value(s);
  if (!(lowest >= kPositivityFloor))
    throw PositivityLost(lowest, "phi_from_psi: psi has a grid sample below the positivity floor");
  for (double& v : s.values) v = -2.0 * std::log(v);
  SpectralField phi = to_spectral(s, false);
  const double m = phi[0].real();
  phi.set_zero_mean(true);
  return {std::move(phi), m};
}

SpectralField nonlinearity_N(const SpectralField& psi, const ModelSpec& spec) {
  if (!is_colehopf(spec.form)) throw InvalidArgument("nonlinearity_N: model must be in a Cole-Hopf form");
  return colehopf_nonlinearity(to_physical(psi), spec);
}

// Radii ----------------------------------------------------------------------------

TransformRadii estimate_radii(const std::vector<SpectralField>& potentials) {
  if (potentials.empty()) throw InvalidArgument("estimate_radii: empty ensemble");
  TransformRadii out;
  for (const auto& full : potentials) {
    const double m = full[0].real();
    const SpectralField phi = subtract_mean(full);
    out.r = std::max(out.r, norm(phi, Norm::hs(2.0)));
    PhysicalField samples = to_physical(phi);
    for (double& v : samples.values) v += m;
    out.r_inf = std::max(out.r_inf, max_abs(samples));

    const SpectralField psi_mf = subtract_mean(psi_from_phi(phi, m));
    const double l2 = norm(psi_mf, Norm::l2());
    const double h1 = norm(psi_mf, Norm::hs(1.0));
    const double h2 = norm(psi_mf, Norm::hs(2.0));
    out.r2 = std::max(out.r2, std::sqrt(l2 * l2 + h1 * h1 + h2 * h2));
    ++out.samples;
  }
  out.r0 = std::exp(-0.5 * out.r_inf);
  out.r1 = std::exp(0.5 * out.r_inf);
  for (const auto& full : potentials) {
    const SpectralField phi = subtract_mean(full);
    const double lap_phi = norm(phi, Norm::hs(2.0));
    const double grad_phi = norm(phi, Norm::hs(1.0));
    const double denom = out.r1 * (lap_phi + grad_phi * lap_phi);
    if (denom <= 0.0) continue;
    const double lap_psi = norm(psi_from_phi(phi, full[0].real()), Norm::hs(2.0));
    out.chain_constant = std::max(out.chain_constant, lap_psi / denom);
  }
  return out;
}

// Prepared nonlinearity ---------------------------------------------------------------

double cutoff_theta(double x) {
  if (x <= 1.0) return 1.0;
  if (x >= 2.0) return 0.0;
  const double s = x - 1.0;
  return 1.0 - s * s * (3.0 - 2.0 * s);
}

PreparedNonlinearity PreparedNonlinearity::make(ModelSpec model, const TransformRadii& radii) {
  if (!is_colehopf(model.form)) throw InvalidArgument("prepared nonlinearity needs a Cole-Hopf model");
  model.validate();
  PreparedNonlinearity p;
  p.model = std::move(model);
  p.radii = radii;
  p.inner_radius = std::max(radii.r2, 1e-8);
  p.outer_radius = 2.0 * p.inner_radius;
  return p;
}

PreparedNonlinearity PreparedNonlinearity::zero_nonlinearity(const ModelSpec& model) {
  PreparedNonlinearity p = make(model, TransformRadii{});
  p.zero = true;
  return p;
}

SpectralField prepared_N_P(const SpectralField& psi, const PreparedNonlinearity& prep) {
  if (prep.zero) return SpectralField(psi.grid(), false);
  const double theta = cutoff_theta(norm(psi, Norm::hs(1.0)) / prep.inner_radius);
  if (theta == 0.0) return SpectralField(psi.grid(), false);
  PhysicalField s = to_physical(psi);
  const double lo = prep.clamp_low(), hi = prep.clamp_high();
  for (double& v : s.values) v = std::clamp(v, lo, hi);
  SpectralField out = colehopf_nonlinearity(s, prep.model);
  if (theta != 1.0) out *= theta;
  return out;
}

// Probing -------------------------------------------------------------------------------

std::string to_string(ProbeStratum s) {
  switch (s) {
    case ProbeStratum::in_ball: return "in_ball";
    case ProbeStratum::boundary: return "boundary";
    case ProbeStratum::far_field: return "far_field";
  }
  return "?";
}

std::pair<SpectralField, SpectralField> ProbeSampler::draw(ProbeStratum stratum, double inner_radius,
                                                         std::uint64_t seed) const {
  if (centers.empty()) throw InvalidArgument("probe sampler has no centers");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const SpectralField& center = centers[std::size_t(unit(rng) * double(centers.size())) % centers.size()];
  const GridSpec& grid = center.grid();

  double lo = 0.0, hi = in_ball_max;
  if (stratum == ProbeStratum::boundary) lo = boundary_min, hi = boundary_max;
  if (stratum == ProbeStratum::far_field) lo = far_min, hi = far_max;
  const double target = inner_radius * (lo + (hi - lo) * unit(rng));

  // Direction: the center's own shape mixed with a random smooth field.
  SpectralField shape = subtract_mean(center);
  const double shape_norm = norm(shape, Norm::hs(1.0));
  SpectralField noise = random_smooth_potential(grid, rng(), 1.0, spectral_slope);
  noise *= 1.0 / std::max(norm(noise, Norm::hs(1.0)), 1e-300);
  const double mix = unit(rng);
  SpectralField dir = shape;
  if (shape_norm > 0.0) dir *= (1.0 - mix) / shape_norm;
  dir.axpy(shape_norm > 0.0 ? mix : 1.0, noise);
  const double dir_norm = norm(dir, Norm::hs(1.0));
  SpectralField first(grid, false);
  first[0] = center[0];
  if (dir_norm > 0.0) first.axpy(target / dir_norm, dir);

  // Perturbation with log-uniform relative size, including a mean shift.
  SpectralField pert = random_smooth_potential(grid, rng(), 1.0, spectral_slope);
  pert[0] = 2.0 * unit(rng) - 1.0;
  pert.set_zero_mean(false);
  const double eps = perturbation_min * std::pow(perturbation_max / perturbation_min, unit(rng));
  const double pn = norm(pert, Norm::h1_full());
  SpectralField second = first;
  if (pn > 0.0) second.axpy(eps * inner_radius / pn, pert);
  return {std::move(first), std::move(second)};
}

ProbeReport lipschitz_probe(const PreparedNonlinearity& prep, const ProbeSampler& sampler, std::size_t n_pairs,
                            std::uint64_t seed) {
  ProbeReport report;
  report.n_pairs = n_pairs;
  report.seed = seed;
  const ProbeStratum strata[] = {ProbeStratum::in_ball, ProbeStratum::boundary, ProbeStratum::far_field};
  for (auto s : strata) report.strata[to_string(s)] = {};

  for (std::size_t i = 0; i < n_pairs; ++i) {
    const ProbeStratum stratum = strata[i % 3];
    auto& stats = report.strata[to_string(stratum)];
    auto [a, b] = sampler.draw(stratum, prep.inner_radius, split_seed(seed, i));
    const double dist = norm(a - b, Norm::h1_full());
    if (dist < 1e-12) {
      ++stats.skipped;
      continue;
    }
    const SpectralField na = prepared_N_P(a, prep);
    const SpectralField nb = prepared_N_P(b, prep);
    report.sup_N = std::max({report.sup_N, norm(na, Norm::h1_full()), norm(nb, Norm::h1_full())});
    const double ratio = norm(na - nb, Norm::h1_full()) / dist;
    ++stats.pairs;
    stats.max_ratio = std::max(stats.max_ratio, ratio);
    report.C_est = std::max(report.C_est, ratio);
  }
  return report;
}

std::string probe_report_to_json(const ProbeReport& report) {
  nlohmann::json doc;
  doc["C_est"] = report.C_est;
  doc["n_pairs"] = report.n_pairs;
  doc["seed"] = report.seed;
  doc["sup_N"] = report.sup_N;
  nlohmann::json strata = nlohmann::json::object();
  for (const auto& [name, s] : report.strata)
    strata[name] = {{"pairs", s.pairs}, {"skipped", s.skipped}, {"max_ratio", s.max_ratio}};
  doc["strata"] = std::move(strata);
  return doc.dump(2);
}

Preparation prepare(const ModelSpec& model, const std::vector<SpectralField>& potentials, std::size_t n_pairs,
                    std::uint64_t seed) {
  Preparation out;
  out.prep = PreparedNonlinearity::make(model, estimate_radii(potentials));
  for (const auto& phi : potentials) out.sampler.centers.push_back(psi_from_phi(phi, 0.0));
  out.probe = lipschitz_probe(out.prep, out.sampler, n_pairs, seed);
  out.prep.lipschitz_estimate = out.probe.C_est;
  return out;
}

}  // namespace dburgers
