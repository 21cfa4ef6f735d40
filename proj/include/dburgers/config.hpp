#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "dburgers/initial.hpp"
#include "dburgers/manifold.hpp"
#include "dburgers/models.hpp"
#include "dburgers/timestep.hpp"

namespace dburgers {

bool operator==(const CosineMode& a, const CosineMode& b);

struct ModelBlock {
  Form form = Form::integrated_adopted;
  MultiplierSymbol::Kind symbol = MultiplierSymbol::Kind::bse;
  double alpha = 2.0;
  double length = 3.0 * std::numbers::pi;
  int d = 1;
  int n = 64;
  DealiasRule dealias = DealiasRule::two_thirds;
  /// Cosine modes of the forcing potential G; empty means unforced.
  std::vector<CosineMode> forcing;

  bool operator==(const ModelBlock&) const = default;
};

struct SolverBlock {
  Scheme scheme = Scheme::ifrk4;
  double dt = 1e-3;
  double t_end = 1.0;
  std::size_t snapshot_every = 0;
  std::size_t diag_every = 10;
  double blowup_threshold = 1e8;
  int diag_p = 4;

  bool operator==(const SolverBlock&) const = default;
};

enum class IcKind { random_smooth, modes, file };
std::string to_string(IcKind k);

struct IcBlock {
  IcKind kind = IcKind::random_smooth;
  std::uint64_t seed = 1;
  double amplitude = 1.0;
  double slope = 2.0;
  double mean = 0.0;
  std::vector<CosineMode> modes;
  std::string path;
  std::size_t members = 1;  // ensemble size; member i uses split_seed(seed, i)

  bool operator==(const IcBlock&) const = default;
};

struct OutputBlock {
  std::string directory = "runs/default";
  bool csv = true;
  bool json = true;
  bool snapshots = true;

  bool operator==(const OutputBlock&) const = default;
};

/// Parameters read by the analysis subcommands.
struct AnalysisBlock {
  std::vector<double> scales{1.0, 4.0, 16.0};  // absorb: IC amplitude multipliers
  double burn_in = 1.0;                        // absorb / prepare: earliest time used
  double equivalence_every = 0.05;             // equivalence: comparison cadence
  std::vector<int> dispersion_modes{1, 2, 3, 4};
  double dispersion_amplitude = 1e-10;
  std::int64_t spectrum_cutoff = 4096;  // gaps: |k|^2 cutoff
  std::vector<double> gap_targets{1.0, 2.0, 4.0, 8.0};
  std::size_t probe_pairs = 2000;
  std::uint64_t probe_seed = 1;
  double gap_safety = 1.5;
  std::size_t n = 0;   // manifold: used when auto_n is false
  bool auto_n = true;
  GraphMethod method = GraphMethod::aim_fixed_point;
  std::size_t depth = 200;
  double tol = 1e-9;
  std::size_t attraction_ics = 5;
  double attraction_t_end = 1.0;
  double prepared_dt = 1e-3;
  std::size_t squeeze_pairs = 10;
  double squeeze_separation = 0.05;
  double squeeze_t_end = 0.5;

  bool operator==(const AnalysisBlock&) const = default;
};

/// Fully resolved run configuration.
struct RunConfig {
  ModelBlock model;
  SolverBlock solver;
  IcBlock ic;
  OutputBlock output;
  AnalysisBlock analysis;

  GridSpec grid() const;
  MultiplierSymbol symbol() const;
  ModelSpec model_spec() const;
  SolverConfig solver_config() const;

  /// Throws ConfigError for kse with a Cole-Hopf form, odd or too small N,
  /// dt <= 0 and other inconsistent settings.
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

/// Parses INI text with sections [model], [solver], [ic], [output], [analysis].
/// Missing keys take their defaults; unknown sections or keys, malformed
/// values and invalid combinations throw ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Applies "section.key=value" overrides on top of a parsed config.
RunConfig apply_overrides(const std::string& text, const std::vector<std::string>& overrides);

/// INI text listing every key; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

/// Initial potential (c(0) = mean) for ensemble member `member`.
SpectralField initial_potential(const RunConfig& config, std::size_t member = 0, double amplitude_scale = 1.0);

/// Mode lists are written "k1 k2 amplitude phase; ...".
std::vector<CosineMode> parse_modes(const std::string& text, int d);
std::string format_modes(const std::vector<CosineMode>& modes);

}  // namespace dburgers
