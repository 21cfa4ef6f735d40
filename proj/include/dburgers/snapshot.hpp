#pragma once

#include <filesystem>
#include <string>

#include "dburgers/field.hpp"

namespace dburgers {

/// A field together with the metadata written to snapshot files.
struct Snapshot {
  SpectralField field;
  double time = 0.0;
  std::string form;
};

/// JSON text {meta: {d, N, L, time, form, zero_mean}, coeffs: [[k..., re, im], ...]}
/// listing every nonzero coefficient (both members of each Hermitian pair)
/// in lexicographic order of signed k.
std::string snapshot_to_json(const Snapshot& snap);

/// Parses and validates a snapshot; throws InvalidArgument on malformed
/// input, unknown wavevectors or broken Hermitian symmetry.
Snapshot snapshot_from_json(const std::string& text);

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace dburgers
