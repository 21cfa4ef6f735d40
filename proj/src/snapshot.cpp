#include "dburgers/snapshot.hpp"

#include <algorithm>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "dburgers/errors.hpp"

namespace dburgers {

using nlohmann::json;

std::string snapshot_to_json(const Snapshot& snap) {
  const SpectralField& f = snap.field;
  const GridSpec& grid = f.grid();
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] != cplx{}) order.push_back(i);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return grid.wavevector(a) < grid.wavevector(b); });

  json coeffs = json::array();
  for (std::size_t i : order) {
    const auto k = grid.wavevector(i);
    json row = json::array();
    row.push_back(k[0]);
    if (grid.d == 2) row.push_back(k[1]);
    row.push_back(f[i].real());
    row.push_back(f[i].imag());
    coeffs.push_back(std::move(row));
  }
  json doc;
  doc["meta"] = {{"d", grid.d},          {"N", grid.n},           {"L", grid.length},
                 {"time", snap.time},    {"form", snap.form},     {"zero_mean", f.zero_mean()},
                 {"dealias", to_string(grid.dealias)}};
  doc["coeffs"] = std::move(coeffs);
  return doc.dump();
}

Snapshot snapshot_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("snapshot: malformed JSON: ") + e.what());
  }
  try {
    const json& meta = doc.at("meta");
    GridSpec grid;
    grid.d = meta.at("d").get<int>();
    grid.n = meta.at("N").get<int>();
    grid.length = meta.at("L").get<double>();
    if (meta.contains("dealias")) grid.dealias = dealias_rule_from_string(meta.at("dealias").get<std::string>());
    grid.validate();
    const bool zero_mean = meta.at("zero_mean").get<bool>();

    SpectralField field(grid, false);
    double scale = 0.0;
    for (const json& row : doc.at("coeffs")) {
      if (row.size() != std::size_t(grid.d + 2)) throw InvalidArgument("snapshot: coefficient row has wrong arity");
      Wavevector k{row.at(0).get<int>(), grid.d == 2 ? row.at(1).get<int>() : 0};
      if (!grid.representable(k)) throw InvalidArgument("snapshot: wavevector outside grid");
      const cplx c(row.at(std::size_t(grid.d)).get<double>(), row.at(std::size_t(grid.d + 1)).get<double>());
      field[grid.index_of(k)] = c;
      scale = std::max(scale, std::abs(c));
    }
    if (field.hermitian_defect() > 1e-12 * std::max(scale, 1.0))
      throw InvalidArgument("snapshot: coefficients are not Hermitian symmetric");
    if (zero_mean && std::abs(field[0]) > 1e-12 * std::max(scale, 1.0))
      throw InvalidArgument("snapshot: zero_mean flag set but c(0) != 0");
    field.symmetrize();
    field.set_zero_mean(zero_mean);
    return Snapshot{std::move(field), meta.at("time").get<double>(), meta.at("form").get<std::string>()};
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("snapshot: ") + e.what());
  }
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open snapshot for writing: " + path.string());
  out << snapshot_to_json(snap) << '\n';
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open snapshot: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return snapshot_from_json(ss.str());
}

}  // namespace dburgers
