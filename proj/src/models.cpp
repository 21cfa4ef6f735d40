#include "dburgers/models.hpp"

#include <cmath>
#include <limits>

#include "dburgers/colehopf.hpp"
#include "dburgers/errors.hpp"

namespace dburgers {
namespace {

void require_finite(const PhysicalField& f, const char* what) {
  if (!all_finite(f))
    throw BlowUp(std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity(),
                 std::string(what) + ": non-finite samples");
}

SpectralField forcing_or_zero(const ModelSpec& spec) {
  if (spec.forcing.size() == spec.grid.size()) return spec.forcing;
  return SpectralField(spec.grid, true);
}

bool has_forcing(const ModelSpec& spec) {
  if (spec.forcing.size() != spec.grid.size()) return false;
  for (const auto& c : spec.forcing.coeffs())
    if (c != cplx{}) return true;
  return false;
}

}  // namespace

std::string to_string(Form form) {
  switch (form) {
    case Form::primal: return "primal";
    case Form::integrated_adopted: return "integrated_adopted";
    case Form::integrated_plain: return "integrated_plain";
    case Form::colehopf: return "colehopf";
    case Form::colehopf_plain: return "colehopf_plain";
  }
  return "?";
}

Form form_from_string(std::string_view name) {
  if (name == "primal") return Form::primal;
  if (name == "integrated_adopted" || name == "integrated") return Form::integrated_adopted;
  if (name == "integrated_plain") return Form::integrated_plain;
  if (name == "colehopf") return Form::colehopf;
  if (name == "colehopf_plain") return Form::colehopf_plain;
  throw InvalidArgument("unknown form '" + std::string(name) + "'");
}

bool is_integrated(Form f) { return f == Form::integrated_adopted || f == Form::integrated_plain; }
bool is_colehopf(Form f) { return f == Form::colehopf || f == Form::colehopf_plain; }
bool has_mean_coupling(Form f) { return f == Form::integrated_adopted || f == Form::colehopf; }

// ModelSpec -----------------------------------------------------------------------

ModelSpec ModelSpec::make(Form form, MultiplierSymbol symbol, const GridSpec& grid) {
  return make(form, std::move(symbol), SpectralField(grid, true));
}

ModelSpec ModelSpec::make(Form form, MultiplierSymbol symbol, SpectralField forcing) {
  ModelSpec spec;
  spec.form = form;
  spec.symbol = std::move(symbol);
  spec.grid = forcing.grid();
  spec.forcing = std::move(forcing);
  spec.validate();
  return spec;
}

void ModelSpec::validate() const {
  grid.validate();
  if (forcing.size() != 0) {
    if (!(forcing.grid() == grid)) throw InvalidArgument("model: forcing lives on a different grid");
    if (std::abs(forcing[0]) != 0.0) throw InvalidArgument("model: forcing potential G must have zero mean");
  }
  if (is_colehopf(form) && !symbol.bounded())
    throw InvalidArgument("model: Cole-Hopf forms require a bounded symbol (kse is simulation-only)");
}

ModelSpec ModelSpec::with_form(Form f) const {
  ModelSpec out = *this;
  out.form = f;
  out.validate();
  return out;
}

// State ---------------------------------------------------------------------------

State State::primal(VectorField u) {
  State s;
  s.form = Form::primal;
  for (auto& c : u.components) c.set_zero_mean(true);
  s.fields = std::move(u.components);
  return s;
}

State State::integrated(SpectralField phi, double mean, Form form) {
  if (!is_integrated(form)) throw InvalidArgument("State::integrated: form is not an integrated form");
  State s;
  s.form = form;
  s.mean = mean + (phi.zero_mean() ? 0.0 : phi[0].real());
  phi.set_zero_mean(true);
  s.fields = {std::move(phi)};
  return s;
}

State State::colehopf(SpectralField psi, Form form) {
  if (!is_colehopf(form)) throw InvalidArgument("State::colehopf: form is not a Cole-Hopf form");
  State s;
  s.form = form;
  psi.set_zero_mean(false);
  s.fields = {std::move(psi)};
  return s;
}

VectorField State::velocity_field() const {
  if (form != Form::primal) throw InvalidArgument("velocity_field: state is not primal");
  return VectorField(fields);
}

State& State::axpy(double s, const State& other) {
  if (other.fields.size() != fields.size()) throw InvalidArgument("State::axpy: shape mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) fields[i].axpy(s, other.fields[i]);
  mean += s * other.mean;
  return *this;
}

State& State::operator*=(double s) {
  for (auto& f : fields) f *= s;
  mean *= s;
  return *this;
}

// Nonlinear parts -------------------------------------------------------------------

namespace {

VectorField primal_nonlinear(const VectorField& u, const ModelSpec& spec) {
  const GridSpec& grid = spec.grid;
  const int d = grid.d;
  std::vector<PhysicalField> u_phys;
  for (int i = 0; i < d; ++i) {
    u_phys.push_back(to_physical(u[i]));
    require_finite(u_phys.back(), "rhs_primal");
  }
  VectorField out(grid);
  const VectorField grad_g = gradient(forcing_or_zero(spec));
  for (int i = 0; i < d; ++i) {
    PhysicalField adv(grid);
    for (int j = 0; j < d; ++j) {
      const PhysicalField dudx = to_physical(differentiate(u[i], j + 1, 1));
      for (std::size_t p = 0; p < adv.size(); ++p) adv[p] -= u_phys[std::size_t(j)][p] * dudx[p];
    }
    out[i] = dealias_by_rule(to_spectral(adv, true));
    out[i] += grad_g[i];
  }
  if (d == 2) out = gradient_project(out);
  return out;
}

/// Returns (zero-mean part, mean part) of -|grad phi|^2 / 2.
std::pair<SpectralField, double> half_grad_squared(const SpectralField& phi) {
  const GridSpec& grid = phi.grid();
  PhysicalField sq(grid);
  for (int a = 1; a <= grid.d; ++a) {
    const PhysicalField g = to_physical(differentiate(phi, a, 1));
    require_finite(g, "rhs_integrated");
    for (std::size_t p = 0; p < sq.size(); ++p) sq[p] -= 0.5 * g[p] * g[p];
  }
  SpectralField s = dealias_by_rule(to_spectral(sq, false));
  const double m = s[0].real();
  s.set_zero_mean(true);
  return {std::move(s), m};
}

}  // namespace

SpectralField colehopf_nonlinearity(const PhysicalField& psi, const ModelSpec& spec) {
  const GridSpec& grid = psi.grid;
  require_finite(psi, "rhs_colehopf");
  const double lowest = min_value(psi);
  if (lowest < kPositivityFloor)
    throw PositivityLost(lowest, "psi left the positive cone (min sample " + std::to_string(lowest) + ")");

  PhysicalField log_psi(grid);
  for (std::size_t p = 0; p < psi.size(); ++p) log_psi[p] = std::log(psi[p]);
  const SpectralField log_hat = to_spectral(log_psi, false);
  const PhysicalField t_log = to_physical(apply_multiplier(log_hat, spec.symbol));
  const double log_mean = has_mean_coupling(spec.form) ? log_hat[0].real() : 0.0;
  const PhysicalField g = to_physical(forcing_or_zero(spec));

  PhysicalField prod(grid);
  for (std::size_t p = 0; p < psi.size(); ++p) prod[p] = psi[p] * (t_log[p] - log_mean - 0.5 * g[p]);
  return dealias_by_rule(to_spectral(prod, false));
}

State nonlinear_rate(const State& state, const ModelSpec& spec) {
  if (state.form != spec.form) throw InvalidArgument("state form does not match model form");
  State out;
  out.form = state.form;
  switch (state.form) {
    case Form::primal: {
      out.fields = primal_nonlinear(state.velocity_field(), spec).components;
      break;
    }
    case Form::integrated_adopted:
    case Form::integrated_plain: {
      auto [s, m] = half_grad_squared(state.fields[0]);
      if (has_forcing(spec)) s += spec.forcing;
      out.fields = {std::move(s)};
      out.mean = m;
      break;
    }
    case Form::colehopf:
    case Form::colehopf_plain: {
      out.fields = {colehopf_nonlinearity(to_physical(state.fields[0]), spec)};
      break;
    }
  }
  return out;
}

double linear_rate(const ModelSpec& spec, std::size_t flat) {
  const double ks = spec.grid.kappa_squared(flat);
  if (is_colehopf(spec.form)) return -ks;
  if (flat == 0) return 0.0;
  return -ks + spec.symbol(spec.grid.wavevector(flat), spec.grid.length);
}

double mean_linear_rate(const ModelSpec& spec) { return spec.form == Form::integrated_adopted ? -1.0 : 0.0; }

State rhs(const State& state, const ModelSpec& spec) {
  State out = nonlinear_rate(state, spec);
  for (std::size_t f = 0; f < out.fields.size(); ++f) {
    const SpectralField& src = state.fields[f];
    SpectralField& dst = out.fields[f];
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += linear_rate(spec, i) * src[i];
    if (dst.zero_mean()) dst.set_zero_mean(true);
  }
  out.mean += mean_linear_rate(spec) * state.mean;
  return out;
}

VectorField rhs_primal(const VectorField& u, const ModelSpec& spec) {
  if (spec.form != Form::primal) throw InvalidArgument("rhs_primal: model form is not primal");
  return rhs(State::primal(u), spec).velocity_field();
}

IntegratedRate rhs_integrated(const SpectralField& phi, double mean, const ModelSpec& spec) {
  if (!is_integrated(spec.form)) throw InvalidArgument("rhs_integrated: model form is not integrated");
  State r = rhs(State::integrated(phi, mean, spec.form), spec);
  return {std::move(r.fields[0]), r.mean};
}

SpectralField rhs_colehopf(const SpectralField& psi, const ModelSpec& spec) {
  if (!is_colehopf(spec.form)) throw InvalidArgument("rhs_colehopf: model form is not Cole-Hopf");
  return std::move(rhs(State::colehopf(psi, spec.form), spec).fields[0]);
}

double linear_dispersion(const MultiplierSymbol& symbol, const Wavevector& k, double length) {
  const double u = 2.0 * std::numbers::pi / length;
  const double ks = u * u * (double(k[0]) * k[0] + double(k[1]) * k[1]);
  return -ks + symbol(k, length);
}

// Conversions -----------------------------------------------------------------------

VectorField velocity_from_psi(const SpectralField& psi) {
  const GridSpec& grid = psi.grid();
  const PhysicalField ps = to_physical(psi);
  const double lowest = min_value(ps);
  if (lowest < kPositivityFloor) throw PositivityLost(lowest, "velocity_from_psi: psi not positive");
  VectorField u(grid);
  for (int a = 1; a <= grid.d; ++a) {
    PhysicalField g = to_physical(differentiate(psi, a, 1));
    for (std::size_t p = 0; p < g.size(); ++p) g[p] = -2.0 * g[p] / ps[p];
    u[a - 1] = to_spectral(g, true);
  }
  if (grid.d == 2) u = gradient_project(u);
  return u;
}

VectorField velocity_of(const State& state) {
  switch (state.form) {
    case Form::primal: return state.velocity_field();
    case Form::integrated_adopted:
    case Form::integrated_plain: return gradient(state.fields[0]);
    case Form::colehopf:
    case Form::colehopf_plain: return velocity_from_psi(state.fields[0]);
  }
  throw InvalidArgument("velocity_of: unknown form");
}

std::pair<SpectralField, double> potential_of(const State& state) {
  switch (state.form) {
    case Form::primal: {
      const VectorField u = state.velocity_field();
      return {potential_of(u), 0.0};
    }
    case Form::integrated_adopted:
    case Form::integrated_plain: return {state.fields[0], state.mean};
    case Form::colehopf:
    case Form::colehopf_plain: {
      auto split = phi_from_psi(state.fields[0]);
      return {std::move(split.phi), split.mean};
    }
  }
  throw InvalidArgument("potential_of: unknown form");
}

State state_from_potential(const SpectralField& phi, Form form) {
  const double m = phi[0].real();
  SpectralField zm = subtract_mean(phi);
  switch (form) {
    case Form::primal: return State::primal(gradient(zm));
    case Form::integrated_adopted:
    case Form::integrated_plain: return State::integrated(std::move(zm), m, form);
    case Form::colehopf:
    case Form::colehopf_plain: return State::colehopf(psi_from_phi(zm, m), form);
  }
  throw InvalidArgument("state_from_potential: unknown form");
}

}  // namespace dburgers
