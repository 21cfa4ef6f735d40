#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dburgers/field.hpp"
#include "dburgers/symbol.hpp"

namespace dburgers {

/// Equation form being evolved.
///
///   primal:             U_t = -(U.grad)U + Lap U + T U + grad G
///   integrated_adopted: phi_t = -<phi> - |grad phi|^2/2 + Lap phi + T phi + G
///   integrated_plain:   same without the -<phi> term
///   colehopf:           psi_t = Lap psi + psi T[log psi] - psi <log psi> - psi G / 2
///   colehopf_plain:     same without the nonlocal -psi <log psi> term
///
/// The Cole-Hopf forms are the images of the integrated forms under
/// psi = exp(-phi/2).
enum class Form { primal, integrated_adopted, integrated_plain, colehopf, colehopf_plain };

std::string to_string(Form form);
Form form_from_string(std::string_view name);

bool is_integrated(Form f);
bool is_colehopf(Form f);
/// True for the forms carrying the mean coupling (-<phi>, -psi <log psi>).
bool has_mean_coupling(Form f);

/// Lower bound on psi samples accepted by the Cole-Hopf forms.
inline constexpr double kPositivityFloor = 1e-10;

struct ModelSpec {
  Form form = Form::primal;
  MultiplierSymbol symbol;
  /// Zero-mean forcing potential G; the primal forcing is grad G.
  SpectralField forcing;
  GridSpec grid;

  /// Unforced model on grid.
  static ModelSpec make(Form form, MultiplierSymbol symbol, const GridSpec& grid);
  static ModelSpec make(Form form, MultiplierSymbol symbol, SpectralField forcing);

  /// Throws InvalidArgument on a nonzero-mean forcing, a forcing on another
  /// grid, or an unbounded symbol paired with a Cole-Hopf form.
  void validate() const;

  /// Same model in another form (forcing and symbol unchanged).
  ModelSpec with_form(Form f) const;
};

/// Evolving state. primal: fields = U components; integrated: fields = {phi}
/// (zero mean) with the mean tracked in `mean`; Cole-Hopf: fields = {psi}
/// with its own mean in c(0).
struct State {
  Form form = Form::primal;
  std::vector<SpectralField> fields;
  double mean = 0.0;

  static State primal(VectorField u);
  static State integrated(SpectralField phi, double mean, Form form = Form::integrated_adopted);
  static State colehopf(SpectralField psi, Form form = Form::colehopf);

  const GridSpec& grid() const { return fields.front().grid(); }
  VectorField velocity_field() const;  // primal only

  State& axpy(double s, const State& other);
  State& operator*=(double s);
};

struct IntegratedRate {
  SpectralField dphi;  // zero-mean part
  double dmean = 0.0;
};

// Right-hand sides -------------------------------------------------------------

VectorField rhs_primal(const VectorField& u, const ModelSpec& spec);
IntegratedRate rhs_integrated(const SpectralField& phi, double mean, const ModelSpec& spec);
SpectralField rhs_colehopf(const SpectralField& psi, const ModelSpec& spec);
State rhs(const State& state, const ModelSpec& spec);

/// omega(k) = -kappa^2 + m(k), the growth rate of mode k about U = 0.
double linear_dispersion(const MultiplierSymbol& symbol, const Wavevector& k, double length);

// Linear / nonlinear split used by the integrators -----------------------------

/// Diagonal linear rate of the mode at flat index: -kappa^2 + m(k) for
/// primal and integrated forms, -kappa^2 for Cole-Hopf forms.
double linear_rate(const ModelSpec& spec, std::size_t flat);
/// Linear rate of the tracked mean scalar (-1 for integrated_adopted, else 0).
double mean_linear_rate(const ModelSpec& spec);
/// rhs minus its diagonal linear part.
State nonlinear_rate(const State& state, const ModelSpec& spec);

/// Cole-Hopf nonlinearity psi T[log psi] - psi <log psi> - psi G/2 (the
/// nonlocal term only with mean coupling) evaluated from grid samples of psi.
/// Throws PositivityLost when min psi < kPositivityFloor.
SpectralField colehopf_nonlinearity(const PhysicalField& psi, const ModelSpec& spec);

// State conversions --------------------------------------------------------------

/// U carried by any state: U, grad phi, or -2 grad psi / psi (projected onto
/// gradients in 2D).
VectorField velocity_of(const State& state);
/// Zero-mean potential phi and its mean; for Cole-Hopf states phi = -2 log psi.
std::pair<SpectralField, double> potential_of(const State& state);

/// Builds a state of the given form from a potential phi (c(0) = mean).
State state_from_potential(const SpectralField& phi, Form form);

/// U = -2 grad psi / psi evaluated pointwise, projected onto gradients in 2D.
VectorField velocity_from_psi(const SpectralField& psi);

}  // namespace dburgers
