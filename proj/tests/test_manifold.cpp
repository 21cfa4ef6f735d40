#include <cmath>

#include "doctest.h"
#include "dburgers/errors.hpp"
#include "dburgers/initial.hpp"
#include "dburgers/manifold.hpp"
#include "helpers.hpp"

using namespace test;

namespace {

struct Fixture {
  GridSpec grid = grid1(64);
  Preparation prep;
  ManifoldGraph graph;
};

/// Prepared BSE, alpha = 2.1 on L = 2 pi, n from the probed C_est.
const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture fx;
    const auto spec = ModelSpec::make(Form::integrated_adopted, MultiplierSymbol::bse(2.1), fx.grid);
    std::vector<SpectralField> pots;
    for (std::uint64_t i = 0; i < 3; ++i) {
      SolverConfig cfg;
      cfg.dt = 0.01;
      cfg.t_end = 60.0;
      cfg.snapshot_every = 1000;
      const State s0 =
          state_from_potential(random_smooth_potential(fx.grid, split_seed(8, i), 1.0, 2.0), Form::integrated_adopted);
      for (const auto& [t, st] : integrate(s0, spec, cfg).snapshots) {
        if (t < 30.0) continue;
        auto [phi, m] = potential_of(st);
        phi.set_zero_mean(false);
        phi[0] = m;
        pots.push_back(phi);
      }
    }
    fx.prep = prepare(spec.with_form(Form::colehopf), pots, 2000, 1);
    const auto n = select_n(fx.grid, fx.prep.probe.C_est);
    REQUIRE(n.has_value());
    fx.graph = ManifoldGraph{ProjectionPair::make(fx.grid, enumerate(1, fx.grid.length, 64 * 64), *n), fx.prep.prep};
    return fx;
  }();
  return f;
}

SpectralField random_psi(const GridSpec& g, std::uint64_t seed, double amplitude = 1.0) {
  return psi_from_phi(random_smooth_potential(g, seed, amplitude, 2.0), 0.0);
}

ManifoldGraph linear_graph(const ManifoldGraph& g) {
  ManifoldGraph lin = g;
  lin.prep = PreparedNonlinearity::zero_nonlinearity(g.prep.model);
  return lin;
}

}  // namespace

TEST_CASE("projection algebra") {
  for (int d = 1; d <= 2; ++d) {
    const GridSpec g{d, d == 1 ? 32 : 16, 2 * kPi, DealiasRule::two_thirds};
    const SpectrumTable t = enumerate(d, g.length, 200);
    const ProjectionPair pp = ProjectionPair::make(g, t, 3);
    std::int64_t dim = 0;
    for (std::size_t k = 0; k <= 3; ++k) dim += t[k].multiplicity;
    CHECK(pp.dim_p == std::size_t(dim));

    const SpectralField u = random_field(g, 9, d == 1 ? 10 : 5, false);
    const SpectralField P = project(u, Part::P, pp), Q = project(u, Part::Q, pp);
    CHECK(max_coeff_diff(P + Q, u) == 0.0);
    CHECK(max_coeff_diff(project(P, Part::P, pp), P) == 0.0);
    CHECK(max_coeff_diff(project(Q, Part::Q, pp), Q) == 0.0);
    CHECK(max_coeff(project(P, Part::Q, pp)) == 0.0);
    CHECK(max_coeff(project(Q, Part::P, pp)) == 0.0);
    CHECK(P[0] == u[0]);  // constant mode lives in P
    const double n2 = std::pow(norm(u, Norm::l2()), 2);
    CHECK(std::abs(n2 - std::pow(norm(P, Norm::l2()), 2) - std::pow(norm(Q, Norm::l2()), 2)) <= 1e-12 * n2);

    SpectralField high(g, true);
    high.set_coeff({5, 0}, 1.0);
    CHECK(max_coeff(project(high, Part::P, pp)) == 0.0);
  }
  const GridSpec g = grid1(16);
  CHECK_THROWS_AS(ProjectionPair::make(g, enumerate(1, g.length, 400), 10), InvalidArgument);
  CHECK_THROWS_AS(ProjectionPair::make(g, enumerate(1, 2.0, 400), 1), InvalidArgument);
}

TEST_CASE("n selection") {
  // gap >= 6 C_est: C = 1 -> first gap >= 6 is 7 at Lambda = 9.
  CHECK(*select_n(grid1(64), 1.0) == 3);
  CHECK(*select_n(grid1(64), 0.0) == 0);
  CHECK_FALSE(select_n(grid1(16), 10.0).has_value());
  const auto& fx = fixture();
  CHECK(fx.graph.proj.lambda_n1 - fx.graph.proj.lambda_n >= 6.0 * fx.prep.probe.C_est);
}

TEST_CASE("graph: zero nonlinearity, range, fixed point, cross-method") {
  const auto& fx = fixture();
  const ManifoldGraph& graph = fx.graph;

  const ManifoldGraph lin = linear_graph(graph);
  CHECK(max_coeff(evaluate_graph(random_psi(fx.grid, 1), lin)) == 0.0);

  const GraphEvaluation at0 = evaluate_graph_detailed(SpectralField(fx.grid, false), graph);
  CHECK(at0.residuals.back() <= graph.tol);
  CHECK(norm(at0.q, Norm::hs(1.0)) <= fx.prep.probe.sup_N / graph.proj.lambda_n1 + 1e-12);

  ManifoldGraph lp = graph;
  lp.method = GraphMethod::lyapunov_perron;
  CHECK(lp.backward_horizon() >= 5.0 / graph.proj.lambda_n1);
  for (std::uint64_t s = 0; s < 4; ++s) {
    const SpectralField p = project(fx.prep.sampler.centers[s * 3], Part::P, graph.proj);
    const GraphEvaluation a = evaluate_graph_detailed(p, graph);
    CHECK(a.residuals.back() <= graph.tol);
    CHECK(max_coeff(project(a.q, Part::P, graph.proj)) == 0.0);
    CHECK(max_coeff_diff(project(a.q, Part::Q, graph.proj), a.q) == 0.0);
    const GraphEvaluation b = evaluate_graph_detailed(p, lp);
    CHECK(b.residuals.back() <= lp.tol);
    CHECK(norm(a.q - b.q, Norm::hs(1.0)) <= 1e-4);
  }

  // Far from the ball the nonlinearity is cut off and Phi = 0.
  SpectralField far(fx.grid, false);
  far[0] = 1.0;
  far.set_coeff({2, 0}, 50.0 * fx.prep.prep.inner_radius);
  CHECK(max_coeff(evaluate_graph(far, graph)) == 0.0);

  ManifoldGraph shallow = graph;
  shallow.depth = 1;
  shallow.tol = 1e-30;
  CHECK_THROWS_AS(evaluate_graph(fx.prep.sampler.centers[0], shallow), NoConvergence);
  CHECK(graph_method_from_string(to_string(GraphMethod::lyapunov_perron)) == GraphMethod::lyapunov_perron);
  CHECK(graph_method_from_string("aim") == GraphMethod::aim_fixed_point);
  CHECK_THROWS_AS(graph_method_from_string("newton"), InvalidArgument);
}

TEST_CASE("graph distance") {
  const auto& fx = fixture();
  const ManifoldGraph& graph = fx.graph;
  SpectralField p = project(random_psi(fx.grid, 3), Part::P, graph.proj);
  p.set_zero_mean(false);
  const SpectralField on = p + evaluate_graph(p, graph);
  CHECK(graph_distance(on, graph) <= 1e-12);

  SpectralField w(fx.grid, true);
  w.set_coeff({graph.proj.grid.dealias_cutoff(), 0}, 1.0);
  w *= 1.0 / norm(w, Norm::hs(1.0));
  const double eps = 1e-4;
  CHECK(graph_distance(on + eps * w, graph) == doctest::Approx(eps).epsilon(1e-6));
}

TEST_CASE("inertial form") {
  const auto& fx = fixture();
  const ManifoldGraph& graph = fx.graph;

  // Linear: dp = -A p, modes decay like e^{-lambda t}.
  const ManifoldGraph lin = linear_graph(graph);
  SpectralField p(fx.grid, false);
  p[0] = 0.7;
  p.set_coeff({2, 0}, 0.3);
  const SpectralField r = inertial_form_rhs(p, lin);
  CHECK(std::abs(r[0]) <= 1e-15);
  CHECK(r.coeff({2, 0}).real() == doctest::Approx(-4.0 * 0.3));
  const auto traj = integrate_inertial_form(p, lin, 0.01, 50);
  CHECK(traj.size() == 51);
  CHECK(traj.back().coeff({2, 0}).real() == doctest::Approx(0.3 * std::exp(-2.0)).epsilon(1e-12));
  CHECK(traj.back()[0].real() == doctest::Approx(0.7));

  // Nonlinear: inertial form vs the full prepared equation from a lifted start.
  SpectralField p0 = project(random_psi(fx.grid, 14), Part::P, graph.proj);
  p0.set_zero_mean(false);
  const SpectralField u0 = p0 + evaluate_graph(p0, graph);
  const double dt = 1e-3;
  const std::size_t steps = 1000;
  const auto reduced = integrate_inertial_form(p0, graph, dt, steps);
  const PreparedRun full = run_prepared(u0, graph.prep, dt, steps, 0);
  const SpectralField pf = project(full.states.back(), Part::P, graph.proj);
  const double rel = norm(pf - reduced.back(), Norm::h1_full()) / norm(pf, Norm::h1_full());
  MESSAGE("inertial form vs full prepared equation, relative H1 gap " << rel);
  CHECK(rel <= 0.02);
}

TEST_CASE("equilibrium of the inertial form lifts to a full equilibrium") {
  const auto& fx = fixture();
  const ManifoldGraph& graph = fx.graph;
  // CNAB2 fixed points are exact equilibria of the semi-discrete equation.
  Stepper st = prepared_stepper(graph.prep, 0.01, Scheme::imex_cnab2);
  State s;
  s.form = Form::colehopf;
  s.fields = {fx.prep.sampler.centers.back()};
  for (int k = 0; k < 20000; ++k) s = st.step(s);
  SpectralField pstar = project(s.fields[0], Part::P, graph.proj);
  pstar.set_zero_mean(false);
  CHECK(norm(inertial_form_rhs(pstar, graph), Norm::h1_full()) <= 10 * graph.tol);
  const SpectralField lifted = pstar + evaluate_graph(pstar, graph);
  const SpectralField residual = prepared_N_P(lifted, graph.prep) + laplacian(lifted);
  CHECK(norm(residual, Norm::h1_full()) <= 10 * graph.tol);
}

TEST_CASE("attraction: linear rate and invariance") {
  const auto& fx = fixture();
  const ManifoldGraph& graph = fx.graph;

  // Start on the graph: the distance stays at the tolerance floor.
  SpectralField p = project(fx.prep.sampler.centers[4], Part::P, graph.proj);
  p.set_zero_mean(false);
  const PreparedRun run = run_prepared(p + evaluate_graph(p, graph), graph.prep, 1e-3, 500, 50);
  for (const auto& u : run.states) CHECK(graph_distance(u, graph) <= 10 * graph.tol);

  // Lowest Q mode alone, N_P = 0: decay at exactly lambda_{n+1}.
  const ManifoldGraph lin = linear_graph(graph);
  SpectralField u0(fx.grid, false);
  u0[0] = 1.0;
  const int k1 = int(std::lround(std::sqrt(double(graph.proj.k2_n)))) + 1;
  u0.set_coeff({k1, 0}, 0.01);
  const PreparedRun lr = run_prepared(u0, lin.prep, 1e-3, 100, 10);
  std::vector<double> d;
  for (const auto& u : lr.states) d.push_back(graph_distance(u, lin));
  const AttractionFit f = attraction_fit(lr.t, d, 1e-14);
  CHECK(f.pass);
  CHECK(f.mu == doctest::Approx(graph.proj.lambda_n1).epsilon(1e-9));
  CHECK(f.r_squared == doctest::Approx(1.0));

  CHECK_THROWS_AS(attraction_fit({0.0, 1.0}, {1.0, 0.5}, 0.0), InvalidArgument);
  const AttractionFit grow = attraction_fit({0.0, 1.0, 2.0}, {1.0, 2.0, 4.0}, 0.0);
  CHECK_FALSE(grow.pass);
}

TEST_CASE("strong squeezing") {
  const auto& fx = fixture();
  const ManifoldGraph& graph = fx.graph;
  const SpectralField u0 = random_psi(fx.grid, 20);
  const SqueezingReport same = squeezing_test(u0, u0, graph, 0.1, 1e-3);
  CHECK(same.pass);

  // Difference in range P: stays in the cone.
  const SpectralField wp = project(random_psi(fx.grid, 21), Part::P, graph.proj);
  const SqueezingReport in = squeezing_test(u0, u0 + (0.05 / norm(wp, Norm::h1_full())) * wp, graph, 0.5, 1e-3);
  CHECK(in.started_in_cone);
  CHECK(in.cone_invariant);
  CHECK(in.pass);

  // Difference in range Q with N_P = 0: the Q part decays at lambda_{n+1}.
  const ManifoldGraph lin = linear_graph(graph);
  SpectralField wq(fx.grid, true);
  const int k1 = int(std::lround(std::sqrt(double(graph.proj.k2_n)))) + 1;
  wq.set_coeff({k1, 0}, 0.01);
  const SqueezingReport out = squeezing_test(u0, u0 + wq, lin, 0.05, 1e-3);
  CHECK_FALSE(out.started_in_cone);
  REQUIRE(out.q_rate.has_value());
  CHECK(*out.q_rate == doctest::Approx(graph.proj.lambda_n1).epsilon(1e-9));
  CHECK(out.pass);
}

TEST_CASE("lift to U") {
  const auto& fx = fixture();
  const ManifoldGraph& graph = fx.graph;
  SpectralField one(fx.grid, false);
  one[0] = 1.0;
  std::vector<SpectralField> samples{one};
  for (std::size_t i = 0; i < 5; ++i) samples.push_back(fx.prep.sampler.centers[i * 2]);
  SpectralField negative(fx.grid, false);
  negative[0] = -1.0;
  samples.push_back(negative);

  const LiftResult lifted = lift_to_U(graph, samples);
  CHECK(lifted.skipped == std::vector<std::size_t>{samples.size() - 1});
  REQUIRE(lifted.velocities.size() == samples.size() - 1);
  CHECK(norm(lifted.velocities[0], Norm::l2()) <= 1e-15);
  for (std::size_t i = 1; i < lifted.velocities.size(); ++i) {
    SpectralField p = project(samples[i], Part::P, graph.proj);
    p.set_zero_mean(false);
    const SpectralField psi = p + evaluate_graph(p, graph);
    const VectorField expected = gradient(phi_from_psi(psi).phi);
    CHECK(norm(lifted.velocities[i] - expected, Norm::l2()) <= 1e-10 * std::max(1.0, norm(expected, Norm::l2())));
    CHECK(lifted.velocities[i][0][0] == cplx(0.0));
  }
}

TEST_CASE("graph Lipschitz constant and completeness probe") {
  const auto& fx = fixture();
  const ManifoldGraph& graph = fx.graph;
  const GraphLipschitz l = graph_lipschitz_probe(graph, fx.prep.sampler, 200, 5);
  MESSAGE("graph Lipschitz estimate " << l.l_est);
  CHECK(l.pairs > 0);
  CHECK(std::isfinite(l.l_est));
  CHECK(l.l_est <= 1.0);

  const CompletenessProbe cp = completeness_probe(random_psi(fx.grid, 31), graph, 0.01, 0.05, 1e-3, 5);
  CHECK(cp.t.front() == doctest::Approx(0.01));
  CHECK(cp.difference.front() > 0.0);
  CHECK(cp.difference.back() < cp.difference.front());
  CHECK(cp.fit.mu >= 0.5 * graph.proj.lambda_n1);
}
