#include <catch_amalgamated.hpp>

#include <random>

#include "hports/generators.hpp"
#include "hports/sim.hpp"

using namespace hports;

namespace {

StokesDiracSystem system_for(Shape s, int res, int p, int q) {
  return StokesDiracSystem(std::make_shared<const Hodge>(std::make_shared<const Metric>(gen_mesh(s, res))), p, q);
}

SimulationConfig config(const std::string& init, int steps, std::uint64_t seed = 0) {
  SimulationConfig c;
  c.steps = steps;
  c.init = parse_initial_condition(init, seed);
  return c;
}

}  // namespace

TEST_CASE("initial condition parsing", "[sim]") {
  CHECK(parse_initial_condition("zero", 0).kind == InitialCondition::Kind::zero);
  CHECK(parse_initial_condition("random", 9).seed == 9);
  CHECK(parse_initial_condition("random:4", 9).seed == 4);
  const auto h = parse_initial_condition("harmonic:1:0:2.5", 0);
  CHECK(h.kind == InitialCondition::Kind::harmonic);
  CHECK(h.degree == 1);
  CHECK(h.amplitude == 2.5);
  const auto b = parse_initial_condition("bump:3:0.5", 0);
  CHECK(b.vertex == 3);
  CHECK(b.width == 0.5);
  for (const char* bad : {"", "gauss", "harmonic:1:0", "bump:1:-2", "random:x", "harmonic:1:a:1"})
    CHECK_THROWS_AS(parse_initial_condition(bad, 0), Error);
}

TEST_CASE("midpoint step solves the midpoint equation", "[sim]") {
  std::mt19937_64 rng(1);
  for (auto [shape, p, q] : {std::tuple{Shape::torus, 1, 2}, {Shape::disk, 1, 2}, {Shape::annulus, 2, 1},
                             {Shape::ball, 2, 2}}) {
    const auto sys = system_for(shape, minimum_resolution(shape) + 1, p, q);
    const SDState s = initial_state(sys, parse_initial_condition("random", 3));
    const double dt = 0.05;
    const SDState next = step_implicit_midpoint(sys, s, dt);
    const SDState mid{0.5 * (s.alpha_p + next.alpha_p), 0.5 * (s.alpha_q_dual + next.alpha_q_dual)};
    const SDState rate = sys.rate(mid);
    const Eigen::VectorXd ra = (next.alpha_p.values - s.alpha_p.values) / dt - rate.alpha_p.values;
    const Eigen::VectorXd rq = (next.alpha_q_dual.values - s.alpha_q_dual.values) / dt - rate.alpha_q_dual.values;
    const double scale = rate.alpha_p.values.norm() + rate.alpha_q_dual.values.norm();
    CHECK(ra.norm() <= 1e-10 * scale);
    CHECK(rq.norm() <= 1e-10 * scale);

    // linearity
    const SDState scaled{3.0 * s.alpha_p, 3.0 * s.alpha_q_dual};
    const SDState next3 = step_implicit_midpoint(sys, scaled, dt);
    CHECK((next3.alpha_p.values - 3.0 * next.alpha_p.values).norm() <= 1e-12 * next3.alpha_p.values.norm());
  }
}

TEST_CASE("zero state stays zero", "[sim]") {
  const auto sys = system_for(Shape::disk, 2, 1, 2);
  const SDState z = step_implicit_midpoint(sys, sys.zero_state(), 0.01);
  CHECK(z.alpha_p.values.isZero(0.0));
  CHECK(z.alpha_q_dual.values.isZero(0.0));
  const Trace tr = run(sys, config("zero", 20));
  for (double h : tr.hamiltonian) CHECK(h == 0.0);
  CHECK(tr.size() == 21);
}

TEST_CASE("single step conserves energy on a closed mesh", "[sim]") {
  const auto sys = system_for(Shape::torus, 5, 1, 2);
  const SDState s = initial_state(sys, parse_initial_condition("random", 11));
  const SDState next = step_implicit_midpoint(sys, s, 0.01);
  CHECK(std::abs(sys.hamiltonian(next) - sys.hamiltonian(s)) <= 1e-11 * sys.hamiltonian(s));
}

TEST_CASE("long runs conserve energy and cohomology classes", "[sim]") {
  SECTION("torus, harmonic seed") {
    const auto sys = system_for(Shape::torus, 5, 1, 2);
    SDState s = initial_state(sys, parse_initial_condition("harmonic:1:0:1.0", 0));
    s.alpha_q_dual += initial_state(sys, parse_initial_condition("bump:0:0.8", 0)).alpha_q_dual;
    const Trace tr = run_from(sys, s, config("zero", 1000));
    CHECK(tr.max_relative_energy_drift() <= 1e-10);
    CHECK(tr.max_harmonic_drift() <= 1e-8);
    CHECK(std::abs(tr.harm_p.front()(0)) > 0.5);
  }
  SECTION("sphere, random") {
    const auto sys = system_for(Shape::sphere, 2, 1, 2);
    const Trace tr = run(sys, config("random", 1000, 7));
    CHECK(tr.max_relative_energy_drift() <= 1e-10);
    CHECK(tr.max_harmonic_drift() <= 1e-8);
  }
}

TEST_CASE("bounded meshes follow the discrete power balance", "[sim]") {
  const auto sys = system_for(Shape::annulus, 2, 1, 2);
  const Trace tr = run(sys, config("random", 100, 5));
  double worst = 0.0;
  for (double r : tr.dHdt_residual) worst = std::max(worst, r);
  CHECK(worst <= 1e-8);
  double total = 0.0;
  for (double p : tr.boundary_power) total += std::abs(p);
  CHECK(total > 0.0);
}

TEST_CASE("time reversal returns the initial state", "[sim]") {
  for (auto [shape, res] : {std::pair{Shape::torus, 5}, {Shape::disk, 3}}) {
    const auto sys = system_for(shape, res, 1, 2);
    const SDState s0 = initial_state(sys, parse_initial_condition("random", 2));
    const MidpointStepper fwd(sys, 0.01, s0), back(sys, -0.01, s0);
    SDState s = s0;
    for (int i = 0; i < 300; ++i) s = fwd.step(s);
    for (int i = 0; i < 300; ++i) s = back.step(s);
    const double scale = s0.alpha_p.values.norm() + s0.alpha_q_dual.values.norm();
    CHECK((s.alpha_p.values - s0.alpha_p.values).norm() + (s.alpha_q_dual.values - s0.alpha_q_dual.values).norm() <=
          1e-8 * scale);
  }
}

TEST_CASE("spectral radius estimate", "[sim]") {
  const auto sys = system_for(Shape::torus, 4, 1, 2);
  const SDState s = sys.zero_state();
  const MidpointStepper stepper(sys, 0.01, s);
  // dense generator assembled column by column from the flow map
  const Eigen::Index na = s.alpha_p.values.size(), nq = s.alpha_q_dual.values.size();
  Eigen::MatrixXd gen(na + nq, na + nq);
  for (Eigen::Index j = 0; j < na + nq; ++j) {
    SDState e = s;
    if (j < na)
      e.alpha_p.values(j) = 1.0;
    else
      e.alpha_q_dual.values(j - na) = 1.0;
    const SDState r = sys.rate(e);
    gen.col(j) << r.alpha_p.values, r.alpha_q_dual.values;
  }
  const double oracle = Eigen::EigenSolver<Eigen::MatrixXd>(gen).eigenvalues().cwiseAbs().maxCoeff();
  CHECK_THAT(stepper.spectral_radius(), Catch::Matchers::WithinRel(oracle, 1e-3));
}

TEST_CASE("trace csv layout and determinism", "[sim]") {
  const auto sys = system_for(Shape::annulus, 1, 1, 2);
  SimulationConfig c = config("random", 5, 3);
  c.stride = 2;
  const Trace a = run(sys, c);
  const Trace b = run(sys, c);
  CHECK(a.to_csv() == b.to_csv());
  const std::string csv = a.to_csv();
  CHECK(csv.substr(0, csv.find('\n')) == "t,H,dHdt_residual,boundary_power,harm_p_0,harm_p_1,harm_q_0");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  CHECK(a.snapshots.size() == 3);
  c.dt = -1.0;
  CHECK_THROWS_AS(run(sys, c), Error);
}

TEST_CASE("harmonic seeding validates its arguments", "[sim]") {
  const auto sys = system_for(Shape::sphere, 1, 1, 2);
  CHECK_THROWS_AS(initial_state(sys, parse_initial_condition("harmonic:1:0:1", 0)), Error);
  CHECK_THROWS_AS(initial_state(sys, parse_initial_condition("harmonic:0:0:1", 0)), Error);
  const SDState s = initial_state(sys, parse_initial_condition("harmonic:2:0:2", 0));
  CHECK_THAT(sys.hamiltonian(s), Catch::Matchers::WithinRel(2.0, 1e-12));
}
