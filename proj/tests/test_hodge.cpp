#include <catch_amalgamated.hpp>

#include <future>
#include <random>

#include "hports/generators.hpp"
#include "hports/hodge.hpp"

using namespace hports;

namespace {

std::shared_ptr<const Metric> metric_for(Shape s, int res) { return std::make_shared<const Metric>(gen_mesh(s, res)); }

Cochain random_cochain(const Metric& m, int k, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(m.complex().count(k));
  for (auto& x : v) x = g(rng);
  return Cochain::from_values(m.complex(), k, v);
}

// Least-squares projection onto span(a) in the M inner product, by SVD of the
// Cholesky-weighted system.
Eigen::VectorXd lsq_projection(const Eigen::MatrixXd& a, const Eigen::MatrixXd& m, const Eigen::VectorXd& v) {
  if (a.cols() == 0) return Eigen::VectorXd::Zero(v.size());
  const Eigen::MatrixXd u = Eigen::LLT<Eigen::MatrixXd>(m).matrixU();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(u * a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  return a * svd.solve(u * v);
}

}  // namespace

TEST_CASE("harmonic dimensions match betti numbers", "[hodge][topology]") {
  for (Shape s : all_shapes) {
    const auto m = metric_for(s, minimum_resolution(s) + 1);
    const Hodge h(m);
    const auto betti = betti_numbers(m->complex());
    const int n = m->dimension();
    INFO(to_string(s));
    for (int k = 0; k <= n; ++k) {
      CHECK(h.harmonic_basis(k, BoundaryCondition::neumann).dim() == betti[k]);
      CHECK(h.harmonic_basis(k, BoundaryCondition::dirichlet).dim() == betti[n - k]);
      CHECK(h.harmonic_basis(k, BoundaryCondition::dirichlet).dim() ==
            h.harmonic_basis(n - k, BoundaryCondition::neumann).dim());
    }
  }
}

TEST_CASE("harmonic dimensions of the sphere, torus and annulus", "[hodge][topology]") {
  const Hodge torus(metric_for(Shape::torus, 5));
  CHECK(torus.harmonic_basis(1, BoundaryCondition::neumann).dim() == 2);
  CHECK(torus.harmonic_basis(2, BoundaryCondition::neumann).dim() == 1);
  const Hodge sphere(metric_for(Shape::sphere, 2));
  CHECK(sphere.harmonic_basis(1, BoundaryCondition::neumann).dim() == 0);
  CHECK(sphere.harmonic_basis(2, BoundaryCondition::neumann).dim() == 1);
  const Hodge annulus(metric_for(Shape::annulus, 2));
  CHECK(annulus.harmonic_basis(1, BoundaryCondition::dirichlet).dim() == 1);
}

TEST_CASE("harmonic bases satisfy their defining equations", "[hodge]") {
  for (Shape s : {Shape::annulus, Shape::torus, Shape::solid_torus}) {
    const auto m = metric_for(s, minimum_resolution(s) + 1);
    const Hodge h(m);
    for (int k = 0; k <= m->dimension(); ++k)
      for (auto bc : {BoundaryCondition::neumann, BoundaryCondition::dirichlet}) {
        const auto& basis = h.harmonic_basis(k, bc);
        const Eigen::MatrixXd gram = basis.matrix.transpose() * m->mass(k) * basis.matrix;
        CHECK((gram - Eigen::MatrixXd::Identity(basis.dim(), basis.dim())).lpNorm<Eigen::Infinity>() <= 1e-10);
        for (const Cochain& lam : basis.basis) {
          if (k < m->dimension()) CHECK(norm(exterior_derivative(lam, *m), *m) <= 1e-10);
          if (k == 0) continue;
          if (bc == BoundaryCondition::neumann) {
            CHECK(norm(codifferential(lam, *m), *m) <= 1e-10);
          } else {
            CHECK(norm(constrained_codifferential(lam, *m), *m) <= 1e-10);
            for (int i : m->boundary_indices(k)) CHECK(lam.values(i) == 0.0);
          }
        }
      }
  }
}

TEST_CASE("closed meshes: Dirichlet and Neumann fields coincide", "[hodge]") {
  const auto m = metric_for(Shape::torus, 4);
  const Hodge h(m);
  const auto& d = h.harmonic_basis(1, BoundaryCondition::dirichlet);
  const auto& n = h.harmonic_basis(1, BoundaryCondition::neumann);
  const Eigen::MatrixXd cross = n.matrix.transpose() * m->mass(1) * d.matrix;
  const Eigen::VectorXd cosines = Eigen::JacobiSVD<Eigen::MatrixXd>(cross).singularValues();
  for (double c : cosines) CHECK(std::acos(std::min(c, 1.0)) <= 1e-6);
}

TEST_CASE("HMF decomposition of random cochains", "[hodge][hmf]") {
  std::mt19937_64 rng(21);
  for (Shape s : {Shape::annulus, Shape::disk, Shape::solid_torus}) {
    const auto m = metric_for(s, minimum_resolution(s) + 1);
    const Hodge h(m);
    for (int k = 0; k <= m->dimension(); ++k)
      for (int trial = 0; trial < 5; ++trial) {
        const Cochain c = random_cochain(*m, k, rng);
        const auto parts = h.hodge_morrey_friedrichs(c);
        CHECK(parts.reconstruction_residual <= 1e-8);
        CHECK(parts.max_cross_term <= 1e-8);
        if (k == 0) CHECK(parts.norms[0] == 0.0);
        if (k == m->dimension()) CHECK(parts.norms[1] == 0.0);
        // re-decomposing a component leaves it in its own slot
        const std::array<const Cochain*, 4> slots{&parts.d_alpha, &parts.delta_beta, &parts.delta_gamma,
                                                  &parts.lambda_t};
        for (int i = 0; i < 4; ++i) {
          const auto again = h.hodge_morrey_friedrichs(*slots[i]);
          const std::array<const Cochain*, 4> out{&again.d_alpha, &again.delta_beta, &again.delta_gamma,
                                                  &again.lambda_t};
          for (int j = 0; j < 4; ++j) {
            const double expected = i == j ? norm(*slots[i], *m) : 0.0;
            CHECK(std::abs(norm(*out[j], *m) - expected) <= 1e-8 * parts.input_norm);
          }
        }
      }
  }
}

TEST_CASE("HMF exact and coexact parts agree with a least-squares oracle", "[hodge][hmf]") {
  std::mt19937_64 rng(4);
  const auto m = metric_for(Shape::annulus, 2);
  const Hodge h(m);
  const Cochain c = random_cochain(*m, 1, rng);
  const auto parts = h.hodge_morrey_friedrichs(c);
  const Eigen::MatrixXd a = m->d_matrix(0)(Eigen::all, m->interior_indices(0));
  CHECK((parts.d_alpha.values - lsq_projection(a, m->mass(1), c.values)).norm() <= 1e-8 * c.values.norm());
  Eigen::MatrixXd b = m->mass(1).llt().solve(m->d_matrix(1).transpose());
  CHECK((parts.delta_beta.values - lsq_projection(b, m->mass(1), c.values)).norm() <= 1e-8 * c.values.norm());
  CHECK(parts.lambda_t.values.norm() > 0.0);
}

TEST_CASE("HMF trivial examples", "[hodge][hmf]") {
  std::mt19937_64 rng(8);
  SECTION("exact input on the disk") {
    const auto m = metric_for(Shape::disk, 3);
    const Hodge h(m);
    Cochain alpha = random_cochain(*m, 0, rng);
    for (int i : m->boundary_indices(0)) alpha.values(i) = 0.0;
    const Cochain c = exterior_derivative(alpha, *m);
    const auto parts = h.hodge_morrey_friedrichs(c);
    CHECK(norm(parts.d_alpha - c, *m) <= 1e-8 * norm(c, *m));
    CHECK(parts.norms[1] + parts.norms[2] + parts.norms[3] <= 1e-8 * norm(c, *m));
  }
  SECTION("harmonic input on the torus") {
    const auto m = metric_for(Shape::torus, 4);
    const Hodge h(m);
    const Cochain c = h.harmonic_basis(1, BoundaryCondition::neumann).basis.at(0);
    const auto parts = h.hodge_morrey_friedrichs(c);
    CHECK(norm(parts.lambda_t + parts.delta_gamma - c, *m) <= 1e-8);
    CHECK(parts.norms[0] + parts.norms[1] <= 1e-8);
    CHECK(parts.norms[2] <= 1e-8);
  }
}

TEST_CASE("Friedrichs splits", "[hodge][friedrichs]") {
  const auto m = metric_for(Shape::annulus, 2);
  const Hodge h(m);
  const Cochain lt = h.harmonic_basis(1, BoundaryCondition::dirichlet).basis.at(0);
  const Cochain ln = h.harmonic_basis(1, BoundaryCondition::neumann).basis.at(0);

  const auto a = h.friedrichs_split(lt);
  CHECK(norm(a.lambda_t - lt, *m) <= 1e-8);
  CHECK(a.norms[1] <= 1e-8);
  const auto b = h.friedrichs_split(ln);
  CHECK(norm(b.lambda_n - ln, *m) <= 1e-8);
  CHECK(b.norms[3] <= 1e-8);

  const Cochain mix = 0.7 * lt + (-1.3) * ln;
  const auto c = h.friedrichs_split(mix);
  CHECK(norm(c.lambda_t + c.delta_gamma - mix, *m) <= 1e-8);
  CHECK(norm(c.lambda_n + c.d_epsilon - mix, *m) <= 1e-8);
  CHECK(c.norms[1] > 1e-3);

  std::mt19937_64 rng(2);
  try {
    h.friedrichs_split(random_cochain(*m, 1, rng));
    FAIL("expected NotInHarmonicComplement");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotInHarmonicComplement);
  }
}

TEST_CASE("cohomology tables", "[hodge][topology]") {
  const Hodge torus(metric_for(Shape::torus, 4));
  const auto rows = torus.cohomology_report();
  CHECK(rows[1].dim_d == 2);
  CHECK(rows[1].dim_delta == 2);
  CHECK(rows[1].betti_k == 2);
  CHECK(rows[1].betti_dual == 2);
  for (const auto& r : rows) CHECK(r.consistent());

  const Hodge disk(metric_for(Shape::disk, 2));
  const auto d = disk.cohomology_report();
  CHECK(d[1].dim_d + d[1].dim_delta == 0);
  CHECK(d[2].dim_d == 0);
  CHECK(d[2].dim_delta == 1);

  const Hodge sphere(metric_for(Shape::sphere, 1));
  CHECK(sphere.cohomology_report()[2].dim_d == 1);
}

TEST_CASE("Stokes-Dirac cohomology dimensions", "[hodge][topology]") {
  const Hodge torus(metric_for(Shape::torus, 4));
  const auto t = torus.stokes_dirac_cohomology(1, 2);
  CHECK(std::array{t.neumann_q, t.dirichlet_p, t.neumann_p, t.dirichlet_q} == std::array{1, 2, 2, 1});
  const Hodge disk(metric_for(Shape::disk, 2));
  const auto d = disk.stokes_dirac_cohomology(1, 2);
  CHECK(d.dirichlet_p + d.neumann_p == 0);
  const Hodge sphere(metric_for(Shape::sphere, 1));
  const auto s = sphere.stokes_dirac_cohomology(1, 2);
  CHECK(s.dirichlet_p + s.neumann_p == 0);
  CHECK_THROWS_AS(torus.stokes_dirac_cohomology(1, 1), Error);
  CHECK_THROWS_AS(torus.stokes_dirac_cohomology(0, 3), Error);
}

TEST_CASE("knots and gradients", "[hodge][vector]") {
  SECTION("ball") {
    const auto m = metric_for(Shape::ball, 2);
    const Hodge h(m);
    const Eigen::Vector3d w(0.5, -1.0, 2.0);
    const Eigen::MatrixXd at_vertices = w.replicate(1, m->complex().count(0));
    const Eigen::MatrixXd at_tets = w.replicate(1, m->complex().count(3));
    for (const auto& [field, where] : {std::pair{at_vertices, FieldLocation::vertex}, {at_tets, FieldLocation::tet}}) {
      const auto r = h.decompose_vector_field_3d(field, where);
      CHECK(r.dim_harmonic_knots == 0);
      CHECK(r.dim_harmonic_gradients == 0);
      CHECK(norm(r.knot_part, *m) <= 1e-8 * norm(r.flattened, *m));
    }
  }
  SECTION("solid torus") {
    const auto m = metric_for(Shape::solid_torus, 1);
    const Hodge h(m);
    Eigen::MatrixXd swirl(3, m->complex().count(0));
    for (int v = 0; v < swirl.cols(); ++v) {
      const Eigen::Vector3d x = m->complex().vertex(v);
      swirl.col(v) = Eigen::Vector3d(-x.y(), x.x(), 0.0) / (x.x() * x.x() + x.y() * x.y());
    }
    const auto r = h.decompose_vector_field_3d(swirl, FieldLocation::vertex);
    CHECK(r.dim_harmonic_knots == 1);
    CHECK(norm(r.knot_part, *m) > 0.1 * norm(r.flattened, *m));
    CHECK(std::abs(inner_product(r.knot_part, r.gradient_part, *m)) <= 1e-10 * norm(r.flattened, *m) * norm(r.flattened, *m));
  }
  SECTION("surface rejected") {
    const Hodge h(metric_for(Shape::disk, 1));
    CHECK_THROWS_AS(h.decompose_vector_field_3d(Eigen::MatrixXd::Zero(2, 4), FieldLocation::vertex), Error);
  }
}

TEST_CASE("basis cache is safe to share between threads", "[hodge]") {
  const Hodge h(metric_for(Shape::annulus, 2));
  std::vector<std::future<int>> jobs;
  for (int i = 0; i < 4; ++i)
    jobs.push_back(std::async(std::launch::async, [&h, i] {
      return h.harmonic_basis(i % 3, i % 2 ? BoundaryCondition::neumann : BoundaryCondition::dirichlet).dim();
    }));
  std::vector<int> dims;
  for (auto& j : jobs) dims.push_back(j.get());
  CHECK(dims == std::vector<int>{0, 1, 1, 1});
}
