#include <catch_amalgamated.hpp>

#include <numeric>

#include "hports/generators.hpp"
#include "hports/mesh.hpp"
#include "hports/mesh_io.hpp"

using namespace hports;

namespace {

// Independent component count via union-find on the 1-skeleton.
int components(const SimplicialComplex& c) {
  std::vector<int> parent(c.count(0));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const Simplex& e : c.simplices(1)) parent[find(e[0])] = find(e[1]);
  int roots = 0;
  for (int v = 0; v < c.count(0); ++v) roots += find(v) == v;
  return roots;
}

Eigen::MatrixXd flat_points(std::initializer_list<std::pair<double, double>> pts) {
  Eigen::MatrixXd m(2, static_cast<Eigen::Index>(pts.size()));
  int i = 0;
  for (auto [x, y] : pts) m.col(i++) << x, y;
  return m;
}

}  // namespace

TEST_CASE("single triangle counts and boundary", "[mesh]") {
  const auto c = build_complex({{0, 1, 2}}, flat_points({{0, 0}, {1, 0}, {0, 1}}));
  CHECK(c.counts() == std::vector<int>{3, 3, 1});
  CHECK(c.simplices(1) == std::vector<Simplex>{{0, 1}, {0, 2}, {1, 2}});
  const Eigen::MatrixXi b2 = Eigen::MatrixXi(c.boundary(2));
  CHECK(b2(0, 0) * b2(1, 0) == -1);
  CHECK(std::abs(b2(2, 0)) == 1);
  const auto bc = extract_boundary(c);
  CHECK(bc.complex.counts() == std::vector<int>{3, 3});
  CHECK(betti_numbers(bc.complex) == std::vector<int>{1, 1});
}

TEST_CASE("boundary of boundary vanishes on every generated mesh", "[mesh]") {
  for (Shape s : all_shapes) {
    const auto c = gen_mesh(s, minimum_resolution(s) + 1);
    for (int k = 2; k <= c.dimension(); ++k) {
      const IntSparse bb = c.boundary(k - 1) * c.boundary(k);
      CHECK(bb.norm() == 0.0);
    }
  }
}

TEST_CASE("betti numbers of generated meshes", "[mesh][topology]") {
  struct Expect {
    Shape shape;
    std::vector<int> betti;
  };
  const std::vector<Expect> table{{Shape::sphere, {1, 0, 1}},    {Shape::torus, {1, 2, 1}},
                                  {Shape::disk, {1, 0, 0}},      {Shape::annulus, {1, 1, 0}},
                                  {Shape::ball, {1, 0, 0, 0}},   {Shape::solid_torus, {1, 1, 0, 0}}};
  for (const auto& e : table) {
    const auto c = gen_mesh(e.shape, minimum_resolution(e.shape) + 1);
    INFO(to_string(e.shape));
    CHECK(validate_manifold(c).valid());
    const auto exact = betti_numbers(c, RankMethod::exact);
    CHECK(exact == e.betti);
    CHECK(betti_numbers(c, RankMethod::floating) == exact);
    CHECK(exact[0] == components(c));
    int alternating = 0;
    for (std::size_t k = 0; k < exact.size(); ++k) alternating += (k % 2 == 0 ? 1 : -1) * exact[k];
    CHECK(alternating == euler_characteristic(c));
  }
}

TEST_CASE("boundary complexes have the expected topology", "[mesh][topology]") {
  CHECK(extract_boundary(gen_mesh(Shape::sphere, 2)).empty());
  CHECK(betti_numbers(extract_boundary(gen_mesh(Shape::disk, 3)).complex) == std::vector<int>{1, 1});
  CHECK(betti_numbers(extract_boundary(gen_mesh(Shape::annulus, 2)).complex) == std::vector<int>{2, 2});
  CHECK(betti_numbers(extract_boundary(gen_mesh(Shape::ball, 2)).complex) == std::vector<int>{1, 0, 1});
  CHECK(betti_numbers(extract_boundary(gen_mesh(Shape::solid_torus, 1)).complex) == std::vector<int>{1, 2, 1});
}

TEST_CASE("induced boundary orientation makes the boundary a cycle", "[mesh]") {
  const auto c = gen_mesh(Shape::ball, 2);
  const auto bc = extract_boundary(c);
  const IntSparse b = bc.complex.boundary(2);
  const Eigen::VectorXi ones = Eigen::VectorXi::Ones(b.cols());
  CHECK((b * ones).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("construction rejects malformed input", "[mesh][errors]") {
  const auto pts = flat_points({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code_of([&] { build_complex({{0, 1, 2}, {2, 1, 0}}, pts); }) == ErrorCode::DuplicateSimplex);
  CHECK(code_of([&] { build_complex({{0, 1, 7}}, pts); }) == ErrorCode::DanglingVertexIndex);
  CHECK(code_of([&] { build_complex({{0, 1, 1}}, pts); }) == ErrorCode::DegenerateSimplex);
}

TEST_CASE("mobius strip is non-orientable", "[mesh][errors]") {
  const std::vector<Simplex> tris{{0, 1, 2}, {1, 2, 3}, {2, 3, 4}, {3, 4, 0}, {4, 0, 1}};
  Eigen::MatrixXd pts = Eigen::MatrixXd::Random(3, 5);
  CHECK_THROWS_AS(build_complex(tris, pts), Error);
  try {
    build_complex(tris, pts);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonOrientable);
  }
}

TEST_CASE("validation reports local defects", "[mesh][validation]") {
  SECTION("three triangles on one edge") {
    Eigen::MatrixXd pts(3, 5);
    pts << 0, 1, 0, 0, 1, 0, 0, 1, 0, 1, 0, 0, 0, 1, 1;
    const auto c = build_complex({{0, 1, 2}, {0, 1, 3}, {0, 1, 4}}, pts);
    const auto report = validate_manifold(c);
    REQUIRE_FALSE(report.valid());
    CHECK(report.findings.front().kind == Finding::Kind::excess_cofaces);
    CHECK(report.findings.front().simplex == Simplex{0, 1});
  }
  SECTION("bowtie vertex") {
    const auto pts = flat_points({{0, 0}, {1, 0}, {1, 1}, {-1, 0}, {-1, -1}});
    const auto c = build_complex({{0, 1, 2}, {0, 3, 4}}, pts);
    const auto report = validate_manifold(c);
    REQUIRE(report.findings.size() == 1);
    CHECK(report.findings[0].kind == Finding::Kind::non_manifold_vertex);
    CHECK(report.findings[0].simplex == Simplex{0});
  }
  SECTION("inconsistent input orientation kept as given") {
    const auto pts = flat_points({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    const auto c = build_complex({{0, 1, 2}, {1, 2, 3}}, pts, OrientationPolicy::as_given);
    const auto report = validate_manifold(c);
    REQUIRE_FALSE(report.valid());
    CHECK(report.findings[0].kind == Finding::Kind::inconsistent_orientation);
    CHECK(validate_manifold(build_complex({{0, 1, 2}, {1, 2, 3}}, pts)).valid());
  }
}

TEST_CASE("exact rank agrees with a hand computed example and guards overflow", "[mesh][rank]") {
  Eigen::MatrixXi dense(3, 3);
  dense << 2, 4, 6, 1, 3, 5, 3, 7, 11;
  const IntSparse m = dense.sparseView();
  CHECK(exact_rank(m) == 2);
  CHECK(float_rank(m) == 2);
  Eigen::MatrixXi big(4, 4);
  big << 1000003, 7, 11, 13, 17, 1000033, 19, 23, 29, 31, 1000037, 37, 41, 43, 47, 1000039;
  CHECK(exact_rank(big.sparseView()) == 4);
  CHECK_THROWS_AS(exact_rank(big.sparseView(), 8), Error);
}

TEST_CASE("generation is deterministic and rejects bad resolutions", "[mesh][generators]") {
  for (Shape s : all_shapes) {
    const auto a = gen_mesh(s, minimum_resolution(s));
    const auto b = gen_mesh(s, minimum_resolution(s));
    CHECK(write_mesh_json(a) == write_mesh_json(b));
    CHECK_THROWS_AS(gen_mesh(s, minimum_resolution(s) - 1), Error);
  }
  CHECK_FALSE(parse_shape("klein_bottle").has_value());
}

TEST_CASE("mesh json round trip preserves matrices", "[mesh][io]") {
  const auto c = gen_mesh(Shape::annulus, 2);
  const MeshData data = parse_mesh_json(write_mesh_json(c));
  const auto back = build_complex(data.simplices, data.vertices);
  CHECK(back.counts() == c.counts());
  for (int k = 1; k <= c.dimension(); ++k)
    CHECK(Eigen::MatrixXi(back.boundary(k)) == Eigen::MatrixXi(c.boundary(k)));
  CHECK_THROWS_AS(parse_mesh_json("{\"dimension\": 2, \"vertices\": [[0,0]]"), Error);
  CHECK_THROWS_AS(parse_mesh_json("{\"dimension\": 2, \"vertices\": [[0,0],[1,0],[0,1]], \"simplices\": [[0,1]]}"),
                  Error);
}
