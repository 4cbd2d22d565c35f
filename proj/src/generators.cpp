#include "hports/generators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>

namespace hports {

std::string_view to_string(Shape shape) {
  switch (shape) {
    case Shape::sphere: return "sphere";
    case Shape::torus: return "torus";
    case Shape::disk: return "disk";
    case Shape::annulus: return "annulus";
    case Shape::ball: return "ball";
    case Shape::solid_torus: return "solid_torus";
  }
  return "unknown";
}

std::optional<Shape> parse_shape(std::string_view name) {
  for (Shape s : all_shapes)
    if (to_string(s) == name) return s;
  return std::nullopt;
}

int minimum_resolution(Shape shape) { return shape == Shape::torus ? 3 : 1; }

namespace {

using Points = std::vector<std::array<double, 3>>;

Eigen::MatrixXd to_matrix(const Points& pts, int rows) {
  Eigen::MatrixXd m(rows, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int r = 0; r < rows; ++r) m(r, static_cast<Eigen::Index>(i)) = pts[i][r];
  return m;
}

SimplicialComplex sphere(int r) {
  const double s = 1.0 / std::sqrt(3.0);
  const std::array<std::array<double, 3>, 4> corners{{{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}}};
  const std::array<std::array<int, 3>, 4> faces{{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}};
  std::map<std::array<int, 4>, int> index;
  Points pts;
  auto vertex = [&](const std::array<int, 3>& face, int wa, int wb, int wc) {
    std::array<int, 4> key{};
    key[face[0]] += wa;
    key[face[1]] += wb;
    key[face[2]] += wc;
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    std::array<double, 3> p{};
    for (int c = 0; c < 4; ++c)
      for (int d = 0; d < 3; ++d) p[d] += key[c] * corners[c][d];
    const double len = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    for (double& x : p) x /= len;
    const int id = static_cast<int>(pts.size());
    pts.push_back(p);
    index.emplace(key, id);
    return id;
  };
  std::vector<Simplex> tris;
  for (const auto& f : faces) {
    for (int i = 0; i < r; ++i)
      for (int j = 0; j + i < r; ++j) {
        auto at = [&](int a, int b) { return vertex(f, r - a - b, a, b); };
        tris.push_back({at(i, j), at(i + 1, j), at(i, j + 1)});
        if (i + j <= r - 2) tris.push_back({at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)});
      }
  }
  return build_complex(tris, to_matrix(pts, 3));
}

SimplicialComplex torus(int m) {
  const double big = 2.0, small = 1.0;
  Points pts;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double theta = 2.0 * std::numbers::pi * i / m;
      const double phi = 2.0 * std::numbers::pi * j / m;
      pts.push_back({(big + small * std::cos(phi)) * std::cos(theta),
                     (big + small * std::cos(phi)) * std::sin(theta), small * std::sin(phi)});
    }
  auto id = [m](int i, int j) { return ((i % m) * m) + (j % m); };
  std::vector<Simplex> tris;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return build_complex(tris, to_matrix(pts, 3));
}

// Structured quad grid split along one diagonal; `wrap_j` closes the second
// index periodically.
std::vector<Simplex> grid_triangles(int ni, int nj, bool wrap_j) {
  const int cols = wrap_j ? nj : nj + 1;
  auto id = [&](int i, int j) { return i * cols + (wrap_j ? j % nj : j); };
  std::vector<Simplex> tris;
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return tris;
}

SimplicialComplex disk(int r) {
  Points pts;
  for (int i = 0; i <= r; ++i)
    for (int j = 0; j <= r; ++j) pts.push_back({static_cast<double>(i) / r, static_cast<double>(j) / r, 0.0});
  return build_complex(grid_triangles(r, r, false), to_matrix(pts, 2));
}

SimplicialComplex annulus(int r) {
  const int sectors = 6 * r;
  Points pts;
  for (int i = 0; i <= r; ++i)
    for (int j = 0; j < sectors; ++j) {
      const double rho = 1.0 + static_cast<double>(i) / r;
      const double theta = 2.0 * std::numbers::pi * j / sectors;
      pts.push_back({rho * std::cos(theta), rho * std::sin(theta), 0.0});
    }
  return build_complex(grid_triangles(r, sectors, true), to_matrix(pts, 2));
}

// Freudenthal (Kuhn) triangulation of a box grid: six tetrahedra per cell,
// one per ordering of the axes. Periodic along the third axis when
// `wrap_k` is set.
std::vector<Simplex> freudenthal(int ni, int nj, int nk, bool wrap_k) {
  const int layers = wrap_k ? nk : nk + 1;
  auto id = [&](int i, int j, int k) {
    if (wrap_k) k %= nk;
    return (i * (nj + 1) + j) * layers + k;
  };
  const std::array<std::array<int, 3>, 6> orders{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<Simplex> tets;
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j)
      for (int k = 0; k < nk; ++k)
        for (const auto& order : orders) {
          std::array<int, 3> v{i, j, k};
          Simplex tet{id(v[0], v[1], v[2])};
          for (int axis : order) {
            ++v[axis];
            tet.push_back(id(v[0], v[1], v[2]));
          }
          tets.push_back(tet);
        }
  return tets;
}

SimplicialComplex ball(int r) {
  Points pts;
  for (int i = 0; i <= r; ++i)
    for (int j = 0; j <= r; ++j)
      for (int k = 0; k <= r; ++k)
        pts.push_back({static_cast<double>(i) / r, static_cast<double>(j) / r, static_cast<double>(k) / r});
  return build_complex(freudenthal(r, r, r, false), to_matrix(pts, 3));
}

SimplicialComplex solid_torus(int r) {
  const int ring = 4 * r;
  const double big = 2.0;
  Points pts;
  for (int i = 0; i <= r; ++i)
    for (int j = 0; j <= r; ++j)
      for (int k = 0; k < ring; ++k) {
        const double u = static_cast<double>(i) / r - 0.5;
        const double v = static_cast<double>(j) / r - 0.5;
        const double theta = 2.0 * std::numbers::pi * k / ring;
        pts.push_back({(big + u) * std::cos(theta), (big + u) * std::sin(theta), v});
      }
  return build_complex(freudenthal(r, r, ring, true), to_matrix(pts, 3));
}

}  // namespace

SimplicialComplex gen_mesh(Shape shape, int resolution) {
  if (resolution < minimum_resolution(shape))
    throw Error(ErrorCode::UnsupportedResolution,
                std::string(to_string(shape)) + " needs resolution >= " +
                    std::to_string(minimum_resolution(shape)));
  switch (shape) {
    case Shape::sphere: return sphere(resolution);
    case Shape::torus: return torus(resolution);
    case Shape::disk: return disk(resolution);
    case Shape::annulus: return annulus(resolution);
    case Shape::ball: return ball(resolution);
    case Shape::solid_torus: return solid_torus(resolution);
  }
  throw Error(ErrorCode::UnknownShape, "unhandled shape");
}

}  // namespace hports
