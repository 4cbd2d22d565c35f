#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hports/errors.hpp"

namespace hports {

/// Sorted tuple of vertex indices.
using Simplex = std::vector<int>;
using IntSparse = Eigen::SparseMatrix<int>;

enum class OrientationPolicy {
  infer,     // propagate a consistent orientation; NonOrientable if impossible
  as_given,  // keep the permutation sign of each input tuple as-is
};

/**
 * Oriented simplicial complex of top dimension n.
 *
 * Simplices of every degree are stored in lexicographic order of their sorted
 * vertex tuples; all matrix indices derive from that order. Simplices below the
 * top degree are oriented by their sorted representative. Top simplices carry
 * a sign relative to it, which is folded into boundary(n).
 *
 * Immutable after construction.
 */
class SimplicialComplex {
 public:
  SimplicialComplex() = default;

  int dimension() const { return dimension_; }
  int ambient_dimension() const { return static_cast<int>(coords_.rows()); }
  /// Unique per constructed complex; copies share it.
  std::uint64_t id() const { return id_; }

  /// Vertex coordinates, one column per vertex (includes unreferenced ones).
  const Eigen::MatrixXd& coordinates() const { return coords_; }
  Eigen::VectorXd vertex(int v) const { return coords_.col(v); }

  const std::vector<Simplex>& simplices(int k) const { return simplices_.at(k); }
  int count(int k) const;
  std::vector<int> counts() const;
  int total_simplices() const;

  /// Sign of simplex i of degree k relative to its sorted vertex tuple.
  int orientation(int k, int i) const { return orientation_.at(k).at(i); }
  const std::vector<int>& orientations(int k) const { return orientation_.at(k); }

  /// Incidence of (k-1)-simplices (rows) on k-simplices (columns), 1 <= k <= n.
  const IntSparse& boundary(int k) const { return boundary_.at(k - 1); }

  /// Canonical index of a sorted simplex, or nullopt.
  std::optional<int> index_of(const Simplex& s) const;

  /// Number of top simplices containing each (n-1)-simplex.
  std::vector<int> top_coface_counts() const;

  /// Top simplices as oriented tuples (sorted tuple with the first two
  /// vertices swapped when the sign is negative).
  std::vector<Simplex> oriented_top_simplices() const;

 private:
  friend SimplicialComplex make_complex(int, std::vector<Simplex>, std::vector<int>,
                                        Eigen::MatrixXd);

  int dimension_ = 0;
  std::uint64_t id_ = 0;
  Eigen::MatrixXd coords_;
  std::vector<std::vector<Simplex>> simplices_;
  std::vector<std::vector<int>> orientation_;
  std::vector<IntSparse> boundary_;
  std::vector<std::map<Simplex, int>> lookup_;
};

/// Boundary of a complex together with the discrete inclusion map.
struct BoundaryComplex {
  SimplicialComplex complex;
  /// parent[k][j]: index in the parent complex of boundary k-simplex j.
  std::vector<std::vector<int>> parent;
  /// Orientation of boundary k-simplex j relative to its parent simplex (+1/-1).
  std::vector<std::vector<int>> relative_sign;

  bool empty() const { return parent.empty() || parent.front().empty(); }
  /// Signed inclusion for degree k, shape (#parent k-simplices x #boundary
  /// k-simplices); each column has exactly one nonzero.
  IntSparse inclusion(int k, int parent_count) const;
};

/// Builds a complex from top simplices (each n+1 vertex indices, any order).
/// Under OrientationPolicy::infer the first simplex of each connected
/// component keeps its input orientation and the rest are made consistent.
SimplicialComplex build_complex(const std::vector<Simplex>& top_simplices,
                                const Eigen::MatrixXd& vertex_coords,
                                OrientationPolicy policy = OrientationPolicy::infer);

/// Low-level constructor: top simplices must be sorted, distinct and in
/// canonical order; signs are taken verbatim. Top list may be empty.
SimplicialComplex make_complex(int dimension, std::vector<Simplex> sorted_top,
                               std::vector<int> top_signs, Eigen::MatrixXd coords);

BoundaryComplex extract_boundary(const SimplicialComplex& c);

struct Finding {
  enum class Kind { excess_cofaces, inconsistent_orientation, non_orientable, non_manifold_vertex };
  Kind kind;
  Simplex simplex;
  std::string detail;
};

std::string_view to_string(Finding::Kind kind);

struct ValidationReport {
  std::vector<Finding> findings;
  bool valid() const { return findings.empty(); }
};

ValidationReport validate_manifold(const SimplicialComplex& c);

/// Exact rank over the rationals by fraction-free elimination on big integers.
/// Throws OverflowInExactArithmetic when an intermediate exceeds max_bits.
int exact_rank(const IntSparse& m, unsigned max_bits = 4096);
/// SVD rank with threshold 1e-10 * largest singular value.
int float_rank(const IntSparse& m);

enum class RankMethod { exact, floating };

/// Real Betti numbers b_0..b_n.
std::vector<int> betti_numbers(const SimplicialComplex& c, RankMethod method = RankMethod::exact);
/// Exact oracle, falling back to floating rank on OverflowInExactArithmetic.
std::vector<int> betti_numbers_with_fallback(const SimplicialComplex& c, bool* used_fallback = nullptr);

int euler_characteristic(const SimplicialComplex& c);

}  // namespace hports
