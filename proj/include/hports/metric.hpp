#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hports/mesh.hpp"

namespace hports {

/// Discrete k-form: one value per oriented k-simplex in canonical order.
struct Cochain {
  int degree = 0;
  Eigen::VectorXd values;
  std::uint64_t complex_id = 0;

  static Cochain zero(const SimplicialComplex& c, int k);
  static Cochain from_values(const SimplicialComplex& c, int k, Eigen::VectorXd values);

  Cochain& operator+=(const Cochain& o);
  Cochain& operator-=(const Cochain& o);
  Cochain& operator*=(double s);
};

Cochain operator+(Cochain a, const Cochain& b);
Cochain operator-(Cochain a, const Cochain& b);
Cochain operator*(double s, Cochain a);

/// Riesz representative of a cochain: the functional eta -> <<c, eta>>.
struct DualRepresentation {
  int degree = 0;
  Eigen::VectorXd covector;  // mass(k) * c.values
  std::uint64_t complex_id = 0;

  double apply(const Cochain& eta) const;
};

/**
 * L2 structure of a complex from lowest-order Whitney forms.
 *
 * Holds one SPD mass matrix per degree with its Cholesky factorisation, the
 * exterior derivative matrices in floating form, and the boundary complex.
 * Immutable after construction; every query is const and safe to share
 * across threads.
 */
class Metric {
 public:
  /// Assembles the mass matrices; throws FactorizationFailure if one is not SPD.
  explicit Metric(SimplicialComplex complex);

  const SimplicialComplex& complex() const { return complex_; }
  const BoundaryComplex& boundary() const { return boundary_; }
  int dimension() const { return complex_.dimension(); }

  const Eigen::MatrixXd& mass(int k) const { return mass_.at(k); }
  /// Dense coboundary matrix d_k : C^k -> C^{k+1}, i.e. boundary(k+1)^T.
  const Eigen::MatrixXd& d_matrix(int k) const { return d_.at(k); }
  Eigen::VectorXd solve_mass(int k, const Eigen::VectorXd& rhs) const;
  /// Solves with the mass block on interior k-simplices (rhs indexed like
  /// interior_indices(k)).
  Eigen::VectorXd solve_interior_mass(int k, const Eigen::VectorXd& rhs) const;

  /// Indices of k-simplices lying in the boundary complex, and the rest.
  const std::vector<int>& boundary_indices(int k) const { return on_boundary_.at(k); }
  const std::vector<int>& interior_indices(int k) const { return interior_.at(k); }
  bool is_boundary_simplex(int k, int i) const { return boundary_flag_.at(k).at(i); }

  /// Signed inclusion for degree k (parent x boundary), as doubles.
  const Eigen::MatrixXd& inclusion(int k) const { return inclusion_.at(k); }

  /// Diagonal circumcentric star ratios |dual cell| / |simplex| for degree k.
  /// Throws NotWellCentered unless every simplex contains its circumcentre.
  Eigen::VectorXd diagonal_star(int k) const;
  bool well_centered() const;

 private:
  SimplicialComplex complex_;
  BoundaryComplex boundary_;
  std::vector<Eigen::MatrixXd> mass_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> chol_, interior_chol_;
  std::vector<Eigen::MatrixXd> d_;
  std::vector<Eigen::MatrixXd> inclusion_;
  std::vector<std::vector<int>> on_boundary_, interior_;
  std::vector<std::vector<bool>> boundary_flag_;
};

/// Whitney mass matrix of a single simplex for degree k (local faces in
/// lexicographic order of local vertex subsets). Exposed for testing.
Eigen::MatrixXd whitney_local_mass(const Eigen::MatrixXd& simplex_vertices, int k);

double simplex_volume(const Eigen::MatrixXd& simplex_vertices);

Cochain exterior_derivative(const Cochain& c, const Metric& m);
/// Algebraic codifferential M_{k-1}^{-1} d_{k-1}^T M_k.
Cochain codifferential(const Cochain& c, const Metric& m);
/// Adjoint of d restricted to zero-trace (k-1)-cochains; the result vanishes
/// on boundary simplices.
Cochain constrained_codifferential(const Cochain& c, const Metric& m);
double inner_product(const Cochain& a, const Cochain& b, const Metric& m);
double norm(const Cochain& a, const Metric& m);

DualRepresentation hodge_star(const Cochain& c, const Metric& m);
/// Concrete (n-k)-cochain image via diagonal circumcentric ratios; values are
/// indexed like c (one dual cell per primal simplex).
Eigen::VectorXd hodge_star_image(const Cochain& c, const Metric& m);

/// Restriction to the boundary complex; empty on closed meshes.
Cochain tangential_trace(const Cochain& c, const Metric& m);
/// Zero-extension of a boundary cochain back to the parent complex.
Cochain extend_by_zero(const Cochain& boundary_cochain, const Metric& m);

/// Normal-trace functional of b (degree k >= 1), expressed on boundary
/// (k-1)-simplices in boundary orientation:
///   ((d^T M_k b) - M_{k-1} delta_c b) restricted to the boundary.
/// Pairing it with a tangential trace gives the Green boundary term.
Eigen::VectorXd normal_trace_functional(const Cochain& b, const Metric& m);
/// Sum over boundary simplices of trace(a) * normal_trace_functional(b).
double boundary_pairing(const Cochain& a, const Cochain& b, const Metric& m);

struct StokesSides {
  double lhs = 0.0;
  double rhs = 0.0;
  /// Integer coefficient vectors of both sides coincide.
  bool same_combination = false;
};

/// Integral of dc over the complex vs integral of the trace over the
/// boundary, both evaluated as integer combinations of c's entries.
StokesSides stokes_check(const Cochain& c, const Metric& m);

/// <<da, b>> - <<a, delta b>> with the algebraic codifferential (zero).
double green_defect(const Cochain& a, const Cochain& b, const Metric& m);
/// Same with the constrained codifferential: the discrete boundary term.
double green_defect_constrained(const Cochain& a, const Cochain& b, const Metric& m);

}  // namespace hports
