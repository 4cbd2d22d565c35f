#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <string_view>
#include <vector>

#include "hports/metric.hpp"

namespace hports {

enum class BoundaryCondition { neumann, dirichlet };

std::string_view to_string(BoundaryCondition bc);

/// M-orthonormal basis of harmonic k-fields for one boundary condition.
struct HarmonicBasis {
  int degree = 0;
  BoundaryCondition bc = BoundaryCondition::neumann;
  Eigen::MatrixXd matrix;  // one basis cochain per column
  std::vector<Cochain> basis;
  int dim() const { return static_cast<int>(matrix.cols()); }
};

struct HMFComponents {
  Cochain d_alpha;      // exact with zero-trace potential
  Cochain delta_beta;   // coexact
  Cochain delta_gamma;  // harmonic, orthogonal to the Dirichlet fields
  Cochain lambda_t;     // Dirichlet harmonic
  double input_norm = 0.0;
  /// Norms in the order d_alpha, delta_beta, delta_gamma, lambda_t.
  std::array<double, 4> norms{};
  /// Raw M-inner products between the four components.
  Eigen::Matrix4d gram = Eigen::Matrix4d::Zero();
  double reconstruction_residual = 0.0;  // relative to input_norm
  /// Largest off-diagonal |gram| divided by input_norm^2.
  double max_cross_term = 0.0;
};

struct FriedrichsSplit {
  Cochain lambda_t, delta_gamma;  // H = H_T + coexact harmonic
  Cochain lambda_n, d_epsilon;    // H = H_N + exact harmonic
  std::array<double, 4> norms{};  // in field order
};

struct CohomologyRow {
  int degree = 0;
  int dim_d = 0;      // dim H^k(M, d) via Neumann fields
  int dim_delta = 0;  // dim H^k(M, delta) via Dirichlet fields
  int betti_k = 0;
  int betti_dual = 0;  // b_{n-k}
  bool consistent() const { return dim_d == betti_k && dim_delta == betti_dual; }
};

struct StokesDiracCohomology {
  int neumann_q = 0;
  int dirichlet_p = 0;
  int neumann_p = 0;
  int dirichlet_q = 0;
};

enum class FieldLocation { vertex, tet };

struct VectorFieldDecomposition {
  Cochain flattened;
  Cochain knot_part;
  Cochain gradient_part;
  int dim_harmonic_knots = 0;
  int dim_harmonic_gradients = 0;
};

/// Edge values of a vector field: midpoint of linearly interpolated vertex
/// values, or the average over incident tetrahedra, dotted with the edge.
Cochain flatten_vector_field(const Eigen::MatrixXd& field, FieldLocation where, const Metric& m);

/**
 * Harmonic fields and orthogonal decompositions on one metric.
 *
 * Bases and projection operators are computed lazily and cached; the cache is
 * guarded so a single instance may be shared between threads.
 */
class Hodge {
 public:
  explicit Hodge(std::shared_ptr<const Metric> metric);

  const Metric& metric() const { return *metric_; }

  const HarmonicBasis& harmonic_basis(int k, BoundaryCondition bc) const;

  HMFComponents hodge_morrey_friedrichs(const Cochain& c) const;
  /// Throws NotInHarmonicComplement unless h is orthogonal to the exact and
  /// coexact parts to 1e-8 relative.
  FriedrichsSplit friedrichs_split(const Cochain& h) const;

  std::vector<CohomologyRow> cohomology_report() const;
  StokesDiracCohomology stokes_dirac_cohomology(int p, int q) const;

  VectorFieldDecomposition decompose_vector_field_3d(const Eigen::MatrixXd& field, FieldLocation where) const;

  /// M-orthogonal projections onto d(zero-trace (k-1)-cochains), onto the
  /// image of the codifferential of (k+1)-cochains, and onto d of all (k-1)-cochains.
  Eigen::VectorXd project_exact(int k, const Eigen::VectorXd& v) const;
  Eigen::VectorXd project_coexact(int k, const Eigen::VectorXd& v) const;
  Eigen::VectorXd project_gradients(int k, const Eigen::VectorXd& v) const;

 private:
  struct Projectors {
    Eigen::MatrixXd exact_span, exact_gram_pinv;
    Eigen::MatrixXd coexact_map, coexact_gram_pinv;
    Eigen::MatrixXd grad_span, grad_gram_pinv;
  };
  const Projectors& projectors(int k) const;
  void require_degree(int k) const;

  std::shared_ptr<const Metric> metric_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<int, int>, std::unique_ptr<HarmonicBasis>> bases_;
  mutable std::map<int, std::unique_ptr<Projectors>> projectors_;
};

}  // namespace hports
