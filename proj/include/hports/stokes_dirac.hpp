#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hports/hodge.hpp"

namespace hports {

/**
 * State of a Stokes-Dirac system on an n-complex with p + q = n + 1.
 *
 * alpha_p is a p-cochain. The q-form energy variable is stored through its
 * Hodge-dual representative, a (p-1)-cochain, so that both exterior
 * derivatives of the structure act on cochains:
 *   d e^q   -> d of the (p-1)-cochain,
 *   d e^p   -> constrained codifferential of alpha_p (in dual form).
 */
struct SDState {
  Cochain alpha_p;
  Cochain alpha_q_dual;
};

struct Efforts {
  Cochain e_p;  // Riesz representative of the (q-1)-form effort, degree p
  Cochain e_q;  // degree p-1
};

struct Flows {
  Cochain f_p;       // (-1)^r d e_q, degree p
  Cochain f_q_dual;  // dual representative of d e_p, degree p-1; zero on boundary
};

struct BoundaryPort {
  Cochain e_b;               // (-1)^p trace(e_q), boundary (p-1)-cochain
  Eigen::VectorXd f_b;       // normal-trace functional of e_p on boundary (p-1)-simplices
  double pairing() const { return e_b.values.dot(f_b); }
};

struct PowerBalanceReport {
  double hamiltonian = 0.0;
  double dH_dt = 0.0;
  double internal_term = 0.0;
  double boundary_term = 0.0;
  double exact_boundary_part = 0.0;
  double harmonic_boundary_part = 0.0;
  /// Normaliser for relative residuals: sum of |pairing| sizes of the terms.
  double power_scale = 0.0;
  double balance_residual = 0.0;  // |dH_dt - boundary_term| / power_scale
  double split_residual = 0.0;    // |boundary - exact - harmonic| / power_scale
  /// Share of f_p outside exact + Dirichlet harmonic, relative to |f_p|.
  double flow_potential_residual = 0.0;
};

struct HarmonicFlowResiduals {
  /// One entry per Dirichlet p-field: |<f_p, l> - (-1)^r B(e_q, l)|, relative.
  std::vector<double> p_side;
  /// One entry per Neumann (p-1)-field (dual of a Dirichlet q-field).
  std::vector<double> q_side;
  double max() const;
};

/// Quadratic-Hamiltonian Stokes-Dirac system with sign r = pq + 1.
class StokesDiracSystem {
 public:
  /// Throws InvalidDegrees unless p + q = n + 1 and 1 <= p, q <= n.
  StokesDiracSystem(std::shared_ptr<const Hodge> hodge, int p, int q);

  int p() const { return p_; }
  int q() const { return q_; }
  int r() const { return p_ * q_ + 1; }
  /// (-1)^r
  double sign() const { return r() % 2 == 0 ? 1.0 : -1.0; }

  const Metric& metric() const { return hodge_->metric(); }
  const Hodge& hodge() const { return *hodge_; }

  SDState zero_state() const;
  /// Throws DegreeMismatch / ComplexMismatch for foreign states.
  void validate(const SDState& s) const;

  double hamiltonian(const SDState& s) const;
  Efforts efforts(const SDState& s) const;
  Flows flows(const Efforts& e) const;
  /// Time derivative of the state: -flows.
  SDState rate(const SDState& s) const;
  BoundaryPort boundary_port(const Efforts& e) const;

  PowerBalanceReport power_balance(const SDState& s) const;
  /// Adds the split of the boundary term along e_p = (e_p - l_T) + l_T, with
  /// l_T the Dirichlet-harmonic projection.
  PowerBalanceReport extended_power_balance(const SDState& s) const;
  HarmonicFlowResiduals harmonic_flow_identity(const SDState& s) const;

 private:
  std::shared_ptr<const Hodge> hodge_;
  int p_, q_;
};

struct IntegrabilityViolation {
  std::string condition;  // "closedness", "trace", "harmonic_pairing"
  double magnitude = 0.0;  // relative
  int index = -1;          // basis element for harmonic_pairing
};

struct IntegrabilityVerdict {
  bool solvable = false;
  std::optional<Cochain> witness;
  double residual = 0.0;  // relative, when a witness was computed
  std::vector<IntegrabilityViolation> violations;
};

/// Decides whether d e = f admits a solution with trace(e) = psi, where f is
/// a k-cochain and psi a boundary (k-1)-cochain. Checks closedness, trace
/// compatibility and the Dirichlet-harmonic pairings (each to 1e-9
/// relative), then solves by least squares. Throws SolverFailure if the
/// conditions pass but the residual exceeds 1e-8.
IntegrabilityVerdict integrability_check(const Cochain& f, const Cochain& psi, const Hodge& hodge);

}  // namespace hports
