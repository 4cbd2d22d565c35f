#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hports/stokes_dirac.hpp"

namespace hports {

struct InitialCondition {
  enum class Kind { zero, random, harmonic, bump };
  Kind kind = Kind::random;
  std::uint64_t seed = 0;
  int degree = 0;  // harmonic: p or q
  int index = 0;   // harmonic: basis element
  double amplitude = 1.0;
  int vertex = 0;  // bump: centre
  double width = 0.25;
};

/// Parses "zero", "random[:<seed>]", "harmonic:<degree>:<index>:<amplitude>"
/// or "bump:<vertex>:<width>". Throws InvalidInput.
InitialCondition parse_initial_condition(const std::string& text, std::uint64_t seed);

enum class Integrator { implicit_midpoint };

struct SimulationConfig {
  double dt = 0.01;
  int steps = 1000;
  Integrator integrator = Integrator::implicit_midpoint;
  InitialCondition init;
  int stride = 0;  // snapshot every `stride` steps; 0 disables
};

/// Builds the initial state. Harmonic seeding on degree p uses the Neumann
/// p-fields; on degree q it uses the Neumann (p-1)-fields, which are the
/// dual representatives of the Dirichlet q-fields.
SDState initial_state(const StokesDiracSystem& sys, const InitialCondition& init);

/**
 * Implicit midpoint map for d/dt state = -flows.
 *
 * The boundary values of the dual variable are invariant under the flow and
 * enter as a constant forcing; the remaining unknowns evolve under a skew
 * operator. The midpoint matrix is factorised once at construction.
 */
class MidpointStepper {
 public:
  /// boundary_state supplies the fixed boundary values of alpha_q_dual.
  MidpointStepper(const StokesDiracSystem& sys, double dt, const SDState& boundary_state);

  SDState step(const SDState& s) const;
  double dt() const { return dt_; }
  /// Power-iteration estimate of the largest |eigenvalue| of the generator.
  double spectral_radius() const;

 private:
  Eigen::VectorXd pack(const SDState& s) const;
  SDState unpack(const Eigen::VectorXd& x) const;

  StokesDiracSystem sys_;
  double dt_;
  std::vector<int> interior_;
  Eigen::VectorXd boundary_values_;  // full-length alpha_q_dual with interior zeroed
  Eigen::MatrixXd mass_, skew_;
  Eigen::VectorXd forcing_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::MatrixXd rhs_op_;
};

/// One step from a fresh stepper; for repeated steps build a MidpointStepper.
SDState step_implicit_midpoint(const StokesDiracSystem& sys, const SDState& s, double dt);

struct Snapshot {
  int step = 0;
  SDState state;
};

struct Trace {
  std::vector<double> t, hamiltonian, boundary_power;
  /// Per step |dH/dt - boundary power| over (power_scale + 2 H spectral_radius) at the midpoint.
  std::vector<double> dHdt_residual;
  std::vector<Eigen::VectorXd> harm_p, harm_q;
  std::vector<Snapshot> snapshots;
  SDState final_state;
  double spectral_radius = 0.0;

  std::size_t size() const { return t.size(); }
  double max_relative_energy_drift() const;
  /// Largest change of any harmonic coefficient from its initial value.
  double max_harmonic_drift() const;
  std::string to_csv() const;
};

/// Neumann then Dirichlet coefficients of alpha_p and of alpha_q_dual.
std::pair<Eigen::VectorXd, Eigen::VectorXd> harmonic_coefficients(const StokesDiracSystem& sys, const SDState& s);

Trace run(const StokesDiracSystem& sys, const SimulationConfig& config);
Trace run_from(const StokesDiracSystem& sys, const SDState& start, const SimulationConfig& config);

}  // namespace hports
