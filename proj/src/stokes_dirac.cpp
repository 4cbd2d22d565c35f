#include "hports/stokes_dirac.hpp"

#include <algorithm>
#include <cmath>

#include "hports/linalg.hpp"

namespace hports {

namespace {

double relative(double abs_err, double scale) { return scale > 0.0 ? abs_err / scale : abs_err; }

}  // namespace

double HarmonicFlowResiduals::max() const {
  double m = 0.0;
  for (double v : p_side) m = std::max(m, v);
  for (double v : q_side) m = std::max(m, v);
  return m;
}

StokesDiracSystem::StokesDiracSystem(std::shared_ptr<const Hodge> hodge, int p, int q)
    : hodge_(std::move(hodge)), p_(p), q_(q) {
  if (!hodge_) throw Error(ErrorCode::InvalidInput, "null hodge");
  const int n = hodge_->metric().dimension();
  if (p + q != n + 1 || p < 1 || q < 1 || p > n || q > n)
    throw Error(ErrorCode::InvalidDegrees, "need p + q = n + 1 with 1 <= p, q <= n");
}

SDState StokesDiracSystem::zero_state() const {
  return {Cochain::zero(metric().complex(), p_), Cochain::zero(metric().complex(), p_ - 1)};
}

void StokesDiracSystem::validate(const SDState& s) const {
  const auto id = metric().complex().id();
  if (s.alpha_p.complex_id != id || s.alpha_q_dual.complex_id != id)
    throw Error(ErrorCode::ComplexMismatch, "state belongs to another complex");
  if (s.alpha_p.degree != p_ || s.alpha_q_dual.degree != p_ - 1)
    throw Error(ErrorCode::DegreeMismatch, "state degrees do not match (p, q)");
  if (s.alpha_p.values.size() != metric().complex().count(p_) ||
      s.alpha_q_dual.values.size() != metric().complex().count(p_ - 1))
    throw Error(ErrorCode::InvalidInput, "state length mismatch");
}

double StokesDiracSystem::hamiltonian(const SDState& s) const {
  validate(s);
  return 0.5 * (inner_product(s.alpha_p, s.alpha_p, metric()) + inner_product(s.alpha_q_dual, s.alpha_q_dual, metric()));
}

Efforts StokesDiracSystem::efforts(const SDState& s) const {
  validate(s);
  return {s.alpha_p, s.alpha_q_dual};
}

Flows StokesDiracSystem::flows(const Efforts& e) const {
  if (e.e_p.degree != p_ || e.e_q.degree != p_ - 1) throw Error(ErrorCode::DegreeMismatch, "effort degrees");
  Flows f;
  f.f_p = sign() * exterior_derivative(e.e_q, metric());
  f.f_q_dual = (-sign()) * constrained_codifferential(e.e_p, metric());
  return f;
}

SDState StokesDiracSystem::rate(const SDState& s) const {
  const Flows f = flows(efforts(s));
  return {(-1.0) * f.f_p, (-1.0) * f.f_q_dual};
}

BoundaryPort StokesDiracSystem::boundary_port(const Efforts& e) const {
  if (e.e_p.degree != p_ || e.e_q.degree != p_ - 1) throw Error(ErrorCode::DegreeMismatch, "effort degrees");
  BoundaryPort port;
  port.e_b = (p_ % 2 == 0 ? 1.0 : -1.0) * tangential_trace(e.e_q, metric());
  port.f_b = normal_trace_functional(e.e_p, metric());
  return port;
}

PowerBalanceReport StokesDiracSystem::power_balance(const SDState& s) const {
  const Metric& m = metric();
  const Efforts e = efforts(s);
  const Flows f = flows(e);
  const SDState dot = rate(s);
  PowerBalanceReport rep;
  rep.hamiltonian = hamiltonian(s);
  rep.dH_dt = inner_product(e.e_p, dot.alpha_p, m) + inner_product(e.e_q, dot.alpha_q_dual, m);
  rep.internal_term = -(inner_product(e.e_p, f.f_p, m) + inner_product(e.e_q, f.f_q_dual, m));
  const BoundaryPort port = boundary_port(e);
  const double parity = ((r() + p_ + 1) % 2 == 0) ? 1.0 : -1.0;
  rep.boundary_term = parity * port.pairing();
  rep.exact_boundary_part = rep.boundary_term;
  rep.power_scale = norm(e.e_p, m) * norm(f.f_p, m) + norm(e.e_q, m) * norm(f.f_q_dual, m);
  rep.balance_residual = relative(std::abs(rep.dH_dt - rep.boundary_term), rep.power_scale);
  return rep;
}

PowerBalanceReport StokesDiracSystem::extended_power_balance(const SDState& s) const {
  const Metric& m = metric();
  PowerBalanceReport rep = power_balance(s);
  const Efforts e = efforts(s);
  const auto& dirichlet = hodge_->harmonic_basis(p_, BoundaryCondition::dirichlet);
  const Cochain lambda{p_, project_onto(dirichlet.matrix, m.mass(p_), e.e_p.values), e.e_p.complex_id};
  rep.harmonic_boundary_part = -sign() * boundary_pairing(e.e_q, lambda, m);
  rep.exact_boundary_part = -sign() * boundary_pairing(e.e_q, e.e_p - lambda, m);
  rep.split_residual = relative(std::abs(rep.boundary_term - rep.exact_boundary_part - rep.harmonic_boundary_part),
                                rep.power_scale);

  const Flows f = flows(e);
  const double fn = norm(f.f_p, m);
  if (fn > 0.0) {
    const HMFComponents parts = hodge_->hodge_morrey_friedrichs(f.f_p);
    rep.flow_potential_residual = norm(parts.delta_beta + parts.delta_gamma, m) / fn;
  }
  return rep;
}

HarmonicFlowResiduals StokesDiracSystem::harmonic_flow_identity(const SDState& s) const {
  const Metric& m = metric();
  const Efforts e = efforts(s);
  const Flows f = flows(e);
  HarmonicFlowResiduals out;
  const double fp = norm(f.f_p, m);
  for (const Cochain& lam : hodge_->harmonic_basis(p_, BoundaryCondition::dirichlet).basis) {
    const double lhs = inner_product(f.f_p, lam, m);
    const double rhs = sign() * boundary_pairing(e.e_q, lam, m);
    out.p_side.push_back(relative(std::abs(lhs - rhs), fp + std::abs(rhs)));
  }
  const double gq = norm(f.f_q_dual, m);
  for (const Cochain& mu : hodge_->harmonic_basis(p_ - 1, BoundaryCondition::neumann).basis) {
    const double lhs = inner_product(f.f_q_dual, mu, m);
    const double rhs = sign() * boundary_pairing(mu, e.e_p, m);
    out.q_side.push_back(relative(std::abs(lhs - rhs), gq + std::abs(rhs)));
  }
  return out;
}

IntegrabilityVerdict integrability_check(const Cochain& f, const Cochain& psi, const Hodge& hodge) {
  const Metric& m = hodge.metric();
  const int n = m.dimension();
  const int k = f.degree;
  if (f.complex_id != m.complex().id()) throw Error(ErrorCode::ComplexMismatch, "f belongs to another complex");
  if (k < 1 || k > n) throw Error(ErrorCode::DegreeOutOfRange, "integrability needs 1 <= deg f <= n");
  const SimplicialComplex& bc = m.boundary().complex;
  if (psi.complex_id != bc.id()) throw Error(ErrorCode::ComplexMismatch, "psi must live on the boundary complex");
  if (psi.degree != k - 1) throw Error(ErrorCode::DegreeMismatch, "psi must have degree deg f - 1");
  if (f.values.size() != m.complex().count(k) || psi.values.size() != bc.count(k - 1))
    throw Error(ErrorCode::InvalidInput, "cochain length mismatch");

  constexpr double condition_tol = 1e-9;
  constexpr double solve_tol = 1e-8;
  IntegrabilityVerdict verdict;

  if (k < n) {
    const Eigen::MatrixXd& d = m.d_matrix(k);
    const double err = (d * f.values).norm();
    const double scale = (d.cwiseAbs() * f.values.cwiseAbs()).norm();
    const double rel = relative(err, scale);
    if (rel > condition_tol) verdict.violations.push_back({"closedness", rel, -1});
  }
  if (k <= n - 1 && bc.count(k) > 0) {
    const Eigen::MatrixXd dbc = Eigen::MatrixXd(bc.boundary(k).cast<double>()).transpose();
    const Eigen::VectorXd tf = m.inclusion(k).transpose() * f.values;
    const double err = (tf - dbc * psi.values).norm();
    const double scale = tf.norm() + (dbc.cwiseAbs() * psi.values.cwiseAbs()).norm();
    const double rel = relative(err, scale);
    if (rel > condition_tol) verdict.violations.push_back({"trace", rel, -1});
  }
  const auto& dirichlet = hodge.harmonic_basis(k, BoundaryCondition::dirichlet);
  const double fn = norm(f, m);
  for (int j = 0; j < dirichlet.dim(); ++j) {
    const Cochain& lam = dirichlet.basis[j];
    const Eigen::VectorXd nt = normal_trace_functional(lam, m);
    const double lhs = inner_product(f, lam, m);
    const double rhs = psi.values.dot(nt);
    const double scale = fn + psi.values.cwiseAbs().dot(nt.cwiseAbs());
    const double rel = relative(std::abs(lhs - rhs), scale);
    if (rel > condition_tol) verdict.violations.push_back({"harmonic_pairing", rel, j});
  }
  if (!verdict.violations.empty()) return verdict;

  const Eigen::VectorXd extended = m.inclusion(k - 1) * psi.values;
  const Eigen::MatrixXd& d = m.d_matrix(k - 1);
  const std::vector<int>& interior = m.interior_indices(k - 1);
  const Eigen::VectorXd rhs = f.values - d * extended;
  Eigen::VectorXd e = extended;
  if (!interior.empty()) {
    const Eigen::MatrixXd a = d(Eigen::all, interior);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    e(interior) = svd.solve(rhs);
  }
  verdict.residual = relative((d * e - f.values).norm(), f.values.norm() + (d.cwiseAbs() * e.cwiseAbs()).norm());
  if (verdict.residual > solve_tol)
    throw Error(ErrorCode::SolverFailure, "integrability conditions hold but the residual is " +
                                              std::to_string(verdict.residual));
  verdict.solvable = true;
  verdict.witness = Cochain{k - 1, e, f.complex_id};
  return verdict;
}

}  // namespace hports
