#include "hports/hodge.hpp"

#include <cmath>

#include "hports/linalg.hpp"

namespace hports {

std::string_view to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::neumann ? "neumann" : "dirichlet";
}

namespace {

std::vector<int> all_indices(int n) {
  std::vector<int> out(n);
  for (int i = 0; i < n; ++i) out[i] = i;
  return out;
}

void require_on(const Cochain& c, const Metric& m) {
  if (c.complex_id != m.complex().id()) throw Error(ErrorCode::ComplexMismatch, "cochain belongs to another complex");
  if (c.degree < 0 || c.degree > m.dimension()) throw Error(ErrorCode::DegreeOutOfRange, "degree " + std::to_string(c.degree));
  if (c.values.size() != m.complex().count(c.degree)) throw Error(ErrorCode::InvalidInput, "cochain length mismatch");
}

}  // namespace

Cochain flatten_vector_field(const Eigen::MatrixXd& field, FieldLocation where, const Metric& m) {
  const SimplicialComplex& c = m.complex();
  const int n = c.dimension();
  const Eigen::Index expected = where == FieldLocation::vertex ? c.count(0) : c.count(n);
  if (field.rows() != c.ambient_dimension() || field.cols() != expected)
    throw Error(ErrorCode::InvalidInput, "vector field has the wrong shape");
  if (!field.allFinite()) throw Error(ErrorCode::InvalidInput, "non-finite vector field");

  Eigen::VectorXd values = Eigen::VectorXd::Zero(c.count(1));
  if (where == FieldLocation::vertex) {
    for (int e = 0; e < c.count(1); ++e) {
      const auto& s = c.simplices(1)[e];
      values(e) = 0.5 * (field.col(s[0]) + field.col(s[1])).dot(c.vertex(s[1]) - c.vertex(s[0]));
    }
  } else {
    Eigen::VectorXd hits = Eigen::VectorXd::Zero(c.count(1));
    for (int t = 0; t < c.count(n); ++t) {
      const auto& top = c.simplices(n)[t];
      for (std::size_t a = 0; a < top.size(); ++a)
        for (std::size_t b = a + 1; b < top.size(); ++b) {
          const int e = *c.index_of({top[a], top[b]});
          values(e) += field.col(t).dot(c.vertex(top[b]) - c.vertex(top[a]));
          hits(e) += 1.0;
        }
    }
    values = values.cwiseQuotient(hits);
  }
  return Cochain{1, values, c.id()};
}

Hodge::Hodge(std::shared_ptr<const Metric> metric) : metric_(std::move(metric)) {
  if (!metric_) throw Error(ErrorCode::InvalidInput, "null metric");
}

void Hodge::require_degree(int k) const {
  if (k < 0 || k > metric_->dimension()) throw Error(ErrorCode::DegreeOutOfRange, "degree " + std::to_string(k));
}

const HarmonicBasis& Hodge::harmonic_basis(int k, BoundaryCondition bc) const {
  require_degree(k);
  std::lock_guard<std::mutex> lock(mutex_);
  auto& slot = bases_[{k, static_cast<int>(bc)}];
  if (slot) return *slot;

  const Metric& m = *metric_;
  const int n = m.dimension();
  const int nk = m.complex().count(k);
  const std::vector<int> rows = bc == BoundaryCondition::neumann ? all_indices(nk) : m.interior_indices(k);
  const Eigen::Index ni = static_cast<Eigen::Index>(rows.size());

  auto out = std::make_unique<HarmonicBasis>();
  out->degree = k;
  out->bc = bc;
  out->matrix.resize(nk, 0);
  if (ni > 0) {
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(ni, ni);
    if (k < n) {
      const Eigen::MatrixXd dk = m.d_matrix(k)(Eigen::all, rows);
      l += dk.transpose() * m.mass(k + 1) * dk;
    }
    if (k > 0) {
      const std::vector<int> cols = bc == BoundaryCondition::neumann ? all_indices(m.complex().count(k - 1))
                                                                     : m.interior_indices(k - 1);
      if (!cols.empty()) {
        const Eigen::MatrixXd b = (m.mass(k) * m.d_matrix(k - 1))(rows, cols);
        const Eigen::MatrixXd mlow = m.mass(k - 1)(cols, cols);
        Eigen::LLT<Eigen::MatrixXd> llt(mlow);
        if (llt.info() != Eigen::Success) throw Error(ErrorCode::FactorizationFailure, "mass block not SPD");
        l += b * llt.solve(b.transpose());
      }
    }
    l = 0.5 * (l + l.transpose()).eval();
    const KernelResult ker = generalized_kernel(l, m.mass(k)(rows, rows));
    out->matrix = Eigen::MatrixXd::Zero(nk, ker.basis.cols());
    out->matrix(rows, Eigen::all) = ker.basis;
  }
  for (Eigen::Index j = 0; j < out->matrix.cols(); ++j)
    out->basis.push_back(Cochain{k, out->matrix.col(j), m.complex().id()});
  slot = std::move(out);
  return *slot;
}

const Hodge::Projectors& Hodge::projectors(int k) const {
  require_degree(k);
  std::lock_guard<std::mutex> lock(mutex_);
  auto& slot = projectors_[k];
  if (slot) return *slot;
  const Metric& m = *metric_;
  const int n = m.dimension();
  auto p = std::make_unique<Projectors>();
  if (k > 0) {
    p->grad_span = m.d_matrix(k - 1);
    p->grad_gram_pinv = pseudo_inverse_symmetric(p->grad_span.transpose() * m.mass(k) * p->grad_span);
    p->exact_span = m.d_matrix(k - 1)(Eigen::all, m.interior_indices(k - 1));
    p->exact_gram_pinv = pseudo_inverse_symmetric(p->exact_span.transpose() * m.mass(k) * p->exact_span);
  }
  if (k < n) {
    const Eigen::MatrixXd dk = m.d_matrix(k);
    Eigen::MatrixXd map(dk.cols(), dk.rows());
    const Eigen::MatrixXd dkt = dk.transpose();
    for (Eigen::Index j = 0; j < dkt.cols(); ++j) map.col(j) = m.solve_mass(k, dkt.col(j));
    p->coexact_map = map;
    const Eigen::MatrixXd s = dk * map;
    p->coexact_gram_pinv = pseudo_inverse_symmetric(0.5 * (s + s.transpose()));
  }
  slot = std::move(p);
  return *slot;
}

Eigen::VectorXd Hodge::project_exact(int k, const Eigen::VectorXd& v) const {
  const Projectors& p = projectors(k);
  if (p.exact_span.cols() == 0) return Eigen::VectorXd::Zero(v.size());
  const Eigen::VectorXd rhs = p.exact_span.transpose() * (metric_->mass(k) * v);
  return p.exact_span * (p.exact_gram_pinv * rhs);
}

Eigen::VectorXd Hodge::project_gradients(int k, const Eigen::VectorXd& v) const {
  const Projectors& p = projectors(k);
  if (p.grad_span.cols() == 0) return Eigen::VectorXd::Zero(v.size());
  const Eigen::VectorXd rhs = p.grad_span.transpose() * (metric_->mass(k) * v);
  return p.grad_span * (p.grad_gram_pinv * rhs);
}

Eigen::VectorXd Hodge::project_coexact(int k, const Eigen::VectorXd& v) const {
  const Projectors& p = projectors(k);
  if (p.coexact_map.cols() == 0) return Eigen::VectorXd::Zero(v.size());
  return p.coexact_map * (p.coexact_gram_pinv * (metric_->d_matrix(k) * v));
}

HMFComponents Hodge::hodge_morrey_friedrichs(const Cochain& c) const {
  require_on(c, *metric_);
  const int k = c.degree;
  const Metric& m = *metric_;
  HMFComponents out;
  const Eigen::VectorXd exact = project_exact(k, c.values);
  const Eigen::VectorXd coexact = project_coexact(k, c.values);
  const Eigen::VectorXd h = c.values - exact - coexact;
  const Eigen::VectorXd lt = project_onto(harmonic_basis(k, BoundaryCondition::dirichlet).matrix, m.mass(k), h);
  out.d_alpha = Cochain{k, exact, c.complex_id};
  out.delta_beta = Cochain{k, coexact, c.complex_id};
  out.delta_gamma = Cochain{k, h - lt, c.complex_id};
  out.lambda_t = Cochain{k, lt, c.complex_id};

  const std::array<const Cochain*, 4> parts{&out.d_alpha, &out.delta_beta, &out.delta_gamma, &out.lambda_t};
  out.input_norm = norm(c, m);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.gram(i, j) = inner_product(*parts[i], *parts[j], m);
  for (int i = 0; i < 4; ++i) out.norms[i] = std::sqrt(std::max(out.gram(i, i), 0.0));
  const Cochain sum = out.d_alpha + out.delta_beta + out.delta_gamma + out.lambda_t;
  const double denom = out.input_norm > 0.0 ? out.input_norm : 1.0;
  out.reconstruction_residual = norm(sum - c, m) / denom;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) out.max_cross_term = std::max(out.max_cross_term, std::abs(out.gram(i, j)) / (denom * denom));
  return out;
}

FriedrichsSplit Hodge::friedrichs_split(const Cochain& h) const {
  require_on(h, *metric_);
  const int k = h.degree;
  const Metric& m = *metric_;
  const double hn = norm(h, m);
  const Cochain ex{k, project_exact(k, h.values), h.complex_id};
  const Cochain co{k, project_coexact(k, h.values), h.complex_id};
  if (norm(ex, m) + norm(co, m) > 1e-8 * hn)
    throw Error(ErrorCode::NotInHarmonicComplement, "input has exact or coexact components");

  FriedrichsSplit out;
  out.lambda_t = Cochain{k, project_onto(harmonic_basis(k, BoundaryCondition::dirichlet).matrix, m.mass(k), h.values),
                         h.complex_id};
  out.delta_gamma = h - out.lambda_t;
  out.lambda_n = Cochain{k, project_onto(harmonic_basis(k, BoundaryCondition::neumann).matrix, m.mass(k), h.values),
                         h.complex_id};
  out.d_epsilon = h - out.lambda_n;
  out.norms = {norm(out.lambda_t, m), norm(out.delta_gamma, m), norm(out.lambda_n, m), norm(out.d_epsilon, m)};
  return out;
}

std::vector<CohomologyRow> Hodge::cohomology_report() const {
  const int n = metric_->dimension();
  const std::vector<int> betti = betti_numbers_with_fallback(metric_->complex());
  std::vector<CohomologyRow> rows;
  for (int k = 0; k <= n; ++k) {
    CohomologyRow r;
    r.degree = k;
    r.dim_d = harmonic_basis(k, BoundaryCondition::neumann).dim();
    r.dim_delta = harmonic_basis(k, BoundaryCondition::dirichlet).dim();
    r.betti_k = betti[k];
    r.betti_dual = betti[n - k];
    rows.push_back(r);
  }
  return rows;
}

StokesDiracCohomology Hodge::stokes_dirac_cohomology(int p, int q) const {
  const int n = metric_->dimension();
  if (p + q != n + 1 || p < 1 || q < 1 || p > n || q > n)
    throw Error(ErrorCode::InvalidDegrees, "need p + q = n + 1 with 1 <= p, q <= n");
  StokesDiracCohomology out;
  out.neumann_q = harmonic_basis(q, BoundaryCondition::neumann).dim();
  out.dirichlet_p = harmonic_basis(p, BoundaryCondition::dirichlet).dim();
  out.neumann_p = harmonic_basis(p, BoundaryCondition::neumann).dim();
  out.dirichlet_q = harmonic_basis(q, BoundaryCondition::dirichlet).dim();
  return out;
}

VectorFieldDecomposition Hodge::decompose_vector_field_3d(const Eigen::MatrixXd& field, FieldLocation where) const {
  if (metric_->dimension() != 3) throw Error(ErrorCode::WrongDimension, "vector field decomposition needs n = 3");
  VectorFieldDecomposition out;
  out.flattened = flatten_vector_field(field, where, *metric_);
  out.gradient_part = Cochain{1, project_gradients(1, out.flattened.values), out.flattened.complex_id};
  out.knot_part = out.flattened - out.gradient_part;
  out.dim_harmonic_knots = harmonic_basis(1, BoundaryCondition::neumann).dim();
  out.dim_harmonic_gradients = harmonic_basis(2, BoundaryCondition::neumann).dim();
  return out;
}

}  // namespace hports
