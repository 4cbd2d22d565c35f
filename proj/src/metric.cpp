#include "hports/metric.hpp"

#include <cmath>
#include <functional>
#include <numeric>

namespace hports {

namespace {

void require_bound(const Cochain& c, const SimplicialComplex& complex) {
  if (c.complex_id != complex.id())
    throw Error(ErrorCode::ComplexMismatch, "cochain belongs to another complex");
  if (c.degree < 0 || c.degree > complex.dimension())
    throw Error(ErrorCode::DegreeOutOfRange, "degree " + std::to_string(c.degree));
  if (c.values.size() != complex.count(c.degree))
    throw Error(ErrorCode::InvalidInput, "cochain length does not match simplex count");
}

void require_compatible(const Cochain& a, const Cochain& b) {
  if (a.complex_id != b.complex_id) throw Error(ErrorCode::ComplexMismatch, "cochains on different complexes");
  if (a.degree != b.degree) throw Error(ErrorCode::DegreeMismatch, "cochain degrees differ");
}

std::vector<std::vector<int>> combinations(int n_points, int size) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == size) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n_points; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

Eigen::MatrixXd simplex_points(const SimplicialComplex& c, const Simplex& s) {
  Eigen::MatrixXd p(c.ambient_dimension(), static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) p.col(i) = c.coordinates().col(s[i]);
  return p;
}

// Circumcentre and its barycentric coordinates.
std::pair<Eigen::VectorXd, Eigen::VectorXd> circumcentre(const Eigen::MatrixXd& p) {
  const Eigen::Index k = p.cols() - 1;
  Eigen::VectorXd bary(k + 1);
  if (k == 0) {
    bary(0) = 1.0;
    return {p.col(0), bary};
  }
  Eigen::MatrixXd e(p.rows(), k);
  for (Eigen::Index i = 0; i < k; ++i) e.col(i) = p.col(i + 1) - p.col(0);
  const Eigen::MatrixXd g = e.transpose() * e;
  Eigen::VectorXd rhs(k);
  for (Eigen::Index i = 0; i < k; ++i) rhs(i) = 0.5 * e.col(i).squaredNorm();
  const Eigen::VectorXd x = g.ldlt().solve(rhs);
  bary(0) = 1.0 - x.sum();
  bary.tail(k) = x;
  return {p.col(0) + e * x, bary};
}

}  // namespace

Cochain Cochain::zero(const SimplicialComplex& c, int k) {
  if (k < 0 || k > c.dimension()) throw Error(ErrorCode::DegreeOutOfRange, "degree " + std::to_string(k));
  return Cochain{k, Eigen::VectorXd::Zero(c.count(k)), c.id()};
}

Cochain Cochain::from_values(const SimplicialComplex& c, int k, Eigen::VectorXd values) {
  Cochain out{k, std::move(values), c.id()};
  require_bound(out, c);
  if (!out.values.allFinite()) throw Error(ErrorCode::InvalidInput, "non-finite cochain value");
  return out;
}

Cochain& Cochain::operator+=(const Cochain& o) {
  require_compatible(*this, o);
  values += o.values;
  return *this;
}

Cochain& Cochain::operator-=(const Cochain& o) {
  require_compatible(*this, o);
  values -= o.values;
  return *this;
}

Cochain& Cochain::operator*=(double s) {
  values *= s;
  return *this;
}

Cochain operator+(Cochain a, const Cochain& b) { return a += b; }
Cochain operator-(Cochain a, const Cochain& b) { return a -= b; }
Cochain operator*(double s, Cochain a) { return a *= s; }

double DualRepresentation::apply(const Cochain& eta) const {
  if (eta.complex_id != complex_id) throw Error(ErrorCode::ComplexMismatch, "functional on another complex");
  if (eta.degree != degree) throw Error(ErrorCode::DegreeMismatch, "functional degree differs");
  return covector.dot(eta.values);
}

double simplex_volume(const Eigen::MatrixXd& p) {
  const Eigen::Index k = p.cols() - 1;
  if (k <= 0) return 1.0;
  Eigen::MatrixXd e(p.rows(), k);
  for (Eigen::Index i = 0; i < k; ++i) e.col(i) = p.col(i + 1) - p.col(0);
  const double det = (e.transpose() * e).determinant();
  return std::sqrt(std::max(det, 0.0)) / factorial(static_cast<int>(k));
}

Eigen::MatrixXd whitney_local_mass(const Eigen::MatrixXd& p, int k) {
  const int n = static_cast<int>(p.cols()) - 1;
  Eigen::MatrixXd e(p.rows(), n);
  for (int i = 0; i < n; ++i) e.col(i) = p.col(i + 1) - p.col(0);
  const Eigen::MatrixXd g = e.transpose() * e;
  Eigen::MatrixXd grads(p.rows(), n + 1);
  grads.rightCols(n) = e * g.inverse();
  grads.col(0) = -grads.rightCols(n).rowwise().sum();
  const Eigen::MatrixXd gram = grads.transpose() * grads;
  const double vol = std::sqrt(g.determinant()) / factorial(n);

  // integral of lambda_a * lambda_b over the simplex
  auto bary_product = [&](int a, int b) { return vol * (a == b ? 2.0 : 1.0) / ((n + 1.0) * (n + 2.0)); };
  auto wedge_gram = [&](const std::vector<int>& a, const std::vector<int>& b) {
    if (a.empty()) return 1.0;
    Eigen::MatrixXd m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = gram(a[i], b[j]);
    return m.determinant();
  };
  auto without = [](const std::vector<int>& s, std::size_t i) {
    std::vector<int> out;
    for (std::size_t j = 0; j < s.size(); ++j)
      if (j != i) out.push_back(s[j]);
    return out;
  };

  const auto faces = combinations(n + 1, k + 1);
  const double scale = factorial(k) * factorial(k);
  Eigen::MatrixXd local(faces.size(), faces.size());
  for (std::size_t s = 0; s < faces.size(); ++s)
    for (std::size_t t = s; t < faces.size(); ++t) {
      double acc = 0.0;
      for (std::size_t i = 0; i <= static_cast<std::size_t>(k); ++i)
        for (std::size_t j = 0; j <= static_cast<std::size_t>(k); ++j) {
          const double sign = (i + j) % 2 == 0 ? 1.0 : -1.0;
          acc += sign * bary_product(faces[s][i], faces[t][j]) *
                 wedge_gram(without(faces[s], i), without(faces[t], j));
        }
      local(s, t) = local(t, s) = scale * acc;
    }
  return local;
}

Metric::Metric(SimplicialComplex complex) : complex_(std::move(complex)) {
  boundary_ = extract_boundary(complex_);
  const int n = complex_.dimension();
  mass_.resize(n + 1);
  for (int k = 0; k <= n; ++k) mass_[k] = Eigen::MatrixXd::Zero(complex_.count(k), complex_.count(k));

  std::vector<std::vector<std::vector<int>>> local_faces(n + 1);
  for (int k = 0; k <= n; ++k) local_faces[k] = combinations(n + 1, k + 1);
  for (const Simplex& top : complex_.simplices(n)) {
    const Eigen::MatrixXd p = simplex_points(complex_, top);
    if (simplex_volume(p) <= 0.0) throw Error(ErrorCode::FactorizationFailure, "degenerate top simplex");
    for (int k = 0; k <= n; ++k) {
      const Eigen::MatrixXd local = whitney_local_mass(p, k);
      std::vector<int> global;
      for (const auto& f : local_faces[k]) {
        Simplex s;
        for (int i : f) s.push_back(top[i]);
        global.push_back(*complex_.index_of(s));
      }
      for (std::size_t a = 0; a < global.size(); ++a)
        for (std::size_t b = 0; b < global.size(); ++b) mass_[k](global[a], global[b]) += local(a, b);
    }
  }

  chol_.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    if (mass_[k].size() == 0) continue;
    const double asym = (mass_[k] - mass_[k].transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * mass_[k].cwiseAbs().maxCoeff())
      throw Error(ErrorCode::FactorizationFailure, "mass matrix not symmetric");
    chol_[k].compute(mass_[k]);
    if (chol_[k].info() != Eigen::Success)
      throw Error(ErrorCode::FactorizationFailure, "mass matrix of degree " + std::to_string(k) + " not SPD");
  }

  for (int k = 0; k < n; ++k) d_.push_back(Eigen::MatrixXd(complex_.boundary(k + 1).cast<double>()).transpose());

  on_boundary_.assign(n + 1, {});
  interior_.assign(n + 1, {});
  boundary_flag_.assign(n + 1, {});
  inclusion_.assign(n + 1, {});
  for (int k = 0; k <= n; ++k) {
    boundary_flag_[k].assign(complex_.count(k), false);
    if (k < n && !boundary_.empty()) {
      for (int p : boundary_.parent[k]) boundary_flag_[k][p] = true;
      inclusion_[k] = Eigen::MatrixXd(boundary_.inclusion(k, complex_.count(k)).cast<double>());
    } else {
      inclusion_[k] = Eigen::MatrixXd::Zero(complex_.count(k), k < n ? boundary_.complex.count(k) : 0);
    }
    for (int i = 0; i < complex_.count(k); ++i)
      (boundary_flag_[k][i] ? on_boundary_[k] : interior_[k]).push_back(i);
  }

  interior_chol_.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    if (interior_[k].empty()) continue;
    interior_chol_[k].compute(mass_[k](interior_[k], interior_[k]));
    if (interior_chol_[k].info() != Eigen::Success)
      throw Error(ErrorCode::FactorizationFailure, "interior mass block of degree " + std::to_string(k));
  }
}

Eigen::VectorXd Metric::solve_interior_mass(int k, const Eigen::VectorXd& rhs) const {
  if (rhs.size() == 0) return rhs;
  return interior_chol_.at(k).solve(rhs);
}

Eigen::VectorXd Metric::solve_mass(int k, const Eigen::VectorXd& rhs) const {
  if (rhs.size() == 0) return rhs;
  return chol_.at(k).solve(rhs);
}

bool Metric::well_centered() const {
  for (int k = 2; k <= dimension(); ++k)
    for (const Simplex& s : complex_.simplices(k)) {
      const auto [centre, bary] = circumcentre(simplex_points(complex_, s));
      if (bary.minCoeff() <= 1e-12) return false;
    }
  return true;
}

Eigen::VectorXd Metric::diagonal_star(int k) const {
  const int n = dimension();
  if (k < 0 || k > n) throw Error(ErrorCode::DegreeOutOfRange, "degree " + std::to_string(k));
  if (!well_centered()) throw Error(ErrorCode::NotWellCentered, "a circumcentre lies outside its simplex");

  // cofaces[j][i]: (j+1)-simplices containing j-simplex i
  std::vector<std::vector<std::vector<int>>> cofaces(n + 1);
  for (int j = 0; j < n; ++j) {
    cofaces[j].assign(complex_.count(j), {});
    const IntSparse& b = complex_.boundary(j + 1);
    for (int col = 0; col < b.outerSize(); ++col)
      for (IntSparse::InnerIterator it(b, col); it; ++it) cofaces[j][it.row()].push_back(col);
  }
  auto centre_of = [&](int j, int i) { return circumcentre(simplex_points(complex_, complex_.simplices(j)[i])).first; };

  Eigen::VectorXd ratios(complex_.count(k));
  for (int i = 0; i < complex_.count(k); ++i) {
    double dual = 0.0;
    if (k == n) {
      dual = 1.0;
    } else {
      std::vector<Eigen::VectorXd> chain{centre_of(k, i)};
      std::function<void(int, int)> walk = [&](int j, int idx) {
        if (j == n) {
          Eigen::MatrixXd pts(chain.front().size(), static_cast<Eigen::Index>(chain.size()));
          for (std::size_t c = 0; c < chain.size(); ++c) pts.col(c) = chain[c];
          dual += simplex_volume(pts);
          return;
        }
        for (int up : cofaces[j][idx]) {
          chain.push_back(centre_of(j + 1, up));
          walk(j + 1, up);
          chain.pop_back();
        }
      };
      walk(k, i);
    }
    ratios(i) = dual / simplex_volume(simplex_points(complex_, complex_.simplices(k)[i]));
  }
  return ratios;
}

Cochain exterior_derivative(const Cochain& c, const Metric& m) {
  require_bound(c, m.complex());
  if (c.degree >= m.dimension()) throw Error(ErrorCode::DegreeOutOfRange, "d of a top-degree cochain");
  return Cochain{c.degree + 1, m.d_matrix(c.degree) * c.values, c.complex_id};
}

Cochain codifferential(const Cochain& c, const Metric& m) {
  require_bound(c, m.complex());
  if (c.degree < 1) throw Error(ErrorCode::DegreeOutOfRange, "codifferential of a 0-cochain");
  const int k = c.degree;
  const Eigen::VectorXd rhs = m.d_matrix(k - 1).transpose() * (m.mass(k) * c.values);
  return Cochain{k - 1, m.solve_mass(k - 1, rhs), c.complex_id};
}

Cochain constrained_codifferential(const Cochain& c, const Metric& m) {
  require_bound(c, m.complex());
  if (c.degree < 1) throw Error(ErrorCode::DegreeOutOfRange, "codifferential of a 0-cochain");
  const int k = c.degree;
  const auto& interior = m.interior_indices(k - 1);
  Cochain out = Cochain::zero(m.complex(), k - 1);
  if (interior.empty()) return out;
  const Eigen::VectorXd full = m.d_matrix(k - 1).transpose() * (m.mass(k) * c.values);
  out.values(interior) = m.solve_interior_mass(k - 1, full(interior));
  return out;
}

double inner_product(const Cochain& a, const Cochain& b, const Metric& m) {
  require_compatible(a, b);
  require_bound(a, m.complex());
  return a.values.dot(m.mass(a.degree) * b.values);
}

double norm(const Cochain& a, const Metric& m) { return std::sqrt(std::max(inner_product(a, a, m), 0.0)); }

DualRepresentation hodge_star(const Cochain& c, const Metric& m) {
  require_bound(c, m.complex());
  return DualRepresentation{c.degree, m.mass(c.degree) * c.values, c.complex_id};
}

Eigen::VectorXd hodge_star_image(const Cochain& c, const Metric& m) {
  require_bound(c, m.complex());
  return m.diagonal_star(c.degree).cwiseProduct(c.values);
}

Cochain tangential_trace(const Cochain& c, const Metric& m) {
  require_bound(c, m.complex());
  if (c.degree > m.dimension() - 1) throw Error(ErrorCode::DegreeOutOfRange, "trace of a top-degree cochain");
  const SimplicialComplex& bc = m.boundary().complex;
  return Cochain{c.degree, m.inclusion(c.degree).transpose() * c.values, bc.id()};
}

Cochain extend_by_zero(const Cochain& boundary_cochain, const Metric& m) {
  require_bound(boundary_cochain, m.boundary().complex);
  return Cochain{boundary_cochain.degree, m.inclusion(boundary_cochain.degree) * boundary_cochain.values,
                 m.complex().id()};
}

Eigen::VectorXd normal_trace_functional(const Cochain& b, const Metric& m) {
  require_bound(b, m.complex());
  if (b.degree < 1) throw Error(ErrorCode::DegreeOutOfRange, "normal trace needs degree >= 1");
  const int k = b.degree;
  const Cochain delta = constrained_codifferential(b, m);
  const Eigen::VectorXd residual =
      m.d_matrix(k - 1).transpose() * (m.mass(k) * b.values) - m.mass(k - 1) * delta.values;
  return m.inclusion(k - 1).transpose() * residual;
}

double boundary_pairing(const Cochain& a, const Cochain& b, const Metric& m) {
  if (a.degree + 1 != b.degree) throw Error(ErrorCode::DegreeMismatch, "boundary pairing needs deg b = deg a + 1");
  const Cochain trace = tangential_trace(a, m);
  return trace.values.dot(normal_trace_functional(b, m));
}

StokesSides stokes_check(const Cochain& c, const Metric& m) {
  require_bound(c, m.complex());
  const int n = m.dimension();
  if (c.degree != n - 1) throw Error(ErrorCode::DegreeMismatch, "Stokes check needs an (n-1)-cochain");
  const int count = m.complex().count(n - 1);
  std::vector<long long> lhs_coef(count, 0), rhs_coef(count, 0);
  const IntSparse& b = m.complex().boundary(n);
  for (int col = 0; col < b.outerSize(); ++col)
    for (IntSparse::InnerIterator it(b, col); it; ++it) lhs_coef[it.row()] += it.value();
  const BoundaryComplex& bc = m.boundary();
  if (!bc.empty())
    for (std::size_t j = 0; j < bc.parent[n - 1].size(); ++j) rhs_coef[bc.parent[n - 1][j]] += bc.relative_sign[n - 1][j];

  StokesSides out;
  for (int f = 0; f < count; ++f) {
    out.lhs += static_cast<double>(lhs_coef[f]) * c.values(f);
    out.rhs += static_cast<double>(rhs_coef[f]) * c.values(f);
  }
  out.same_combination = lhs_coef == rhs_coef;
  return out;
}

double green_defect(const Cochain& a, const Cochain& b, const Metric& m) {
  if (a.degree + 1 != b.degree) throw Error(ErrorCode::DegreeMismatch, "Green defect needs deg b = deg a + 1");
  return inner_product(exterior_derivative(a, m), b, m) - inner_product(a, codifferential(b, m), m);
}

double green_defect_constrained(const Cochain& a, const Cochain& b, const Metric& m) {
  if (a.degree + 1 != b.degree) throw Error(ErrorCode::DegreeMismatch, "Green defect needs deg b = deg a + 1");
  return inner_product(exterior_derivative(a, m), b, m) - inner_product(a, constrained_codifferential(b, m), m);
}

}  // namespace hports
