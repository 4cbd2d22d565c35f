#include "hports/sim.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "hports/linalg.hpp"

namespace hports {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(part);
  return out;
}

template <typename T>
T parse_number(const std::string& s, const std::string& what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::InvalidInput, "bad " + what + " '" + s + "'");
  return value;
}

Eigen::VectorXd normals(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

InitialCondition parse_initial_condition(const std::string& text, std::uint64_t seed) {
  const auto parts = split(text, ':');
  InitialCondition ic;
  ic.seed = seed;
  if (parts.empty()) throw Error(ErrorCode::InvalidInput, "empty initial condition");
  if (parts[0] == "zero" && parts.size() == 1) {
    ic.kind = InitialCondition::Kind::zero;
  } else if (parts[0] == "random" && parts.size() <= 2) {
    ic.kind = InitialCondition::Kind::random;
    if (parts.size() == 2) ic.seed = parse_number<std::uint64_t>(parts[1], "seed");
  } else if (parts[0] == "harmonic" && parts.size() == 4) {
    ic.kind = InitialCondition::Kind::harmonic;
    ic.degree = parse_number<int>(parts[1], "degree");
    ic.index = parse_number<int>(parts[2], "basis index");
    ic.amplitude = parse_number<double>(parts[3], "amplitude");
  } else if (parts[0] == "bump" && parts.size() == 3) {
    ic.kind = InitialCondition::Kind::bump;
    ic.vertex = parse_number<int>(parts[1], "vertex");
    ic.width = parse_number<double>(parts[2], "width");
    if (!(ic.width > 0.0)) throw Error(ErrorCode::InvalidInput, "bump width must be positive");
  } else {
    throw Error(ErrorCode::InvalidInput, "unknown initial condition '" + text + "'");
  }
  return ic;
}

SDState initial_state(const StokesDiracSystem& sys, const InitialCondition& init) {
  const SimplicialComplex& c = sys.metric().complex();
  const int p = sys.p();
  SDState s = sys.zero_state();
  switch (init.kind) {
    case InitialCondition::Kind::zero:
      break;
    case InitialCondition::Kind::random: {
      std::mt19937_64 rng(init.seed);
      s.alpha_p.values = normals(c.count(p), rng);
      s.alpha_q_dual.values = normals(c.count(p - 1), rng);
      break;
    }
    case InitialCondition::Kind::harmonic: {
      if (init.degree != p && init.degree != sys.q())
        throw Error(ErrorCode::InvalidInput, "harmonic seed degree must be p or q");
      const bool on_p = init.degree == p;
      const auto& basis = sys.hodge().harmonic_basis(on_p ? p : p - 1, BoundaryCondition::neumann);
      if (init.index < 0 || init.index >= basis.dim())
        throw Error(ErrorCode::InvalidInput, "harmonic basis index " + std::to_string(init.index) + " out of range (dim " +
                                                 std::to_string(basis.dim()) + ")");
      (on_p ? s.alpha_p : s.alpha_q_dual).values = init.amplitude * basis.matrix.col(init.index);
      break;
    }
    case InitialCondition::Kind::bump: {
      if (init.vertex < 0 || init.vertex >= c.count(0))
        throw Error(ErrorCode::InvalidInput, "bump vertex out of range");
      const Eigen::VectorXd centre = c.vertex(init.vertex);
      auto profile = [&](const Simplex& simplex) {
        Eigen::VectorXd bary = Eigen::VectorXd::Zero(centre.size());
        for (int v : simplex) bary += c.vertex(v);
        bary /= static_cast<double>(simplex.size());
        return std::exp(-(bary - centre).squaredNorm() / (init.width * init.width));
      };
      Cochain& target = p == 1 ? s.alpha_q_dual : s.alpha_p;
      for (int i = 0; i < c.count(target.degree); ++i) target.values(i) = profile(c.simplices(target.degree)[i]);
      break;
    }
  }
  return s;
}

MidpointStepper::MidpointStepper(const StokesDiracSystem& sys, double dt, const SDState& boundary_state)
    : sys_(sys), dt_(dt) {
  sys_.validate(boundary_state);
  if (!std::isfinite(dt) || dt == 0.0) throw Error(ErrorCode::InvalidInput, "time step must be finite and nonzero");
  const Metric& m = sys_.metric();
  const int p = sys_.p();
  interior_ = m.interior_indices(p - 1);
  boundary_values_ = Eigen::VectorXd::Zero(m.complex().count(p - 1));
  for (int i : m.boundary_indices(p - 1)) boundary_values_(i) = boundary_state.alpha_q_dual.values(i);

  const Eigen::Index na = m.complex().count(p);
  const Eigen::Index ni = static_cast<Eigen::Index>(interior_.size());
  const double s = sys_.sign();
  const Eigen::MatrixXd& mp = m.mass(p);
  const Eigen::MatrixXd d = m.d_matrix(p - 1);
  const Eigen::MatrixXd md = mp * d(Eigen::all, interior_);

  mass_ = Eigen::MatrixXd::Zero(na + ni, na + ni);
  mass_.topLeftCorner(na, na) = mp;
  mass_.bottomRightCorner(ni, ni) = m.mass(p - 1)(interior_, interior_);
  skew_ = Eigen::MatrixXd::Zero(na + ni, na + ni);
  skew_.topRightCorner(na, ni) = -s * md;
  skew_.bottomLeftCorner(ni, na) = s * md.transpose();
  forcing_ = Eigen::VectorXd::Zero(na + ni);
  forcing_.head(na) = -s * (mp * (d * boundary_values_));

  lu_.compute(mass_ - 0.5 * dt_ * skew_);
  const double rc = lu_.rcond();
  if (!std::isfinite(rc) || rc < 1e-14) throw Error(ErrorCode::FactorizationFailure, "midpoint operator is singular");
  rhs_op_ = mass_ + 0.5 * dt_ * skew_;
}

Eigen::VectorXd MidpointStepper::pack(const SDState& s) const {
  const Eigen::Index na = s.alpha_p.values.size();
  Eigen::VectorXd x(na + static_cast<Eigen::Index>(interior_.size()));
  x.head(na) = s.alpha_p.values;
  x.tail(interior_.size()) = s.alpha_q_dual.values(interior_);
  return x;
}

SDState MidpointStepper::unpack(const Eigen::VectorXd& x) const {
  SDState s = sys_.zero_state();
  const Eigen::Index na = s.alpha_p.values.size();
  s.alpha_p.values = x.head(na);
  s.alpha_q_dual.values = boundary_values_;
  s.alpha_q_dual.values(interior_) = x.tail(interior_.size());
  return s;
}

SDState MidpointStepper::step(const SDState& s) const {
  sys_.validate(s);
  return unpack(lu_.solve(rhs_op_ * pack(s) + dt_ * forcing_));
}

double MidpointStepper::spectral_radius() const {
  if (mass_.rows() == 0) return 0.0;
  const Eigen::LLT<Eigen::MatrixXd> llt(mass_);
  std::mt19937_64 rng(12345);
  Eigen::VectorXd v = normals(mass_.rows(), rng);
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd w = llt.solve(skew_ * llt.solve(skew_ * v));
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    estimate = std::sqrt(nw);
    v = w / nw;
  }
  return estimate;
}

SDState step_implicit_midpoint(const StokesDiracSystem& sys, const SDState& s, double dt) {
  return MidpointStepper(sys, dt, s).step(s);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> harmonic_coefficients(const StokesDiracSystem& sys, const SDState& s) {
  const Metric& m = sys.metric();
  auto coefficients = [&](const Cochain& c) {
    const auto& n = sys.hodge().harmonic_basis(c.degree, BoundaryCondition::neumann).matrix;
    const auto& d = sys.hodge().harmonic_basis(c.degree, BoundaryCondition::dirichlet).matrix;
    const Eigen::VectorXd mc = m.mass(c.degree) * c.values;
    Eigen::VectorXd out(n.cols() + d.cols());
    out << n.transpose() * mc, d.transpose() * mc;
    return out;
  };
  return {coefficients(s.alpha_p), coefficients(s.alpha_q_dual)};
}

double Trace::max_relative_energy_drift() const {
  if (hamiltonian.empty()) return 0.0;
  const double h0 = hamiltonian.front();
  double worst = 0.0;
  for (double h : hamiltonian) worst = std::max(worst, std::abs(h - h0));
  return h0 > 0.0 ? worst / h0 : worst;
}

double Trace::max_harmonic_drift() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < harm_p.size(); ++i) {
    if (harm_p[i].size() > 0) worst = std::max(worst, (harm_p[i] - harm_p.front()).cwiseAbs().maxCoeff());
    if (harm_q[i].size() > 0) worst = std::max(worst, (harm_q[i] - harm_q.front()).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::string Trace::to_csv() const {
  std::ostringstream out;
  out << "t,H,dHdt_residual,boundary_power";
  if (!harm_p.empty()) {
    for (Eigen::Index j = 0; j < harm_p.front().size(); ++j) out << ",harm_p_" << j;
    for (Eigen::Index j = 0; j < harm_q.front().size(); ++j) out << ",harm_q_" << j;
  }
  out << "\n";
  for (std::size_t i = 0; i < size(); ++i) {
    out << format_double(t[i]) << ',' << format_double(hamiltonian[i]) << ',' << format_double(dHdt_residual[i])
        << ',' << format_double(boundary_power[i]);
    for (double v : harm_p[i]) out << ',' << format_double(v);
    for (double v : harm_q[i]) out << ',' << format_double(v);
    out << "\n";
  }
  return out.str();
}

Trace run(const StokesDiracSystem& sys, const SimulationConfig& config) {
  return run_from(sys, initial_state(sys, config.init), config);
}

Trace run_from(const StokesDiracSystem& sys, const SDState& start, const SimulationConfig& config) {
  if (!(config.dt > 0.0) || !std::isfinite(config.dt)) throw Error(ErrorCode::InvalidInput, "dt must be positive");
  if (config.steps < 1) throw Error(ErrorCode::InvalidInput, "steps must be positive");
  if (config.stride < 0) throw Error(ErrorCode::InvalidInput, "stride must be non-negative");
  const MidpointStepper stepper(sys, config.dt, start);

  Trace trace;
  trace.spectral_radius = stepper.spectral_radius();
  auto record = [&](int step, const SDState& s, double residual, double power) {
    trace.t.push_back(step * config.dt);
    trace.hamiltonian.push_back(sys.hamiltonian(s));
    trace.dHdt_residual.push_back(residual);
    trace.boundary_power.push_back(power);
    auto [hp, hq] = harmonic_coefficients(sys, s);
    trace.harm_p.push_back(std::move(hp));
    trace.harm_q.push_back(std::move(hq));
    if (config.stride > 0 && step % config.stride == 0) trace.snapshots.push_back({step, s});
  };

  SDState s = start;
  record(0, s, 0.0, sys.power_balance(s).boundary_term);
  for (int i = 1; i <= config.steps; ++i) {
    SDState next = stepper.step(s);
    const SDState mid{0.5 * (s.alpha_p + next.alpha_p), 0.5 * (s.alpha_q_dual + next.alpha_q_dual)};
    const PowerBalanceReport rep = sys.power_balance(mid);
    // H(next) - H(s) as <next - s, mid>, free of cancellation between energies
    const Metric& m = sys.metric();
    const double rate = (inner_product(next.alpha_p - s.alpha_p, mid.alpha_p, m) +
                         inner_product(next.alpha_q_dual - s.alpha_q_dual, mid.alpha_q_dual, m)) /
                        config.dt;
    const double err = std::abs(rate - rep.boundary_term);
    // largest power the midpoint state can exchange: |x|^2 times the spectral radius
    const double scale = rep.power_scale + 2.0 * sys.hamiltonian(mid) * trace.spectral_radius;
    record(i, next, scale > 0.0 ? err / scale : err, rep.boundary_term);
    s = std::move(next);
  }
  trace.final_state = s;
  return trace;
}

}  // namespace hports
