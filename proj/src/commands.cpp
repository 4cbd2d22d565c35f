#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>

#include "hports/cli.hpp"
#include "hports/generators.hpp"
#include "hports/mesh_io.hpp"
#include "hports/sim.hpp"

namespace hports::cli {

using nlohmann::ordered_json;

namespace {

SimplicialComplex load_mesh(const std::string& path) {
  const MeshData data = read_mesh_file(path);
  return build_complex(data.simplices, data.vertices);
}

std::shared_ptr<const Hodge> load_hodge(const std::string& path) {
  return std::make_shared<const Hodge>(std::make_shared<const Metric>(load_mesh(path)));
}

ordered_json matrix_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

ordered_json state_json(const SDState& s) {
  return {{"alpha_p", cochain_to_json(s.alpha_p)}, {"alpha_q_dual", cochain_to_json(s.alpha_q_dual)}};
}

SDState read_state(const std::string& path, const StokesDiracSystem& sys) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("alpha_p") || !j.contains("alpha_q_dual"))
    throw Error(ErrorCode::InvalidInput, "state needs 'alpha_p' and 'alpha_q_dual'");
  const SimplicialComplex& c = sys.metric().complex();
  SDState s{cochain_from_json(j.at("alpha_p"), c), cochain_from_json(j.at("alpha_q_dual"), c)};
  sys.validate(s);
  return s;
}

// Records one tolerance check; returns whether it passed.
bool check(ordered_json& checks, const std::string& name, double value, double tol) {
  const bool pass = std::isfinite(value) && value <= tol;
  checks.push_back({{"name", name}, {"value", value}, {"tolerance", tol}, {"pass", pass}});
  return pass;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

}  // namespace

ExitCode exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::FactorizationFailure:
    case ErrorCode::AmbiguousKernel:
    case ErrorCode::SolverFailure:
    case ErrorCode::OverflowInExactArithmetic:
    case ErrorCode::NotWellCentered:
      return numerical_failure;
    case ErrorCode::NonOrientable:
    case ErrorCode::NotInHarmonicComplement:
      return check_failed;
    default:
      return io_failure;
  }
}

double tolerance_scale() {
  const char* env = std::getenv("HARMONIC_PORTS_TOL_SCALE");
  if (env == nullptr || *env == '\0') return 1.0;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (*end != '\0' || !std::isfinite(v) || v <= 0.0)
    throw Error(ErrorCode::InvalidInput, "HARMONIC_PORTS_TOL_SCALE must be a positive number");
  return v;
}

CommandResult cmd_gen(const GenOptions& o) {
  const auto shape = parse_shape(o.shape);
  if (!shape) throw Error(ErrorCode::UnknownShape, "unknown shape '" + o.shape + "'");
  const SimplicialComplex c = gen_mesh(*shape, o.resolution);
  const std::string out = o.out.empty() ? o.shape + "-" + std::to_string(o.resolution) + ".json" : o.out;
  write_text_file(out, write_mesh_json(c));

  CommandResult r;
  r.report = {{"command", "gen"},       {"seed", o.seed},
              {"shape", o.shape},       {"resolution", o.resolution},
              {"out", out},             {"dimension", c.dimension()},
              {"counts", c.counts()},   {"euler_characteristic", euler_characteristic(c)}};
  r.summary.push_back("wrote " + out + ": " + std::to_string(c.count(0)) + " vertices, chi = " +
                      std::to_string(euler_characteristic(c)));
  return r;
}

CommandResult cmd_analyze(const MeshOptions& o) {
  CommandResult r;
  r.report = {{"command", "analyze"}, {"seed", o.seed}, {"mesh", o.mesh}};
  const MeshData data = read_mesh_file(o.mesh);
  SimplicialComplex c;
  try {
    c = build_complex(data.simplices, data.vertices);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonOrientable) throw;
    r.report["validation"] = {{"valid", false},
                              {"findings", {{{"kind", "non_orientable"}, {"simplex", nullptr}, {"detail", e.what()}}}}};
    r.exit_code = check_failed;
    r.summary.push_back("validation failed: mesh is not orientable");
    return r;
  }
  r.report["dimension"] = c.dimension();
  r.report["counts"] = c.counts();

  const ValidationReport validation = validate_manifold(c);
  ordered_json findings = ordered_json::array();
  for (const Finding& f : validation.findings)
    findings.push_back({{"kind", to_string(f.kind)}, {"simplex", f.simplex}, {"detail", f.detail}});
  r.report["validation"] = {{"valid", validation.valid()}, {"findings", findings}};
  if (!validation.valid()) {
    r.exit_code = check_failed;
    r.summary.push_back("validation failed with " + std::to_string(findings.size()) + " finding(s)");
    for (const Finding& f : validation.findings) r.summary.push_back("  " + std::string(to_string(f.kind)));
    return r;
  }

  bool fallback = false;
  const auto betti = betti_numbers_with_fallback(c, &fallback);
  r.report["betti"] = betti;
  r.report["betti_method"] = fallback ? "floating" : "exact";
  r.report["euler_characteristic"] = euler_characteristic(c);

  const auto metric = std::make_shared<const Metric>(c);
  const Hodge hodge(metric);
  const BoundaryComplex& bc = metric->boundary();
  r.report["boundary"] = {{"empty", bc.empty()},
                          {"counts", bc.empty() ? std::vector<int>{} : bc.complex.counts()}};
  ordered_json table = ordered_json::array();
  bool consistent = true;
  for (const CohomologyRow& row : hodge.cohomology_report()) {
    table.push_back({{"degree", row.degree},
                     {"neumann", row.dim_d},
                     {"dirichlet", row.dim_delta},
                     {"betti", row.betti_k},
                     {"betti_dual", row.betti_dual},
                     {"consistent", row.consistent()}});
    consistent = consistent && row.consistent();
    r.summary.push_back("k=" + std::to_string(row.degree) + ": dim H_N = " + std::to_string(row.dim_d) +
                        ", dim H_D = " + std::to_string(row.dim_delta) + ", b_k = " + std::to_string(row.betti_k));
  }
  r.report["harmonic_dimensions"] = table;
  r.report["hodge_isomorphism_consistent"] = consistent;
  r.report["well_centered"] = metric->well_centered();
  if (!consistent) r.exit_code = check_failed;
  return r;
}

CommandResult cmd_decompose(const DecomposeOptions& o) {
  if (o.state.empty()) throw Error(ErrorCode::InvalidInput, "--state is required");
  const auto hodge = load_hodge(o.mesh);
  const Metric& m = hodge->metric();
  const Cochain c = read_cochain_file(o.state, m.complex());
  const HMFComponents parts = hodge->hodge_morrey_friedrichs(c);
  const double tol = 1e-8 * tolerance_scale();

  CommandResult r;
  ordered_json checks = ordered_json::array();
  bool pass = check(checks, "reconstruction_residual", parts.reconstruction_residual, tol);
  pass = check(checks, "max_cross_term", parts.max_cross_term, tol) && pass;
  r.report = {{"command", "decompose"},
              {"seed", o.seed},
              {"mesh", o.mesh},
              {"degree", c.degree},
              {"input_norm", parts.input_norm},
              {"norms",
               {{"d_alpha", parts.norms[0]},
                {"delta_beta", parts.norms[1]},
                {"delta_gamma", parts.norms[2]},
                {"lambda_t", parts.norms[3]}}},
              {"gram", matrix_json(parts.gram)},
              {"reconstruction_residual", parts.reconstruction_residual},
              {"max_cross_term", parts.max_cross_term},
              {"checks", checks},
              {"pass", pass}};
  if (!o.out.empty()) {
    ordered_json full = {{"components",
                          {{"d_alpha", cochain_to_json(parts.d_alpha)},
                           {"delta_beta", cochain_to_json(parts.delta_beta)},
                           {"delta_gamma", cochain_to_json(parts.delta_gamma)},
                           {"lambda_t", cochain_to_json(parts.lambda_t)}}}};
    for (auto bc : {BoundaryCondition::neumann, BoundaryCondition::dirichlet}) {
      ordered_json arr = ordered_json::array();
      for (const Cochain& b : hodge->harmonic_basis(c.degree, bc).basis) arr.push_back(cochain_to_json(b));
      full["harmonic_basis"][std::string(to_string(bc))] = arr;
    }
    write_text_file(o.out, full.dump(2) + "\n");
    r.report["out"] = o.out;
  }
  r.summary.push_back("norms: d_alpha " + fmt(parts.norms[0]) + ", delta_beta " + fmt(parts.norms[1]) +
                      ", delta_gamma " + fmt(parts.norms[2]) + ", lambda_t " + fmt(parts.norms[3]));
  r.summary.push_back("reconstruction " + fmt(parts.reconstruction_residual) + ", cross term " +
                      fmt(parts.max_cross_term));
  if (!pass) r.exit_code = check_failed;
  return r;
}

CommandResult cmd_sd_verify(const VerifyOptions& o) {
  const auto hodge = load_hodge(o.mesh);
  const StokesDiracSystem sys(hodge, o.p, o.q);
  const Metric& m = sys.metric();
  const bool closed = m.boundary().empty();
  const double scale = tolerance_scale();
  const double balance_tol = (closed ? 1e-12 : 1e-10) * scale;

  std::vector<SDState> states;
  if (!o.state.empty()) {
    states.push_back(read_state(o.state, sys));
  } else {
    if (o.random_states < 1) throw Error(ErrorCode::InvalidInput, "--random-states must be positive");
    for (int i = 0; i < o.random_states; ++i) {
      InitialCondition ic;
      ic.kind = InitialCondition::Kind::random;
      ic.seed = o.seed + static_cast<std::uint64_t>(i);
      states.push_back(initial_state(sys, ic));
    }
  }

  CommandResult r;
  bool pass = true;
  double worst_balance = 0.0, worst_harmonic = 0.0;
  ordered_json reports = ordered_json::array();
  for (const SDState& s : states) {
    const PowerBalanceReport pb = sys.extended_power_balance(s);
    const HarmonicFlowResiduals hf = sys.harmonic_flow_identity(s);
    const Efforts e = sys.efforts(s);
    const Flows f = sys.flows(e);
    const Cochain potential = sys.sign() * e.e_q;
    const IntegrabilityVerdict iv = integrability_check(f.f_p, tangential_trace(potential, m), *hodge);

    ordered_json checks = ordered_json::array();
    bool ok_state = check(checks, "balance_residual", pb.balance_residual, balance_tol);
    ok_state = check(checks, "split_residual", pb.split_residual, 1e-8 * scale) && ok_state;
    ok_state = check(checks, "harmonic_flow_identity", hf.max(), 1e-10 * scale) && ok_state;
    if (f.f_p.degree < m.dimension()) {
      const Cochain df = exterior_derivative(f.f_p, m);
      const double rel = df.values.norm() / std::max(f.f_p.values.norm(), 1e-300);
      ok_state = check(checks, "flow_closedness", rel, 1e-12 * scale) && ok_state;
    }
    checks.push_back({{"name", "flow_integrable"}, {"pass", iv.solvable}});
    ok_state = iv.solvable && ok_state;
    pass = pass && ok_state;
    worst_balance = std::max(worst_balance, pb.balance_residual);
    worst_harmonic = std::max(worst_harmonic, hf.max());

    reports.push_back({{"hamiltonian", pb.hamiltonian},
                       {"dH_dt", pb.dH_dt},
                       {"internal_term", pb.internal_term},
                       {"boundary_term", pb.boundary_term},
                       {"exact_boundary_part", pb.exact_boundary_part},
                       {"harmonic_boundary_part", pb.harmonic_boundary_part},
                       {"power_scale", pb.power_scale},
                       {"balance_residual", pb.balance_residual},
                       {"split_residual", pb.split_residual},
                       {"flow_potential_residual", pb.flow_potential_residual},
                       {"harmonic_flow", {{"p_side", hf.p_side}, {"q_side", hf.q_side}}},
                       {"checks", checks},
                       {"pass", ok_state}});
  }

  // a random p-cochain is not closed below the top degree
  ordered_json spot = ordered_json::array();
  if (o.p < m.dimension()) {
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> g;
    Eigen::VectorXd v(m.complex().count(o.p));
    for (auto& x : v) x = g(rng);
    const Cochain f = Cochain::from_values(m.complex(), o.p, v);
    const Cochain psi = Cochain{o.p - 1, Eigen::VectorXd::Zero(m.boundary().complex.count(o.p - 1)),
                                m.boundary().complex.id()};
    const IntegrabilityVerdict iv = integrability_check(f, psi, *hodge);
    ordered_json violations = ordered_json::array();
    for (const auto& viol : iv.violations) violations.push_back(viol.condition);
    spot.push_back({{"case", "random_non_closed"}, {"expected", false}, {"solvable", iv.solvable},
                    {"violations", violations}});
    pass = pass && !iv.solvable;
  }

  r.report = {{"command", "sd-verify"},
              {"seed", o.seed},
              {"mesh", o.mesh},
              {"p", o.p},
              {"q", o.q},
              {"closed", closed},
              {"states", static_cast<int>(states.size())},
              {"reports", reports},
              {"integrability_spot_checks", spot},
              {"pass", pass}};
  r.summary.push_back(std::to_string(states.size()) + " state(s): worst balance " + fmt(worst_balance) +
                      ", worst harmonic identity " + fmt(worst_harmonic));
  if (!o.out.empty()) write_text_file(o.out, r.report.dump(2) + "\n");
  if (!pass) r.exit_code = check_failed;
  return r;
}

CommandResult cmd_simulate(const SimulateOptions& o) {
  const auto hodge = load_hodge(o.mesh);
  const StokesDiracSystem sys(hodge, o.p, o.q);
  if (o.steps < 1) throw Error(ErrorCode::InvalidInput, "--steps must be positive");
  if (!(o.dt > 0.0) || !std::isfinite(o.dt)) throw Error(ErrorCode::InvalidInput, "--dt must be positive");
  if (o.stride < 0) throw Error(ErrorCode::InvalidInput, "--stride must be non-negative");
  SimulationConfig config;
  config.dt = o.dt;
  config.steps = o.steps;
  config.stride = o.stride;
  config.init = parse_initial_condition(o.init, o.seed);
  const Trace tr = run(sys, config);

  write_text_file(o.out, tr.to_csv());
  std::string snapshot_dir;
  if (!tr.snapshots.empty()) {
    snapshot_dir = o.out + ".snapshots";
    std::error_code ec;
    std::filesystem::create_directories(snapshot_dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create '" + snapshot_dir + "'");
    for (const Snapshot& snap : tr.snapshots) {
      char name[32];
      std::snprintf(name, sizeof name, "/step_%06d.json", snap.step);
      ordered_json j = {{"step", snap.step}, {"t", snap.step * o.dt}};
      j.update(state_json(snap.state));
      write_text_file(snapshot_dir + name, j.dump() + "\n");
    }
  }

  const bool closed = sys.metric().boundary().empty();
  const double scale = tolerance_scale();
  double worst_rate = 0.0;
  for (double x : tr.dHdt_residual) worst_rate = std::max(worst_rate, x);
  ordered_json checks = ordered_json::array();
  bool pass = check(checks, "dHdt_residual", worst_rate, 1e-8 * scale);
  if (closed) {
    pass = check(checks, "relative_energy_drift", tr.max_relative_energy_drift(), 1e-10 * scale) && pass;
    pass = check(checks, "harmonic_drift", tr.max_harmonic_drift(), 1e-8 * scale) && pass;
  }

  CommandResult r;
  r.report = {{"command", "simulate"},
              {"seed", o.seed},
              {"mesh", o.mesh},
              {"p", o.p},
              {"q", o.q},
              {"dt", o.dt},
              {"steps", o.steps},
              {"init", o.init},
              {"integrator", "implicit_midpoint"},
              {"spectral_radius", tr.spectral_radius},
              {"dt_times_spectral_radius", o.dt * tr.spectral_radius},
              {"initial_hamiltonian", tr.hamiltonian.front()},
              {"final_hamiltonian", tr.hamiltonian.back()},
              {"max_relative_energy_drift", tr.max_relative_energy_drift()},
              {"max_harmonic_drift", tr.max_harmonic_drift()},
              {"max_dHdt_residual", worst_rate},
              {"trace", o.out},
              {"snapshots", tr.snapshots.size()},
              {"snapshot_dir", snapshot_dir},
              {"checks", checks},
              {"pass", pass}};
  r.summary.push_back("wrote " + o.out + " (" + std::to_string(tr.size()) + " rows), energy drift " +
                      fmt(tr.max_relative_energy_drift()) + ", dt*rho = " + fmt(o.dt * tr.spectral_radius));
  if (!pass) r.exit_code = check_failed;
  return r;
}

}  // namespace hports::cli
