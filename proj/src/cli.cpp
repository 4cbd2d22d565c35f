#include "hports/cli.hpp"

#include <CLI11.hpp>

namespace hports::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stokes-Dirac structures and Hodge decompositions on simplicial meshes", "harmonic-ports"};
  app.require_subcommand(1);

  GenOptions gen;
  MeshOptions analyze;
  DecomposeOptions decompose;
  VerifyOptions verify;
  SimulateOptions simulate;

  auto* g = app.add_subcommand("gen", "Generate a canonical mesh");
  g->add_option("--shape", gen.shape, "sphere, torus, disk, annulus, ball or solid_torus")->required();
  g->add_option("--resolution", gen.resolution, "Refinement level")->required();
  g->add_option("--out", gen.out, "Mesh JSON path");
  g->add_option("--seed", gen.seed, "Echoed in the report");

  auto* a = app.add_subcommand("analyze", "Validation, Betti numbers and harmonic dimensions");
  a->add_option("mesh", analyze.mesh, "Mesh JSON")->required();
  a->add_option("--seed", analyze.seed, "Echoed in the report");

  auto* d = app.add_subcommand("decompose", "Hodge-Morrey-Friedrichs decomposition of a cochain");
  d->add_option("mesh", decompose.mesh, "Mesh JSON")->required();
  d->add_option("--state", decompose.state, "Cochain JSON")->required();
  d->add_option("--out", decompose.out, "Write components and harmonic bases here");
  d->add_option("--seed", decompose.seed, "Echoed in the report");

  auto* v = app.add_subcommand("sd-verify", "Power balance and harmonic flow identities");
  v->add_option("mesh", verify.mesh, "Mesh JSON")->required();
  v->add_option("--p", verify.p, "Degree p")->required();
  v->add_option("--q", verify.q, "Degree q")->required();
  auto* state_opt = v->add_option("--state", verify.state, "State JSON with alpha_p and alpha_q_dual");
  v->add_option("--random-states", verify.random_states, "Number of random states")->excludes(state_opt);
  v->add_option("--seed", verify.seed, "Seed of the first random state");
  v->add_option("--out", verify.out, "Also write the report here");

  auto* s = app.add_subcommand("simulate", "Implicit midpoint time integration");
  s->add_option("mesh", simulate.mesh, "Mesh JSON")->required();
  s->add_option("--p", simulate.p, "Degree p")->required();
  s->add_option("--q", simulate.q, "Degree q")->required();
  s->add_option("--dt", simulate.dt, "Time step");
  s->add_option("--steps", simulate.steps, "Number of steps");
  s->add_option("--init", simulate.init, "zero | random[:seed] | harmonic:deg:idx:amp | bump:vertex:width");
  s->add_option("--seed", simulate.seed, "Seed for random initial states");
  s->add_option("--stride", simulate.stride, "Snapshot every N steps (0 disables)");
  s->add_option("--out", simulate.out, "Trace CSV path");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return io_failure;
  }

  CommandResult result;
  try {
    tolerance_scale();
    if (g->parsed())
      result = cmd_gen(gen);
    else if (a->parsed())
      result = cmd_analyze(analyze);
    else if (d->parsed())
      result = cmd_decompose(decompose);
    else if (v->parsed())
      result = cmd_sd_verify(verify);
    else
      result = cmd_simulate(simulate);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::UnknownShape) err << g->help();
    return exit_code_for(e.code());
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return numerical_failure;
  }

  out << result.report.dump(2) << "\n";
  for (const auto& line : result.summary) err << line << "\n";
  return result.exit_code;
}

}  // namespace hports::cli
