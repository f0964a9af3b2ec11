#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace twistorlab;
using namespace twistorlab::cli;

namespace {

void add_surface_flags(CLI::App* sub, Options& o) {
  sub->add_option("--surface", o.surface, "Built-in name (flat_c2, cp2_fs, ch2, hopf) or surface file");
  sub->add_option("--params", o.params, "Built-in parameters, k=v,...");
  sub->add_option("--connection", o.connection, "lichnerowicz | chern | bismut | gauduchon")
      ->check(CLI::IsMember({"lichnerowicz", "chern", "bismut", "gauduchon"}));
  sub->add_option("--t", o.t, "Gauduchon parameter (with --connection gauduchon)");
  sub->add_option("--points", o.points, "Number of sample points")->check(CLI::PositiveNumber);
  sub->add_option("--seed", o.seed, "Sampling seed");
}

void add_lambda_flags(CLI::App* sub, Options& o) {
  sub->add_option("--lambda", o.lambda, "Fiber scale(s) of the one-parameter family")->delimiter(',');
  sub->add_option("--lambda1", o.lambda1, "First metric parameter");
  sub->add_option("--lambda2", o.lambda2, "Second metric parameter");
  sub->add_option("--lambda3", o.lambda3, "Third metric parameter");
}

void add_output_flags(CLI::App* sub, Options& o) {
  sub->add_option("--format", o.format, "json | text")->check(CLI::IsMember({"json", "text"}));
  sub->add_option("--out", o.out, "Output file (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Twistor-space almost Hermitian structures over Hermitian surfaces"};
  app.set_version_flag("--version", TWISTORLAB_VERSION);
  app.require_subcommand(1);
  Options o;

  auto* report = app.add_subcommand("report", "Condition report at sampled twistor points");
  add_surface_flags(report, o);
  add_lambda_flags(report, o);
  add_output_flags(report, o);
  report->add_option("--tol", o.tol, "Condition tolerance");

  auto* verify = app.add_subcommand("verify", "Run verification suites");
  verify->add_option("--suite", o.suite,
                     "all | appendix | pipeline | oracle | integrability | curvature | conformal | gauduchon | algebra");
  verify->add_option("--tol", o.tol, "Formula-vs-oracle tolerance");
  verify->add_option("--points", o.points, "Sample points per surface")->check(CLI::PositiveNumber);
  verify->add_option("--seed", o.seed, "Sampling seed");
  add_output_flags(verify, o);

  auto* scan = app.add_subcommand("scan", "Sweep lambda and locate symplectic values");
  add_surface_flags(scan, o);
  add_output_flags(scan, o);
  scan->add_option("--i", o.indices, "Structure indices (default 1..4)")->delimiter(',');
  scan->add_option("--from", o.from, "Smallest lambda");
  scan->add_option("--to", o.to, "Largest lambda");
  scan->add_option("--steps", o.steps, "Grid size");

  auto* appendix = app.add_subcommand("appendix", "Flag-manifold identities");
  add_lambda_flags(appendix, o);
  add_output_flags(appendix, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (verify->parsed() && verify->count("--format") == 0) o.format = "text";
  if (scan->parsed() && scan->count("--points") == 0) o.points = 1;

  try {
    if (report->parsed()) {
      emit(run_report(o), o.out);
    } else if (scan->parsed()) {
      emit(run_scan(o), o.out);
    } else if (appendix->parsed()) {
      emit(run_appendix(o), o.out);
    } else {
      const VerifyOutcome v = run_verify(o);
      emit(v.text, o.out);
      return v.passed ? 0 : 1;
    }
  } catch (const InvariantError& e) {
    std::cerr << "surface invariant failure: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return 2;
  }
  return 0;
}
