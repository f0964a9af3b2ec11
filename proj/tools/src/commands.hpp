#pragma once

#include <optional>
#include <string>
#include <vector>

#include "output.hpp"
#include "twistorlab/flag.hpp"
#include "twistorlab/twistor.hpp"

namespace twistorlab::cli {

struct Options {
  std::string surface = "cp2_fs";
  std::string params;
  std::string connection = "lichnerowicz";
  double t = 0.0;
  std::vector<double> lambda;
  std::optional<double> lambda1, lambda2, lambda3;
  int points = 5;
  unsigned seed = 1;
  double tol = 1e-4;
  std::string format = "json";
  std::string out;
  // scan
  std::vector<int> indices;
  double from = 0.5;
  double to = 2.0;
  int steps = 16;
  // verify
  std::string suite = "all";
};

/// "c=4,foo=1" → {c: 4, foo: 1}.
std::map<std::string, double> parse_params(const std::string& text);

/// A built-in name or a surface file; throws InvariantError when invariants fail.
HermitianSurface load_surface(const std::string& name, const std::string& params);

/// The metric parameter sets selected by --lambda / --lambda1..3.
std::vector<Lambdas> lambda_sets(const Options& o);

std::string run_report(const Options& o);
std::string run_scan(const Options& o);
std::string run_appendix(const Options& o);

struct VerifyOutcome {
  std::string text;
  bool passed = false;
};

VerifyOutcome run_verify(const Options& o);

}  // namespace twistorlab::cli
