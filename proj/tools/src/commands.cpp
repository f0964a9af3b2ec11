#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <tuple>

#ifndef TWISTORLAB_VERSION
#define TWISTORLAB_VERSION "0.0.0"
#endif

namespace twistorlab::cli {

std::map<std::string, double> parse_params(const std::string& text) {
  std::map<std::string, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw Error("bad --params entry '" + item + "' (expected k=v)");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(val, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != val.size()) throw Error("bad --params value '" + val + "' for " + key);
    out[key] = v;
  }
  return out;
}

HermitianSurface load_surface(const std::string& name, const std::string& params) {
  const auto kv = parse_params(params);
  auto make = [&]() -> HermitianSurface {
    if (builtin_from_name(name)) return builtin(name, kv);
    if (!std::filesystem::exists(name)) throw Error("unknown surface '" + name + "'");
    if (!kv.empty()) throw Error("--params applies to built-in surfaces only");
    return load_surface_file(name);
  };
  HermitianSurface M = make();
  M.validate();
  return M;
}

std::vector<Lambdas> lambda_sets(const Options& o) {
  const bool three = o.lambda1 || o.lambda2 || o.lambda3;
  if (three && !o.lambda.empty()) throw Error("--lambda cannot be combined with --lambda1..3");
  std::vector<Lambdas> out;
  if (three) {
    out.push_back({o.lambda1.value_or(1.0), o.lambda2.value_or(1.0), o.lambda3.value_or(1.0)});
  } else if (o.lambda.empty()) {
    out.push_back(Lambdas{});
  } else {
    for (double l : o.lambda) out.push_back(Lambdas::single(l));
  }
  for (const auto& l : out) l.validate();
  return out;
}

namespace {

Json flag_json(const Flag& f, double tol) { return Json{{"value", f.value}, {"defect", f.defect}, {"tolerance", tol}}; }

Json lambdas_json(const Lambdas& l) { return Json::array({l.l1, l.l2, l.l3}); }

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json header(const char* command, const HermitianSurface& M, const ConnectionChoice& conn) {
  Json params = Json::object();
  for (const auto& [k, v] : M.params()) params[k] = v;
  return Json{{"schema", 1},
              {"tool", "twistorlab"},
              {"version", TWISTORLAB_VERSION},
              {"command", command},
              {"surface", {{"name", M.name()}, {"params", params}}},
              {"connection", {{"name", conn.name()}, {"t", conn.parameter()}, {"formulas", conn.has_formulas()}}}};
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

std::string run_report(const Options& o) {
  const HermitianSurface M = load_surface(o.surface, o.params);
  const ConnectionChoice conn = parse_connection(o.connection, o.t);
  ReportOptions ro;
  ro.lambdas = lambda_sets(o);
  ro.points = o.points;
  ro.seed = o.seed;
  ro.tolerance = o.tol;
  ro.nijenhuis_tolerance = o.tol;
  ro.threads = thread_budget();
  const ConditionReport rep = condition_report(M, conn, ro);

  struct Summary {
    bool symplectic = true, balanced = true, integrable = true;
    double sym = 0.0, bal = 0.0, nij = 0.0;
    std::optional<double> residual;
  };
  std::vector<std::pair<std::pair<int, Lambdas>, Summary>> summary;
  for (const auto& r : rep.records) {
    auto it = std::find_if(summary.begin(), summary.end(), [&](const auto& s) {
      const auto& [i, l] = s.first;
      return i == r.i && l.l1 == r.lambdas.l1 && l.l2 == r.lambdas.l2 && l.l3 == r.lambdas.l3;
    });
    if (it == summary.end()) {
      summary.push_back({{r.i, r.lambdas}, {}});
      it = summary.end() - 1;
    }
    Summary& s = it->second;
    s.symplectic = s.symplectic && r.symplectic;
    s.balanced = s.balanced && r.balanced;
    s.integrable = s.integrable && r.integrable;
    s.sym = std::max(s.sym, r.symplectic_formula.value_or(r.symplectic_oracle));
    s.bal = std::max(s.bal, r.balanced_formula.value_or(r.balanced_oracle));
    s.nij = std::max(s.nij, r.nijenhuis);
    if (r.formula_oracle_residual) s.residual = std::max(s.residual.value_or(0.0), *r.formula_oracle_residual);
  }
  std::sort(summary.begin(), summary.end(), [](const auto& a, const auto& b) {
    const auto& [ia, la] = a.first;
    const auto& [ib, lb] = b.first;
    return std::tie(ia, la.l3, la.l1, la.l2) < std::tie(ib, lb.l3, lb.l1, lb.l2);
  });

  if (o.format == "text") {
    std::ostringstream os;
    os << "surface     " << M.name() << "\n";
    os << "connection  " << conn.name() << " (t = " << conn.parameter() << ")\n";
    os << "points      " << rep.points.size() << "  seed " << rep.seed << "  tol " << rep.tolerance << "\n\n";
    os << "point  self-dual  einstein  kahler  ricci-J   s           s*\n";
    for (std::size_t k = 0; k < rep.points.size(); ++k) {
      const auto& f = rep.points[k].flags;
      char line[160];
      std::snprintf(line, sizeof line, "%5zu  %-9s  %-8s  %-6s  %-7s  %+.4e  %+.4e\n", k,
                    yes_no(f.self_dual.value).c_str(), yes_no(f.einstein.value).c_str(),
                    yes_no(f.kahler.value).c_str(), yes_no(f.ricci_J_invariant.value).c_str(), f.s, f.sstar);
      os << line;
    }
    os << "\npoint  i  lambda1  lambda2  lambda3    |dK|        |K^dK|      |N|         residual    S B I\n";
    for (const auto& r : rep.records) {
      char line[200];
      std::snprintf(line, sizeof line, "%5d  %d  %7.4f  %7.4f  %7.4f  %.4e  %.4e  %.4e  %-10s  %c %c %c\n",
                    r.point_index, r.i, r.lambdas.l1, r.lambdas.l2, r.lambdas.l3,
                    r.symplectic_formula.value_or(r.symplectic_oracle), r.balanced_formula.value_or(r.balanced_oracle),
                    r.nijenhuis, r.formula_oracle_residual ? fmt("%.4e", *r.formula_oracle_residual).c_str() : "-",
                    r.symplectic ? 'y' : 'n', r.balanced ? 'y' : 'n', r.integrable ? 'y' : 'n');
      os << line;
    }
    os << "\ni  lambda1  lambda2  lambda3  symplectic  balanced  integrable\n";
    for (const auto& [key, s] : summary) {
      char line[160];
      std::snprintf(line, sizeof line, "%d  %7.4f  %7.4f  %7.4f  %-10s  %-8s  %s\n", key.first, key.second.l1,
                    key.second.l2, key.second.l3, yes_no(s.symplectic).c_str(), yes_no(s.balanced).c_str(),
                    yes_no(s.integrable).c_str());
      os << line;
    }
    return os.str();
  }

  Json doc = header("report", M, conn);
  doc["tolerance"] = {{"condition", rep.tolerance}, {"nijenhuis", rep.nijenhuis_tolerance}};
  doc["seed"] = rep.seed;
  Json pts = Json::array();
  for (std::size_t k = 0; k < rep.points.size(); ++k) {
    const auto& pr = rep.points[k];
    const auto& f = pr.flags;
    pts.push_back({{"index", k},
                   {"coords", Json(std::vector<double>(pr.p.data(), pr.p.data() + 6))},
                   {"base",
                    {{"self_dual", flag_json(f.self_dual, f.tolerance)},
                     {"anti_self_dual", flag_json(f.anti_self_dual, f.tolerance)},
                     {"einstein", flag_json(f.einstein, f.tolerance)},
                     {"kahler", flag_json(f.kahler, f.tolerance)},
                     {"ricci_J_invariant", flag_json(f.ricci_J_invariant, f.tolerance)},
                     {"s", f.s},
                     {"sstar", f.sstar}}}});
  }
  doc["points"] = pts;
  Json recs = Json::array();
  for (const auto& r : rep.records) {
    recs.push_back({{"point", r.point_index},
                    {"i", r.i},
                    {"lambda", lambdas_json(r.lambdas)},
                    {"symplectic",
                     {{"value", r.symplectic},
                      {"formula_defect", opt_json(r.symplectic_formula)},
                      {"oracle_defect", r.symplectic_oracle},
                      {"tolerance", rep.tolerance}}},
                    {"balanced",
                     {{"value", r.balanced},
                      {"formula_defect", opt_json(r.balanced_formula)},
                      {"oracle_defect", r.balanced_oracle},
                      {"tolerance", rep.tolerance}}},
                    {"integrable",
                     {{"value", r.integrable}, {"nijenhuis", r.nijenhuis}, {"tolerance", rep.nijenhuis_tolerance}}},
                    {"formula_oracle_residual", opt_json(r.formula_oracle_residual)}});
  }
  doc["records"] = recs;
  Json sum = Json::array();
  for (const auto& [key, s] : summary) {
    sum.push_back({{"i", key.first},
                   {"lambda", lambdas_json(key.second)},
                   {"symplectic", {{"value", s.symplectic}, {"max_defect", s.sym}, {"tolerance", rep.tolerance}}},
                   {"balanced", {{"value", s.balanced}, {"max_defect", s.bal}, {"tolerance", rep.tolerance}}},
                   {"integrable", {{"value", s.integrable}, {"max_nijenhuis", s.nij}, {"tolerance", rep.nijenhuis_tolerance}}},
                   {"max_formula_oracle_residual", opt_json(s.residual)}});
  }
  doc["summary"] = sum;
  return to_json_text(doc);
}

namespace {

double inner(const ComplexForm& a, const ComplexForm& b) {
  Complex s = 0.0;
  for (const auto& t : b.terms()) s += std::conj(a.coeff_mask(t.mask)) * t.coeff;
  return s.real();
}

}  // namespace

std::string run_scan(const Options& o) {
  if (o.steps < 1 || !(o.to >= o.from) || !(o.from >= kMinLambda) || (o.steps > 1 && o.to == o.from))
    throw Error("empty lambda grid");
  const HermitianSurface M = load_surface(o.surface, o.params);
  const ConnectionChoice conn = parse_connection(o.connection, o.t);
  std::vector<int> indices = o.indices.empty() ? std::vector<int>{1, 2, 3, 4} : o.indices;
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  for (int i : indices)
    if (i < 1 || i > 4) throw Error("--i must be in 1..4");
  if (o.points < 1) throw Error("at least one sample point is required");
  std::vector<double> grid(o.steps);
  for (int k = 0; k < o.steps; ++k) grid[k] = o.steps == 1 ? o.from : o.from + (o.to - o.from) * k / (o.steps - 1);

  struct Row {
    int point, i;
    double lambda, sym, bal;
  };
  struct Crossing {
    int point, i;
    double lambda;
  };
  struct Trend {
    int point, i;
    bool monotone;
  };
  const TwistorChart chart(M);
  const auto pts = sample_twistor_points(M, o.points, o.seed);
  std::vector<std::vector<Row>> rows(pts.size());
  std::vector<std::vector<Crossing>> crossings(pts.size());
  std::vector<std::vector<Trend>> trends(pts.size());
  parallel_for(static_cast<int>(pts.size()), thread_budget(), [&](int k) {
    const TwistorCoframe cf = twistor_coframe(chart, conn, pts[k], conn.has_formulas());
    std::optional<CoframeJet> jet;
    if (!conn.has_formulas()) jet = coframe_jet(chart, conn, pts[k]);
    for (int i : indices) {
      auto dK = [&](double l) {
        return conn.has_formulas() ? dK_formula(i, l, cf) : dK_oracle(i, Lambdas::single(l), *jet);
      };
      const ComplexForm ref = dK(grid.front());
      const double ref2 = inner(ref, ref);
      auto signature = [&](double l) { return ref2 == 0.0 ? 0.0 : inner(ref, dK(l)) / ref2; };
      std::vector<double> sig, defect;
      for (double l : grid) {
        const ComplexForm d = dK(l);
        const ComplexForm K = kahler_form(i, Lambdas::single(l));
        defect.push_back(d.norm());
        rows[k].push_back({k, i, l, d.norm(), wedge(K, d).norm()});
        sig.push_back(signature(l));
      }
      for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
        if (sig[g] == 0.0 && ref2 != 0.0) {
          crossings[k].push_back({k, i, grid[g]});
          continue;
        }
        if (sig[g] * sig[g + 1] >= 0.0) continue;
        double lo = grid[g], hi = grid[g + 1], flo = sig[g];
        while (hi - lo > 1e-8) {
          const double mid = 0.5 * (lo + hi);
          const double fm = signature(mid);
          if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        crossings[k].push_back({k, i, 0.5 * (lo + hi)});
      }
      bool up = true, down = true;
      for (std::size_t g = 0; g + 1 < defect.size(); ++g) {
        up = up && defect[g + 1] >= defect[g];
        down = down && defect[g + 1] <= defect[g];
      }
      trends[k].push_back({k, i, up || down});
    }
  });

  if (o.format == "text") {
    std::ostringstream os;
    os << "surface     " << M.name() << "\nconnection  " << conn.name() << "\n\n";
    os << "point  i  lambda      |dK|        |K^dK|\n";
    for (const auto& v : rows)
      for (const auto& r : v) {
        char line[128];
        std::snprintf(line, sizeof line, "%5d  %d  %.6f  %.4e  %.4e\n", r.point, r.i, r.lambda, r.sym, r.bal);
        os << line;
      }
    os << "\nzero crossings\n";
    bool any = false;
    for (const auto& v : crossings)
      for (const auto& c : v) {
        char line[128];
        std::snprintf(line, sizeof line, "  point %d  i=%d  lambda=%.9f  lambda^2=%.9f\n", c.point, c.i, c.lambda,
                      c.lambda * c.lambda);
        os << line;
        any = true;
      }
    if (!any) os << "  none\n";
    return os.str();
  }

  Json doc = header("scan", M, conn);
  doc["seed"] = o.seed;
  doc["grid"] = {{"from", o.from}, {"to", o.to}, {"steps", o.steps}};
  Json jr = Json::array(), jc = Json::array(), jt = Json::array();
  for (const auto& v : rows)
    for (const auto& r : v)
      jr.push_back({{"point", r.point}, {"i", r.i}, {"lambda", r.lambda}, {"symplectic_defect", r.sym},
                    {"balanced_defect", r.bal}});
  for (const auto& v : crossings)
    for (const auto& c : v)
      jc.push_back({{"point", c.point}, {"i", c.i}, {"lambda", c.lambda}, {"lambda_sq", c.lambda * c.lambda}});
  for (const auto& v : trends)
    for (const auto& t : v) jt.push_back({{"point", t.point}, {"i", t.i}, {"monotone", t.monotone}});
  doc["rows"] = jr;
  doc["crossings"] = jc;
  doc["defect_trend"] = jt;
  return to_json_text(doc);
}

std::string run_appendix(const Options& o) {
  const bool three = o.lambda1 || o.lambda2 || o.lambda3;
  if (three && !o.lambda.empty()) throw Error("--lambda cannot be combined with --lambda1..3");
  if (o.lambda.size() > 1) throw Error("appendix takes a single --lambda");
  FlagParams p = o.lambda.empty() ? FlagParams{} : FlagParams::single(o.lambda.front());
  if (three) p = {o.lambda1.value_or(1.0), o.lambda2.value_or(1.0), o.lambda3.value_or(1.0)};
  p.validate();

  struct Row {
    int i;
    double coefficient, structural, balanced, part12;
    std::optional<double> ddbar_structural;
  };
  std::vector<Row> rows;
  for (int i = 1; i <= 4; ++i) {
    Row r{i, flag_dK_coefficient(i, p), (flag_dK(i, p) - flag_dK_structural(i, p)).norm(),
          flag_balanced(i, p).norm(), flag_bidegree(flag_dK(i, p), i, 1, 2).norm(), std::nullopt};
    if (i != 2) r.ddbar_structural = (flag_ddbar(i, p) - flag_ddbar_structural(i, p)).norm();
    rows.push_back(r);
  }
  std::array<double, 8> nij{};
  for (int i = 1; i <= 8; ++i) nij[i - 1] = flag_nijenhuis(i);
  const int integrable = static_cast<int>(std::count(nij.begin(), nij.end(), 0.0));
  const NearlyKahlerResidual nk = nearly_kahler_check();

  if (o.format == "text") {
    std::ostringstream os;
    os << "lambda = (" << p.l1 << ", " << p.l2 << ", " << p.l3 << ")\n\n";
    os << "i  coefficient    |disp-struct|  |K^dK|       |dK^(1,2)|   |ddbar disp-struct|\n";
    for (const auto& r : rows) {
      char line[160];
      std::snprintf(line, sizeof line, "%d  %+.6e  %.3e      %.3e    %.3e    %s\n", r.i, r.coefficient, r.structural,
                    r.balanced, r.part12, r.ddbar_structural ? fmt("%.3e", *r.ddbar_structural).c_str() : "-");
      os << line;
    }
    os << "\nJ  nijenhuis\n";
    for (int i = 0; i < 8; ++i) os << i + 1 << "  " << fmt("%.3e", nij[i]) << "\n";
    os << "integrable structures: " << integrable << "\n\n";
    os << "nearly Kaehler  |dK2 - 3 Re rho| = " << fmt("%.3e", nk.dK)
       << "  |d Im rho + 2 K2^K2| = " << fmt("%.3e", nk.dIm) << "\n";
    return os.str();
  }

  Json doc{{"schema", 1}, {"tool", "twistorlab"}, {"version", TWISTORLAB_VERSION}, {"command", "appendix"}};
  doc["lambda"] = Json::array({p.l1, p.l2, p.l3});
  Json jr = Json::array();
  for (const auto& r : rows)
    jr.push_back({{"i", r.i},
                  {"dK_coefficient", r.coefficient},
                  {"symplectic", r.coefficient == 0.0},
                  {"displayed_vs_structural", r.structural},
                  {"balanced_defect", r.balanced},
                  {"dK_12_part", r.part12},
                  {"ddbar_displayed_vs_structural", opt_json(r.ddbar_structural)}});
  doc["structures"] = jr;
  Json jn = Json::array();
  for (int i = 0; i < 8; ++i) jn.push_back({{"J", i + 1}, {"nijenhuis", nij[i]}, {"integrable", nij[i] == 0.0}});
  doc["integrability"] = jn;
  doc["integrable_count"] = integrable;
  doc["nearly_kahler"] = {{"dK2_minus_3Re_rho", nk.dK}, {"dIm_rho_plus_2K2K2", nk.dIm}};
  return to_json_text(doc);
}

}  // namespace twistorlab::cli
