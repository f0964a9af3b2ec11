#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "commands.hpp"
#include "doctest.h"

using namespace twistorlab;
using namespace twistorlab::cli;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("json text") {
    Json doc = Json::object();
    doc["a"] = 0.1;
    doc["b"] = std::numeric_limits<double>::quiet_NaN();
    doc["c"] = Json::array({1, true});
    doc["d"] = Json::object();
    CHECK(to_json_text(doc) ==
          "{\n  \"a\": 0.10000000000000001,\n  \"b\": null,\n  \"c\": [\n    1,\n    true\n  ],\n  \"d\": {}\n}\n");
  }

  TEST_CASE("emit replaces the target") {
    const auto dir = std::filesystem::temp_directory_path() / "twistorlab_emit_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "out.json";
    emit("first\n", path.string());
    emit("second\n", path.string());
    CHECK(slurp(path) == "second\n");
    int files = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
    CHECK(files == 1);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("parameter parsing") {
    const auto kv = parse_params("c=4,q=0.5");
    CHECK(kv.at("c") == 4.0);
    CHECK(kv.at("q") == 0.5);
    CHECK(parse_params("").empty());
    CHECK_THROWS_AS(parse_params("c"), Error);
    CHECK_THROWS_AS(parse_params("c=abc"), Error);
    CHECK_THROWS_AS(parse_params("c=1x"), Error);
    CHECK_THROWS_AS(load_surface("nowhere", ""), Error);
  }

  TEST_CASE("lambda sets") {
    Options o;
    CHECK(lambda_sets(o).size() == 1);
    o.lambda = {0.5, 2.0};
    const auto s = lambda_sets(o);
    REQUIRE(s.size() == 2);
    CHECK(s[1].l3 == 2.0);
    CHECK(s[1].l1 == 1.0);
    o.lambda3 = 1.5;
    CHECK_THROWS_AS(lambda_sets(o), Error);
    o.lambda.clear();
    o.lambda1 = 0.7;
    const auto t = lambda_sets(o);
    CHECK(t[0].l1 == 0.7);
    CHECK(t[0].l2 == 1.0);
    CHECK(t[0].l3 == 1.5);
    o.lambda1 = 0.0;
    CHECK_THROWS_AS(lambda_sets(o), Error);
  }

  TEST_CASE("report output is stable across thread counts") {
    Options o;
    o.surface = "cp2_fs";
    o.lambda = {1.4142};
    o.points = 3;
    setenv("TWISTORLAB_THREADS", "1", 1);
    const std::string one = run_report(o);
    setenv("TWISTORLAB_THREADS", "4", 1);
    const std::string four = run_report(o);
    unsetenv("TWISTORLAB_THREADS");
    CHECK(one == four);

    const auto doc = Json::parse(one);
    CHECK(doc["schema"] == 1);
    CHECK(doc["points"].size() == 3);
    for (const auto& r : doc["records"]) {
      if (r["i"] == 1) CHECK(r["symplectic"]["value"] == true);
      CHECK(r["symplectic"].contains("tolerance"));
    }
  }

  TEST_CASE("general Gauduchon parameter has no formula fields") {
    Options o;
    o.surface = "hopf";
    o.connection = "gauduchon";
    o.t = 0.5;
    o.lambda = {1.0};
    o.points = 1;
    const auto doc = Json::parse(run_report(o));
    for (const auto& r : doc["records"]) {
      CHECK(r["symplectic"]["formula_defect"].is_null());
      CHECK(r["formula_oracle_residual"].is_null());
    }
  }

  TEST_CASE("verify appendix") {
    Options o;
    o.suite = "appendix";
    o.format = "text";
    const auto out = run_verify(o);
    CHECK(out.passed);
    CHECK(out.text.find("FAIL") == std::string::npos);
    o.suite = "nonsense";
    CHECK_THROWS_AS(run_verify(o), Error);
  }
}
