/// @file test_config_io.cpp
/// @brief JSON configuration parsing/serialization and artifact writers.

#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpsplines/artifacts.hpp"
#include "hpsplines/config.hpp"
#include "hpsplines/integrator.hpp"
#include "oracles.hpp"

using namespace hpsplines;
using namespace hpsplines::testing;
using nlohmann::json;

namespace {

/// Minimal valid rotation-group configuration to mutate in error tests.
json base_config() {
  return json{
      {"problem",
       {{"group", "so3"},
        {"manifold", "sphere2"},
        {"initial_point", {0.0, 0.0, 1.0}},
        {"targets",
         {{{"node", 5}, {"point", {1.0, 0.0, 0.0}}},
          {{"node", 10}, {"point", {0.0, 1.0, 0.0}}}}},
        {"sigma", 0.5},
        {"h", 0.1},
        {"steps", 10},
        {"xi0_initial", {0.1, 0.0, 0.2}}}}};
}

void expect_config_error(const json& doc, const std::string& needle) {
  try {
    parse_config(doc);
    FAIL_CHECK("expected ConfigError mentioning '" << needle << "'");
  } catch (const ConfigError& err) {
    const std::string what = err.what();
    CAPTURE(what);
    CHECK(what.find(needle) != std::string::npos);
  }
}

}  // namespace

//---------------------------------------------------------------------------
// Parsing
//---------------------------------------------------------------------------

TEST_CASE("a minimal document parses with documented defaults") {
  const RunConfig config = parse_config(base_config());
  const ProblemSpec& p = config.problem;
  CHECK(p.group == &GroupDescriptor::so3());
  CHECK(p.manifold == &Manifold::sphere2());
  CHECK(p.metric().is_identity());
  CHECK(p.lagrangian.kind() == LagrangianSpec::Kind::SquaredVelocity);
  CHECK(p.action_side == ActionSide::Left);
  CHECK(p.reduction_side == ReductionSide::Right);
  CHECK(p.cayley_radius == 1.0);
  CHECK(p.schedule.entries.size() == 2);
  CHECK(config.optimizer.max_iters == 5000);
  CHECK(config.optimizer.grad_tol == 1e-8);
  CHECK(config.outputs.directory == "out");
  CHECK(config.outputs.path_csv);
}

TEST_CASE("all shipped example configurations load and validate") {
  const std::vector<std::string> files = {
      "configs/sphere_spline.json", "configs/strand.json",   "configs/quantum.json",
      "configs/abelian.json",       "configs/convergence.json", "configs/sphere_check.json",
  };
  for (const std::string& file : files) {
    CAPTURE(file);
    CHECK_NOTHROW(load_config(file));
  }
}

TEST_CASE("rich fields parse into the right in-memory values") {
  json doc = base_config();
  doc["problem"]["metric"] = {{2.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
  doc["problem"]["lagrangian"] = {
      {"kind", "cubic_reduced"}, {"sign", "-"}, {"offset", {0.0, 0.0, 0.5}}};
  doc["problem"]["action_side"] = "right";
  doc["problem"]["reduction_side"] = "left";
  doc["problem"]["cayley_radius"] = 1.5;
  doc["optimizer"] = {{"max_iters", 77}, {"grad_tol", 1e-6}, {"homotopy_schedule", {5.0, 0.5}}};
  doc["outputs"] = {{"directory", "elsewhere"}, {"momentum_csv", false}};

  const RunConfig config = parse_config(doc);
  CHECK(config.problem.metric().matrix()(0, 0) == 2.0);
  CHECK(config.problem.lagrangian.kind() == LagrangianSpec::Kind::CubicReduced);
  CHECK(config.problem.lagrangian.sign() == -1.0);
  CHECK(config.problem.lagrangian.offset()[2] == 0.5);
  CHECK(config.problem.action_side == ActionSide::Right);
  CHECK(config.problem.reduction_side == ReductionSide::Left);
  CHECK(config.problem.cayley_radius == 1.5);
  CHECK(config.optimizer.max_iters == 77);
  REQUIRE(config.optimizer.homotopy_schedule.size() == 2);
  CHECK(config.optimizer.homotopy_schedule[1] == 0.5);
  CHECK(config.outputs.directory == "elsewhere");
  CHECK_FALSE(config.outputs.momentum_csv);
  CHECK(config.outputs.path_csv);  // untouched default
}

TEST_CASE("projective points parse from re/im pairs") {
  json doc;
  doc["problem"] = {{"group", "sun:2"},
                    {"manifold", "cpn:1"},
                    {"initial_point", {{1.0, 0.0}, {0.0, 0.0}}},
                    {"targets", json::array({{{"node", 4}, {"point", {{0.6, 0.0}, {0.0, 0.8}}}}})},
                    {"sigma", 0.5},
                    {"h", 0.25},
                    {"steps", 4}};
  const RunConfig config = parse_config(doc);
  CHECK(config.problem.schedule.entries[0].target.coords[1] == Complex(0.0, 0.8));
}

//---------------------------------------------------------------------------
// Error taxonomy (every message carries the offending key path)
//---------------------------------------------------------------------------

TEST_CASE("config errors name the offending key") {
  json doc = base_config();
  doc["problem"]["extra"] = 1;
  expect_config_error(doc, "unknown key 'extra'");

  doc = base_config();
  doc["mystery"] = 1;
  expect_config_error(doc, "unknown key 'mystery'");

  doc = base_config();
  doc["problem"].erase("sigma");
  expect_config_error(doc, "missing key 'sigma'");

  doc = base_config();
  doc["problem"]["group"] = "so4";
  expect_config_error(doc, "so4");

  doc = base_config();
  doc["problem"]["manifold"] = "sphere3";
  expect_config_error(doc, "sphere3");

  doc = base_config();
  doc["problem"]["sigma"] = -0.5;
  expect_config_error(doc, "sigma");

  doc = base_config();
  doc["problem"]["steps"] = 10.5;
  expect_config_error(doc, "steps");

  doc = base_config();
  doc["problem"]["xi0_initial"] = {0.1, 0.2};
  expect_config_error(doc, "xi0_initial");
}

TEST_CASE("schedule violations are rejected") {
  // Node beyond the grid.
  json doc = base_config();
  doc["problem"]["targets"][1]["node"] = 11;
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  // Nodes out of order.
  doc = base_config();
  doc["problem"]["targets"][0]["node"] = 10;
  doc["problem"]["targets"][1]["node"] = 5;
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  // Node at index zero.
  doc = base_config();
  doc["problem"]["targets"][0]["node"] = 0;
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  // Off-manifold target.
  doc = base_config();
  doc["problem"]["targets"][0]["point"] = {2.0, 0.0, 0.0};
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
}

TEST_CASE("semantic validation rejects inconsistent structures") {
  // Incompatible group/manifold pairing.
  json doc = base_config();
  doc["problem"]["manifold"] = "r3";
  expect_config_error(doc, "manifold");

  // Metric of the wrong size.
  doc = base_config();
  doc["problem"]["metric"] = {{1.0, 0.0}, {0.0, 1.0}};
  expect_config_error(doc, "metric");

  // Asymmetric metric.
  doc = base_config();
  doc["problem"]["metric"] = {{1.0, 0.2, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  // Indefinite metric.
  doc = base_config();
  doc["problem"]["metric"] = {{1.0, 0.0, 0.0}, {0.0, -1.0, 0.0}, {0.0, 0.0, 1.0}};
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  // The drift sign must be the string "+" or "-".
  doc = base_config();
  doc["problem"]["lagrangian"] = {{"kind", "cubic_reduced"}, {"sign", 1}, {"offset", {0, 0, 0}}};
  expect_config_error(doc, "sign");

  // squared_velocity takes no drift parameters.
  doc = base_config();
  doc["problem"]["lagrangian"] = {{"kind", "squared_velocity"}, {"sign", "+"}};
  expect_config_error(doc, "squared_velocity");

  // Optimizer knobs are range checked.
  doc = base_config();
  doc["optimizer"] = {{"backtrack_factor", 1.5}};
  expect_config_error(doc, "backtrack_factor");
}

TEST_CASE("file loading distinguishes missing files from malformed JSON") {
  CHECK_THROWS_AS(load_config("does_not_exist.json"), ConfigError);
  const std::string dir = "build/test_tmp";
  write_file(dir, "broken.json", "{ not json");
  try {
    load_config(dir + "/broken.json");
    FAIL_CHECK("expected ConfigError for malformed JSON");
  } catch (const ConfigError& err) {
    CHECK(std::string(err.what()).find("not valid JSON") != std::string::npos);
  }
}

//---------------------------------------------------------------------------
// Round trip
//---------------------------------------------------------------------------

TEST_CASE("serialize and parse round-trip preserves every field") {
  json doc = base_config();
  doc["problem"]["metric"] = {{1.5, 0.1, 0.0}, {0.1, 1.0, 0.0}, {0.0, 0.0, 2.0}};
  doc["problem"]["lagrangian"] = {
      {"kind", "cubic_reduced"}, {"sign", "+"}, {"offset", {0.25, -0.5, 0.75}}};
  doc["problem"]["action_side"] = "right";
  doc["problem"]["cayley_radius"] = 0.8;
  doc["optimizer"] = {{"grad_tol", 2e-7}, {"homotopy_schedule", {2.5, 0.5}}};
  doc["outputs"] = {{"directory", "round_trip_out"}, {"convergence_csv", false}};

  const RunConfig a = parse_config(doc);
  const RunConfig b = parse_config(serialize_config(a));
  CHECK(b.problem.group == a.problem.group);
  CHECK(b.problem.manifold == a.problem.manifold);
  CHECK((b.problem.metric().matrix() - a.problem.metric().matrix()).norm() == 0.0);
  CHECK(b.problem.lagrangian.kind() == a.problem.lagrangian.kind());
  CHECK(b.problem.lagrangian.sign() == a.problem.lagrangian.sign());
  CHECK((b.problem.lagrangian.offset() - a.problem.lagrangian.offset()).norm() == 0.0);
  CHECK((b.problem.schedule.initial.coords - a.problem.schedule.initial.coords).norm() == 0.0);
  REQUIRE(b.problem.schedule.entries.size() == a.problem.schedule.entries.size());
  for (std::size_t i = 0; i < a.problem.schedule.entries.size(); ++i) {
    CHECK(b.problem.schedule.entries[i].node == a.problem.schedule.entries[i].node);
    CHECK((b.problem.schedule.entries[i].target.coords -
           a.problem.schedule.entries[i].target.coords)
              .norm() == 0.0);
  }
  CHECK(b.problem.sigma == a.problem.sigma);
  CHECK(b.problem.h == a.problem.h);
  CHECK(b.problem.steps == a.problem.steps);
  CHECK((b.problem.xi0_initial - a.problem.xi0_initial).norm() == 0.0);
  CHECK(b.problem.action_side == a.problem.action_side);
  CHECK(b.problem.reduction_side == a.problem.reduction_side);
  CHECK(b.problem.cayley_radius == a.problem.cayley_radius);
  CHECK(b.optimizer.max_iters == a.optimizer.max_iters);
  CHECK(b.optimizer.grad_tol == a.optimizer.grad_tol);
  CHECK(b.optimizer.homotopy_schedule == a.optimizer.homotopy_schedule);
  CHECK(b.outputs.directory == a.outputs.directory);
  CHECK(b.outputs.convergence_csv == a.outputs.convergence_csv);
}

//---------------------------------------------------------------------------
// Artifact writers
//---------------------------------------------------------------------------

TEST_CASE("doubles are formatted to shortest-faithful 17 digits") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
  CHECK(format_double(-2.0) == "-2");
  const double third = 1.0 / 3.0;
  CHECK(std::stod(format_double(third)) == third);
}

TEST_CASE("csv writers emit stable headers and one row per index") {
  auto rng = make_rng(701);
  ProblemSpec p = random_sphere_problem(rng, 6, 1);
  const auto [mu0, mu1] = feasible_momenta(p, rng);
  const DiscretePath path = integrate(p, mu0, mu1);

  std::ostringstream path_csv;
  write_path_csv(path_csv, p, path);
  std::istringstream lines(path_csv.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header.rfind("k,t,g00,", 0) == 0);
  CHECK(header.find("xi0_0") != std::string::npos);
  CHECK(header.find("J_norm,is_node") != std::string::npos);
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == p.steps + 1);
  // The final row carries no inner velocity.
  CHECK(path_csv.str().find("nan") != std::string::npos);

  std::ostringstream momentum_csv;
  write_momentum_csv(momentum_csv, momentum_report(p, path));
  std::istringstream mlines(momentum_csv.str());
  std::getline(mlines, header);
  CHECK(header == "k,t,mu0_norm,mu1_norm,J_norm,is_node,jump_residual");

  // Determinism: the same path serializes to the same bytes.
  std::ostringstream again;
  write_path_csv(again, p, path);
  CHECK(again.str() == path_csv.str());
}

TEST_CASE("summary json carries the run outcome") {
  auto rng = make_rng(702);
  ProblemSpec p = random_abelian_problem(rng, 10, 1);
  OptimizerConfig config;
  config.grad_tol = 1e-8;
  const OptimResult r = descend(p, config, DualVector::Zero(2), DualVector::Zero(2));
  const json j = summary_json(p, r);
  CHECK(j["group"] == "abelian:2");
  CHECK(j["manifold"] == "r2");
  CHECK(j["converged"] == r.converged);
  CHECK(j["cost"].get<double>() == r.cost);
  CHECK(j["target_distances"].size() == p.schedule.entries.size());
  CHECK(j["stages"].size() == r.stages.size());
  CHECK(j["mu0"].size() == 2);
}

TEST_CASE("file writing creates directories and reports unwritable targets") {
  const std::string dir = "build/test_tmp/nested/deeper";
  write_file(dir, "probe.txt", "content\n");
  std::ifstream in(dir + "/probe.txt");
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(body == "content\n");
  CHECK_THROWS_AS(write_file("/proc/definitely/not/writable", "x.txt", "y"), ConfigError);
}
