#include "hpsplines/config.hpp"

#include <fstream>
#include <set>
#include <string>
#include <vector>

namespace hpsplines {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& ctx,
                const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      throw ConfigError("unknown key '" + item.key() + "' in " + ctx);
    }
  }
}

const json& require(const json& obj, const std::string& ctx, const std::string& key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigError("missing key '" + key + "' in " + ctx);
  }
  return *it;
}

double as_number(const json& j, const std::string& ctx) {
  if (!j.is_number()) throw ConfigError(ctx + " must be a number");
  return j.get<double>();
}

int as_integer(const json& j, const std::string& ctx) {
  if (!j.is_number_integer()) throw ConfigError(ctx + " must be an integer");
  return j.get<int>();
}

bool as_boolean(const json& j, const std::string& ctx) {
  if (!j.is_boolean()) throw ConfigError(ctx + " must be a boolean");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& ctx) {
  if (!j.is_string()) throw ConfigError(ctx + " must be a string");
  return j.get<std::string>();
}

Vec parse_real_vector(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw ConfigError(ctx + " must be an array of numbers");
  Vec out(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    out[i] = as_number(j[i], ctx + "[" + std::to_string(i) + "]");
  }
  return out;
}

// Real manifolds take plain numbers; projective points take [re, im] pairs.
CVec parse_point_coords(const json& j, const std::string& ctx, bool complex_entries) {
  if (!j.is_array()) throw ConfigError(ctx + " must be an array");
  CVec out(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string entry_ctx = ctx + "[" + std::to_string(i) + "]";
    const json& e = j[i];
    if (complex_entries) {
      if (!e.is_array() || e.size() != 2) {
        throw ConfigError(entry_ctx + " must be a [re, im] pair");
      }
      out[i] = Complex(as_number(e[0], entry_ctx + "[0]"), as_number(e[1], entry_ctx + "[1]"));
    } else {
      out[i] = Complex(as_number(e, entry_ctx), 0.0);
    }
  }
  return out;
}

MetricOperator parse_metric(const json& j, const std::string& ctx, int dim) {
  if (j.is_string()) {
    if (j.get<std::string>() != "identity") {
      throw ConfigError(ctx + ": the only named metric is \"identity\"");
    }
    return MetricOperator::identity(dim);
  }
  if (!j.is_array()) {
    throw ConfigError(ctx + " must be \"identity\" or a square matrix (array of rows)");
  }
  RealMat gamma(j.size(), j.size());
  for (size_t r = 0; r < j.size(); ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.size() != j.size()) {
      throw ConfigError(ctx + " row " + std::to_string(r) + " must have " +
                        std::to_string(j.size()) + " entries");
    }
    for (size_t c = 0; c < row.size(); ++c) {
      gamma(r, c) = as_number(row[c], ctx + " entry");
    }
  }
  if (static_cast<int>(j.size()) != dim) {
    throw ConfigError(ctx + " must be " + std::to_string(dim) + "x" + std::to_string(dim) +
                      " for this group");
  }
  return MetricOperator(gamma);
}

LagrangianSpec parse_lagrangian(const json* j, MetricOperator metric, int dim) {
  if (j == nullptr) {
    return LagrangianSpec::squared_velocity(std::move(metric));
  }
  const std::string ctx = "problem.lagrangian";
  check_keys(*j, ctx, {"kind", "sign", "offset"});
  const std::string kind = as_string(require(*j, ctx, "kind"), ctx + ".kind");
  if (kind == "squared_velocity") {
    if (j->contains("sign") || j->contains("offset")) {
      throw ConfigError(ctx + ": squared_velocity takes no sign/offset");
    }
    return LagrangianSpec::squared_velocity(std::move(metric));
  }
  if (kind == "cubic_reduced") {
    const std::string sign = as_string(require(*j, ctx, "sign"), ctx + ".sign");
    if (sign != "+" && sign != "-") {
      throw ConfigError(ctx + ".sign must be \"+\" or \"-\"");
    }
    Vec offset = parse_real_vector(require(*j, ctx, "offset"), ctx + ".offset");
    if (offset.size() != dim) {
      throw ConfigError(ctx + ".offset must have the group dimension " + std::to_string(dim));
    }
    return LagrangianSpec::cubic_reduced(std::move(metric), sign == "+" ? 1.0 : -1.0,
                                         std::move(offset));
  }
  throw ConfigError(ctx + ".kind must be \"squared_velocity\" or \"cubic_reduced\"");
}

ProblemSpec parse_problem(const json& j) {
  const std::string ctx = "problem";
  check_keys(j, ctx,
             {"group", "manifold", "metric", "lagrangian", "initial_point", "targets", "sigma",
              "h", "steps", "xi0_initial", "action_side", "reduction_side", "cayley_radius"});

  const GroupDescriptor& group =
      GroupDescriptor::from_name(as_string(require(j, ctx, "group"), ctx + ".group"));
  const Manifold& manifold =
      Manifold::from_name(as_string(require(j, ctx, "manifold"), ctx + ".manifold"));
  const int dim = group.dim();

  MetricOperator metric = j.contains("metric")
                              ? parse_metric(j["metric"], ctx + ".metric", dim)
                              : MetricOperator::identity(dim);
  const json* lag = j.contains("lagrangian") ? &j["lagrangian"] : nullptr;

  ProblemSpec p{
      &group,
      &manifold,
      parse_lagrangian(lag, std::move(metric), dim),
      TargetSchedule{manifold.make_point(parse_point_coords(
                         require(j, ctx, "initial_point"), ctx + ".initial_point",
                         manifold.kind() == Manifold::Kind::CPn)),
                     {}},
      as_number(require(j, ctx, "sigma"), ctx + ".sigma"),
      as_number(require(j, ctx, "h"), ctx + ".h"),
      as_integer(require(j, ctx, "steps"), ctx + ".steps"),
      AlgebraVector::Zero(dim),
      ActionSide::Left,
      ReductionSide::Right,
      1.0};

  const json& targets = require(j, ctx, "targets");
  if (!targets.is_array()) throw ConfigError(ctx + ".targets must be an array");
  for (size_t i = 0; i < targets.size(); ++i) {
    const std::string tctx = ctx + ".targets[" + std::to_string(i) + "]";
    const json& t = targets[i];
    if (!t.is_object()) throw ConfigError(tctx + " must be an object");
    check_keys(t, tctx, {"node", "point"});
    ScheduleEntry entry;
    entry.node = as_integer(require(t, tctx, "node"), tctx + ".node");
    entry.target = manifold.make_point(parse_point_coords(
        require(t, tctx, "point"), tctx + ".point", manifold.kind() == Manifold::Kind::CPn));
    p.schedule.entries.push_back(std::move(entry));
  }

  if (j.contains("xi0_initial")) {
    p.xi0_initial = parse_real_vector(j["xi0_initial"], ctx + ".xi0_initial");
  }
  if (j.contains("action_side")) {
    const std::string side = as_string(j["action_side"], ctx + ".action_side");
    if (side == "left") {
      p.action_side = ActionSide::Left;
    } else if (side == "right") {
      p.action_side = ActionSide::Right;
    } else {
      throw ConfigError(ctx + ".action_side must be \"left\" or \"right\"");
    }
  }
  if (j.contains("reduction_side")) {
    const std::string side = as_string(j["reduction_side"], ctx + ".reduction_side");
    if (side == "right") {
      p.reduction_side = ReductionSide::Right;
    } else if (side == "left") {
      p.reduction_side = ReductionSide::Left;
    } else {
      throw ConfigError(ctx + ".reduction_side must be \"left\" or \"right\"");
    }
  }
  if (j.contains("cayley_radius")) {
    p.cayley_radius = as_number(j["cayley_radius"], ctx + ".cayley_radius");
  }
  p.validate();
  return p;
}

OptimizerConfig parse_optimizer(const json* j) {
  OptimizerConfig c;
  if (j == nullptr) return c;
  const std::string ctx = "optimizer";
  check_keys(*j, ctx,
             {"max_iters", "grad_tol", "step_init", "backtrack_factor", "armijo_c", "fd_eps",
              "homotopy_schedule"});
  if (j->contains("max_iters")) c.max_iters = as_integer((*j)["max_iters"], ctx + ".max_iters");
  if (j->contains("grad_tol")) c.grad_tol = as_number((*j)["grad_tol"], ctx + ".grad_tol");
  if (j->contains("step_init")) c.step_init = as_number((*j)["step_init"], ctx + ".step_init");
  if (j->contains("backtrack_factor")) {
    c.backtrack_factor = as_number((*j)["backtrack_factor"], ctx + ".backtrack_factor");
  }
  if (j->contains("armijo_c")) c.armijo_c = as_number((*j)["armijo_c"], ctx + ".armijo_c");
  if (j->contains("fd_eps")) c.fd_eps = as_number((*j)["fd_eps"], ctx + ".fd_eps");
  if (j->contains("homotopy_schedule")) {
    const Vec v = parse_real_vector((*j)["homotopy_schedule"], ctx + ".homotopy_schedule");
    c.homotopy_schedule.assign(v.data(), v.data() + v.size());
  }
  if (c.max_iters < 0) throw ConfigError(ctx + ".max_iters must be non-negative");
  if (!(c.grad_tol > 0.0)) throw ConfigError(ctx + ".grad_tol must be positive");
  if (!(c.step_init > 0.0)) throw ConfigError(ctx + ".step_init must be positive");
  if (!(c.backtrack_factor > 0.0 && c.backtrack_factor < 1.0)) {
    throw ConfigError(ctx + ".backtrack_factor must lie in (0, 1)");
  }
  if (!(c.armijo_c > 0.0 && c.armijo_c < 1.0)) {
    throw ConfigError(ctx + ".armijo_c must lie in (0, 1)");
  }
  if (!(c.fd_eps > 0.0)) throw ConfigError(ctx + ".fd_eps must be positive");
  return c;
}

OutputSpec parse_outputs(const json* j) {
  OutputSpec o;
  if (j == nullptr) return o;
  const std::string ctx = "outputs";
  check_keys(*j, ctx, {"directory", "path_csv", "momentum_csv", "summary_json", "convergence_csv"});
  if (j->contains("directory")) o.directory = as_string((*j)["directory"], ctx + ".directory");
  if (j->contains("path_csv")) o.path_csv = as_boolean((*j)["path_csv"], ctx + ".path_csv");
  if (j->contains("momentum_csv")) {
    o.momentum_csv = as_boolean((*j)["momentum_csv"], ctx + ".momentum_csv");
  }
  if (j->contains("summary_json")) {
    o.summary_json = as_boolean((*j)["summary_json"], ctx + ".summary_json");
  }
  if (j->contains("convergence_csv")) {
    o.convergence_csv = as_boolean((*j)["convergence_csv"], ctx + ".convergence_csv");
  }
  if (o.directory.empty()) throw ConfigError(ctx + ".directory must not be empty");
  return o;
}

}  // namespace

RunConfig parse_config(const json& root) {
  if (!root.is_object()) {
    throw ConfigError("configuration root must be an object");
  }
  check_keys(root, "configuration root", {"problem", "optimizer", "outputs"});
  RunConfig config{parse_problem(require(root, "configuration root", "problem")),
                   parse_optimizer(root.contains("optimizer") ? &root["optimizer"] : nullptr),
                   parse_outputs(root.contains("outputs") ? &root["outputs"] : nullptr)};
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config file '" + path + "'");
  }
  json root;
  try {
    in >> root;
  } catch (const json::parse_error& err) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + err.what());
  }
  return parse_config(root);
}

nlohmann::json serialize_config(const RunConfig& config) {
  json j;
  const ProblemSpec& p = config.problem;
  json problem;
  problem["group"] = p.group->name();
  problem["manifold"] = p.manifold->name();
  if (p.metric().is_identity()) {
    problem["metric"] = "identity";
  } else {
    json rows = json::array();
    for (int r = 0; r < p.metric().dim(); ++r) {
      json row = json::array();
      for (int c = 0; c < p.metric().dim(); ++c) {
        row.push_back(p.metric().matrix()(r, c));
      }
      rows.push_back(row);
    }
    problem["metric"] = rows;
  }
  json lag;
  if (p.lagrangian.kind() == LagrangianSpec::Kind::SquaredVelocity) {
    lag["kind"] = "squared_velocity";
  } else {
    lag["kind"] = "cubic_reduced";
    lag["sign"] = p.lagrangian.sign() > 0 ? "+" : "-";
    lag["offset"] = std::vector<double>(p.lagrangian.offset().data(),
                                        p.lagrangian.offset().data() + p.lagrangian.offset().size());
  }
  problem["lagrangian"] = lag;

  const bool complex_entries = p.manifold->kind() == Manifold::Kind::CPn;
  const auto point_json = [complex_entries](const ObjectPoint& q) {
    json out = json::array();
    for (Eigen::Index i = 0; i < q.coords.size(); ++i) {
      if (complex_entries) {
        out.push_back({q.coords[i].real(), q.coords[i].imag()});
      } else {
        out.push_back(q.coords[i].real());
      }
    }
    return out;
  };
  problem["initial_point"] = point_json(p.schedule.initial);
  json targets = json::array();
  for (const ScheduleEntry& e : p.schedule.entries) {
    targets.push_back({{"node", e.node}, {"point", point_json(e.target)}});
  }
  problem["targets"] = targets;
  problem["sigma"] = p.sigma;
  problem["h"] = p.h;
  problem["steps"] = p.steps;
  problem["xi0_initial"] =
      std::vector<double>(p.xi0_initial.data(), p.xi0_initial.data() + p.xi0_initial.size());
  problem["action_side"] = p.action_side == ActionSide::Left ? "left" : "right";
  problem["reduction_side"] = p.reduction_side == ReductionSide::Right ? "right" : "left";
  problem["cayley_radius"] = p.cayley_radius;
  j["problem"] = problem;

  json opt;
  opt["max_iters"] = config.optimizer.max_iters;
  opt["grad_tol"] = config.optimizer.grad_tol;
  opt["step_init"] = config.optimizer.step_init;
  opt["backtrack_factor"] = config.optimizer.backtrack_factor;
  opt["armijo_c"] = config.optimizer.armijo_c;
  opt["fd_eps"] = config.optimizer.fd_eps;
  if (!config.optimizer.homotopy_schedule.empty()) {
    opt["homotopy_schedule"] = config.optimizer.homotopy_schedule;
  }
  j["optimizer"] = opt;

  json outputs;
  outputs["directory"] = config.outputs.directory;
  outputs["path_csv"] = config.outputs.path_csv;
  outputs["momentum_csv"] = config.outputs.momentum_csv;
  outputs["summary_json"] = config.outputs.summary_json;
  outputs["convergence_csv"] = config.outputs.convergence_csv;
  j["outputs"] = outputs;
  return j;
}

}  // namespace hpsplines
