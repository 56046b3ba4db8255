#include "hpsplines/artifacts.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hpsplines {

namespace {

using nlohmann::json;

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out << ',';
    out << cells[i];
  }
  out << '\n';
}

std::vector<std::string> vector_cells(const Vec& v) {
  std::vector<std::string> cells;
  cells.reserve(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    cells.push_back(format_double(v[i]));
  }
  return cells;
}

void append(std::vector<std::string>& into, std::vector<std::string> cells) {
  for (std::string& c : cells) into.push_back(std::move(c));
}

}  // namespace

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_path_csv(std::ostream& out, const ProblemSpec& problem, const DiscretePath& path) {
  const GroupDescriptor& group = *problem.group;
  const int n = group.matrix_dim();
  const int d = group.dim();

  std::vector<std::string> header = {"k", "t"};
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::string base = "g" + std::to_string(r) + std::to_string(c);
      if (group.is_complex()) {
        header.push_back(base + "_re");
        header.push_back(base + "_im");
      } else {
        header.push_back(base);
      }
    }
  }
  const auto vec_headers = [&header, d](const std::string& base) {
    for (int i = 0; i < d; ++i) header.push_back(base + std::to_string(i));
  };
  vec_headers("xi0_");
  vec_headers("xi1_");
  vec_headers("mu0_");
  vec_headers("mu1_");
  header.push_back("J_norm");
  header.push_back("is_node");
  write_row(out, header);

  const std::vector<MomentumRow> rows = momentum_report(problem, path);
  for (size_t k = 0; k < path.states.size(); ++k) {
    const IntegratorState& s = path.states[k];
    std::vector<std::string> cells = {std::to_string(s.k), format_double(s.k * problem.h)};
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        cells.push_back(format_double(s.g.matrix(r, c).real()));
        if (group.is_complex()) {
          cells.push_back(format_double(s.g.matrix(r, c).imag()));
        }
      }
    }
    append(cells, vector_cells(s.xi0));
    if (k < path.xi1.size()) {
      append(cells, vector_cells(path.xi1[k]));
    } else {
      for (int i = 0; i < d; ++i) cells.push_back("nan");
    }
    append(cells, vector_cells(s.mu0));
    append(cells, vector_cells(s.mu1));
    cells.push_back(format_double(rows[k].spatial_norm));
    cells.push_back(rows[k].is_node ? "1" : "0");
    write_row(out, cells);
  }
}

void write_momentum_csv(std::ostream& out, const std::vector<MomentumRow>& rows) {
  write_row(out, {"k", "t", "mu0_norm", "mu1_norm", "J_norm", "is_node", "jump_residual"});
  for (const MomentumRow& row : rows) {
    write_row(out, {std::to_string(row.k), format_double(row.t), format_double(row.mu0_norm),
                    format_double(row.mu1_norm), format_double(row.spatial_norm),
                    row.is_node ? "1" : "0", format_double(row.jump_residual)});
  }
}

json summary_json(const ProblemSpec& problem, const OptimResult& result) {
  json j;
  j["group"] = problem.group->name();
  j["manifold"] = problem.manifold->name();
  j["sigma"] = problem.sigma;
  j["h"] = problem.h;
  j["steps"] = problem.steps;
  j["converged"] = result.converged;
  j["cost"] = result.cost;
  j["grad_norm"] = result.grad_norm;
  j["iterations"] = result.iterations;
  j["terminal_mu0_residual"] = result.terminal.first;
  j["terminal_mu1_residual"] = result.terminal.second;
  j["mu0"] = std::vector<double>(result.mu0.data(), result.mu0.data() + result.mu0.size());
  j["mu1"] = std::vector<double>(result.mu1.data(), result.mu1.data() + result.mu1.size());

  json distances = json::array();
  const std::vector<double> dist = target_distances(problem, result.path);
  for (size_t i = 0; i < dist.size(); ++i) {
    distances.push_back({{"node", problem.schedule.entries[i].node}, {"distance", dist[i]}});
  }
  j["target_distances"] = distances;

  json stages = json::array();
  for (const StageRecord& s : result.stages) {
    stages.push_back({{"sigma", s.sigma},
                      {"cost", s.cost},
                      {"grad_norm", s.grad_norm},
                      {"iterations", s.iterations},
                      {"converged", s.converged},
                      {"note", s.note}});
  }
  j["stages"] = stages;
  return j;
}

void write_convergence_csv(std::ostream& out, const ConvergenceStudy& study) {
  write_row(out, {"h", "error"});
  for (const ConvergencePoint& p : study.points) {
    write_row(out, {format_double(p.h), format_double(p.error)});
  }
}

json convergence_json(const ConvergenceStudy& study) {
  json points = json::array();
  for (const ConvergencePoint& p : study.points) {
    points.push_back({{"h", p.h}, {"error", p.error}});
  }
  return json{{"points", points}, {"fitted_order", study.fitted_order}};
}

void write_file(const std::string& directory, const std::string& name,
                const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) {
    throw ConfigError("cannot create output directory '" + directory + "': " + ec.message());
  }
  const fs::path path = fs::path(directory) / name;
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write '" + path.string() + "'");
  }
  out << content;
  if (!out.good()) {
    throw ConfigError("failed while writing '" + path.string() + "'");
  }
}

}  // namespace hpsplines
