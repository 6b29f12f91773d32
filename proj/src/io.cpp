#include "firemap/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace firemap::io {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string format_raster(const Eigen::VectorXd& values, int rows, int cols) {
  if (rows < 1 || cols < 1 || values.size() != rows * cols) {
    throw std::invalid_argument("raster shape does not match value count");
  }
  std::string out;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c) out += ',';
      out += fixed6(values[r * cols + c]);
    }
    out += '\n';
  }
  return out;
}

std::string format_node_values(const Eigen::VectorXd& values) {
  std::string out = "node_id,priority\n";
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    out += std::to_string(i) + ',' + fixed6(values[i]) + '\n';
  }
  return out;
}

std::string format_intervention_report(const InterventionResult& result,
                                       const std::vector<Target>& targets) {
  std::ostringstream out;
  out << "intervention report\n";
  out << "sum_p = " << fixed6(result.p.p.sum()) << '\n';
  out << "iterations = " << result.iterations << '\n';
  out << "converged = " << (result.converged ? "yes" : "no") << '\n';
  out << "rescaled = " << (result.rescaled ? "yes" : "no") << '\n';
  out << "budget_used = " << fixed6(result.budget_used) << '\n';
  out << "targets = " << targets.size() << '\n';
  for (const Target& t : targets) {
    if (t.src == t.dst) {
      out << "node " << t.src << ' ' << fixed6(t.amount) << '\n';
    } else {
      out << "edge " << t.src << ' ' << t.dst << ' ' << fixed6(t.amount)
          << '\n';
    }
  }
  return out.str();
}

std::vector<Target> parse_intervention_report(const std::string& text) {
  std::vector<Target> targets;
  std::istringstream in(text);
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "intervention report") saw_header = true;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "edge") {
      Target t;
      if (!(ls >> t.src >> t.dst >> t.amount)) {
        throw std::invalid_argument("malformed edge target line: " + line);
      }
      targets.push_back(t);
    } else if (kind == "node") {
      Target t;
      if (!(ls >> t.src >> t.amount)) {
        throw std::invalid_argument("malformed node target line: " + line);
      }
      t.dst = t.src;
      targets.push_back(t);
    }
  }
  if (!saw_header) {
    throw std::invalid_argument("not an intervention report");
  }
  return targets;
}

std::string format_control(const ControlMatrix& K) {
  std::string out = "src,dst,k\n";
  for (const ControlEntry& e : K.entries) {
    out += std::to_string(e.j) + ',' + std::to_string(e.i) + ',' +
           full(e.value) + '\n';
  }
  return out;
}

ControlMatrix parse_control(const std::string& text, int n) {
  ControlMatrix K;
  K.n = n;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("empty control file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "src,dst,k") {
    throw std::invalid_argument("control file must start with 'src,dst,k'");
  }
  bool has_diag = false, has_edge = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    int src = 0, dst = 0;
    double k = 0.0;
    if (!(ls >> src >> dst >> k)) {
      throw std::invalid_argument("malformed control line: " + line);
    }
    if (src < 0 || src >= n || dst < 0 || dst >= n) {
      throw std::invalid_argument("control entry outside the graph");
    }
    if (k < 0.0) {
      throw std::invalid_argument("control entries must be nonnegative");
    }
    (src == dst ? has_diag : has_edge) = true;
    K.entries.push_back({dst, src, k});
  }
  K.mode = has_diag && has_edge  ? ControlMode::both
           : has_diag            ? ControlMode::nodes
                                 : ControlMode::edges;
  std::sort(K.entries.begin(), K.entries.end(),
            [](const ControlEntry& a, const ControlEntry& b) {
              return a.i != b.i ? a.i < b.i : a.j < b.j;
            });
  return K;
}

std::string format_trajectory(const Trajectory& traj) {
  if (traj.times.size() != traj.states.size() || traj.times.empty()) {
    throw std::invalid_argument("trajectory is empty or inconsistent");
  }
  const Eigen::Index n = traj.states.front().size();
  std::string out = "t";
  for (Eigen::Index i = 0; i < n; ++i) out += ",x_" + std::to_string(i);
  out += '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out += fixed6(traj.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) {
      out += ',' + fixed6(traj.states[k][i]);
    }
    out += '\n';
  }
  return out;
}

std::string format_tour(const Tour& tour,
                        const std::vector<Waypoint>& waypoints) {
  std::string out = "order,waypoint_id,x,y,payload_amount\n";
  for (std::size_t k = 0; k < tour.order.size(); ++k) {
    const int id = tour.order[k];
    const Waypoint* wp = nullptr;
    for (const Waypoint& w : waypoints) {
      if (w.id == id) wp = &w;
    }
    if (!wp) throw std::invalid_argument("tour references unknown waypoint");
    out += std::to_string(k) + ',' + std::to_string(id) + ',' + fixed6(wp->x) +
           ',' + fixed6(wp->y) + ',' + fixed6(wp->payload_amount()) + '\n';
  }
  out += "total_length," + fixed6(tour.length) + '\n';
  return out;
}

std::string format_manifest(
    const std::vector<std::pair<std::string, std::string>>& entries) {
  auto sorted = entries;
  std::sort(sorted.begin(), sorted.end());
  std::string out;
  for (const auto& [key, value] : sorted) {
    out += key + " = " + value + '\n';
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace firemap::io
