#include "firemap/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "firemap/dynamics.hpp"
#include "firemap/graph.hpp"
#include "firemap/intervention.hpp"
#include "firemap/io.hpp"
#include "firemap/landscape.hpp"
#include "firemap/routing.hpp"
#include "firemap/simulate.hpp"
#include "firemap/surveillance.hpp"

namespace firemap {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct InputFlags {
  std::string graph_path;
  std::string grid_path;
  bool grid16 = false;
  bool demo = false;
  double wind_speed = 0.0;
  double wind_from = 0.0;  // compass degrees the wind comes from
  bool wind_given = false;
};

void add_input_flags(CLI::App* cmd, InputFlags& in) {
  cmd->add_option("--graph", in.graph_path,
                  "graph interchange file (see README for the format)");
  cmd->add_option("--grid", in.grid_path, "landscape grid file");
  cmd->add_flag("--grid16", in.grid16, "built-in 16-node grid fixture");
  cmd->add_flag("--demo-landscape", in.demo, "built-in 25x40 demo landscape");
  cmd->add_option("--wind-speed", in.wind_speed,
                  "wind speed (m/s); landscape inputs only");
  cmd->add_option("--wind-from", in.wind_from,
                  "direction the wind is coming from (compass degrees)");
}

struct Input {
  SpreadGraph graph;
  std::optional<std::pair<int, int>> shape;  // rows, cols when grid-like
  std::string label;
};

Input load_input(const InputFlags& in) {
  const int picked = int(!in.graph_path.empty()) + int(!in.grid_path.empty()) +
                     int(in.grid16) + int(in.demo);
  if (picked != 1) {
    throw std::invalid_argument(
        "choose exactly one input: --graph, --grid, --grid16, or "
        "--demo-landscape");
  }
  if (in.wind_speed < 0.0) {
    throw std::invalid_argument("wind speed must be nonnegative");
  }

  std::optional<WindField> wind;
  if (in.wind_speed > 0.0) {
    // Compass "from" angle to the direction the wind blows toward, in grid
    // coordinates (x = column eastward, y = row downward/southward).
    const double rad = in.wind_from * 3.14159265358979323846 / 180.0;
    wind = WindField{in.wind_speed, std::atan2(std::cos(rad), -std::sin(rad))};
  }

  Input input;
  if (in.grid16) {
    if (wind) {
      throw std::invalid_argument(
          "wind applies to landscape grids only, not --grid16");
    }
    input.graph = grid16_fixture();
    input.shape = {{4, 4}};
    input.label = "grid16";
    return input;
  }
  if (!in.graph_path.empty()) {
    if (wind) {
      throw std::invalid_argument(
          "wind applies to landscape grids only, not --graph");
    }
    input.graph = parse_graph(io::read_file(in.graph_path));
    input.label = "graph:" + in.graph_path;
    return input;
  }
  LandscapeGrid grid =
      in.demo ? demo_landscape() : load_grid(io::read_file(in.grid_path));
  input.graph = to_graph(grid, RateParams{}, wind);
  input.shape = {{grid.rows, grid.cols}};
  input.label = in.demo ? "demo-landscape" : "grid:" + in.grid_path;
  return input;
}

void append_wind(std::vector<std::pair<std::string, std::string>>& manifest,
                 const InputFlags& in) {
  manifest.emplace_back("wind_speed", fmt(in.wind_speed));
  manifest.emplace_back("wind_from", fmt(in.wind_from));
}

Eigen::VectorXd costs_of(const SpreadGraph& graph) {
  Eigen::VectorXd C(graph.n);
  for (int i = 0; i < graph.n; ++i) C[i] = graph.nodes[i].cost;
  return C;
}

std::string values_file(const Eigen::VectorXd& values,
                        const std::optional<std::pair<int, int>>& shape) {
  if (shape) return io::format_raster(values, shape->first, shape->second);
  return io::format_node_values(values);
}

double resolve_rate(const DynamicsMatrix& dyn, double r, bool r_given,
                    double margin, bool margin_given,
                    std::vector<std::pair<std::string, std::string>>& manifest) {
  if (r_given == margin_given) {
    throw std::invalid_argument("give exactly one of -r or --auto-r");
  }
  double rate = r;
  if (margin_given) {
    if (!(margin > 0.0)) {
      throw std::invalid_argument("--auto-r margin must be positive");
    }
    rate = spectral_abscissa(dyn) + margin;
    manifest.emplace_back("auto_r_margin", fmt(margin));
  }
  manifest.emplace_back("r", fmt(rate));
  return rate;
}

void print_top_nodes(const Eigen::VectorXd& values,
                     const std::optional<std::pair<int, int>>& shape, int top) {
  std::vector<int> idx(values.size());
  for (int i = 0; i < values.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return values[a] != values[b] ? values[a] > values[b] : a < b;
  });
  top = std::min<int>(top, int(idx.size()));
  for (int k = 0; k < top; ++k) {
    const int i = idx[k];
    std::printf("node %d", i);
    if (shape) {
      std::printf(" (row %d, col %d)", i / shape->second, i % shape->second);
    }
    std::printf(" = %.6f\n", values[i]);
  }
}

void write_all(const fs::path& dir,
               const std::vector<std::pair<std::string, std::string>>& files) {
  fs::create_directories(dir);
  for (const auto& [name, content] : files) {
    io::write_file((dir / name).string(), content);
  }
}

ControlMode parse_mode(const std::string& mode) {
  if (mode == "edges") return ControlMode::edges;
  if (mode == "nodes") return ControlMode::nodes;
  if (mode == "both") return ControlMode::both;
  throw std::invalid_argument("mode must be edges, nodes, or both");
}

int run(const std::vector<std::string>& args) {
  CLI::App app{
      "firemap: surveillance priorities, budgeted interventions, simulators, "
      "and tour planning for spreading processes on graphs"};
  app.require_subcommand(1);

  // ---- surveil ----
  auto* surveil = app.add_subcommand(
      "surveil", "compute the normalized surveillance priority map");
  InputFlags s_in;
  add_input_flags(surveil, s_in);
  double s_r = 0.0, s_margin = 0.0;
  int s_top = 5;
  std::string s_out = ".";
  surveil->add_option("-r", s_r, "discount rate (must exceed the abscissa)");
  surveil->add_option("--auto-r", s_margin, "set r = spectral abscissa + margin");
  surveil->add_option("--top", s_top, "how many leading nodes to print");
  surveil->add_option("-o,--output", s_out, "output directory");

  // ---- intervene ----
  auto* intervene = app.add_subcommand(
      "intervene", "allocate a control budget and write the cost-to-go map");
  InputFlags i_in;
  add_input_flags(intervene, i_in);
  double i_r = 0.0, i_margin = 0.0, i_gamma = 0.0, i_tol = 1e-6,
         i_threshold = 0.05;
  int i_max_iter = 50;
  std::string i_mode = "edges", i_out = ".";
  intervene->add_option("-r", i_r, "discount rate");
  intervene->add_option("--auto-r", i_margin, "set r = spectral abscissa + margin");
  intervene->add_option("--gamma", i_gamma, "total control budget")->required();
  intervene->add_option("--mode", i_mode, "edges | nodes | both");
  intervene->add_option("--tol", i_tol, "outer-iteration stop tolerance");
  intervene->add_option("--max-iter", i_max_iter, "outer iteration cap");
  intervene->add_option("--threshold", i_threshold,
                        "report targets with k >= threshold * max entry");
  intervene->add_option("-o,--output", i_out, "output directory");

  // ---- simulate ----
  auto* simulate = app.add_subcommand(
      "simulate", "run one simulator and write the trajectory");
  InputFlags m_in;
  add_input_flags(simulate, m_in);
  std::string m_model, m_control, m_out = ".";
  std::vector<int> m_ignite;
  double m_dt = 0.01, m_horizon = 1.0;
  std::uint64_t m_seed = 0;
  int m_runs = 1;
  simulate->add_option("--model", m_model, "ca | nonlinear | linear")
      ->required();
  simulate->add_option("--ignite", m_ignite, "initially burning node id")
      ->required();
  simulate->add_option("--dt", m_dt, "step size");
  simulate->add_option("--horizon", m_horizon, "final time");
  simulate->add_option("--seed", m_seed, "RNG seed (ca)");
  simulate->add_option("--runs", m_runs, "replicate count (ca)");
  simulate->add_option("--control", m_control,
                       "control listing to apply as a closed loop");
  simulate->add_option("-o,--output", m_out, "output directory");

  // ---- route ----
  auto* route = app.add_subcommand(
      "route", "plan a closed tour over the targets of an intervention report");
  InputFlags r_in;
  add_input_flags(route, r_in);
  std::string r_report, r_method = "auto", r_out = ".";
  double r_threshold = 0.0;
  route->add_option("--report", r_report, "intervention report file")
      ->required();
  route->add_option("--threshold", r_threshold,
                    "keep targets with amount >= threshold * max amount");
  route->add_option("--method", r_method, "auto | exact | heuristic");
  route->add_option("-o,--output", r_out, "output directory");

  // ---- compare-models ----
  auto* compare = app.add_subcommand(
      "compare-models",
      "run all three simulators from one start and check the bounding "
      "hierarchy");
  InputFlags c_in;
  add_input_flags(compare, c_in);
  std::vector<int> c_ignite;
  double c_dt = 0.01, c_horizon = 1.0;
  std::uint64_t c_seed = 0;
  int c_runs = 100;
  std::string c_out = ".";
  compare->add_option("--ignite", c_ignite, "initially burning node id")
      ->required();
  compare->add_option("--dt", c_dt, "step size");
  compare->add_option("--horizon", c_horizon, "final time");
  compare->add_option("--seed", c_seed, "RNG seed (ca)");
  compare->add_option("--runs", c_runs, "replicate count (ca)");
  compare->add_option("-o,--output", c_out, "output directory");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("firemap");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (surveil->parsed()) {
    Input input = load_input(s_in);
    std::vector<std::pair<std::string, std::string>> manifest{
        {"command", "surveil"},      {"version", io::kVersion},
        {"input", input.label},      {"top", std::to_string(s_top)},
        {"output", s_out},           {"normalized", "yes"},
    };
    append_wind(manifest, s_in);
    const DynamicsMatrix dyn = build_dynamics(input.graph);
    const double rate =
        resolve_rate(dyn, s_r, surveil->count("-r") > 0, s_margin,
                     surveil->count("--auto-r") > 0, manifest);
    const PriorityMap map = normalize(priority_direct(dyn, costs_of(input.graph), rate));
    write_all(s_out, {{"priority.csv", values_file(map.p, input.shape)},
                      {"manifest.txt", io::format_manifest(manifest)}});
    print_top_nodes(map.p, input.shape, s_top);
    return 0;
  }

  if (intervene->parsed()) {
    Input input = load_input(i_in);
    std::vector<std::pair<std::string, std::string>> manifest{
        {"command", "intervene"},
        {"version", io::kVersion},
        {"input", input.label},
        {"gamma", fmt(i_gamma)},
        {"mode", i_mode},
        {"tol", fmt(i_tol)},
        {"max_iter", std::to_string(i_max_iter)},
        {"threshold", fmt(i_threshold)},
        {"output", i_out},
        {"normalized", "yes"},
    };
    append_wind(manifest, i_in);
    const DynamicsMatrix dyn = build_dynamics(input.graph);
    const double rate =
        resolve_rate(dyn, i_r, intervene->count("-r") > 0, i_margin,
                     intervene->count("--auto-r") > 0, manifest);
    const InterventionResult result =
        solve_intervention(dyn, costs_of(input.graph), rate, Budget{i_gamma},
                           parse_mode(i_mode), i_tol, i_max_iter);
    const std::vector<Target> targets = extract_targets(result.K, i_threshold);
    write_all(i_out,
              {{"report.txt", io::format_intervention_report(result, targets)},
               {"control.csv", io::format_control(result.K)},
               {"priority.csv",
                values_file(normalize(result.p).p, input.shape)},
               {"manifest.txt", io::format_manifest(manifest)}});
    std::printf("sum_p = %.6f after %d iteration%s (%s), budget used %.6f\n",
                result.p.p.sum(), result.iterations,
                result.iterations == 1 ? "" : "s",
                result.converged ? "converged" : "not converged",
                result.budget_used);
    if (result.rescaled) {
      std::printf("note: control rescaled to meet the budget\n");
    }
    return 0;
  }

  if (simulate->parsed()) {
    Input input = load_input(m_in);
    if (m_model != "ca" && m_model != "nonlinear" && m_model != "linear") {
      throw std::invalid_argument("model must be ca, nonlinear, or linear");
    }
    SpreadGraph graph = input.graph;
    if (!m_control.empty()) {
      graph = apply_control(
          graph, io::parse_control(io::read_file(m_control), graph.n));
    }
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(graph.n);
    for (int id : m_ignite) {
      if (id < 0 || id >= graph.n) {
        throw std::invalid_argument("ignite id outside the graph");
      }
      x0[id] = 1.0;
    }
    SimConfig cfg{m_dt, m_horizon, m_seed, m_runs};
    Trajectory traj;
    if (m_model == "ca") {
      traj = simulate_ca(graph, x0, cfg);
    } else if (m_model == "nonlinear") {
      traj = simulate_nonlinear(graph, x0, cfg);
    } else {
      traj = simulate_linear(build_dynamics(graph), x0, cfg);
    }
    std::vector<std::pair<std::string, std::string>> manifest{
        {"command", "simulate"}, {"version", io::kVersion},
        {"input", input.label},  {"model", m_model},
        {"dt", fmt(m_dt)},       {"horizon", fmt(m_horizon)},
        {"seed", std::to_string(m_seed)},
        {"runs", std::to_string(m_runs)},
        {"control", m_control.empty() ? "none" : m_control},
        {"output", m_out},
    };
    append_wind(manifest, m_in);
    std::string ignites;
    for (int id : m_ignite) {
      if (!ignites.empty()) ignites += ',';
      ignites += std::to_string(id);
    }
    manifest.emplace_back("ignite", ignites);
    write_all(m_out,
              {{"trajectory.csv", io::format_trajectory(traj)},
               {"final.csv", values_file(traj.states.back(), input.shape)},
               {"manifest.txt", io::format_manifest(manifest)}});
    std::printf("simulated %s to t=%.6f (%zu samples)\n", m_model.c_str(),
                traj.times.back(), traj.times.size());
    return 0;
  }

  if (route->parsed()) {
    Input input = load_input(r_in);
    if (r_method != "auto" && r_method != "exact" && r_method != "heuristic") {
      throw std::invalid_argument("method must be auto, exact, or heuristic");
    }
    std::vector<Target> targets =
        io::parse_intervention_report(io::read_file(r_report));
    double top = 0.0;
    for (const Target& t : targets) top = std::max(top, t.amount);
    std::erase_if(targets, [&](const Target& t) {
      return t.amount < r_threshold * top;
    });
    std::vector<std::pair<std::string, std::string>> manifest{
        {"command", "route"},      {"version", io::kVersion},
        {"input", input.label},    {"report", r_report},
        {"threshold", fmt(r_threshold)}, {"method", r_method},
        {"output", r_out},
    };
    append_wind(manifest, r_in);
    std::string tour_csv;
    if (targets.empty()) {
      std::fprintf(stderr,
                   "warning: no targets above the threshold; writing an empty "
                   "tour\n");
      tour_csv = io::format_tour(Tour{}, {});
    } else {
      const std::vector<Waypoint> waypoints =
          targets_to_waypoints(targets, input.graph);
      const TspMethod method =
          r_method == "exact" ? TspMethod::exact
          : r_method == "heuristic"
              ? TspMethod::heuristic
              : (waypoints.size() <= 18 ? TspMethod::exact
                                        : TspMethod::heuristic);
      const Tour tour = solve_tsp(waypoints, method);
      tour_csv = io::format_tour(tour, waypoints);
      std::printf("tour over %zu waypoints, length %.6f\n", waypoints.size(),
                  tour.length);
    }
    write_all(r_out, {{"tour.csv", tour_csv},
                      {"manifest.txt", io::format_manifest(manifest)}});
    return 0;
  }

  if (compare->parsed()) {
    Input input = load_input(c_in);
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(input.graph.n);
    for (int id : c_ignite) {
      if (id < 0 || id >= input.graph.n) {
        throw std::invalid_argument("ignite id outside the graph");
      }
      x0[id] = 1.0;
    }
    SimConfig cfg{c_dt, c_horizon, c_seed, c_runs};
    const Trajectory ca = simulate_ca(input.graph, x0, cfg);
    const Trajectory nl = simulate_nonlinear(input.graph, x0, cfg);
    const Trajectory lin =
        simulate_linear(build_dynamics(input.graph), x0, cfg);

    // CA mean <= nonlinear + 3*stderr and nonlinear <= linear + 1e-6,
    // elementwise at every sample.
    double worst_ca = -std::numeric_limits<double>::infinity();
    double worst_nl = worst_ca;
    for (std::size_t k = 0; k < ca.times.size(); ++k) {
      for (int i = 0; i < input.graph.n; ++i) {
        const double mean = ca.states[k][i];
        const double se = std::sqrt(std::max(mean * (1.0 - mean), 0.0) /
                                    double(c_runs));
        worst_ca = std::max(worst_ca, mean - (nl.states[k][i] + 3.0 * se));
        worst_nl = std::max(worst_nl, nl.states[k][i] - lin.states[k][i]);
      }
    }
    const bool ok = worst_ca <= 0.0 && worst_nl <= 1e-6;

    std::vector<std::pair<std::string, std::string>> manifest{
        {"command", "compare-models"}, {"version", io::kVersion},
        {"input", input.label},        {"dt", fmt(c_dt)},
        {"horizon", fmt(c_horizon)},   {"seed", std::to_string(c_seed)},
        {"runs", std::to_string(c_runs)},
        {"output", c_out},
    };
    append_wind(manifest, c_in);
    std::string ignites;
    for (int id : c_ignite) {
      if (!ignites.empty()) ignites += ',';
      ignites += std::to_string(id);
    }
    manifest.emplace_back("ignite", ignites);
    write_all(c_out, {{"trajectory_ca.csv", io::format_trajectory(ca)},
                      {"trajectory_nonlinear.csv", io::format_trajectory(nl)},
                      {"trajectory_linear.csv", io::format_trajectory(lin)},
                      {"manifest.txt", io::format_manifest(manifest)}});
    std::printf("hierarchy: %s (max CA excess %.3e, max nonlinear excess "
                "%.3e)\n",
                ok ? "ok" : "violated", worst_ca, worst_nl);
    return 0;
  }

  return 1;  // unreachable: a subcommand is required
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  try {
    return run(args);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace firemap
