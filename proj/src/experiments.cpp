#include "surplus/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "surplus/parallel.hpp"
#include "surplus/special_topologies.hpp"

namespace surplus {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("graph: cannot open '" + path + "'");
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

}  // namespace

WeightChoice parse_weight_choice(const std::string& text) {
  WeightChoice choice;
  if (text == "example1") {
    choice.scheme = WeightScheme::kNeighborCount;
  } else if (text == "uniform") {
    choice.scheme = WeightScheme::kEdgeCount;
  } else if (text == "regular") {
    choice.scheme = WeightScheme::kDegreeRegular;
  } else if (text.find(',') != std::string::npos) {
    double a = 0.0, b = 0.0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lf,%lf%c", &a, &b, &tail) != 2)
      throw config_error("weights: expected '<a>,<b>', got '" + text + "'");
    choice.explicit_ab = {a, b};
  } else {
    throw config_error("weights: unknown scheme '" + text + "'");
  }
  return choice;
}

Digraph apply_weight_choice(const Digraph& g, const WeightChoice& choice) {
  if (!choice.explicit_ab) return with_weights(g, choice.scheme);
  std::vector<Edge> edges = g.edges();
  for (Edge& e : edges) {
    e.a = choice.explicit_ab->first;
    e.b = choice.explicit_ab->second;
  }
  return Digraph(g.node_count(), std::move(edges));
}

Digraph random_strongly_connected(int n, double p_edge, std::uint64_t seed,
                                  WeightScheme scheme) {
  if (n < 2) throw config_error("random: n must be >= 2");
  if (p_edge <= 0.0 || p_edge > 1.0) throw config_error("random: p_edge must lie in (0,1]");
  constexpr int kAttemptBudget = 10000;
  for (int attempt = 0; attempt < kAttemptBudget; ++attempt) {
    RandomStream stream = RandomStream::derive(seed, "random-digraph", attempt);
    std::vector<std::pair<int, int>> arcs;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        if (i == j) continue;
        if (stream.next_bernoulli(p_edge)) arcs.push_back({j, i});
      }
    if (arcs.empty()) continue;
    Digraph candidate = make_digraph(n, arcs, scheme);
    if (is_strongly_connected(candidate)) return candidate;
  }
  throw numeric_error("random: no strongly connected digraph found (p_edge too small for n)");
}

Digraph random_connected_undirected(int n, double p_edge, std::uint64_t seed) {
  if (n < 2) throw config_error("random: n must be >= 2");
  if (p_edge <= 0.0 || p_edge > 1.0) throw config_error("random: p_edge must lie in (0,1]");
  constexpr int kAttemptBudget = 10000;
  for (int attempt = 0; attempt < kAttemptBudget; ++attempt) {
    RandomStream stream = RandomStream::derive(seed, "random-undirected", attempt);
    std::vector<std::pair<int, int>> arcs;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (stream.next_bernoulli(p_edge)) {
          arcs.push_back({i, j});
          arcs.push_back({j, i});
        }
    if (arcs.empty()) continue;
    Digraph candidate = make_digraph(n, arcs, WeightScheme::kDegreeRegular);
    if (is_strongly_connected(candidate)) return candidate;
  }
  throw numeric_error("random: no connected graph found (p_edge too small for n)");
}

Vector random_initial_state(int n, std::uint64_t seed) {
  RandomStream stream = RandomStream::derive(seed, "x0");
  Vector x0(n);
  for (int i = 0; i < n; ++i) x0(i) = stream.next_normal();
  x0.array() -= x0.mean();
  return x0;
}

Digraph load_graph(const ExperimentConfig& cfg) {
  if (!cfg.graph_file.empty() && cfg.random_graph)
    throw config_error("graph: give either a file or a random spec, not both");
  if (!cfg.graph_file.empty()) {
    // A scheme only fills weights the file leaves out; an explicit "a,b"
    // pair overrides everything.
    const std::string text = read_file(cfg.graph_file);
    if (cfg.weights.explicit_ab) return apply_weight_choice(parse_digraph(text), cfg.weights);
    return parse_digraph(text, cfg.weights.scheme);
  }
  if (cfg.random_graph) {
    const RandomGraphSpec& spec = *cfg.random_graph;
    return apply_weight_choice(
        random_strongly_connected(spec.n, spec.p_edge, spec.seed), cfg.weights);
  }
  throw config_error("graph: no source configured");
}

std::string verdict_name(RunVerdict v) {
  switch (v) {
    case RunVerdict::kConverged: return "converged";
    case RunVerdict::kDiverged: return "diverged";
    case RunVerdict::kTimeout: return "timeout";
  }
  return "unknown";
}

nlohmann::json cmd_analyze(const ExperimentConfig& cfg) {
  const Digraph g = load_graph(cfg);
  nlohmann::json report;
  report["n"] = g.node_count();
  report["edges"] = g.edge_count();
  report["degree"] = degree(g);
  report["strongly_connected"] = is_strongly_connected(g);
  report["balanced"] = is_balanced(g);
  report["epsilon"] = cfg.epsilon;
  if (!report["strongly_connected"].get<bool>()) return report;

  const WeightSystem w = build_weight_system(g);
  const EpsilonBound bound = epsilon_bound_general(w);
  report["lambda3"] = bound.lambda3_modulus;
  report["epsilon_bound"] = bound.value;
  report["epsilon_bound_log"] = bound.log_value;

  const Certification det = certify(assemble_system(w, cfg.epsilon));
  report["lambda2_d"] = det.factor;
  report["unit_eigenvalue_simple"] = det.unit_eigenvalue_simple;
  report["certified"] = det.certified;

  const long lifted = 4L * g.node_count() * g.node_count();
  if (lifted <= kDimensionCap) {
    report["lambda2_g"] =
        convergence_factor_gossip(make_gossip_system(g, cfg.epsilon, cfg.gossip_weight));
  } else {
    report["lambda2_g_omitted"] =
        "second-moment dimension " + std::to_string(lifted) + " exceeds cap";
  }

  if (is_symmetric(g)) report["undirected_bound"] = undirected_epsilon_bound(g.node_count());
  if (is_cyclic_topology(g) && g.node_count() >= 3) {
    const CyclicBound cyc = cyclic_epsilon_bound(g.node_count());
    report["cyclic_bound"] = cyc.epsilon_bound;
    report["cyclic_lambda3"] = cyc.lambda3_modulus;
  }
  return report;
}

namespace {

Vector initial_state_for(const ExperimentConfig& cfg, int n) {
  if (cfg.x0_file.empty()) return random_initial_state(n, cfg.seed);
  std::istringstream in(read_file(cfg.x0_file));
  std::vector<double> values;
  double v;
  while (in >> v) values.push_back(v);
  if (static_cast<int>(values.size()) != n)
    throw config_error("x0: file holds " + std::to_string(values.size()) +
                       " values, graph has " + std::to_string(n) + " nodes");
  return Eigen::Map<const Vector>(values.data(), n);
}

std::string trajectory_header(int n, bool with_edge) {
  std::string h = "k";
  for (int i = 1; i <= n; ++i) h += ",x_" + std::to_string(i);
  for (int i = 1; i <= n; ++i) h += ",s_" + std::to_string(i);
  if (with_edge) h += ",edge";
  return h + "\n";
}

void append_state_row(std::string& csv, long k, const Vector& x, const Vector& s) {
  csv += std::to_string(k);
  for (int i = 0; i < x.size(); ++i) csv += "," + fmt(x(i));
  for (int i = 0; i < s.size(); ++i) csv += "," + fmt(s(i));
}

}  // namespace

RunOutput cmd_run(const ExperimentConfig& cfg) {
  if (cfg.mode != "det" && cfg.mode != "gossip")
    throw config_error("mode: expected det or gossip, got '" + cfg.mode + "'");
  const Digraph g = load_graph(cfg);
  const int n = g.node_count();
  const Vector x0 = initial_state_for(cfg, n);

  RunOutput out;
  if (cfg.mode == "det") {
    const DeterministicSystem sys = assemble_system(build_weight_system(g), cfg.epsilon);
    const RunResult result = run(sys, x0, cfg.max_iter, cfg.tol);
    out.verdict = result.verdict;
    out.trajectory_csv = trajectory_header(n, false);
    for (const TrajectoryPoint& p : result.trajectory) {
      append_state_row(out.trajectory_csv, p.k, p.x, p.s);
      out.trajectory_csv += "\n";
    }
    out.summary = {{"verdict", verdict_name(result.verdict)},
                   {"iterations", result.iterations},
                   {"lambda2", convergence_factor(sys)},
                   {"epsilon", cfg.epsilon},
                   {"x_avg", result.x_avg}};
  } else {
    if (cfg.trials < 1) throw config_error("trials: gossip mode needs trials >= 1");
    const GossipSystem sys = make_gossip_system(g, cfg.epsilon, cfg.gossip_weight);
    const GossipRunResult result = run_gossip(sys, x0, cfg.max_iter, cfg.tol, cfg.seed);
    out.verdict = result.verdict;
    out.trajectory_csv = trajectory_header(n, true);
    for (const GossipTrajectoryPoint& p : result.trajectory) {
      append_state_row(out.trajectory_csv, p.k, p.x, p.s);
      out.trajectory_csv += ",";
      if (p.edge_from >= 0)
        out.trajectory_csv +=
            std::to_string(p.edge_from + 1) + "-" + std::to_string(p.edge_to + 1);
      out.trajectory_csv += "\n";
    }
    const long lifted = 4L * n * n;
    nlohmann::json lambda2;
    if (lifted <= kDimensionCap) lambda2 = convergence_factor_gossip(sys);
    out.summary = {{"verdict", verdict_name(result.verdict)},
                   {"iterations", result.iterations},
                   {"lambda2", lambda2},
                   {"epsilon", cfg.epsilon},
                   {"x_avg", result.x_avg}};
    if (cfg.mse_horizon > 0) {
      if (cfg.trials < 1) throw config_error("trials: gossip error curve needs trials >= 1");
      const MseCurve curve =
          mean_square_error_curve(sys, x0, cfg.mse_horizon, cfg.trials, cfg.seed);
      out.mse_csv = "k,mse_full,mse_state,stderr\n";
      for (int k = 0; k <= cfg.mse_horizon; ++k)
        out.mse_csv += std::to_string(k) + "," + fmt(curve.mse_full[k]) + "," +
                       fmt(curve.mse_state[k]) + "," + fmt(curve.stderr_full[k]) + "\n";
    }
  }
  return out;
}

std::string cmd_sweep(const ExperimentConfig& cfg) {
  if (cfg.eps_grid.empty()) throw config_error("eps-grid: sweep needs a nonempty grid");
  if (cfg.sweep_graphs < 1) throw config_error("graphs: must average over at least 1 digraph");
  if (!cfg.random_graph) throw config_error("random: sweep needs a random-graph spec");
  const RandomGraphSpec& spec = *cfg.random_graph;
  const long lifted = 4L * spec.n * spec.n;
  if (cfg.sweep_gossip && lifted > kDimensionCap)
    throw config_error("gossip: second-moment dimension " + std::to_string(lifted) +
                       " exceeds cap " + std::to_string(kDimensionCap));

  const int grid = static_cast<int>(cfg.eps_grid.size());
  std::vector<std::vector<double>> det_factor(cfg.sweep_graphs, std::vector<double>(grid));
  std::vector<std::vector<double>> gos_factor(cfg.sweep_graphs, std::vector<double>(grid));

  parallel_for(cfg.sweep_graphs, [&](int gi) {
    const std::uint64_t sub_seed =
        RandomStream::derive(cfg.seed, "sweep-graph", gi).next_u64();
    const Digraph g = apply_weight_choice(
        random_strongly_connected(spec.n, spec.p_edge, sub_seed), cfg.weights);
    const WeightSystem w = build_weight_system(g);
    for (int e = 0; e < grid; ++e) {
      det_factor[gi][e] = convergence_factor(assemble_system(w, cfg.eps_grid[e]));
      if (cfg.sweep_gossip)
        gos_factor[gi][e] = convergence_factor_gossip(
            make_gossip_system(g, cfg.eps_grid[e], cfg.gossip_weight));
    }
  });

  std::string csv = "epsilon,lambda2_d_mean,lambda2_g_mean\n";
  for (int e = 0; e < grid; ++e) {
    double det_mean = 0.0, gos_mean = 0.0;
    for (int gi = 0; gi < cfg.sweep_graphs; ++gi) {
      det_mean += det_factor[gi][e];
      gos_mean += gos_factor[gi][e];
    }
    det_mean /= cfg.sweep_graphs;
    gos_mean /= cfg.sweep_graphs;
    csv += fmt(cfg.eps_grid[e]) + "," + fmt(det_mean) + ",";
    csv += cfg.sweep_gossip ? fmt(gos_mean) : std::string("nan");
    csv += "\n";
  }
  return csv;
}

std::string cmd_bounds(const ExperimentConfig& cfg) {
  if (cfg.n_min < 2 || cfg.n_max < cfg.n_min)
    throw config_error("n-range: need 2 <= n_min <= n_max");
  const int count = cfg.n_max - cfg.n_min + 1;
  std::vector<double> sampled(count);
  parallel_for(count, [&](int i) {
    const int n = cfg.n_min + i;
    const std::uint64_t sub_seed =
        RandomStream::derive(cfg.seed, "bounds-balanced", n).next_u64();
    sampled[i] = balanced_epsilon_bound(n, cfg.samples, sub_seed);
  });
  std::string csv = "n,bound_sampled,bound_undirected,bound_cyclic\n";
  for (int i = 0; i < count; ++i) {
    const int n = cfg.n_min + i;
    csv += std::to_string(n) + "," + fmt(sampled[i]) + "," + fmt(undirected_epsilon_bound(n));
    csv += ",";
    csv += n >= 3 ? fmt(cyclic_epsilon_bound(n).epsilon_bound) : std::string("nan");
    csv += "\n";
  }
  return csv;
}

std::string cmd_gen(const ExperimentConfig& cfg) {
  if (!cfg.random_graph) throw config_error("random: gen needs a random-graph spec");
  const RandomGraphSpec& spec = *cfg.random_graph;
  return serialize_digraph(apply_weight_choice(
      random_strongly_connected(spec.n, spec.p_edge, spec.seed), cfg.weights));
}

}  // namespace surplus
