// Batch front end for the consensus library: ingest or generate digraphs,
// run the synchronous and gossip iterations, sweep epsilon, and emit the
// CSV/JSON artifacts. Exit codes: 0 ok, 1 usage/config error, 2 numerical
// failure, 3 run did not converge.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "surplus/experiments.hpp"

namespace {

std::vector<double> parse_grid(const std::string& text) {
  double lo = 0.0, hi = 0.0, step = 0.0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &lo, &hi, &step, &tail) != 3 || step <= 0.0)
    throw surplus::config_error("eps-grid: expected '<start>:<stop>:<step>', got '" + text + "'");
  std::vector<double> grid;
  for (double v = lo; v <= hi + 1e-12 * step; v += step) grid.push_back(v);
  if (grid.empty()) throw surplus::config_error("eps-grid: empty grid");
  return grid;
}

surplus::RandomGraphSpec parse_random_spec(const std::string& text) {
  surplus::RandomGraphSpec spec;
  char tail = 0;
  unsigned long long seed = 0;
  if (std::sscanf(text.c_str(), "%d,%lf,%llu%c", &spec.n, &spec.p_edge, &seed, &tail) != 3)
    throw surplus::config_error("random: expected '<n>,<p>,<seed>', got '" + text + "'");
  spec.seed = seed;
  return spec;
}

void write_or_print(const std::string& path, const std::string& body) {
  if (path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw surplus::config_error("out: cannot write '" + path + "'");
  out << body;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surplus-based average consensus on strongly connected digraphs"};
  app.require_subcommand(1);
  app.fallthrough();  // shared flags may follow the subcommand name
  app.set_config("--config", "", "Flat key=value configuration file; flags win");

  std::string graph_file, random_spec, weights = "example1", mode = "det", out_path;
  std::string eps_grid_text, n_range = "3:20", x0_file;
  double epsilon = 0.1, tol = 1e-8, gossip_weight = 0.5;
  long max_iter = 100000;
  int trials = 1000, sweep_graphs = 20, samples = 1000, mse_horizon = 0;
  bool sweep_gossip = false;
  std::uint64_t seed = 1;

  app.add_option("--graph", graph_file, "Edge-list file");
  app.add_option("--random", random_spec, "Random digraph spec n,p,seed");
  app.add_option("--weights", weights, "example1 | uniform | regular | <a>,<b>");
  app.add_option("--eps", epsilon, "Surplus feedback gain");
  app.add_option("--eps-grid", eps_grid_text, "Sweep grid start:stop:step");
  app.add_option("--mode", mode, "det | gossip (run)");
  app.add_option("--tol", tol, "Convergence tolerance");
  app.add_option("--max-iter", max_iter, "Iteration budget");
  app.add_option("--trials", trials, "Gossip Monte Carlo trials");
  app.add_option("--mse-horizon", mse_horizon,
                 "Also emit the gossip error curve over this many rounds");
  app.add_option("--graphs", sweep_graphs, "Digraphs averaged per sweep point");
  app.add_option("--samples", samples, "Mu samples for the sampled balanced bound");
  app.add_option("--gossip-weight", gossip_weight, "Per-edge gossip updating weight");
  app.add_flag("--gossip", sweep_gossip, "Also sweep the gossip factor");
  app.add_option("--n-range", n_range, "Bounds-mode node range min:max");
  app.add_option("--x0", x0_file, "Initial-state file (one value per node)");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", out_path, "Output path (stdout when omitted)");

  CLI::App* analyze = app.add_subcommand("analyze", "Structural and spectral report");
  CLI::App* run_cmd = app.add_subcommand("run", "Simulate one trajectory");
  CLI::App* sweep = app.add_subcommand("sweep", "Convergence factor vs epsilon");
  CLI::App* bounds = app.add_subcommand("bounds", "Epsilon thresholds per node count");
  CLI::App* gen = app.add_subcommand("gen", "Emit a random strongly connected digraph");

  CLI11_PARSE(app, argc, argv);

  try {
    surplus::ExperimentConfig cfg;
    cfg.graph_file = graph_file;
    if (!random_spec.empty()) cfg.random_graph = parse_random_spec(random_spec);
    cfg.weights = surplus::parse_weight_choice(weights);
    cfg.mode = mode;
    cfg.epsilon = epsilon;
    if (!eps_grid_text.empty()) cfg.eps_grid = parse_grid(eps_grid_text);
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    cfg.trials = trials;
    cfg.mse_horizon = mse_horizon;
    cfg.sweep_graphs = sweep_graphs;
    cfg.sweep_gossip = sweep_gossip;
    cfg.samples = samples;
    cfg.gossip_weight = gossip_weight;
    cfg.x0_file = x0_file;
    cfg.seed = seed;
    if (std::sscanf(n_range.c_str(), "%d:%d", &cfg.n_min, &cfg.n_max) != 2)
      throw surplus::config_error("n-range: expected '<min>:<max>'");

    if (analyze->parsed()) {
      write_or_print(out_path, surplus::cmd_analyze(cfg).dump(2) + "\n");
    } else if (run_cmd->parsed()) {
      if (mse_horizon > 0 && out_path.empty())
        throw surplus::config_error("out: the gossip error curve needs --out");
      const surplus::RunOutput result = surplus::cmd_run(cfg);
      write_or_print(out_path, result.trajectory_csv);
      const std::string summary = result.summary.dump(2) + "\n";
      if (!out_path.empty()) {
        std::ofstream sum(out_path + ".summary.json", std::ios::binary);
        sum << summary;
        if (!result.mse_csv.empty()) {
          std::ofstream mse(out_path + ".mse.csv", std::ios::binary);
          mse << result.mse_csv;
        }
      }
      std::cout << summary;
      if (result.verdict != surplus::RunVerdict::kConverged) return 3;
    } else if (sweep->parsed()) {
      write_or_print(out_path, surplus::cmd_sweep(cfg));
    } else if (bounds->parsed()) {
      write_or_print(out_path, surplus::cmd_bounds(cfg));
    } else if (gen->parsed()) {
      write_or_print(out_path, surplus::cmd_gen(cfg));
    }
    return 0;
  } catch (const surplus::config_error& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 1;
  } catch (const surplus::parse_error& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 1;
  } catch (const surplus::numeric_error& err) {
    std::cerr << "numerical failure: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
}
