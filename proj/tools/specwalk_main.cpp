// specwalk: spectral-biased random-walk node embeddings.
//
// Pipeline stages (each consumes the previous stage's artifacts in --outdir):
//   spectra -> walks -> train -> eval-lp / eval-nc, plus diagnose and sweep.
// `pipeline` chains spectra/walks/train/eval with one configuration.

#include <CLI11.hpp>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "specwalk/errors.hpp"
#include "specwalk/pipeline.hpp"

namespace {

using specwalk::RunConfig;
using specwalk::SweepGrid;

struct CliOptions {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
};

// Registers every RunConfig knob as a flag; flags override the config file.
void add_config_flags(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("--config", opts.config_path, "flat key = value config file");
  auto capture = [&opts](const std::string& key) {
    return [&opts, key](const std::string& value) {
      opts.overrides.emplace_back(key, value);
    };
  };
  static const char* keys[] = {
      "dataset", "labels", "outdir", "hops", "cap", "binary_spectra", "k",
      "ot_order", "bias_prob", "walk_length", "walks_per_node", "online_bias",
      "dim", "window", "gamma", "epochs", "learning_rate", "head_learning_rate", "grad_clip", "negatives",
      "pv_passes", "full_softmax", "task", "test_fraction", "walks_on_full_graph",
      "nc_train_per_class", "nc_test_cap", "runs", "seed", "threads",
      "diag_pairs", "diag_runs", "diag_starts", "diag_packing_runs",
      "diag_cover_max", "radius_percentile", "pair_percentile"};
  for (const char* key : keys) {
    std::string flag = "--" + std::string(key);
    for (auto& ch : flag)
      if (ch == '_') ch = '-';
    cmd->add_option_function<std::string>(flag, capture(key));
  }
}

RunConfig materialize(const CliOptions& opts) {
  RunConfig cfg;
  if (!opts.config_path.empty())
    cfg = specwalk::load_run_config(opts.config_path);
  for (const auto& [key, value] : opts.overrides)
    specwalk::set_config_key(cfg, key, value);
  return cfg;
}

template <typename T>
std::vector<T> parse_list(const std::string& csv) {
  std::vector<T> out;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    if constexpr (std::is_same_v<T, int>)
      out.push_back(std::stoi(item));
    else
      out.push_back(std::stod(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral-biased random-walk graph embeddings"};
  app.require_subcommand(1);

  CliOptions opts;
  std::string diagnose_kind = "all";
  std::string grid_window = "5,10";
  std::string grid_walk_length = "50,100";
  std::string grid_gamma = "1e-8,1e-7,1e-6";
  std::string grid_bias_prob;

  auto* c_spectra = app.add_subcommand(
      "spectra", "load the graph, split edges (lp), precompute spectra");
  auto* c_walks = app.add_subcommand(
      "walks", "build the bias model and generate the walk corpus");
  auto* c_train =
      app.add_subcommand("train", "train embeddings from the corpus");
  auto* c_eval_lp = app.add_subcommand(
      "eval-lp", "link-prediction AUC (artifact mode, or --runs N protocol)");
  auto* c_eval_nc = app.add_subcommand(
      "eval-nc", "node-classification accuracy on stratified splits");
  auto* c_diagnose = app.add_subcommand(
      "diagnose", "hitting-rank / packing / cover-time walk diagnostics");
  auto* c_sweep =
      app.add_subcommand("sweep", "AUC over a (C, T, gamma, bias-prob) grid");
  auto* c_pipeline = app.add_subcommand(
      "pipeline", "spectra -> walks -> train -> eval in one invocation");

  for (CLI::App* cmd : {c_spectra, c_walks, c_train, c_eval_lp, c_eval_nc,
                        c_diagnose, c_sweep, c_pipeline})
    add_config_flags(cmd, opts);
  c_diagnose->add_option("--kind", diagnose_kind,
                         "hitting | packing | cover | all");
  c_sweep->add_option("--grid-window", grid_window, "comma-separated C grid");
  c_sweep->add_option("--grid-walk-length", grid_walk_length,
                      "comma-separated T grid");
  c_sweep->add_option("--grid-gamma", grid_gamma,
                      "comma-separated gamma grid");
  c_sweep->add_option("--grid-bias-prob", grid_bias_prob,
                      "comma-separated bias-prob grid (default: config value)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const RunConfig cfg = materialize(opts);
    if (c_spectra->parsed()) specwalk::stage_spectra(cfg);
    if (c_walks->parsed()) specwalk::stage_walks(cfg);
    if (c_train->parsed()) specwalk::stage_train(cfg);
    if (c_eval_lp->parsed()) specwalk::stage_eval_lp(cfg);
    if (c_eval_nc->parsed()) specwalk::stage_eval_nc(cfg);
    if (c_diagnose->parsed()) specwalk::stage_diagnose(cfg, diagnose_kind);
    if (c_sweep->parsed()) {
      SweepGrid grid;
      grid.window = parse_list<int>(grid_window);
      grid.walk_length = parse_list<int>(grid_walk_length);
      grid.gamma = parse_list<double>(grid_gamma);
      grid.bias_prob = parse_list<double>(grid_bias_prob);
      specwalk::stage_sweep(cfg, grid);
    }
    if (c_pipeline->parsed()) specwalk::stage_pipeline(cfg);
  } catch (const specwalk::usage_error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const specwalk::data_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const specwalk::numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
