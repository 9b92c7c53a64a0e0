#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specwalk/diagnostics.hpp"
#include "specwalk/embedding.hpp"
#include "specwalk/evaluate.hpp"
#include "specwalk/graph.hpp"
#include "specwalk/split.hpp"

namespace specwalk {

/// Everything one experiment needs, mirrored 1:1 by the config file keys and
/// the CLI flags. Defaults follow the published operating point.
struct RunConfig {
  std::string dataset;      // edge list path
  std::string labels_path;  // node-classification labels (vertex<TAB>class)
  std::string outdir = "out";

  int hops = 2;
  int cap = 30;
  bool binary_spectra = false;

  int k = 5;
  double ot_order = 2.0;
  double bias_prob = 0.6;  // epsilon
  int walk_length = 100;   // T
  int walks_per_node = 50; // K
  bool online_bias = false;

  int dim = 128;
  int window = 10;  // C
  double gamma = 1e-7;
  int epochs = 100;
  int pv_passes = 10;
  double learning_rate = 0.025;
  double head_learning_rate = 0.5;
  double grad_clip = 1.0;
  int negatives = 5;
  bool full_softmax = false;

  std::string task = "lp";  // lp | nc | none
  double test_fraction = 0.1;
  bool walks_on_full_graph = false;
  int nc_train_per_class = 20;
  int nc_test_cap = 1000;
  int runs = 1;
  std::uint64_t seed = 7;
  int threads = 1;

  // Walk-quality diagnostics.
  int diag_pairs = 1000;
  int diag_runs = 10;
  int diag_starts = 100;
  int diag_packing_runs = 100;
  int diag_cover_max = 4000;
  double radius_percentile = 10.0;
  double pair_percentile = 5.0;

  void validate() const;
};

/// Flat `key = value` file; '#' comments ignored. Unknown keys are errors.
RunConfig load_run_config(const std::string& path);
void set_config_key(RunConfig& cfg, const std::string& key,
                    const std::string& value);
std::string config_echo(const RunConfig& cfg);
void save_run_config(const RunConfig& cfg, const std::string& path);

// ---- in-memory experiment protocol ----

struct LpOutcome {
  double auc = 0.0;
  int isolated_train_vertices = 0;
};

/// Full link-prediction run at one seed: split, hide test edges, spectra,
/// bias, corpus, train, score.
LpOutcome run_lp_once(const Graph& g, const RunConfig& cfg,
                      std::uint64_t seed);

/// Full node-classification run at one seed on the whole graph.
double run_nc_once(const Graph& g, const std::vector<int>& labels,
                   const RunConfig& cfg, std::uint64_t seed);

/// cfg.runs repetitions at seeds seed+0..runs-1, parallel across runs up to
/// cfg.threads workers (each run is single-threaded and deterministic).
Aggregate lp_protocol(const Graph& g, const RunConfig& cfg);
Aggregate nc_protocol(const Graph& g, const std::vector<int>& labels,
                      const RunConfig& cfg);

struct SweepGrid {
  std::vector<int> window{5, 10};
  std::vector<int> walk_length{50, 100};
  std::vector<double> gamma{1e-8, 1e-7, 1e-6};
  std::vector<double> bias_prob;  // empty = keep cfg.bias_prob
};

struct SweepRow {
  int window = 0;
  int walk_length = 0;
  double gamma = 0.0;
  double bias_prob = 0.0;
  double auc_mean = 0.0;
  double auc_std = 0.0;
};

std::vector<SweepRow> sweep(const Graph& g, const RunConfig& base,
                            const SweepGrid& grid);
void save_sweep(const std::vector<SweepRow>& rows, const RunConfig& cfg,
                const std::string& path);

// ---- artifact-producing stages (the CLI subcommands) ----

void stage_spectra(const RunConfig& cfg);
void stage_walks(const RunConfig& cfg);
void stage_train(const RunConfig& cfg);
double stage_eval_lp(const RunConfig& cfg);
double stage_eval_nc(const RunConfig& cfg);
void stage_diagnose(const RunConfig& cfg, const std::string& kind);
void stage_sweep(const RunConfig& cfg, const SweepGrid& grid);
double stage_pipeline(const RunConfig& cfg);

}  // namespace specwalk
