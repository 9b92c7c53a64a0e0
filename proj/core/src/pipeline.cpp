#include "specwalk/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "specwalk/errors.hpp"
#include "specwalk/rng.hpp"
#include "specwalk/walk.hpp"

namespace fs = std::filesystem;

namespace specwalk {

void RunConfig::validate() const {
  if (hops < 1) throw usage_error("hops must be >= 1");
  if (cap < 1) throw usage_error("cap must be >= 1");
  if (cap > 64) throw usage_error("cap > 64 exceeds the dense eigensolver budget");
  if (k < 1) throw usage_error("k must be >= 1");
  if (ot_order < 1.0) throw usage_error("ot_order must be >= 1");
  if (bias_prob < 0.0 || bias_prob > 1.0)
    throw usage_error("bias_prob must lie in [0,1]");
  if (walk_length < 2) throw usage_error("walk_length must be >= 2");
  if (walks_per_node < 1) throw usage_error("walks_per_node must be >= 1");
  if (dim < 1) throw usage_error("dim must be >= 1");
  if (window < 1) throw usage_error("window must be >= 1");
  if (gamma < 0.0) throw usage_error("gamma must be >= 0");
  if (epochs < 1) throw usage_error("epochs must be >= 1");
  if (pv_passes < 1) throw usage_error("pv_passes must be >= 1");
  if (learning_rate <= 0.0) throw usage_error("learning_rate must be > 0");
  if (negatives < 1) throw usage_error("negatives must be >= 1");
  if (task != "lp" && task != "nc" && task != "none")
    throw usage_error("task must be lp, nc or none");
  if (test_fraction <= 0.0 || test_fraction >= 1.0)
    throw usage_error("test_fraction must lie in (0,1)");
  if (runs < 1) throw usage_error("runs must be >= 1");
  if (threads < 1) throw usage_error("threads must be >= 1");
}

namespace {

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw usage_error("expected boolean, got '" + v + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void set_config_key(RunConfig& cfg, const std::string& key,
                    const std::string& value) {
  if (key == "dataset") cfg.dataset = value;
  else if (key == "labels") cfg.labels_path = value;
  else if (key == "outdir") cfg.outdir = value;
  else if (key == "hops") cfg.hops = std::stoi(value);
  else if (key == "cap") cfg.cap = std::stoi(value);
  else if (key == "binary_spectra") cfg.binary_spectra = parse_bool(value);
  else if (key == "k") cfg.k = std::stoi(value);
  else if (key == "ot_order") cfg.ot_order = std::stod(value);
  else if (key == "bias_prob") cfg.bias_prob = std::stod(value);
  else if (key == "walk_length") cfg.walk_length = std::stoi(value);
  else if (key == "walks_per_node") cfg.walks_per_node = std::stoi(value);
  else if (key == "online_bias") cfg.online_bias = parse_bool(value);
  else if (key == "dim") cfg.dim = std::stoi(value);
  else if (key == "window") cfg.window = std::stoi(value);
  else if (key == "gamma") cfg.gamma = std::stod(value);
  else if (key == "epochs") cfg.epochs = std::stoi(value);
  else if (key == "pv_passes") cfg.pv_passes = std::stoi(value);
  else if (key == "learning_rate") cfg.learning_rate = std::stod(value);
  else if (key == "head_learning_rate") cfg.head_learning_rate = std::stod(value);
  else if (key == "grad_clip") cfg.grad_clip = std::stod(value);
  else if (key == "negatives") cfg.negatives = std::stoi(value);
  else if (key == "full_softmax") cfg.full_softmax = parse_bool(value);
  else if (key == "task") cfg.task = value;
  else if (key == "test_fraction") cfg.test_fraction = std::stod(value);
  else if (key == "walks_on_full_graph") cfg.walks_on_full_graph = parse_bool(value);
  else if (key == "nc_train_per_class") cfg.nc_train_per_class = std::stoi(value);
  else if (key == "nc_test_cap") cfg.nc_test_cap = std::stoi(value);
  else if (key == "runs") cfg.runs = std::stoi(value);
  else if (key == "seed") cfg.seed = std::stoull(value);
  else if (key == "threads") cfg.threads = std::stoi(value);
  else if (key == "diag_pairs") cfg.diag_pairs = std::stoi(value);
  else if (key == "diag_runs") cfg.diag_runs = std::stoi(value);
  else if (key == "diag_starts") cfg.diag_starts = std::stoi(value);
  else if (key == "diag_packing_runs") cfg.diag_packing_runs = std::stoi(value);
  else if (key == "diag_cover_max") cfg.diag_cover_max = std::stoi(value);
  else if (key == "radius_percentile") cfg.radius_percentile = std::stod(value);
  else if (key == "pair_percentile") cfg.pair_percentile = std::stod(value);
  else throw usage_error("unknown config key: " + key);
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open config file: " + path);
  RunConfig cfg;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw data_error("config line " + std::to_string(line_no) +
                       ": expected key = value");
    set_config_key(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

std::string config_echo(const RunConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "dataset = " << c.dataset << '\n'
      << "labels = " << c.labels_path << '\n'
      << "outdir = " << c.outdir << '\n'
      << "hops = " << c.hops << '\n'
      << "cap = " << c.cap << '\n'
      << "binary_spectra = " << (c.binary_spectra ? 1 : 0) << '\n'
      << "k = " << c.k << '\n'
      << "ot_order = " << c.ot_order << '\n'
      << "bias_prob = " << c.bias_prob << '\n'
      << "walk_length = " << c.walk_length << '\n'
      << "walks_per_node = " << c.walks_per_node << '\n'
      << "online_bias = " << (c.online_bias ? 1 : 0) << '\n'
      << "dim = " << c.dim << '\n'
      << "window = " << c.window << '\n'
      << "gamma = " << c.gamma << '\n'
      << "epochs = " << c.epochs << '\n'
      << "pv_passes = " << c.pv_passes << '\n'
      << "learning_rate = " << c.learning_rate << '\n'
      << "head_learning_rate = " << c.head_learning_rate << '\n'
      << "grad_clip = " << c.grad_clip << '\n'
      << "negatives = " << c.negatives << '\n'
      << "full_softmax = " << (c.full_softmax ? 1 : 0) << '\n'
      << "task = " << c.task << '\n'
      << "test_fraction = " << c.test_fraction << '\n'
      << "walks_on_full_graph = " << (c.walks_on_full_graph ? 1 : 0) << '\n'
      << "nc_train_per_class = " << c.nc_train_per_class << '\n'
      << "nc_test_cap = " << c.nc_test_cap << '\n'
      << "runs = " << c.runs << '\n'
      << "seed = " << c.seed << '\n'
      << "threads = " << c.threads << '\n'
      << "diag_pairs = " << c.diag_pairs << '\n'
      << "diag_runs = " << c.diag_runs << '\n'
      << "diag_starts = " << c.diag_starts << '\n'
      << "diag_packing_runs = " << c.diag_packing_runs << '\n'
      << "diag_cover_max = " << c.diag_cover_max << '\n'
      << "radius_percentile = " << c.radius_percentile << '\n'
      << "pair_percentile = " << c.pair_percentile << '\n';
  return out.str();
}

void save_run_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write config: " + path);
  out << config_echo(cfg);
}

// ---------------- in-memory protocol ----------------

namespace {

struct PreparedRun {
  EdgeSplit split;
  Graph train_graph;
  SpectraCache cache;
  BiasModel bias;
  WalkCorpus corpus;
};

PreparedRun prepare_lp_run(const Graph& g, const RunConfig& cfg,
                           std::uint64_t seed, int threads) {
  PreparedRun run;
  run.split = split_edges(g, cfg.test_fraction, seed);
  run.train_graph =
      cfg.walks_on_full_graph ? g : remove_edges(g, run.split.test_pos);
  run.cache = build_spectra_cache(run.train_graph, cfg.hops, cfg.cap, threads);
  run.bias = build_bias_model(run.train_graph, run.cache, cfg.k, cfg.ot_order,
                              threads);
  WalkConfig wc;
  wc.walk_length = cfg.walk_length;
  wc.walks_per_node = cfg.walks_per_node;
  wc.epsilon = cfg.bias_prob;
  wc.k = cfg.k;
  wc.ot_order = cfg.ot_order;
  wc.seed = seed;
  wc.online_bias = cfg.online_bias;
  run.corpus = generate_corpus(run.train_graph, run.bias, wc, threads,
                               cfg.online_bias ? &run.cache : nullptr);
  return run;
}

TrainConfig train_config_of(const RunConfig& cfg, std::uint64_t seed,
                            Task task) {
  TrainConfig tc;
  tc.dim = cfg.dim;
  tc.window = cfg.window;
  tc.gamma = cfg.gamma;
  tc.epochs = cfg.epochs;
  tc.pv_passes = cfg.pv_passes;
  tc.learning_rate = cfg.learning_rate;
  tc.head_learning_rate = cfg.head_learning_rate;
  tc.grad_clip = cfg.grad_clip;
  tc.negatives = cfg.negatives;
  tc.full_softmax = cfg.full_softmax;
  tc.task = task;
  tc.seed = seed;
  return tc;
}

}  // namespace

LpOutcome run_lp_once(const Graph& g, const RunConfig& cfg,
                      std::uint64_t seed) {
  PreparedRun run = prepare_lp_run(g, cfg, seed, 1);
  const TrainConfig tc = train_config_of(cfg, seed, Task::kLinkPrediction);
  TrainResult trained =
      train(run.train_graph, run.corpus, &run.split, nullptr, tc);
  LpOutcome out;
  out.auc = eval_link_prediction(trained.model, trained.embeddings, run.split);
  out.isolated_train_vertices = run.split.isolated_train_vertices;
  return out;
}

double run_nc_once(const Graph& g, const std::vector<int>& labels,
                   const RunConfig& cfg, std::uint64_t seed) {
  LabeledNodes labeled = stratified_label_split(
      labels, cfg.nc_train_per_class, cfg.nc_test_cap, seed);
  SpectraCache cache = build_spectra_cache(g, cfg.hops, cfg.cap, 1);
  BiasModel bias = build_bias_model(g, cache, cfg.k, cfg.ot_order, 1);
  WalkConfig wc;
  wc.walk_length = cfg.walk_length;
  wc.walks_per_node = cfg.walks_per_node;
  wc.epsilon = cfg.bias_prob;
  wc.k = cfg.k;
  wc.ot_order = cfg.ot_order;
  wc.seed = seed;
  WalkCorpus corpus = generate_corpus(g, bias, wc, 1, nullptr);
  const TrainConfig tc = train_config_of(cfg, seed, Task::kNodeClassification);
  TrainResult trained = train(g, corpus, nullptr, &labeled, tc);
  NcEvalConfig ec;
  ec.seed = seed;
  return eval_node_classification(trained.embeddings, labeled, ec).accuracy;
}

namespace {

Aggregate run_protocol(int runs, int threads,
                       const std::function<double(int)>& one_run) {
  std::vector<double> values(static_cast<std::size_t>(runs), 0.0);
  if (threads <= 1 || runs == 1) {
    for (int i = 0; i < runs; ++i) values[static_cast<std::size_t>(i)] = one_run(i);
  } else {
    std::atomic<int> next{0};
    auto worker = [&]() {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= runs) break;
        values[static_cast<std::size_t>(i)] = one_run(i);
      }
    };
    const int t = std::min(threads, runs);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(t));
    for (int i = 0; i < t; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return aggregate(values);
}

}  // namespace

Aggregate lp_protocol(const Graph& g, const RunConfig& cfg) {
  return run_protocol(cfg.runs, cfg.threads, [&](int i) {
    return run_lp_once(g, cfg, cfg.seed + static_cast<std::uint64_t>(i)).auc;
  });
}

Aggregate nc_protocol(const Graph& g, const std::vector<int>& labels,
                      const RunConfig& cfg) {
  return run_protocol(cfg.runs, cfg.threads, [&](int i) {
    return run_nc_once(g, labels, cfg, cfg.seed + static_cast<std::uint64_t>(i));
  });
}

std::vector<SweepRow> sweep(const Graph& g, const RunConfig& base,
                            const SweepGrid& grid) {
  std::vector<double> eps_grid =
      grid.bias_prob.empty() ? std::vector<double>{base.bias_prob}
                             : grid.bias_prob;
  std::vector<SweepRow> rows;
  for (int C : grid.window)
    for (int T : grid.walk_length)
      for (double gm : grid.gamma)
        for (double eps : eps_grid) {
          RunConfig cfg = base;
          cfg.window = C;
          cfg.walk_length = T;
          cfg.gamma = gm;
          cfg.bias_prob = eps;
          const Aggregate a = lp_protocol(g, cfg);
          rows.push_back({C, T, gm, eps, a.mean, a.stddev});
        }
  return rows;
}

void save_sweep(const std::vector<SweepRow>& rows, const RunConfig& cfg,
                const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write sweep table: " + path);
  std::istringstream echo(config_echo(cfg));
  std::string line;
  while (std::getline(echo, line)) out << "# " << line << '\n';
  out << "window\twalk_length\tgamma\tbias_prob\tauc_mean\tauc_std\n";
  out.precision(10);
  for (const auto& r : rows)
    out << r.window << '\t' << r.walk_length << '\t' << r.gamma << '\t'
        << r.bias_prob << '\t' << r.auc_mean << '\t' << r.auc_std << '\n';
}

// ---------------- artifact stages ----------------

namespace {

std::string art(const RunConfig& cfg, const char* name) {
  return (fs::path(cfg.outdir) / name).string();
}

void require_artifact(const std::string& path, const char* producer) {
  if (!fs::exists(path))
    throw data_error("missing artifact " + path + "; run `specwalk " +
                     producer + "` first");
}

Graph load_stage_graph(const RunConfig& cfg) {
  const std::string path = art(cfg, "graph.edges");
  require_artifact(path, "spectra");
  return load_edge_list_file(path).graph;
}

// Training graph as seen by walks/train: test edges hidden for lp runs
// unless walks_on_full_graph is set.
Graph training_graph(const RunConfig& cfg, const Graph& g, EdgeSplit* out) {
  if (cfg.task != "lp") return g;
  const std::string split_path = art(cfg, "split.txt");
  require_artifact(split_path, "spectra");
  EdgeSplit split = load_split(split_path);
  if (split.graph_digest != g.digest())
    throw data_error("split.txt was made for a different graph; rerun "
                     "`specwalk spectra`");
  Graph gt = cfg.walks_on_full_graph ? g : remove_edges(g, split.test_pos);
  if (out) *out = std::move(split);
  return gt;
}

std::string spectra_path(const RunConfig& cfg) {
  return art(cfg, cfg.binary_spectra ? "spectra.bin" : "spectra.txt");
}

}  // namespace

void stage_spectra(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.dataset.empty()) throw usage_error("spectra: --dataset is required");
  fs::create_directories(cfg.outdir);

  GraphLoadResult loaded = load_edge_list_file(cfg.dataset);
  const Graph& g = loaded.graph;
  save_edge_list_file(g, art(cfg, "graph.edges"));
  save_id_map(loaded.id_to_token, art(cfg, "idmap.tsv"));
  std::cout << "loaded " << cfg.dataset << ": n=" << g.num_vertices()
            << " m=" << g.num_edges()
            << " (dropped " << loaded.dropped_self_loops << " self-loops, "
            << loaded.dropped_duplicates << " duplicates)\n";

  Graph gt = g;
  if (cfg.task == "lp") {
    EdgeSplit split = split_edges(g, cfg.test_fraction, cfg.seed);
    save_split(split, art(cfg, "split.txt"));
    gt = cfg.walks_on_full_graph ? g : remove_edges(g, split.test_pos);
    std::cout << "split: |test_pos|=" << split.test_pos.size()
              << " |train_pos|=" << split.train_pos.size()
              << " isolated_train_vertices=" << split.isolated_train_vertices
              << '\n';
  }

  SpectraCache cache = build_spectra_cache(gt, cfg.hops, cfg.cap, cfg.threads);
  save_spectra_cache(cache, spectra_path(cfg), cfg.binary_spectra);
  save_run_config(cfg, art(cfg, "config.cfg"));
  std::cout << "spectra cache: " << spectra_path(cfg) << " (" << cache.spectra.size()
            << " vertices, hops=" << cfg.hops << " cap=" << cfg.cap << ")\n";
}

void stage_walks(const RunConfig& cfg) {
  cfg.validate();
  const Graph g = load_stage_graph(cfg);
  const Graph gt = training_graph(cfg, g, nullptr);

  require_artifact(spectra_path(cfg), "spectra");
  SpectraCache cache = load_spectra_cache(spectra_path(cfg));
  if (cache.graph_digest != gt.digest())
    throw data_error("spectra cache does not match the walk graph "
                     "(config/digest mismatch); rerun `specwalk spectra`");
  if (cache.hops != cfg.hops || cache.cap != cfg.cap)
    throw data_error("spectra cache was built with hops=" +
                     std::to_string(cache.hops) + " cap=" +
                     std::to_string(cache.cap) + "; rerun `specwalk spectra`");

  BiasModel bias = build_bias_model(gt, cache, cfg.k, cfg.ot_order, cfg.threads);
  WalkConfig wc;
  wc.walk_length = cfg.walk_length;
  wc.walks_per_node = cfg.walks_per_node;
  wc.epsilon = cfg.bias_prob;
  wc.k = cfg.k;
  wc.ot_order = cfg.ot_order;
  wc.seed = cfg.seed;
  wc.online_bias = cfg.online_bias;
  WalkCorpus corpus = generate_corpus(gt, bias, wc, cfg.threads,
                                      cfg.online_bias ? &cache : nullptr);
  save_corpus(corpus, art(cfg, "corpus.txt"));
  save_run_config(cfg, art(cfg, "config.cfg"));
  std::cout << "corpus: " << corpus.walks.size() << " walks of length "
            << cfg.walk_length << " -> " << art(cfg, "corpus.txt") << '\n';
}

void stage_train(const RunConfig& cfg) {
  cfg.validate();
  const Graph g = load_stage_graph(cfg);
  EdgeSplit split;
  const Graph gt = training_graph(cfg, g, &split);

  const std::string corpus_path = art(cfg, "corpus.txt");
  require_artifact(corpus_path, "walks");
  WalkCorpus corpus = load_corpus(corpus_path);
  if (corpus.graph_digest != gt.digest())
    throw data_error("corpus.txt was generated for a different graph "
                     "(config/digest mismatch); rerun `specwalk walks`");

  Task task = Task::kNone;
  LabeledNodes labeled;
  if (cfg.task == "lp") task = Task::kLinkPrediction;
  if (cfg.task == "nc") {
    task = Task::kNodeClassification;
    if (cfg.labels_path.empty())
      throw usage_error("train: node classification requires --labels");
    const auto tokens = load_id_map(art(cfg, "idmap.tsv"));
    const auto labels = load_labels(cfg.labels_path, tokens);
    labeled = stratified_label_split(labels, cfg.nc_train_per_class,
                                     cfg.nc_test_cap, cfg.seed);
  }

  const TrainConfig tc = train_config_of(cfg, cfg.seed, task);
  TrainResult trained =
      train(gt, corpus, cfg.task == "lp" ? &split : nullptr,
            cfg.task == "nc" ? &labeled : nullptr, tc);

  save_model(trained.model, gt.digest(), art(cfg, "model.bin"));
  const auto tokens = load_id_map(art(cfg, "idmap.tsv"));
  save_embeddings(trained.embeddings, tokens, art(cfg, "embeddings.txt"));
  save_history(trained.history, art(cfg, "history.txt"));
  save_run_config(cfg, art(cfg, "config.cfg"));
  std::cout << "trained " << cfg.epochs << " epochs; final L_ov="
            << trained.history.back().l_ov << " -> " << art(cfg, "model.bin")
            << '\n';
}

double stage_eval_lp(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.task != "lp") throw usage_error("eval-lp requires task = lp");
  const Graph g = load_stage_graph(cfg);

  if (cfg.runs > 1) {
    const Aggregate a = lp_protocol(g, cfg);
    std::ofstream out(art(cfg, "eval_lp.tsv"));
    std::istringstream echo(config_echo(cfg));
    std::string line;
    while (std::getline(echo, line)) out << "# " << line << '\n';
    out << "run\tauc\n";
    out.precision(10);
    for (std::size_t i = 0; i < a.values.size(); ++i)
      out << i << '\t' << a.values[i] << '\n';
    out << "# mean\t" << a.mean << "\n# stddev\t" << a.stddev << '\n';
    std::cout << "AUC over " << cfg.runs << " runs: " << a.mean << " +/- "
              << a.stddev << '\n';
    return a.mean;
  }

  EdgeSplit split;
  const Graph gt = training_graph(cfg, g, &split);
  const std::string model_path = art(cfg, "model.bin");
  require_artifact(model_path, "train");
  std::uint64_t model_digest = 0;
  EmbeddingModel model = load_model(model_path, &model_digest);
  if (model_digest != gt.digest())
    throw data_error("model.bin was trained on a different graph "
                     "(config/digest mismatch); rerun `specwalk train`");
  NodeEmbeddings emb;
  emb.dim = model.dim;
  emb.table = compute_node_vectors(model);
  const double result = eval_link_prediction(model, emb, split);
  std::ofstream out(art(cfg, "eval_lp.tsv"));
  out << "# single-run artifact evaluation\nrun\tauc\n0\t" << result << '\n';
  std::cout << "AUC: " << result << '\n';
  return result;
}

double stage_eval_nc(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.labels_path.empty())
    throw usage_error("eval-nc requires --labels");
  const Graph g = load_stage_graph(cfg);
  const auto tokens = load_id_map(art(cfg, "idmap.tsv"));
  const auto labels = load_labels(cfg.labels_path, tokens);

  if (cfg.runs > 1) {
    RunConfig nc_cfg = cfg;
    nc_cfg.task = "nc";
    const Aggregate a = nc_protocol(g, labels, nc_cfg);
    std::ofstream out(art(cfg, "eval_nc.tsv"));
    std::istringstream echo(config_echo(cfg));
    std::string line;
    while (std::getline(echo, line)) out << "# " << line << '\n';
    out << "run\taccuracy\n";
    out.precision(10);
    for (std::size_t i = 0; i < a.values.size(); ++i)
      out << i << '\t' << a.values[i] << '\n';
    out << "# mean\t" << a.mean << "\n# stddev\t" << a.stddev << '\n';
    std::cout << "accuracy over " << cfg.runs << " runs: " << a.mean
              << " +/- " << a.stddev << '\n';
    return a.mean;
  }

  const std::string model_path = art(cfg, "model.bin");
  require_artifact(model_path, "train");
  std::uint64_t model_digest = 0;
  EmbeddingModel model = load_model(model_path, &model_digest);
  if (model_digest != g.digest())
    throw data_error("model.bin was trained on a different graph "
                     "(config/digest mismatch); rerun `specwalk train`");
  NodeEmbeddings emb;
  emb.dim = model.dim;
  emb.table = compute_node_vectors(model);
  LabeledNodes labeled = stratified_label_split(
      labels, cfg.nc_train_per_class, cfg.nc_test_cap, cfg.seed);
  NcEvalConfig ec;
  ec.seed = cfg.seed;
  const NcEvalResult r = eval_node_classification(emb, labeled, ec);
  for (int c : r.untrained_classes)
    std::cerr << "warning: class " << c
              << " appears in the test set but not in training\n";
  std::ofstream out(art(cfg, "eval_nc.tsv"));
  out << "# single-run artifact evaluation\nrun\taccuracy\n0\t" << r.accuracy
      << '\n';
  std::cout << "accuracy: " << r.accuracy << '\n';
  return r.accuracy;
}

void stage_diagnose(const RunConfig& cfg, const std::string& kind) {
  cfg.validate();
  const Graph g = load_stage_graph(cfg);
  require_artifact(spectra_path(cfg), "spectra");
  SpectraCache cache = load_spectra_cache(spectra_path(cfg));
  if (cache.graph_digest != g.digest())
    throw data_error("diagnostics need spectra of the full graph; rerun "
                     "`specwalk spectra` with task = none");
  BiasModel bias = build_bias_model(g, cache, cfg.k, cfg.ot_order, cfg.threads);

  const double radius = percentile_distance(cache, cfg.radius_percentile,
                                            cfg.ot_order, cfg.seed);
  Rng rng(seed_hash({cfg.seed, 0xd1a9ULL}));
  std::vector<Vertex> starts;
  {
    std::vector<Vertex> eligible;
    for (Vertex v = 0; v < g.num_vertices(); ++v)
      if (g.degree(v) > 0) eligible.push_back(v);
    rng.shuffle(eligible);
    const int want = std::min<int>(cfg.diag_starts,
                                   static_cast<int>(eligible.size()));
    starts.assign(eligible.begin(), eligible.begin() + want);
  }

  const std::string echo = config_echo(cfg);
  const bool all = kind == "all";
  if (all || kind == "hitting") {
    const auto pairs = sample_similar_pairs(g, cache, cfg.diag_pairs,
                                            cfg.pair_percentile, cfg.ot_order,
                                            cfg.seed);
    DiagnosticReport r =
        hitting_rank(g, cache, bias, pairs, cfg.walk_length, cfg.diag_runs,
                     cfg.bias_prob, cfg.seed);
    r.config_echo = echo;
    save_report(r, art(cfg, "diag_hitting.tsv"));
    std::cout << "hitting rank: spectral=" << r.spectral_mean[0]
              << " simple=" << r.simple_mean[0]
              << " confidence=" << r.confidence[0] << '\n';
  }
  if (all || kind == "packing") {
    DiagnosticReport r = packing_density(g, cache, bias, starts,
                                         {40, 80, 120, 160, 200}, radius,
                                         cfg.diag_packing_runs, cfg.bias_prob,
                                         cfg.seed);
    r.config_echo = echo;
    save_report(r, art(cfg, "diag_packing.tsv"));
    std::cout << "packing density (T=200): spectral=" << r.spectral_mean.back()
              << "% simple=" << r.simple_mean.back()
              << "% confidence=" << r.confidence.back() << '\n';
  }
  if (all || kind == "cover") {
    DiagnosticReport r = cover_time(g, cache, bias, starts, radius,
                                    cfg.diag_cover_max, cfg.diag_runs,
                                    cfg.bias_prob, cfg.seed);
    r.config_echo = echo;
    save_report(r, art(cfg, "diag_cover.tsv"));
    std::cout << "cover length: spectral=" << r.spectral_mean[0]
              << " simple=" << r.simple_mean[0]
              << " confidence=" << r.confidence[0] << '\n';
  }
}

void stage_sweep(const RunConfig& cfg, const SweepGrid& grid) {
  cfg.validate();
  if (cfg.task != "lp") throw usage_error("sweep requires task = lp");
  const Graph g = load_stage_graph(cfg);
  const auto rows = sweep(g, cfg, grid);
  save_sweep(rows, cfg, art(cfg, "sweep.tsv"));
  double lo = 1.0, hi = 0.0;
  for (const auto& r : rows) {
    lo = std::min(lo, r.auc_mean);
    hi = std::max(hi, r.auc_mean);
  }
  std::cout << "sweep: " << rows.size() << " grid points, AUC range ["
            << lo << ", " << hi << "] -> " << art(cfg, "sweep.tsv") << '\n';
}

double stage_pipeline(const RunConfig& cfg) {
  stage_spectra(cfg);
  stage_walks(cfg);
  stage_train(cfg);
  if (cfg.task == "nc") return stage_eval_nc(cfg);
  if (cfg.task == "lp") return stage_eval_lp(cfg);
  return 0.0;
}

}  // namespace specwalk
