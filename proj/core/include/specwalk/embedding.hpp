#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "specwalk/graph.hpp"
#include "specwalk/split.hpp"
#include "specwalk/walk.hpp"

namespace specwalk {

enum class Task { kLinkPrediction, kNodeClassification, kNone };

struct TrainConfig {
  int dim = 128;
  int window = 10;  // C: context reaches +-C around the center vertex
  double gamma = 1e-7;
  int epochs = 100;
  int pv_passes = 10;  // full corpus passes (the first pv_passes epochs)
  double learning_rate = 0.025;
  double head_learning_rate = 0.5;  // task-head rate, same decay schedule
  double grad_clip = 1.0;  // per-vertex cap on the node-vector gradient norm
  int negatives = 5;
  bool full_softmax = false;  // exact softmax over the vocabulary (toy sizes)
  Task task = Task::kLinkPrediction;
  std::uint64_t seed = 7;
  void validate() const;
};

/// Word vectors, paragraph vectors, walk-aggregation weights, softmax output
/// parameters and the task heads, all as flat row-major tables.
struct EmbeddingModel {
  int n = 0;    // vocabulary = vertex count
  int K = 0;    // walks (paragraphs) per vertex
  int dim = 0;
  int num_classes = 0;

  std::vector<double> word;       // n x dim
  std::vector<double> paragraph;  // (n*K) x dim
  std::vector<double> agg;        // K aggregation weights, shared
  std::vector<double> out_w;      // n x dim softmax output matrix U
  std::vector<double> out_b;      // n softmax output bias b

  std::vector<double> lp_w;  // dim; link-prediction head weights
  double lp_b = 0.0;
  std::vector<double> nc_w;  // num_classes x dim
  std::vector<double> nc_b;  // num_classes

  double* word_row(Vertex v) { return word.data() + static_cast<std::size_t>(v) * dim; }
  const double* word_row(Vertex v) const { return word.data() + static_cast<std::size_t>(v) * dim; }
  double* paragraph_row(std::int64_t pid) { return paragraph.data() + static_cast<std::size_t>(pid) * dim; }
  const double* paragraph_row(std::int64_t pid) const { return paragraph.data() + static_cast<std::size_t>(pid) * dim; }
  double* out_row(Vertex v) { return out_w.data() + static_cast<std::size_t>(v) * dim; }
  const double* out_row(Vertex v) const { return out_w.data() + static_cast<std::size_t>(v) * dim; }
};

/// Word/paragraph tables ~ U[-0.5/dim, 0.5/dim]; U, b zero; aggregation
/// weights 1/K. Deterministic under seed.
EmbeddingModel init_model(int n, int K, int dim, std::uint64_t seed);

/// One training window: paragraph pid plus context word vertices predicting
/// the center `target`.
struct WindowExample {
  std::int64_t paragraph_id = 0;
  std::vector<Vertex> context;  // up to 2*window vertices, center excluded
  Vertex target = 0;
};

/// Negative-sampling estimate of the center-word cross-entropy loss. With
/// apply=true performs the plain-SGD step at rate lr (all gradients taken at
/// the pre-step parameters). `negatives` lists the sampled noise vertices;
/// entries equal to the target are skipped. Returns the loss.
double center_word_loss_ns(EmbeddingModel& m, const WindowExample& ex,
                           std::span<const Vertex> negatives, double lr,
                           bool apply);

/// Exact softmax over all n vertices (Eq. 8/9 form; toy vocabularies only).
double center_word_loss_full(EmbeddingModel& m, const WindowExample& ex,
                             double lr, bool apply);

/// x_v = sum_i agg[i] * paragraph_vector(walk i of v).
std::vector<double> node_vector(const EmbeddingModel& m, Vertex v);

/// All x_v stacked into an n x dim table.
std::vector<double> compute_node_vectors(const EmbeddingModel& m);

/// y_v = mean of x_u over 1-hop neighbors; isolated v falls back to x_v.
std::vector<double> neighbor_vector(const std::vector<double>& node_vectors,
                                    const Graph& g, Vertex v, int dim);

/// gamma * W2^2(softmax(x), softmax(y)) on the coordinate grid, with
/// gradients w.r.t. x and y.
struct RegResult {
  double loss = 0.0;
  std::vector<double> grad_x;
  std::vector<double> grad_y;
};
RegResult wasserstein_reg(std::span<const double> x, std::span<const double> y,
                          double gamma);

/// Link-prediction head: score = logistic(lp_w . (x_u * x_v) + lp_b), MSE
/// against the {0,1} label. Fills the gradients (spans may be empty to skip)
/// and returns the per-example loss.
double lp_head_grads(const EmbeddingModel& m, std::span<const double> xu,
                     std::span<const double> xv, double label,
                     std::span<double> g_w, double* g_b,
                     std::span<double> g_xu, std::span<double> g_xv);
double lp_head_score(const EmbeddingModel& m, std::span<const double> xu,
                     std::span<const double> xv);

/// Node-classification head: softmax cross-entropy of nc_w * x + nc_b.
double nc_head_grads(const EmbeddingModel& m, std::span<const double> x,
                     int label, std::span<double> g_w, std::span<double> g_b,
                     std::span<double> g_x);
int nc_head_predict(const EmbeddingModel& m, std::span<const double> x);

struct EpochStats {
  int epoch = 0;
  double l_par = 0.0;
  double l_class = 0.0;
  double l_reg = 0.0;
  double l_ov = 0.0;
};

struct NodeEmbeddings {
  int dim = 0;
  std::vector<double> table;  // n x dim
  std::span<const double> row(Vertex v) const {
    return {table.data() + static_cast<std::size_t>(v) * dim,
            static_cast<std::size_t>(dim)};
  }
};

struct TrainResult {
  EmbeddingModel model;
  NodeEmbeddings embeddings;
  std::vector<EpochStats> history;
};

/// Joint SGD over shuffled (paragraph, window) pairs, task batches and the
/// per-vertex Wasserstein regularizer. `g` must be the graph the walks were
/// generated on. For link prediction pass `split`; for node classification
/// pass `labels`; either may be null when the task does not need it.
TrainResult train(const Graph& g, const WalkCorpus& corpus,
                  const EdgeSplit* split, const LabeledNodes* labels,
                  const TrainConfig& cfg);

/// Text embeddings: first line `n d`, then `vertex_id v1 ... vd` per line.
/// Vertex ids are original tokens when an id map is given.
void save_embeddings(const NodeEmbeddings& emb,
                     const std::vector<std::string>& id_to_token,
                     const std::string& path);
NodeEmbeddings load_embeddings(const std::string& path,
                               std::vector<std::string>* tokens_out = nullptr);

/// One line per epoch: `epoch L_par L_class L_reg L_ov`.
void save_history(const std::vector<EpochStats>& history,
                  const std::string& path);

/// Binary model artifact (tables + heads + input digests).
void save_model(const EmbeddingModel& m, std::uint64_t graph_digest,
                const std::string& path);
EmbeddingModel load_model(const std::string& path,
                          std::uint64_t* graph_digest_out = nullptr);

}  // namespace specwalk
