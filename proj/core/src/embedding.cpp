#include "specwalk/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "specwalk/errors.hpp"
#include "specwalk/rng.hpp"
#include "specwalk/wasserstein.hpp"

namespace specwalk {

void TrainConfig::validate() const {
  if (dim < 1) throw usage_error("dim must be >= 1");
  if (window < 1) throw usage_error("window must be >= 1");
  if (gamma < 0.0) throw usage_error("gamma must be >= 0");
  if (epochs < 1) throw usage_error("epochs must be >= 1");
  if (pv_passes < 1) throw usage_error("pv_passes must be >= 1");
  if (head_learning_rate <= 0.0)
    throw usage_error("head_learning_rate must be > 0");
  if (grad_clip <= 0.0) throw usage_error("grad_clip must be > 0");
  if (learning_rate <= 0.0) throw usage_error("learning_rate must be > 0");
  if (negatives < 1 && !full_softmax)
    throw usage_error("negatives must be >= 1 unless full_softmax is set");
}

EmbeddingModel init_model(int n, int K, int dim, std::uint64_t seed) {
  if (n < 1 || K < 1 || dim < 1)
    throw usage_error("init_model: n, K, dim must all be >= 1");
  EmbeddingModel m;
  m.n = n;
  m.K = K;
  m.dim = dim;
  const std::size_t nd = static_cast<std::size_t>(n) * dim;
  m.word.resize(nd);
  m.paragraph.resize(nd * static_cast<std::size_t>(K));
  m.agg.assign(static_cast<std::size_t>(K), 1.0 / K);
  m.out_w.assign(nd, 0.0);
  m.out_b.assign(static_cast<std::size_t>(n), 0.0);
  m.lp_w.assign(static_cast<std::size_t>(dim), 0.0);

  Rng rng(seed_hash({seed, 0x1417ULL}));
  const double scale = 1.0 / dim;
  for (auto& w : m.word) w = (rng.u01() - 0.5) * scale;
  for (auto& p : m.paragraph) p = (rng.u01() - 0.5) * scale;
  return m;
}

namespace {

double sigmoid(double f) {
  if (f >= 0.0) return 1.0 / (1.0 + std::exp(-f));
  const double e = std::exp(f);
  return e / (1.0 + e);
}

// ln(1 + e^f), overflow-safe.
double softplus(double f) {
  return f > 0.0 ? f + std::log1p(std::exp(-f)) : std::log1p(std::exp(f));
}

void softmax_inplace(std::vector<double>& v) {
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) sum += (x = std::exp(x - mx));
  for (double& x : v) x /= sum;
}

// Builds h = mean(paragraph row, context word rows) into `h`.
double build_hidden(const EmbeddingModel& m, const WindowExample& ex,
                    double* h) {
  const int d = m.dim;
  const double* prow = m.paragraph_row(ex.paragraph_id);
  for (int c = 0; c < d; ++c) h[c] = prow[c];
  for (Vertex w : ex.context) {
    const double* wr = m.word_row(w);
    for (int c = 0; c < d; ++c) h[c] += wr[c];
  }
  const double inv = 1.0 / (1.0 + static_cast<double>(ex.context.size()));
  for (int c = 0; c < d; ++c) h[c] *= inv;
  return inv;
}

void scatter_hidden_grad(EmbeddingModel& m, const WindowExample& ex,
                         const double* e, double inv, double lr) {
  const int d = m.dim;
  const double step = lr * inv;
  double* prow = m.paragraph_row(ex.paragraph_id);
  for (int c = 0; c < d; ++c) prow[c] -= step * e[c];
  for (Vertex w : ex.context) {
    double* wr = m.word_row(w);
    for (int c = 0; c < d; ++c) wr[c] -= step * e[c];
  }
}

template <bool kApply>
double window_ns_impl(EmbeddingModel& m, const WindowExample& ex,
                      std::span<const Vertex> negatives, double lr, double* h,
                      double* e) {
  const int d = m.dim;
  const double inv = build_hidden(m, ex, h);
  std::fill(e, e + d, 0.0);
  double loss = 0.0;

  auto output = [&](Vertex o, double label) {
    double* urow = m.out_row(o);
    double f = m.out_b[static_cast<std::size_t>(o)];
    for (int c = 0; c < d; ++c) f += urow[c] * h[c];
    loss += label > 0.5 ? softplus(-f) : softplus(f);
    const double gf = sigmoid(f) - label;
    for (int c = 0; c < d; ++c) e[c] += gf * urow[c];
    if constexpr (kApply) {
      const double step = lr * gf;
      for (int c = 0; c < d; ++c) urow[c] -= step * h[c];
      m.out_b[static_cast<std::size_t>(o)] -= step;
    }
  };

  output(ex.target, 1.0);
  for (Vertex nv : negatives)
    if (nv != ex.target) output(nv, 0.0);

  if constexpr (kApply) scatter_hidden_grad(m, ex, e, inv, lr);
  return loss;
}

template <bool kApply>
double window_full_impl(EmbeddingModel& m, const WindowExample& ex, double lr,
                        double* h, double* e, std::vector<double>& logits) {
  const int d = m.dim;
  const int n = m.n;
  const double inv = build_hidden(m, ex, h);
  logits.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double* urow = m.out_row(i);
    double f = m.out_b[static_cast<std::size_t>(i)];
    for (int c = 0; c < d; ++c) f += urow[c] * h[c];
    logits[static_cast<std::size_t>(i)] = f;
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double f : logits) z += std::exp(f - mx);
  const double log_z = std::log(z) + mx;
  const double loss = log_z - logits[static_cast<std::size_t>(ex.target)];

  std::fill(e, e + d, 0.0);
  for (int i = 0; i < n; ++i) {
    const double p = std::exp(logits[static_cast<std::size_t>(i)] - log_z);
    const double gf = p - (i == ex.target ? 1.0 : 0.0);
    double* urow = m.out_row(i);
    for (int c = 0; c < d; ++c) e[c] += gf * urow[c];
    if constexpr (kApply) {
      const double step = lr * gf;
      for (int c = 0; c < d; ++c) urow[c] -= step * h[c];
      m.out_b[static_cast<std::size_t>(i)] -= step;
    }
  }
  if constexpr (kApply) scatter_hidden_grad(m, ex, e, inv, lr);
  return loss;
}

/// Deterministic Vose alias table for the unigram^0.75 noise distribution.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> weights) {
    const std::size_t n = weights.size();
    prob_.resize(n);
    alias_.assign(n, 0);
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i)
      scaled[i] = weights[i] * static_cast<double>(n) / total;
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = n; i-- > 0;)
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    while (!small.empty() && !large.empty()) {
      const std::uint32_t s = small.back();
      const std::uint32_t l = large.back();
      small.pop_back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::uint32_t i : large) prob_[i] = 1.0;
    for (std::uint32_t i : small) prob_[i] = 1.0;
  }

  Vertex draw(Rng& rng) const {
    const auto i =
        static_cast<std::size_t>(rng.bounded(prob_.size()));
    return rng.u01() < prob_[i] ? static_cast<Vertex>(i)
                                : static_cast<Vertex>(alias_[i]);
  }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace

double center_word_loss_ns(EmbeddingModel& m, const WindowExample& ex,
                           std::span<const Vertex> negatives, double lr,
                           bool apply) {
  std::vector<double> h(static_cast<std::size_t>(m.dim));
  std::vector<double> e(static_cast<std::size_t>(m.dim));
  return apply ? window_ns_impl<true>(m, ex, negatives, lr, h.data(), e.data())
               : window_ns_impl<false>(m, ex, negatives, lr, h.data(), e.data());
}

double center_word_loss_full(EmbeddingModel& m, const WindowExample& ex,
                             double lr, bool apply) {
  std::vector<double> h(static_cast<std::size_t>(m.dim));
  std::vector<double> e(static_cast<std::size_t>(m.dim));
  std::vector<double> logits;
  return apply
             ? window_full_impl<true>(m, ex, lr, h.data(), e.data(), logits)
             : window_full_impl<false>(m, ex, lr, h.data(), e.data(), logits);
}

std::vector<double> node_vector(const EmbeddingModel& m, Vertex v) {
  std::vector<double> x(static_cast<std::size_t>(m.dim), 0.0);
  for (int i = 0; i < m.K; ++i) {
    const double* row =
        m.paragraph_row(static_cast<std::int64_t>(v) * m.K + i);
    const double a = m.agg[static_cast<std::size_t>(i)];
    for (int c = 0; c < m.dim; ++c) x[static_cast<std::size_t>(c)] += a * row[c];
  }
  return x;
}

std::vector<double> compute_node_vectors(const EmbeddingModel& m) {
  std::vector<double> table(static_cast<std::size_t>(m.n) * m.dim, 0.0);
  for (Vertex v = 0; v < m.n; ++v) {
    double* x = table.data() + static_cast<std::size_t>(v) * m.dim;
    for (int i = 0; i < m.K; ++i) {
      const double* row =
          m.paragraph_row(static_cast<std::int64_t>(v) * m.K + i);
      const double a = m.agg[static_cast<std::size_t>(i)];
      for (int c = 0; c < m.dim; ++c) x[c] += a * row[c];
    }
  }
  return table;
}

std::vector<double> neighbor_vector(const std::vector<double>& node_vectors,
                                    const Graph& g, Vertex v, int dim) {
  std::vector<double> y(static_cast<std::size_t>(dim), 0.0);
  auto nb = g.neighbors(v);
  if (nb.empty()) {
    const double* x = node_vectors.data() + static_cast<std::size_t>(v) * dim;
    std::copy(x, x + dim, y.begin());
    return y;
  }
  for (Vertex u : nb) {
    const double* x = node_vectors.data() + static_cast<std::size_t>(u) * dim;
    for (int c = 0; c < dim; ++c) y[static_cast<std::size_t>(c)] += x[c];
  }
  const double inv = 1.0 / static_cast<double>(nb.size());
  for (double& c : y) c *= inv;
  return y;
}

namespace {

// dL/dx for L = sum_j mass_grad[j] * softmax(x)[j].
void softmax_chain(std::span<const double> sm, std::span<const double> mg,
                   double scale, std::span<double> out_accum) {
  double inner = 0.0;
  for (std::size_t j = 0; j < sm.size(); ++j) inner += sm[j] * mg[j];
  for (std::size_t i = 0; i < sm.size(); ++i)
    out_accum[i] += scale * sm[i] * (mg[i] - inner);
}

}  // namespace

RegResult wasserstein_reg(std::span<const double> x, std::span<const double> y,
                          double gamma) {
  if (gamma < 0.0) throw usage_error("wasserstein_reg: gamma must be >= 0");
  const std::size_t d = x.size();
  RegResult r;
  r.grad_x.assign(d, 0.0);
  r.grad_y.assign(d, 0.0);

  std::vector<double> sx(x.begin(), x.end()), sy(y.begin(), y.end());
  softmax_inplace(sx);
  softmax_inplace(sy);
  std::vector<double> gmx(d), gmy(d);
  const double value = w2sq_grid(sx, sy, gmx, gmy);
  r.loss = gamma * value;
  if (gamma == 0.0) return r;
  softmax_chain(sx, gmx, gamma, r.grad_x);
  softmax_chain(sy, gmy, gamma, r.grad_y);
  return r;
}

double lp_head_score(const EmbeddingModel& m, std::span<const double> xu,
                     std::span<const double> xv) {
  double z = m.lp_b;
  for (int c = 0; c < m.dim; ++c)
    z += m.lp_w[static_cast<std::size_t>(c)] * xu[c] * xv[c];
  return sigmoid(z);
}

double lp_head_grads(const EmbeddingModel& m, std::span<const double> xu,
                     std::span<const double> xv, double label,
                     std::span<double> g_w, double* g_b,
                     std::span<double> g_xu, std::span<double> g_xv) {
  const int d = m.dim;
  const double s = lp_head_score(m, xu, xv);
  const double diff = s - label;
  const double gz = 2.0 * diff * s * (1.0 - s);
  for (int c = 0; c < d; ++c) {
    const auto i = static_cast<std::size_t>(c);
    if (!g_w.empty()) g_w[i] = gz * xu[i] * xv[i];
    if (!g_xu.empty()) g_xu[i] = gz * m.lp_w[i] * xv[i];
    if (!g_xv.empty()) g_xv[i] = gz * m.lp_w[i] * xu[i];
  }
  if (g_b) *g_b = gz;
  return diff * diff;
}

double nc_head_grads(const EmbeddingModel& m, std::span<const double> x,
                     int label, std::span<double> g_w, std::span<double> g_b,
                     std::span<double> g_x) {
  const int d = m.dim;
  const int C = m.num_classes;
  std::vector<double> logits(static_cast<std::size_t>(C));
  for (int c = 0; c < C; ++c) {
    double z = m.nc_b[static_cast<std::size_t>(c)];
    const double* row = m.nc_w.data() + static_cast<std::size_t>(c) * d;
    for (int i = 0; i < d; ++i) z += row[i] * x[static_cast<std::size_t>(i)];
    logits[static_cast<std::size_t>(c)] = z;
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double f : logits) z += std::exp(f - mx);
  const double log_z = std::log(z) + mx;
  const double loss = log_z - logits[static_cast<std::size_t>(label)];

  if (!g_x.empty()) std::fill(g_x.begin(), g_x.end(), 0.0);
  for (int c = 0; c < C; ++c) {
    const double p = std::exp(logits[static_cast<std::size_t>(c)] - log_z);
    const double gl = p - (c == label ? 1.0 : 0.0);
    const double* row = m.nc_w.data() + static_cast<std::size_t>(c) * d;
    if (!g_b.empty()) g_b[static_cast<std::size_t>(c)] = gl;
    for (int i = 0; i < d; ++i) {
      if (!g_w.empty())
        g_w[static_cast<std::size_t>(c) * d + i] =
            gl * x[static_cast<std::size_t>(i)];
      if (!g_x.empty()) g_x[static_cast<std::size_t>(i)] += gl * row[i];
    }
  }
  return loss;
}

int nc_head_predict(const EmbeddingModel& m, std::span<const double> x) {
  int best = 0;
  double best_z = -1e300;
  for (int c = 0; c < m.num_classes; ++c) {
    double z = m.nc_b[static_cast<std::size_t>(c)];
    const double* row = m.nc_w.data() + static_cast<std::size_t>(c) * m.dim;
    for (int i = 0; i < m.dim; ++i) z += row[i] * x[static_cast<std::size_t>(i)];
    if (z > best_z) {
      best_z = z;
      best = c;
    }
  }
  return best;
}

TrainResult train(const Graph& g, const WalkCorpus& corpus,
                  const EdgeSplit* split, const LabeledNodes* labels,
                  const TrainConfig& cfg) {
  cfg.validate();
  if (corpus.walks.empty()) throw data_error("train: empty walk corpus");
  if (corpus.graph_digest != g.digest())
    throw data_error("train: corpus was generated on a different graph");
  if (cfg.task == Task::kLinkPrediction && split == nullptr)
    throw usage_error("train: link prediction requires an edge split");
  if (cfg.task == Task::kNodeClassification && labels == nullptr)
    throw usage_error("train: node classification requires labels");

  const int n = g.num_vertices();
  const int K = corpus.walks_per_node;
  const int T = corpus.walk_length;
  const int d = cfg.dim;
  // Clamp the context reach so toy corpora with short walks stay usable.
  const int C = std::min(cfg.window, (T - 1) / 2);

  TrainResult result;
  result.model = init_model(n, K, d, cfg.seed);
  EmbeddingModel& m = result.model;
  if (cfg.task == Task::kNodeClassification) {
    m.num_classes = labels->num_classes;
    m.nc_w.assign(static_cast<std::size_t>(m.num_classes) * d, 0.0);
    m.nc_b.assign(static_cast<std::size_t>(m.num_classes), 0.0);
  }

  // Noise distribution: corpus vertex frequency ^ 0.75.
  std::vector<double> noise(static_cast<std::size_t>(n), 0.0);
  for (const auto& w : corpus.walks)
    for (Vertex v : w.vertices) noise[static_cast<std::size_t>(v)] += 1.0;
  for (double& f : noise) f = f > 0.0 ? std::pow(f, 0.75) : 0.0;
  const AliasTable alias(noise);

  // Task batch: positive and negative training edges, or labeled vertices.
  struct LpExample {
    Vertex u, v;
    double label;
  };
  std::vector<LpExample> lp_batch;
  if (cfg.task == Task::kLinkPrediction) {
    for (auto [u, v] : split->train_pos) lp_batch.push_back({u, v, 1.0});
    for (auto [u, v] : split->train_neg) lp_batch.push_back({u, v, 0.0});
  }

  std::vector<std::size_t> walk_order(corpus.walks.size());
  std::iota(walk_order.begin(), walk_order.end(), 0);

  std::vector<double> h(static_cast<std::size_t>(d)), e(static_cast<std::size_t>(d));
  std::vector<double> logits;
  std::vector<Vertex> negs(static_cast<std::size_t>(cfg.negatives));
  WindowExample ex;
  ex.context.reserve(static_cast<std::size_t>(2 * C));
  std::vector<double> gx(static_cast<std::size_t>(n) * d);
  std::vector<double> g_head(static_cast<std::size_t>(d));
  std::vector<double> g_head_nc;
  std::vector<double> g_b_nc;
  if (cfg.task == Task::kNodeClassification) {
    g_head_nc.resize(static_cast<std::size_t>(m.num_classes) * d);
    g_b_nc.resize(static_cast<std::size_t>(m.num_classes));
  }
  std::vector<double> gxu(static_cast<std::size_t>(d)), gxv(static_cast<std::size_t>(d));

  // Two-step schedule inside one joint loop: the first pv_passes epochs
  // stream the full shuffled window set (the paragraph-vector passes); every
  // epoch, including the later ones, runs the task batch and the
  // regularizer, so the head and embeddings keep co-adapting over the full
  // 100-200 epochs.
  const int passes = std::max(1, std::min(cfg.pv_passes, cfg.epochs));
  double last_l_par = 0.0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr =
        cfg.learning_rate *
        std::max(1.0 - static_cast<double>(epoch) / cfg.epochs, 1e-4);
    EpochStats stats;
    stats.epoch = epoch;

    // --- paragraph-vector phase over shuffled windows ---
    const bool pv_epoch = epoch < passes;
    Rng pv_rng(seed_hash({cfg.seed, 0x9aULL, static_cast<std::uint64_t>(epoch)}));
    pv_rng.shuffle(walk_order);
    std::int64_t windows = 0;
    double l_par = 0.0;
    if (pv_epoch)
    for (std::size_t wi : walk_order) {
      const Walk& walk = corpus.walks[wi];
      ex.paragraph_id = walk.paragraph_id;
      const auto& verts = walk.vertices;
      for (int t = C; t < T - C; ++t) {
        // Reduced window: effective half-width drawn uniformly from [1, C].
        const int b =
            C >= 1 ? 1 + static_cast<int>(pv_rng.bounded(
                             static_cast<std::uint64_t>(C)))
                   : 0;
        ex.context.clear();
        for (int o = t - b; o <= t + b; ++o)
          if (o != t) ex.context.push_back(verts[static_cast<std::size_t>(o)]);
        ex.target = verts[static_cast<std::size_t>(t)];
        if (cfg.full_softmax) {
          l_par += window_full_impl<true>(m, ex, lr, h.data(), e.data(), logits);
        } else {
          for (auto& nv : negs) nv = alias.draw(pv_rng);
          l_par += window_ns_impl<true>(m, ex, negs, lr, h.data(), e.data());
        }
        ++windows;
      }
    }
    if (windows > 0) last_l_par = l_par / static_cast<double>(windows);
    stats.l_par = last_l_par;

    // --- task phase on a snapshot of the node vectors ---
    std::vector<double> xv = compute_node_vectors(m);
    std::fill(gx.begin(), gx.end(), 0.0);
    auto x_row = [&](Vertex v) {
      return std::span<const double>(
          xv.data() + static_cast<std::size_t>(v) * d, static_cast<std::size_t>(d));
    };
    auto gx_row = [&](Vertex v) {
      return gx.data() + static_cast<std::size_t>(v) * d;
    };

    const double head_lr =
        cfg.head_learning_rate *
        std::max(1.0 - static_cast<double>(epoch) / cfg.epochs, 1e-4);
    Rng task_rng(seed_hash({cfg.seed, 0x7aULL, static_cast<std::uint64_t>(epoch)}));
    if (cfg.task == Task::kLinkPrediction) {
      auto batch = lp_batch;
      task_rng.shuffle(batch);
      double l_class = 0.0;
      double g_b = 0.0;
      for (const auto& exm : batch) {
        l_class += lp_head_grads(m, x_row(exm.u), x_row(exm.v), exm.label,
                                 g_head, &g_b, gxu, gxv);
        for (int c = 0; c < d; ++c) {
          m.lp_w[static_cast<std::size_t>(c)] -= head_lr * g_head[static_cast<std::size_t>(c)];
          gx_row(exm.u)[c] += gxu[static_cast<std::size_t>(c)];
          gx_row(exm.v)[c] += gxv[static_cast<std::size_t>(c)];
        }
        m.lp_b -= head_lr * g_b;
      }
      stats.l_class =
          batch.empty() ? 0.0 : l_class / static_cast<double>(batch.size());
    } else if (cfg.task == Task::kNodeClassification) {
      auto ids = labels->train_ids;
      task_rng.shuffle(ids);
      double l_class = 0.0;
      for (Vertex v : ids) {
        const int label = labels->labels[static_cast<std::size_t>(v)];
        l_class += nc_head_grads(m, x_row(v), label, g_head_nc, g_b_nc, gxu);
        for (std::size_t i = 0; i < g_head_nc.size(); ++i)
          m.nc_w[i] -= head_lr * g_head_nc[i];
        for (std::size_t i = 0; i < g_b_nc.size(); ++i)
          m.nc_b[i] -= head_lr * g_b_nc[i];
        for (int c = 0; c < d; ++c)
          gx_row(v)[c] += gxu[static_cast<std::size_t>(c)];
      }
      stats.l_class =
          ids.empty() ? 0.0 : l_class / static_cast<double>(ids.size());
    }

    // --- Wasserstein regularizer phase ---
    if (cfg.gamma > 0.0) {
      double l_reg = 0.0;
      for (Vertex v = 0; v < n; ++v) {
        if (g.degree(v) == 0) continue;  // y_v == x_v, zero loss and grads
        std::vector<double> yv = neighbor_vector(xv, g, v, d);
        RegResult r = wasserstein_reg(x_row(v), yv, cfg.gamma);
        l_reg += r.loss;
        double* gv = gx_row(v);
        for (int c = 0; c < d; ++c) gv[c] += r.grad_x[static_cast<std::size_t>(c)];
        const double share = 1.0 / static_cast<double>(g.degree(v));
        for (Vertex u : g.neighbors(v)) {
          double* gu = gx_row(u);
          for (int c = 0; c < d; ++c)
            gu[c] += share * r.grad_y[static_cast<std::size_t>(c)];
        }
      }
      stats.l_reg = l_reg / static_cast<double>(n);
    }

    // --- scatter node-vector gradients into paragraphs and agg weights ---
    // Per-vertex norm clip: the task head and the embeddings otherwise feed
    // each other's growth until the logistic saturates.
    for (Vertex v = 0; v < n; ++v) {
      double* gv = gx_row(v);
      double norm = 0.0;
      for (int c = 0; c < d; ++c) norm += gv[c] * gv[c];
      norm = std::sqrt(norm);
      if (norm > cfg.grad_clip) {
        const double scale = cfg.grad_clip / norm;
        for (int c = 0; c < d; ++c) gv[c] *= scale;
      }
    }
    std::vector<double> ga(static_cast<std::size_t>(K), 0.0);
    for (Vertex v = 0; v < n; ++v) {
      const double* gv = gx_row(v);
      for (int i = 0; i < K; ++i) {
        double* row = m.paragraph_row(static_cast<std::int64_t>(v) * K + i);
        double dot = 0.0;
        for (int c = 0; c < d; ++c) dot += gv[c] * row[c];
        ga[static_cast<std::size_t>(i)] += dot;
        const double step = lr * m.agg[static_cast<std::size_t>(i)];
        for (int c = 0; c < d; ++c) row[c] -= step * gv[c];
      }
    }
    for (int i = 0; i < K; ++i)
      m.agg[static_cast<std::size_t>(i)] -= lr * ga[static_cast<std::size_t>(i)];

    stats.l_ov = stats.l_par + stats.l_class + stats.l_reg;
    if (!std::isfinite(stats.l_ov))
      throw numeric_error("train: loss diverged (NaN/inf) at epoch " +
                          std::to_string(epoch));
    result.history.push_back(stats);
  }

  result.embeddings.dim = d;
  result.embeddings.table = compute_node_vectors(m);
  return result;
}

void save_embeddings(const NodeEmbeddings& emb,
                     const std::vector<std::string>& id_to_token,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write embeddings: " + path);
  const auto n = emb.table.size() / static_cast<std::size_t>(emb.dim);
  out << n << ' ' << emb.dim << '\n';
  out.precision(17);
  for (std::size_t v = 0; v < n; ++v) {
    if (v < id_to_token.size())
      out << id_to_token[v];
    else
      out << v;
    const double* row = emb.table.data() + v * static_cast<std::size_t>(emb.dim);
    for (int c = 0; c < emb.dim; ++c) out << ' ' << row[c];
    out << '\n';
  }
}

NodeEmbeddings load_embeddings(const std::string& path,
                               std::vector<std::string>* tokens_out) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open embeddings: " + path);
  std::size_t n = 0;
  int d = 0;
  if (!(in >> n >> d)) throw data_error("bad embeddings header: " + path);
  NodeEmbeddings emb;
  emb.dim = d;
  emb.table.resize(n * static_cast<std::size_t>(d));
  for (std::size_t v = 0; v < n; ++v) {
    std::string token;
    if (!(in >> token)) throw data_error("truncated embeddings: " + path);
    if (tokens_out) tokens_out->push_back(token);
    for (int c = 0; c < d; ++c)
      if (!(in >> emb.table[v * static_cast<std::size_t>(d) + c]))
        throw data_error("truncated embeddings: " + path);
  }
  return emb;
}

void save_history(const std::vector<EpochStats>& history,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write history: " + path);
  out.precision(17);
  for (const auto& s : history)
    out << s.epoch << ' ' << s.l_par << ' ' << s.l_class << ' ' << s.l_reg
        << ' ' << s.l_ov << '\n';
}

namespace {
constexpr char kModelMagic[8] = {'S', 'W', 'M', 'O', 'D', 'E', 'L', '1'};

void write_table(std::ofstream& out, const std::vector<double>& v) {
  std::uint64_t len = v.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(len * sizeof(double)));
}
std::vector<double> read_table(std::ifstream& in, const std::string& path) {
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  std::vector<double> v(len);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(len * sizeof(double)));
  if (!in) throw data_error("truncated model file: " + path);
  return v;
}
}  // namespace

void save_model(const EmbeddingModel& m, std::uint64_t graph_digest,
                const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write model: " + path);
  out.write(kModelMagic, sizeof kModelMagic);
  out.write(reinterpret_cast<const char*>(&graph_digest), sizeof graph_digest);
  std::int32_t dims[4] = {m.n, m.K, m.dim, m.num_classes};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  write_table(out, m.word);
  write_table(out, m.paragraph);
  write_table(out, m.agg);
  write_table(out, m.out_w);
  write_table(out, m.out_b);
  write_table(out, m.lp_w);
  out.write(reinterpret_cast<const char*>(&m.lp_b), sizeof m.lp_b);
  write_table(out, m.nc_w);
  write_table(out, m.nc_b);
}

EmbeddingModel load_model(const std::string& path,
                          std::uint64_t* graph_digest_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open model: " + path);
  char magic[8];
  in.read(magic, sizeof magic);
  if (in.gcount() != 8 || std::memcmp(magic, kModelMagic, 8) != 0)
    throw data_error("not a model file: " + path);
  std::uint64_t digest = 0;
  in.read(reinterpret_cast<char*>(&digest), sizeof digest);
  if (graph_digest_out) *graph_digest_out = digest;
  std::int32_t dims[4];
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  EmbeddingModel m;
  m.n = dims[0];
  m.K = dims[1];
  m.dim = dims[2];
  m.num_classes = dims[3];
  m.word = read_table(in, path);
  m.paragraph = read_table(in, path);
  m.agg = read_table(in, path);
  m.out_w = read_table(in, path);
  m.out_b = read_table(in, path);
  m.lp_w = read_table(in, path);
  in.read(reinterpret_cast<char*>(&m.lp_b), sizeof m.lp_b);
  m.nc_w = read_table(in, path);
  m.nc_b = read_table(in, path);
  if (!in) throw data_error("truncated model file: " + path);
  return m;
}

}  // namespace specwalk
