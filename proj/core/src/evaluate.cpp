#include "specwalk/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "specwalk/errors.hpp"
#include "specwalk/rng.hpp"

namespace specwalk {

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    throw usage_error("auc: scores and labels differ in length");
  std::int64_t n_pos = 0, n_neg = 0;
  for (int l : labels) (l ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0)
    throw data_error("auc: both classes must be present");

  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Average ranks across ties, accumulate the positive-rank sum.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) +
                                   static_cast<double>(j + 1));
    for (std::size_t t = i; t <= j; ++t)
      if (labels[idx[t]]) rank_sum_pos += avg_rank;
    i = j + 1;
  }
  const double u = rank_sum_pos -
                   static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double eval_link_prediction(const EmbeddingModel& m, const NodeEmbeddings& emb,
                            const EdgeSplit& split) {
  if (split.test_pos.empty() || split.test_neg.empty())
    throw data_error("eval_link_prediction: empty test set");
  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(split.test_pos.size() + split.test_neg.size());
  for (auto [u, v] : split.test_pos) {
    scores.push_back(lp_head_score(m, emb.row(u), emb.row(v)));
    labels.push_back(1);
  }
  for (auto [u, v] : split.test_neg) {
    scores.push_back(lp_head_score(m, emb.row(u), emb.row(v)));
    labels.push_back(0);
  }
  return auc(scores, labels);
}

NcEvalResult eval_node_classification(const NodeEmbeddings& emb,
                                      const LabeledNodes& labels,
                                      const NcEvalConfig& cfg) {
  const int d = emb.dim;
  const int C = labels.num_classes;
  NcEvalResult result;

  std::vector<char> in_train(static_cast<std::size_t>(C), 0);
  for (Vertex v : labels.train_ids)
    in_train[static_cast<std::size_t>(labels.labels[static_cast<std::size_t>(v)])] = 1;
  std::vector<char> in_test(static_cast<std::size_t>(C), 0);
  for (Vertex v : labels.test_ids)
    in_test[static_cast<std::size_t>(labels.labels[static_cast<std::size_t>(v)])] = 1;
  for (int c = 0; c < C; ++c)
    if (in_test[static_cast<std::size_t>(c)] && !in_train[static_cast<std::size_t>(c)])
      result.untrained_classes.push_back(c);

  // Plain softmax-regression SGD on the frozen embeddings.
  std::vector<double> w(static_cast<std::size_t>(C) * d, 0.0);
  std::vector<double> b(static_cast<std::size_t>(C), 0.0);
  std::vector<double> logits(static_cast<std::size_t>(C));
  auto ids = labels.train_ids;
  Rng rng(seed_hash({cfg.seed, 0x2ccULL}));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.learning_rate *
                      std::max(1.0 - static_cast<double>(epoch) / cfg.epochs, 0.01);
    rng.shuffle(ids);
    for (Vertex v : ids) {
      auto x = emb.row(v);
      for (int c = 0; c < C; ++c) {
        double z = b[static_cast<std::size_t>(c)];
        const double* row = w.data() + static_cast<std::size_t>(c) * d;
        for (int i = 0; i < d; ++i) z += row[i] * x[static_cast<std::size_t>(i)];
        logits[static_cast<std::size_t>(c)] = z;
      }
      const double mx = *std::max_element(logits.begin(), logits.end());
      double zsum = 0.0;
      for (double f : logits) zsum += std::exp(f - mx);
      const int label = labels.labels[static_cast<std::size_t>(v)];
      for (int c = 0; c < C; ++c) {
        const double p = std::exp(logits[static_cast<std::size_t>(c)] - mx) / zsum;
        const double gl = p - (c == label ? 1.0 : 0.0);
        double* row = w.data() + static_cast<std::size_t>(c) * d;
        for (int i = 0; i < d; ++i) row[i] -= lr * gl * x[static_cast<std::size_t>(i)];
        b[static_cast<std::size_t>(c)] -= lr * gl;
      }
    }
  }

  std::int64_t correct = 0;
  for (Vertex v : labels.test_ids) {
    auto x = emb.row(v);
    int best = 0;
    double best_z = -1e300;
    for (int c = 0; c < C; ++c) {
      double z = b[static_cast<std::size_t>(c)];
      const double* row = w.data() + static_cast<std::size_t>(c) * d;
      for (int i = 0; i < d; ++i) z += row[i] * x[static_cast<std::size_t>(i)];
      if (z > best_z) {
        best_z = z;
        best = c;
      }
    }
    if (best == labels.labels[static_cast<std::size_t>(v)]) ++correct;
  }
  result.accuracy = labels.test_ids.empty()
                        ? 0.0
                        : static_cast<double>(correct) /
                              static_cast<double>(labels.test_ids.size());
  return result;
}

Aggregate aggregate(std::span<const double> values) {
  Aggregate a;
  a.values.assign(values.begin(), values.end());
  if (values.empty()) return a;
  for (double v : values) a.mean += v;
  a.mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - a.mean) * (v - a.mean);
  a.stddev = values.size() > 1
                 ? std::sqrt(ss / static_cast<double>(values.size() - 1))
                 : 0.0;
  return a;
}

}  // namespace specwalk
