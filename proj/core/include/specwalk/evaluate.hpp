#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "specwalk/embedding.hpp"
#include "specwalk/split.hpp"

namespace specwalk {

/// Rank-based (Mann-Whitney) AUC; ties contribute 1/2. Throws if either
/// class is missing.
double auc(std::span<const double> scores, std::span<const int> labels);

/// Scores every test pair with the trained link-prediction head and returns
/// the AUC of positives vs negatives.
double eval_link_prediction(const EmbeddingModel& m, const NodeEmbeddings& emb,
                            const EdgeSplit& split);

struct NcEvalConfig {
  int epochs = 200;
  double learning_rate = 0.05;
  std::uint64_t seed = 7;
};

struct NcEvalResult {
  double accuracy = 0.0;
  // Classes appearing in the test set but absent from training (warned).
  std::vector<int> untrained_classes;
};

/// Trains a fresh linear softmax head on the frozen embeddings of train_ids
/// and reports accuracy over test_ids.
NcEvalResult eval_node_classification(const NodeEmbeddings& emb,
                                      const LabeledNodes& labels,
                                      const NcEvalConfig& cfg = {});

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> values;
};
Aggregate aggregate(std::span<const double> values);

}  // namespace specwalk
