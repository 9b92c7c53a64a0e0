#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specwalk/graph.hpp"

namespace specwalk {

/// Train/test partition of the positive edges plus matching negative
/// (non-edge) samples. |train_neg| = |train_pos| and |test_neg| = |test_pos|.
struct EdgeSplit {
  std::vector<Edge> train_pos;
  std::vector<Edge> test_pos;
  std::vector<Edge> train_neg;
  std::vector<Edge> test_neg;
  std::uint64_t seed = 0;
  double test_fraction = 0.0;
  std::uint64_t graph_digest = 0;
  // Vertices left with no training edge after removal; reported, not fixed.
  int isolated_train_vertices = 0;
};

/// Deterministic split under `seed`. Test positives are a uniform sample of
/// E of size round(test_fraction * m); negatives are drawn uniformly from
/// the non-edges of g without replacement, disjoint across train/test.
/// Throws data_error if g cannot supply |E| distinct non-edges.
EdgeSplit split_edges(const Graph& g, double test_fraction,
                      std::uint64_t seed);

/// Sectioned plain-text split file (%train_pos / %train_neg / %test_pos /
/// %test_neg) for exact experiment replay.
void save_split(const EdgeSplit& s, const std::string& path);
EdgeSplit load_split(const std::string& path);

struct LabeledNodes {
  std::vector<int> labels;  // label per vertex; -1 = unlabeled
  std::vector<Vertex> train_ids;
  std::vector<Vertex> test_ids;
  int num_classes = 0;
};

/// Label file: `vertex<TAB>class` per line, '#' comments ignored. Vertices
/// are given as original tokens and resolved through the id map.
std::vector<int> load_labels(const std::string& path,
                             const std::vector<std::string>& id_to_token);

/// Stratified split: `per_class` training vertices per class (by seeded
/// draw), the rest (capped at test_cap, 0 = all) form the test set.
LabeledNodes stratified_label_split(const std::vector<int>& labels,
                                    int per_class, int test_cap,
                                    std::uint64_t seed);

}  // namespace specwalk
