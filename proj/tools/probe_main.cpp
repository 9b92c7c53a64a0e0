// Scratch experiment driver used during development; not installed.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#include "specwalk/evaluate.hpp"
#include "specwalk/pipeline.hpp"
#include "specwalk/synthetic.hpp"

using namespace specwalk;

int main(int argc, char** argv) {
  std::string preset = argc > 1 ? argv[1] : "usair-like";
  RunConfig cfg;
  cfg.runs = argc > 2 ? std::atoi(argv[2]) : 1;
  cfg.epochs = argc > 3 ? std::atoi(argv[3]) : 100;
  cfg.bias_prob = argc > 4 ? std::atof(argv[4]) : 0.6;
  cfg.threads = argc > 5 ? std::atoi(argv[5]) : 2;
  if (argc > 6) cfg.seed = std::strtoull(argv[6], nullptr, 10);
  if (argc > 7) cfg.walks_per_node = std::atoi(argv[7]);
  if (argc > 8) cfg.gamma = std::atof(argv[8]);

  const SynthDataset ds = generate_synthetic(preset_by_name(preset));
  std::cerr << preset << ": n=" << ds.graph.num_vertices()
            << " m=" << ds.graph.num_edges() << "\n";

  {  // common-neighbor heuristic AUC, as a learnability yardstick
    const EdgeSplit s = split_edges(ds.graph, cfg.test_fraction, cfg.seed);
    const Graph gt = remove_edges(ds.graph, s.test_pos);
    std::vector<double> scores;
    std::vector<int> labels;
    auto cn = [&](Vertex u, Vertex v) {
      auto a = gt.neighbors(u);
      auto b = gt.neighbors(v);
      std::size_t i = 0, j = 0;
      int shared = 0;
      while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) { ++shared; ++i; ++j; }
        else if (a[i] < b[j]) ++i;
        else ++j;
      }
      return static_cast<double>(shared);
    };
    for (auto [u, v] : s.test_pos) { scores.push_back(cn(u, v)); labels.push_back(1); }
    for (auto [u, v] : s.test_neg) { scores.push_back(cn(u, v)); labels.push_back(0); }
    std::cerr << "common-neighbors AUC: " << auc(scores, labels) << "\n";
  }

  const auto t0 = std::chrono::steady_clock::now();
  const Aggregate a = lp_protocol(ds.graph, cfg);
  const auto t1 = std::chrono::steady_clock::now();
  const double secs = std::chrono::duration<double>(t1 - t0).count();
  std::cout << "auc_mean=" << a.mean << " auc_std=" << a.stddev
            << " runs=" << cfg.runs << " epochs=" << cfg.epochs
            << " eps=" << cfg.bias_prob << " wall=" << secs << "s ("
            << secs / cfg.runs << " s/run)\n";
  for (double v : a.values) std::cout << "  " << v << "\n";
  return 0;
}
