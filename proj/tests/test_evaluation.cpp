#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "specwalk/bias.hpp"
#include "specwalk/diagnostics.hpp"
#include "specwalk/errors.hpp"
#include "specwalk/evaluate.hpp"
#include "specwalk/graph.hpp"
#include "specwalk/rng.hpp"
#include "specwalk/synthetic.hpp"

using namespace specwalk;

TEST_CASE("auc basics and the hand-enumerated example") {
  SUBCASE("perfect separation scores 1") {
    const std::vector<double> s{0.1, 0.2, 0.8, 0.9};
    const std::vector<int> l{0, 0, 1, 1};
    CHECK(auc(s, l) == doctest::Approx(1.0));
  }
  SUBCASE("the (0.1,0.4,0.35,0.8) example scores 0.75") {
    const std::vector<double> s{0.1, 0.4, 0.35, 0.8};
    const std::vector<int> l{0, 0, 1, 1};
    CHECK(auc(s, l) == doctest::Approx(0.75));
  }
  SUBCASE("ties contribute one half") {
    const std::vector<double> s{0.5, 0.5};
    const std::vector<int> l{0, 1};
    CHECK(auc(s, l) == doctest::Approx(0.5));
  }
  SUBCASE("single-class input is an error") {
    const std::vector<double> s{0.1, 0.2};
    const std::vector<int> l{1, 1};
    CHECK_THROWS_AS(static_cast<void>(auc(s, l)), data_error);
  }
  SUBCASE("independent labels land near one half") {
    Rng rng(2024);
    std::vector<double> s;
    std::vector<int> l;
    for (int i = 0; i < 10000; ++i) {
      s.push_back(rng.u01());
      l.push_back(static_cast<int>(rng.bounded(2)));
    }
    CHECK(std::fabs(auc(s, l) - 0.5) < 0.02);
  }
}

TEST_CASE("auc invariances") {
  Rng rng(77);
  std::vector<double> s;
  std::vector<int> l;
  for (int i = 0; i < 500; ++i) {
    s.push_back(rng.u01() * 4.0 - 2.0);
    l.push_back(static_cast<int>(rng.bounded(2)));
  }
  const double base = auc(s, l);
  SUBCASE("strictly monotone transforms leave auc unchanged") {
    std::vector<double> t(s);
    for (double& v : t) v = std::exp(0.7 * v) + 3.0;
    CHECK(auc(t, l) == doctest::Approx(base).epsilon(1e-12));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::atan(s[i]);
    CHECK(auc(t, l) == doctest::Approx(base).epsilon(1e-12));
  }
  SUBCASE("flipping labels complements auc") {
    std::vector<int> flipped(l);
    for (int& v : flipped) v = 1 - v;
    CHECK(auc(s, l) + auc(s, flipped) == doctest::Approx(1.0));
  }
}

TEST_CASE("eval_link_prediction scores the split with the trained head") {
  EmbeddingModel m = init_model(4, 1, 3, 5);
  // Hand-built embeddings: x_v = paragraph row (K=1, agg=1).
  auto set_row = [&](Vertex v, double a, double b, double c) {
    double* r = m.paragraph_row(v);
    r[0] = a;
    r[1] = b;
    r[2] = c;
  };
  set_row(0, 1, 0, 0);
  set_row(1, 1, 0, 0);
  set_row(2, 0, 1, 0);
  set_row(3, 0, 0, 1);
  m.lp_w = {5.0, 5.0, 5.0};
  m.lp_b = -2.0;
  NodeEmbeddings emb;
  emb.dim = 3;
  emb.table = compute_node_vectors(m);

  EdgeSplit split;
  split.test_pos = {{0, 1}};  // aligned pair -> high score
  split.test_neg = {{2, 3}};  // orthogonal pair -> low score
  CHECK(eval_link_prediction(m, emb, split) == doctest::Approx(1.0));

  split.test_neg.clear();
  CHECK_THROWS_AS(static_cast<void>(eval_link_prediction(m, emb, split)),
                  data_error);
}

TEST_CASE("eval_node_classification separates one-hot embeddings") {
  NodeEmbeddings emb;
  emb.dim = 2;
  // 8 vertices, two clean clusters.
  emb.table = {1, 0, 1, 0.1, 0.9, 0, 1, -0.1, 0, 1, 0.1, 1, 0, 0.9, -0.1, 1};
  LabeledNodes labels;
  labels.labels = {0, 0, 0, 0, 1, 1, 1, 1};
  labels.num_classes = 2;
  labels.train_ids = {0, 1, 4, 5};
  labels.test_ids = {2, 3, 6, 7};
  const NcEvalResult r = eval_node_classification(emb, labels);
  CHECK(r.accuracy == doctest::Approx(1.0));
  CHECK(r.untrained_classes.empty());

  SUBCASE("class missing from training is warned, not fatal") {
    LabeledNodes missing = labels;
    missing.train_ids = {0, 1};  // class 1 untrained
    const NcEvalResult r2 = eval_node_classification(emb, missing);
    REQUIRE(r2.untrained_classes.size() == 1);
    CHECK(r2.untrained_classes[0] == 1);
  }
}

TEST_CASE("aggregate reports mean and sample stddev") {
  const Aggregate a = aggregate(std::vector<double>{1.0, 2.0, 3.0});
  CHECK(a.mean == doctest::Approx(2.0));
  CHECK(a.stddev == doctest::Approx(1.0));
}

TEST_CASE("bootstrap confidence saturates for one-sided samples") {
  CHECK(bootstrap_confidence({1.0, 2.0, 0.5, 1.5}, 500, 1) ==
        doctest::Approx(1.0));
  CHECK(bootstrap_confidence({-1.0, -2.0, -0.5}, 500, 1) ==
        doctest::Approx(0.0));
}

namespace {

struct DiagSetup {
  Graph graph;
  SpectraCache cache;
  BiasModel bias;
};

DiagSetup k3_setup() {
  DiagSetup d{Graph(3, {{0, 1}, {1, 2}, {0, 2}}), {}, {}};
  d.cache = build_spectra_cache(d.graph, 2, 10, 1);
  d.bias = build_bias_model(d.graph, d.cache, 2, 2.0, 1);
  return d;
}

}  // namespace

TEST_CASE("hitting rank on a 2-path is always 1") {
  const Graph g(2, {{0, 1}});
  const SpectraCache cache = build_spectra_cache(g, 2, 10, 1);
  const BiasModel bias = build_bias_model(g, cache, 1, 2.0, 1);
  const DiagnosticReport r =
      hitting_rank(g, cache, bias, {{0, 1}}, 10, 5, 0.6, 3);
  CHECK(r.spectral_mean[0] == doctest::Approx(1.0));
  CHECK(r.simple_mean[0] == doctest::Approx(1.0));
}

TEST_CASE("packing density is 100% when all spectra coincide") {
  const DiagSetup d = k3_setup();
  const DiagnosticReport r = packing_density(
      d.graph, d.cache, d.bias, {0, 1, 2}, {10, 20}, 0.0, 10, 0.6, 4);
  for (double v : r.spectral_mean) CHECK(v == doctest::Approx(100.0));
  for (double v : r.simple_mean) CHECK(v == doctest::Approx(100.0));
}

TEST_CASE("cover time of a singleton ball is 1; K3 matches the exact "
          "markov-chain oracle") {
  const DiagSetup d = k3_setup();
  SUBCASE("a singleton ball is covered at length 1 by both walkers") {
    // Star: the center's spectrum is unique, the leaves share theirs.
    const Graph g(4, {{0, 1}, {0, 2}, {0, 3}});
    const SpectraCache cache = build_spectra_cache(g, 1, 10, 1);
    const BiasModel bias = build_bias_model(g, cache, 1, 2.0, 1);
    const double d_center_leaf = spectral_distance(cache, 0, 1, 2.0);
    REQUIRE(d_center_leaf > 0.0);
    const DiagnosticReport r = cover_time(g, cache, bias, {0},
                                          0.5 * d_center_leaf, 100, 10, 0.6, 5);
    CHECK(r.spectral_mean[0] == doctest::Approx(1.0));
    CHECK(r.simple_mean[0] == doctest::Approx(1.0));
  }
  SUBCASE("K3 full-ball cover matches the exact expectation") {
    // Simple walk on K3: transition 1/2 to each other vertex.
    const std::vector<double> P{0, 0.5, 0.5, 0.5, 0, 0.5, 0.5, 0.5, 0};
    const double expect = oracle::expected_cover_length(P, 3, 0, {0, 1, 2});
    const DiagnosticReport r = cover_time(
        d.graph, d.cache, d.bias, {0},
        std::numeric_limits<double>::infinity(), 1000, 4000, 0.0, 6);
    // Both walkers are the simple walk here (eps=0; uniform bias rows).
    CHECK(std::fabs(r.simple_mean[0] - expect) < 0.15);
    CHECK(std::fabs(r.spectral_mean[0] - expect) < 0.15);
  }
}

TEST_CASE("percentile radius and similar-pair sampling work on a real-sized "
          "graph") {
  const SynthDataset ds = generate_synthetic(infect_hyper_like());
  const SpectraCache cache = build_spectra_cache(ds.graph, 2, 20, 2);
  const double r10 = percentile_distance(cache, 10.0, 2.0, 3);
  const double r50 = percentile_distance(cache, 50.0, 2.0, 3);
  CHECK(r10 >= 0.0);
  CHECK(r10 <= r50);

  const auto pairs = sample_similar_pairs(ds.graph, cache, 200, 5.0, 2.0, 3);
  CHECK(pairs.size() == 200);
  const double thresh = percentile_distance(cache, 5.0, 2.0, 3);
  for (const auto& [s, t] : pairs) {
    CHECK(s != t);
    CHECK(spectral_distance(cache, s, t, 2.0) <= thresh);
  }
}

TEST_CASE("diagnostic reports serialize as headed TSV") {
  DiagnosticReport r;
  r.kind = "packing_density";
  r.grid = {40, 80};
  r.spectral_mean = {51.0, 62.0};
  r.simple_mean = {43.0, 50.0};
  r.confidence = {0.99, 1.0};
  r.samples = 100;
  r.runs = 10;
  r.radius = 0.123;
  r.config_echo = "k = 5\nbias_prob = 0.6";
  const std::string path =
      (std::filesystem::temp_directory_path() / "sw_report.tsv").string();
  save_report(r, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line.find("# kind=packing_density") == 0);
  int data_lines = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') ++data_lines;
  CHECK(data_lines == 2);
}
