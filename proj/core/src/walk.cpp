#include "specwalk/walk.hpp"

#include <algorithm>
#include <cinttypes>
#include <fstream>
#include <sstream>
#include <thread>

#include "specwalk/errors.hpp"

namespace specwalk {

void WalkConfig::validate() const {
  if (walk_length < 2) throw usage_error("walk_length must be >= 2");
  if (walks_per_node < 1) throw usage_error("walks_per_node must be >= 1");
  if (epsilon < 0.0 || epsilon > 1.0)
    throw usage_error("epsilon must lie in [0,1]");
  if (k < 1) throw usage_error("k must be >= 1");
  if (ot_order < 1.0) throw usage_error("ot_order must be >= 1");
}

Vertex move_to(std::span<const Vertex> candidates, std::span<const double> row,
               Rng& rng) {
  if (candidates.empty()) throw data_error("move_to: empty candidate set");
  const double x = rng.u01();
  double cum = 0.0;
  for (std::size_t t = 0; t < candidates.size(); ++t) {
    cum += row[t];
    if (x < cum) return candidates[t];
  }
  return candidates.back();  // x landed in the final interval (or rounding)
}

Walk simple_walk(const Graph& g, Vertex v0, int T, Rng& rng) {
  if (g.degree(v0) == 0) throw data_error("simple_walk: isolated start vertex");
  Walk w;
  w.start = v0;
  w.vertices.reserve(static_cast<std::size_t>(T));
  w.vertices.push_back(v0);
  Vertex cur = v0;
  for (int step = 1; step < T; ++step) {
    auto nb = g.neighbors(cur);
    cur = nb[rng.bounded(nb.size())];
    w.vertices.push_back(cur);
  }
  return w;
}

namespace {

template <typename BiasRowFn>
Walk mixture_walk(const Graph& g, Vertex v0, int T, double epsilon, Rng& rng,
                  BiasRowFn&& bias_step) {
  if (g.degree(v0) == 0)
    throw data_error("spectral_walk: isolated start vertex");
  Walk w;
  w.start = v0;
  w.vertices.reserve(static_cast<std::size_t>(T));
  w.vertices.push_back(v0);
  Vertex cur = v0;
  for (int step = 1; step < T; ++step) {
    auto nb = g.neighbors(cur);
    if (nb.empty()) throw data_error("spectral_walk: walk reached an isolated vertex");
    const double x = rng.u01();
    if (x <= epsilon) {
      cur = bias_step(cur, rng);
    } else {
      cur = nb[rng.bounded(nb.size())];
    }
    w.vertices.push_back(cur);
  }
  return w;
}

}  // namespace

Walk spectral_walk(const Graph& g, const BiasModel& bias, Vertex v0, int T,
                   double epsilon, Rng& rng) {
  return mixture_walk(g, v0, T, epsilon, rng, [&](Vertex cur, Rng& r) {
    const auto& cand = bias.candidates[static_cast<std::size_t>(cur)];
    const auto& row = bias.rows[static_cast<std::size_t>(cur)];
    return move_to(cand, row, r);
  });
}

Walk spectral_walk_online(const Graph& g, const SpectraCache& cache, int k,
                          double ot_order, Vertex v0, int T, double epsilon,
                          Rng& rng) {
  return mixture_walk(g, v0, T, epsilon, rng, [&](Vertex cur, Rng& r) {
    const auto sk = symmetric_k_closest(g, cache, cur, k, ot_order);
    const auto row = bias_row(g, cache, cur, sk, ot_order);
    return move_to(sk, row, r);
  });
}

WalkCorpus generate_corpus(const Graph& g, const BiasModel& bias,
                           const WalkConfig& cfg, int threads,
                           const SpectraCache* online_cache) {
  cfg.validate();
  if (cfg.online_bias && online_cache == nullptr)
    throw usage_error("online bias requested but no spectra cache supplied");

  WalkCorpus corpus;
  corpus.walk_length = cfg.walk_length;
  corpus.walks_per_node = cfg.walks_per_node;
  corpus.graph_digest = g.digest();
  corpus.seed = cfg.seed;
  corpus.epsilon = cfg.epsilon;

  const Vertex n = g.num_vertices();
  const int K = cfg.walks_per_node;
  std::vector<Vertex> starts;
  starts.reserve(static_cast<std::size_t>(n));
  for (Vertex v = 0; v < n; ++v)
    if (g.degree(v) > 0) starts.push_back(v);
  corpus.walks.resize(starts.size() * static_cast<std::size_t>(K));

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const Vertex v = starts[s];
      for (int i = 0; i < K; ++i) {
        Rng rng(seed_hash({cfg.seed, static_cast<std::uint64_t>(v),
                           static_cast<std::uint64_t>(i)}));
        Walk w =
            cfg.online_bias
                ? spectral_walk_online(g, *online_cache, cfg.k, cfg.ot_order,
                                       v, cfg.walk_length, cfg.epsilon, rng)
                : spectral_walk(g, bias, v, cfg.walk_length, cfg.epsilon, rng);
        w.paragraph_id = static_cast<std::int64_t>(v) * K + i;
        corpus.walks[s * static_cast<std::size_t>(K) +
                     static_cast<std::size_t>(i)] = std::move(w);
      }
    }
  };

  if (threads <= 1 || starts.size() < 64) {
    work(0, starts.size());
  } else {
    const int t = std::min<int>(threads, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    const std::size_t chunk = (starts.size() + t - 1) / t;
    for (int i = 0; i < t; ++i) {
      std::size_t b = static_cast<std::size_t>(i) * chunk;
      std::size_t e = std::min(starts.size(), b + chunk);
      if (b >= e) break;
      pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return corpus;
}

void save_corpus(const WalkCorpus& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write corpus: " + path);
  char head[160];
  std::snprintf(head, sizeof head,
                "# walk corpus: graph=%016llx T=%d K=%d epsilon=%.17g "
                "seed=%llu\n",
                static_cast<unsigned long long>(c.graph_digest),
                c.walk_length, c.walks_per_node, c.epsilon,
                static_cast<unsigned long long>(c.seed));
  out << head;
  for (const auto& w : c.walks) {
    out << w.paragraph_id;
    for (Vertex v : w.vertices) out << ' ' << v;
    out << '\n';
  }
}

WalkCorpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open corpus: " + path);
  WalkCorpus c;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      unsigned long long dig = 0, seed = 0;
      int T = 0, K = 0;
      double eps = 0;
      if (std::sscanf(line.c_str(),
                      "# walk corpus: graph=%llx T=%d K=%d epsilon=%lg "
                      "seed=%llu",
                      &dig, &T, &K, &eps, &seed) == 5) {
        c.graph_digest = dig;
        c.walk_length = T;
        c.walks_per_node = K;
        c.epsilon = eps;
        c.seed = seed;
      }
      continue;
    }
    std::istringstream ls(line);
    Walk w;
    if (!(ls >> w.paragraph_id)) throw data_error("malformed corpus line");
    Vertex v;
    while (ls >> v) w.vertices.push_back(v);
    if (w.vertices.empty()) throw data_error("corpus walk with no vertices");
    w.start = w.vertices.front();
    c.walks.push_back(std::move(w));
  }
  return c;
}

}  // namespace specwalk
