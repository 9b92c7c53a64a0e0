#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "specwalk/bias.hpp"
#include "specwalk/graph.hpp"
#include "specwalk/rng.hpp"

namespace specwalk {

struct WalkConfig {
  int walk_length = 100;    // T, counting the start vertex
  int walks_per_node = 50;  // K
  double epsilon = 0.6;     // bias probability (the experiments' p)
  int k = 5;
  double ot_order = 2.0;
  std::uint64_t seed = 7;
  bool online_bias = false;  // recompute bias rows per step instead of
                             // reading the precomputed model
  void validate() const;
};

struct Walk {
  Vertex start = 0;
  std::int64_t paragraph_id = 0;
  std::vector<Vertex> vertices;  // length T, vertices[0] == start
};

struct WalkCorpus {
  int walk_length = 0;
  int walks_per_node = 0;
  std::uint64_t graph_digest = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  std::vector<Walk> walks;  // vertex-major, then walk index
};

/// Inverse-CDF draw: partition [0,1] by the cumulative sums of `row`, draw
/// x ~ U[0,1], return the candidate whose interval contains x.
Vertex move_to(std::span<const Vertex> candidates, std::span<const double> row,
               Rng& rng);

/// Uniform-neighbor random walk of length T from v0 (the P chain).
Walk simple_walk(const Graph& g, Vertex v0, int T, Rng& rng);

/// Mixture walk: each step takes the bias row with probability epsilon and a
/// uniform neighbor otherwise. Length exactly T including v0.
Walk spectral_walk(const Graph& g, const BiasModel& bias, Vertex v0, int T,
                   double epsilon, Rng& rng);

/// Variant that recomputes the bias row at every biased step from the
/// spectra cache (identical distribution; for fidelity experiments).
Walk spectral_walk_online(const Graph& g, const SpectraCache& cache, int k,
                          double ot_order, Vertex v0, int T, double epsilon,
                          Rng& rng);

/// K walks per non-isolated vertex, paragraph id = vertex * K + walk index.
/// Each walk draws from an RNG seeded by hash(seed, vertex, walk index), so
/// the corpus is byte-identical regardless of thread count.
WalkCorpus generate_corpus(const Graph& g, const BiasModel& bias,
                           const WalkConfig& cfg, int threads = 1,
                           const SpectraCache* online_cache = nullptr);

/// One walk per line: `paragraph_id v0 v1 ... v(T-1)`; '#' header lines
/// carry the generating configuration and input digest.
void save_corpus(const WalkCorpus& c, const std::string& path);
WalkCorpus load_corpus(const std::string& path);

}  // namespace specwalk
