#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specwalk/graph.hpp"

namespace specwalk {

/// Deterministic latent-space graph generator. Nodes carry a Pareto
/// popularity, a position on the unit circle and a community; edge
/// propensity is popularity_u * popularity_v, scaled by a von-Mises
/// locality kernel and a same-community boost. A weighted random recursive
/// tree guarantees connectivity; remaining edges are an exact weighted
/// sample without replacement (exponential race).
struct SynthSpec {
  std::string name;
  int n = 0;
  std::int64_t m = 0;
  int communities = 1;
  double hub_exponent = 2.0;  // Pareto shape; smaller = heavier hubs
  double intra_weight = 6.0;  // same-community multiplier
  double locality = 0.0;      // von-Mises kernel concentration on the ring
  double density_wave = 0.0;  // amplitude of the angular density field
  std::uint64_t seed = 1;
};

struct SynthDataset {
  std::string name;
  Graph graph;
  std::vector<int> labels;  // community per vertex
};

SynthDataset generate_synthetic(const SynthSpec& spec);

/// Stand-in presets mirroring the published node/edge counts of the
/// evaluation datasets (the originals are fetched from SNAP / Network
/// Repository; these generators reproduce their scale and degree shape for
/// hermetic runs).
SynthSpec usair_like();
SynthSpec celegans_like();
SynthSpec infect_hyper_like();
SynthSpec power_like();
SynthSpec cora_like();
SynthSpec citeseer_like();
SynthSpec preset_by_name(const std::string& name);

}  // namespace specwalk
