#pragma once

#include <cstdint>
#include <vector>

#include "specwalk/graph.hpp"
#include "specwalk/spectral.hpp"

namespace specwalk {

/// Per-vertex spectrally biased transition rows: the symmetric k-closest
/// neighbor set S_k(i) together with a normalized probability row over it.
struct BiasModel {
  int k = 5;
  double ot_order = 2.0;
  std::uint64_t cache_digest = 0;  // digest of the source graph
  // Aligned per vertex: candidates (ascending ids) and their probabilities.
  std::vector<std::vector<Vertex>> candidates;
  std::vector<std::vector<double>> rows;
};

/// The k spectrally nearest neighbors of i within N(i) (ties by ascending
/// id), unioned with every j in N(i) that keeps i among its own k nearest.
/// Result ordered by ascending id; empty for isolated i.
std::vector<Vertex> symmetric_k_closest(const Graph& g,
                                        const SpectraCache& cache, Vertex i,
                                        int k, double ot_order);

/// Probability row over S_k(i): raw score 1 - W^p(i,j) / sum_m W^p(i,m),
/// negatives clamped to 0, then renormalized to sum 1. Falls back to the
/// uniform row when the scores degenerate (single candidate or all-zero
/// distances).
std::vector<double> bias_row(const Graph& g, const SpectraCache& cache,
                             Vertex i, const std::vector<Vertex>& sk,
                             double ot_order);

BiasModel build_bias_model(const Graph& g, const SpectraCache& cache, int k,
                           double ot_order, int threads = 1);

/// Detailed-balance diagnostic for the bias matrix W: estimates the
/// stationary distribution by power iteration and reports
/// max_ij |pi_i w_ij - pi_j w_ji|. Reported, never asserted.
struct ReversibilityReport {
  double max_imbalance = 0.0;
  bool converged = false;
  int iterations = 0;
};
ReversibilityReport check_reversibility(const Graph& g, const BiasModel& bias,
                                        int max_iters = 10000,
                                        double tol = 1e-12);

}  // namespace specwalk
