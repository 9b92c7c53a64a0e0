#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specwalk/bias.hpp"
#include "specwalk/graph.hpp"
#include "specwalk/spectral.hpp"

namespace specwalk {

/// One walk-quality experiment: per grid point, the spectral-walk and
/// simple-walk means plus a one-sided bootstrap confidence that the spectral
/// walk is better (higher packing, lower rank / cover length).
struct DiagnosticReport {
  std::string kind;
  std::vector<double> grid;  // walk lengths (or a single T)
  std::vector<double> spectral_mean;
  std::vector<double> simple_mean;
  std::vector<double> confidence;
  double radius = 0.0;
  int samples = 0;
  int runs = 0;
  std::string config_echo;
};

/// `percentile` in (0,100): spectral-distance percentile over sampled vertex
/// pairs (all pairs when n is small). Used for the default ball radius.
double percentile_distance(const SpectraCache& cache, double percentile,
                           double p, std::uint64_t seed,
                           std::int64_t max_samples = 200000);

/// Ordered (s,t) pairs with spectral distance below the given percentile,
/// s != t, t reachable from s.
std::vector<std::pair<Vertex, Vertex>> sample_similar_pairs(
    const Graph& g, const SpectraCache& cache, int count, double percentile,
    double p, std::uint64_t seed);

/// Mean first-appearance index of t in fixed-length walks from s (T+1 when
/// absent), spectral vs simple, averaged over pairs and runs.
DiagnosticReport hitting_rank(const Graph& g, const SpectraCache& cache,
                              const BiasModel& bias,
                              const std::vector<std::pair<Vertex, Vertex>>& pairs,
                              int T, int runs, double epsilon,
                              std::uint64_t seed);

/// Per walk length in `t_grid`: mean fraction of walk vertices inside
/// B_w(start; c), spectral vs simple.
DiagnosticReport packing_density(const Graph& g, const SpectraCache& cache,
                                 const BiasModel& bias,
                                 const std::vector<Vertex>& starts,
                                 const std::vector<int>& t_grid, double c,
                                 int runs, double epsilon, std::uint64_t seed);

/// Mean walk length at which B_w(start; c) has been fully visited (censored
/// at max_T), spectral vs simple. Unreachable ball members censor the walk.
DiagnosticReport cover_time(const Graph& g, const SpectraCache& cache,
                            const BiasModel& bias,
                            const std::vector<Vertex>& starts, double c,
                            int max_T, int runs, double epsilon,
                            std::uint64_t seed);

/// Fraction of bootstrap resamples whose mean is > 0.
double bootstrap_confidence(const std::vector<double>& diffs, int resamples,
                            std::uint64_t seed);

/// Tab-separated report with a '#' header echoing the configuration.
void save_report(const DiagnosticReport& r, const std::string& path);

}  // namespace specwalk
