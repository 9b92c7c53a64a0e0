#include "specwalk/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "specwalk/errors.hpp"
#include "specwalk/rng.hpp"
#include "specwalk/walk.hpp"

namespace specwalk {

double percentile_distance(const SpectraCache& cache, double percentile,
                           double p, std::uint64_t seed,
                           std::int64_t max_samples) {
  if (percentile <= 0.0 || percentile >= 100.0)
    throw usage_error("percentile must lie in (0,100)");
  const auto n = static_cast<std::int64_t>(cache.spectra.size());
  const std::int64_t all_pairs = n * (n - 1) / 2;
  std::vector<double> dists;
  if (all_pairs <= max_samples) {
    dists.reserve(static_cast<std::size_t>(all_pairs));
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = u + 1; v < n; ++v)
        dists.push_back(spectral_distance(cache, u, v, p));
  } else {
    Rng rng(seed_hash({seed, 0xd15ULL}));
    dists.reserve(static_cast<std::size_t>(max_samples));
    for (std::int64_t i = 0; i < max_samples; ++i) {
      auto u = static_cast<Vertex>(rng.bounded(static_cast<std::uint64_t>(n)));
      auto v = static_cast<Vertex>(rng.bounded(static_cast<std::uint64_t>(n)));
      if (u == v) continue;
      dists.push_back(spectral_distance(cache, u, v, p));
    }
  }
  std::sort(dists.begin(), dists.end());
  const auto idx = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(dists.size()) - 1.0,
                       percentile / 100.0 * static_cast<double>(dists.size())));
  return dists[idx];
}

std::vector<std::pair<Vertex, Vertex>> sample_similar_pairs(
    const Graph& g, const SpectraCache& cache, int count, double percentile,
    double p, std::uint64_t seed) {
  const double threshold = percentile_distance(cache, percentile, p, seed);
  const std::vector<int> comp = g.component_ids();
  Rng rng(seed_hash({seed, 0x9a175ULL}));
  const auto n = static_cast<std::uint64_t>(g.num_vertices());
  std::vector<std::pair<Vertex, Vertex>> pairs;
  std::int64_t attempts = 0;
  const std::int64_t max_attempts = static_cast<std::int64_t>(count) * 20000;
  while (static_cast<int>(pairs.size()) < count && attempts < max_attempts) {
    ++attempts;
    auto s = static_cast<Vertex>(rng.bounded(n));
    auto t = static_cast<Vertex>(rng.bounded(n));
    if (s == t || comp[static_cast<std::size_t>(s)] != comp[static_cast<std::size_t>(t)])
      continue;
    if (g.degree(s) == 0) continue;
    if (spectral_distance(cache, s, t, p) <= threshold) pairs.emplace_back(s, t);
  }
  if (pairs.empty())
    throw data_error("sample_similar_pairs: no spectrally similar pairs found");
  return pairs;
}

double bootstrap_confidence(const std::vector<double>& diffs, int resamples,
                            std::uint64_t seed) {
  if (diffs.empty()) return 0.0;
  Rng rng(seed_hash({seed, 0xb007ULL}));
  int favorable = 0;
  for (int b = 0; b < resamples; ++b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < diffs.size(); ++i)
      sum += diffs[rng.bounded(diffs.size())];
    if (sum / static_cast<double>(diffs.size()) > 0.0) ++favorable;
  }
  return static_cast<double>(favorable) / static_cast<double>(resamples);
}

namespace {
constexpr int kBootstrapResamples = 2000;

// First index of t in the walk, or T+1 if absent.
int first_appearance(const Walk& w, Vertex t) {
  for (std::size_t i = 0; i < w.vertices.size(); ++i)
    if (w.vertices[i] == t) return static_cast<int>(i);
  return static_cast<int>(w.vertices.size()) + 1;
}
}  // namespace

DiagnosticReport hitting_rank(const Graph& g, const SpectraCache& cache,
                              const BiasModel& bias,
                              const std::vector<std::pair<Vertex, Vertex>>& pairs,
                              int T, int runs, double epsilon,
                              std::uint64_t seed) {
  (void)cache;
  DiagnosticReport report;
  report.kind = "hitting_rank";
  report.samples = static_cast<int>(pairs.size());
  report.runs = runs;
  std::vector<double> diffs;
  diffs.reserve(pairs.size());
  double sw_total = 0.0, rw_total = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [s, t] = pairs[i];
    double sw = 0.0, rw = 0.0;
    for (int r = 0; r < runs; ++r) {
      Rng rng_sw(seed_hash({seed, 0x51ULL, static_cast<std::uint64_t>(i),
                            static_cast<std::uint64_t>(r)}));
      Rng rng_rw(seed_hash({seed, 0x52ULL, static_cast<std::uint64_t>(i),
                            static_cast<std::uint64_t>(r)}));
      sw += first_appearance(spectral_walk(g, bias, s, T, epsilon, rng_sw), t);
      rw += first_appearance(simple_walk(g, s, T, rng_rw), t);
    }
    sw /= runs;
    rw /= runs;
    sw_total += sw;
    rw_total += rw;
    diffs.push_back(rw - sw);  // positive = target found earlier by spectral
  }
  report.grid = {static_cast<double>(T)};
  report.spectral_mean = {sw_total / static_cast<double>(pairs.size())};
  report.simple_mean = {rw_total / static_cast<double>(pairs.size())};
  report.confidence = {
      bootstrap_confidence(diffs, kBootstrapResamples, seed ^ 0x1d1ULL)};
  return report;
}

DiagnosticReport packing_density(const Graph& g, const SpectraCache& cache,
                                 const BiasModel& bias,
                                 const std::vector<Vertex>& starts,
                                 const std::vector<int>& t_grid, double c,
                                 int runs, double epsilon,
                                 std::uint64_t seed) {
  DiagnosticReport report;
  report.kind = "packing_density";
  report.radius = c;
  report.samples = static_cast<int>(starts.size());
  report.runs = runs;

  for (int T : t_grid) {
    double sw_total = 0.0, rw_total = 0.0;
    std::vector<double> diffs;
    diffs.reserve(starts.size());
    for (std::size_t i = 0; i < starts.size(); ++i) {
      const Vertex s = starts[i];
      std::vector<char> in_ball(g.num_vertices(), 0);
      for (Vertex u : wasserstein_ball(cache, s, c, bias.ot_order))
        in_ball[static_cast<std::size_t>(u)] = 1;
      double sw = 0.0, rw = 0.0;
      for (int r = 0; r < runs; ++r) {
        Rng rng_sw(seed_hash({seed, 0x61ULL, static_cast<std::uint64_t>(T),
                              static_cast<std::uint64_t>(i),
                              static_cast<std::uint64_t>(r)}));
        Rng rng_rw(seed_hash({seed, 0x62ULL, static_cast<std::uint64_t>(T),
                              static_cast<std::uint64_t>(i),
                              static_cast<std::uint64_t>(r)}));
        const Walk w_sw = spectral_walk(g, bias, s, T, epsilon, rng_sw);
        const Walk w_rw = simple_walk(g, s, T, rng_rw);
        int hits_sw = 0, hits_rw = 0;
        for (Vertex v : w_sw.vertices) hits_sw += in_ball[static_cast<std::size_t>(v)];
        for (Vertex v : w_rw.vertices) hits_rw += in_ball[static_cast<std::size_t>(v)];
        sw += static_cast<double>(hits_sw) / T;
        rw += static_cast<double>(hits_rw) / T;
      }
      sw /= runs;
      rw /= runs;
      sw_total += sw;
      rw_total += rw;
      diffs.push_back(sw - rw);  // positive = spectral packs more
    }
    report.grid.push_back(static_cast<double>(T));
    report.spectral_mean.push_back(100.0 * sw_total / static_cast<double>(starts.size()));
    report.simple_mean.push_back(100.0 * rw_total / static_cast<double>(starts.size()));
    report.confidence.push_back(bootstrap_confidence(
        diffs, kBootstrapResamples,
        seed ^ (0x9e1ULL + static_cast<std::uint64_t>(T))));
  }
  return report;
}

DiagnosticReport cover_time(const Graph& g, const SpectraCache& cache,
                            const BiasModel& bias,
                            const std::vector<Vertex>& starts, double c,
                            int max_T, int runs, double epsilon,
                            std::uint64_t seed) {
  DiagnosticReport report;
  report.kind = "cover_time";
  report.radius = c;
  report.samples = static_cast<int>(starts.size());
  report.runs = runs;

  // Walks are simulated step-by-step until the ball is covered (or max_T).
  auto cover_steps = [&](Vertex s, const std::vector<char>& in_ball,
                         int ball_size, bool spectral, Rng& rng) -> int {
    int seen = 0;
    std::vector<char> visited(g.num_vertices(), 0);
    Vertex cur = s;
    if (in_ball[static_cast<std::size_t>(cur)]) {
      visited[static_cast<std::size_t>(cur)] = 1;
      ++seen;
    }
    int steps = 1;  // walk length counts vertices, start included
    while (seen < ball_size && steps < max_T) {
      auto nb = g.neighbors(cur);
      if (spectral && rng.u01() <= epsilon) {
        cur = move_to(bias.candidates[static_cast<std::size_t>(cur)],
                      bias.rows[static_cast<std::size_t>(cur)], rng);
      } else {
        cur = nb[rng.bounded(nb.size())];
      }
      ++steps;
      if (in_ball[static_cast<std::size_t>(cur)] &&
          !visited[static_cast<std::size_t>(cur)]) {
        visited[static_cast<std::size_t>(cur)] = 1;
        ++seen;
      }
    }
    return steps;
  };

  double sw_total = 0.0, rw_total = 0.0;
  std::vector<double> diffs;
  diffs.reserve(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const Vertex s = starts[i];
    std::vector<char> in_ball(g.num_vertices(), 0);
    int ball_size = 0;
    for (Vertex u : wasserstein_ball(cache, s, c, bias.ot_order)) {
      in_ball[static_cast<std::size_t>(u)] = 1;
      ++ball_size;
    }
    double sw = 0.0, rw = 0.0;
    for (int r = 0; r < runs; ++r) {
      Rng rng_sw(seed_hash({seed, 0x71ULL, static_cast<std::uint64_t>(i),
                            static_cast<std::uint64_t>(r)}));
      Rng rng_rw(seed_hash({seed, 0x72ULL, static_cast<std::uint64_t>(i),
                            static_cast<std::uint64_t>(r)}));
      sw += cover_steps(s, in_ball, ball_size, true, rng_sw);
      rw += cover_steps(s, in_ball, ball_size, false, rng_rw);
    }
    sw /= runs;
    rw /= runs;
    sw_total += sw;
    rw_total += rw;
    diffs.push_back(rw - sw);  // positive = spectral covers sooner
  }
  report.grid = {static_cast<double>(max_T)};
  report.spectral_mean = {sw_total / static_cast<double>(starts.size())};
  report.simple_mean = {rw_total / static_cast<double>(starts.size())};
  report.confidence = {
      bootstrap_confidence(diffs, kBootstrapResamples, seed ^ 0xc0eULL)};
  return report;
}

void save_report(const DiagnosticReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write report: " + path);
  out << "# kind=" << r.kind << " samples=" << r.samples << " runs=" << r.runs
      << " radius=" << r.radius << '\n';
  if (!r.config_echo.empty()) {
    std::string echo = r.config_echo;
    std::size_t pos = 0;
    out << "# ";
    while ((pos = echo.find('\n')) != std::string::npos) {
      out << echo.substr(0, pos) << " ";
      echo.erase(0, pos + 1);
    }
    out << echo << '\n';
  }
  out << "# T\tspectral\tsimple\tconfidence\n";
  for (std::size_t i = 0; i < r.grid.size(); ++i)
    out << r.grid[i] << '\t' << r.spectral_mean[i] << '\t' << r.simple_mean[i]
        << '\t' << r.confidence[i] << '\n';
}

}  // namespace specwalk
