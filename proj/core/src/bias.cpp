#include "specwalk/bias.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "specwalk/errors.hpp"

namespace specwalk {

namespace {

// The k nearest neighbors of i by (spectral distance, id).
std::vector<Vertex> k_nearest(const Graph& g, const SpectraCache& cache,
                              Vertex i, int k, double ot_order) {
  auto nb = g.neighbors(i);
  std::vector<std::pair<double, Vertex>> scored;
  scored.reserve(nb.size());
  for (Vertex j : nb)
    scored.emplace_back(spectral_distance(cache, i, j, ot_order), j);
  std::sort(scored.begin(), scored.end());
  const std::size_t take = std::min<std::size_t>(scored.size(),
                                                 static_cast<std::size_t>(k));
  std::vector<Vertex> out;
  out.reserve(take);
  for (std::size_t t = 0; t < take; ++t) out.push_back(scored[t].second);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<Vertex> symmetric_k_closest(const Graph& g,
                                        const SpectraCache& cache, Vertex i,
                                        int k, double ot_order) {
  if (k < 1) throw usage_error("symmetric_k_closest: k must be >= 1");
  std::vector<Vertex> sk = k_nearest(g, cache, i, k, ot_order);
  for (Vertex j : g.neighbors(i)) {
    if (std::binary_search(sk.begin(), sk.end(), j)) continue;
    std::vector<Vertex> nkj = k_nearest(g, cache, j, k, ot_order);
    if (std::binary_search(nkj.begin(), nkj.end(), i)) sk.push_back(j);
  }
  std::sort(sk.begin(), sk.end());
  return sk;
}

std::vector<double> bias_row(const Graph& g, const SpectraCache& cache,
                             Vertex i, const std::vector<Vertex>& sk,
                             double ot_order) {
  (void)g;
  const std::size_t c = sk.size();
  std::vector<double> row(c, 0.0);
  if (c == 0) return row;

  std::vector<double> dist(c);
  double total = 0.0;
  for (std::size_t t = 0; t < c; ++t) {
    dist[t] = spectral_distance(cache, i, sk[t], ot_order);
    total += dist[t];
  }
  if (total <= 0.0) {  // all candidates spectrally identical to i
    std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(c));
    return row;
  }
  double row_sum = 0.0;
  for (std::size_t t = 0; t < c; ++t) {
    row[t] = std::max(0.0, 1.0 - dist[t] / total);
    row_sum += row[t];
  }
  if (row_sum <= 0.0) {  // single candidate: raw score is exactly 0
    std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(c));
    return row;
  }
  for (double& w : row) w /= row_sum;
  return row;
}

BiasModel build_bias_model(const Graph& g, const SpectraCache& cache, int k,
                           double ot_order, int threads) {
  if (cache.graph_digest != g.digest())
    throw data_error("spectra cache digest does not match graph");
  BiasModel model;
  model.k = k;
  model.ot_order = ot_order;
  model.cache_digest = cache.graph_digest;
  const auto n = static_cast<std::size_t>(g.num_vertices());
  model.candidates.resize(n);
  model.rows.resize(n);

  // Pass 1: N_k sets for every vertex (needed for the symmetry clause).
  std::vector<std::vector<Vertex>> nk(n);
  auto pass1 = [&](Vertex begin, Vertex end) {
    for (Vertex v = begin; v < end; ++v)
      nk[static_cast<std::size_t>(v)] = k_nearest(g, cache, v, k, ot_order);
  };
  // Pass 2: union with reciprocal members, then the probability row.
  auto pass2 = [&](Vertex begin, Vertex end) {
    for (Vertex v = begin; v < end; ++v) {
      auto& sk = model.candidates[static_cast<std::size_t>(v)];
      sk = nk[static_cast<std::size_t>(v)];
      for (Vertex j : g.neighbors(v)) {
        if (std::binary_search(sk.begin(), sk.end(), j)) continue;
        const auto& nkj = nk[static_cast<std::size_t>(j)];
        if (std::binary_search(nkj.begin(), nkj.end(), v)) sk.push_back(j);
      }
      std::sort(sk.begin(), sk.end());
      model.rows[static_cast<std::size_t>(v)] =
          bias_row(g, cache, v, sk, ot_order);
    }
  };

  auto run = [&](auto&& fn) {
    const Vertex nv = g.num_vertices();
    if (threads <= 1 || nv < 64) {
      fn(0, nv);
      return;
    }
    const int t = std::min<int>(threads, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    const Vertex chunk = (nv + t - 1) / t;
    for (int i = 0; i < t; ++i) {
      Vertex b = i * chunk, e = std::min<Vertex>(nv, b + chunk);
      if (b >= e) break;
      pool.emplace_back(fn, b, e);
    }
    for (auto& th : pool) th.join();
  };
  run(pass1);
  run(pass2);
  return model;
}

ReversibilityReport check_reversibility(const Graph& g, const BiasModel& bias,
                                        int max_iters, double tol) {
  const auto n = static_cast<std::size_t>(g.num_vertices());
  ReversibilityReport report;
  std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n, 0.0);
  for (int it = 0; it < max_iters; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      const auto& cand = bias.candidates[v];
      const auto& row = bias.rows[v];
      if (cand.empty()) {
        next[v] += pi[v];  // absorbing isolated vertex
        continue;
      }
      for (std::size_t t = 0; t < cand.size(); ++t)
        next[static_cast<std::size_t>(cand[t])] += pi[v] * row[t];
    }
    double delta = 0.0;
    for (std::size_t v = 0; v < n; ++v) delta += std::fabs(next[v] - pi[v]);
    pi.swap(next);
    report.iterations = it + 1;
    if (delta < tol) {
      report.converged = true;
      break;
    }
  }
  double worst = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    const auto& cand = bias.candidates[v];
    const auto& row = bias.rows[v];
    for (std::size_t t = 0; t < cand.size(); ++t) {
      const auto u = static_cast<std::size_t>(cand[t]);
      // w_uv of the reverse direction, 0 if v not in S_k(u).
      double back = 0.0;
      const auto& cu = bias.candidates[u];
      auto it = std::lower_bound(cu.begin(), cu.end(), static_cast<Vertex>(v));
      if (it != cu.end() && *it == static_cast<Vertex>(v))
        back = bias.rows[u][static_cast<std::size_t>(it - cu.begin())];
      worst = std::max(worst, std::fabs(pi[v] * row[t] - pi[u] * back));
    }
  }
  report.max_imbalance = worst;
  return report;
}

}  // namespace specwalk
