#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specwalk/graph.hpp"

namespace specwalk {

/// Small dense symmetric matrix, row-major.
struct SymMatrix {
  int n = 0;
  std::vector<double> a;  // n*n
  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const {
    return a[static_cast<std::size_t>(i) * n + j];
  }
};

/// Normalized Laplacian L = I - D^{-1/2} A D^{-1/2} of the subgraph induced
/// by `members`, with rows/cols in `members` order. A vertex isolated inside
/// the subgraph contributes an all-zero row (diagonal 0).
SymMatrix normalized_laplacian(const Graph& g,
                               const std::vector<Vertex>& members);

/// All eigenvalues with multiplicity, ascending, via cyclic Jacobi rotations
/// (convergence: off-diagonal Frobenius norm < 1e-10). Intended for small
/// dense matrices (n <= ~64). Throws if the matrix is asymmetric beyond tol
/// or rotation sweeps fail to converge.
std::vector<double> symmetric_eigenvalues(const SymMatrix& m,
                                          double tol = 1e-9);

/// Sorted eigenvalue multiset of a neighborhood Laplacian, read as a uniform
/// discrete probability measure on [0,2].
struct SpectrumMeasure {
  std::vector<double> atoms;  // ascending; each carries mass 1/atoms.size()
};

SpectrumMeasure node_spectrum(const Graph& g, Vertex v, int hops, int cap);

/// Per-vertex neighborhood spectra, precomputed once per (graph, hops, cap).
struct SpectraCache {
  std::uint64_t graph_digest = 0;
  int hops = 2;
  int cap = 30;
  std::vector<SpectrumMeasure> spectra;  // indexed by vertex

  const SpectrumMeasure& at(Vertex v) const;
};

/// Builds the cache, parallel over vertices. threads <= 1 means serial (the
/// result is identical either way; spectra are pure per-vertex functions).
SpectraCache build_spectra_cache(const Graph& g, int hops, int cap,
                                 int threads = 1);

/// Text (canonical) or fixed-width binary cache file.
void save_spectra_cache(const SpectraCache& c, const std::string& path,
                        bool binary = false);
SpectraCache load_spectra_cache(const std::string& path);

/// W_p between the spectrum measures of u's and v's neighborhoods (Eq. of
/// the spectral distance); symmetric in u,v.
double spectral_distance(const SpectraCache& cache, Vertex u, Vertex v,
                         double p);

/// { u : spectral_distance(u,v) <= c } over all cached vertices; contains v.
std::vector<Vertex> wasserstein_ball(const SpectraCache& cache, Vertex v,
                                     double c, double p);

}  // namespace specwalk
