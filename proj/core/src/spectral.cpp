#include "specwalk/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <thread>

#include "specwalk/errors.hpp"
#include "specwalk/wasserstein.hpp"

namespace specwalk {

SymMatrix normalized_laplacian(const Graph& g,
                               const std::vector<Vertex>& members) {
  if (members.empty())
    throw usage_error("normalized_laplacian: empty member list");
  const int k = static_cast<int>(members.size());
  std::vector<std::pair<Vertex, int>> index;
  index.reserve(members.size());
  for (int i = 0; i < k; ++i) index.emplace_back(members[i], i);
  std::sort(index.begin(), index.end());

  auto local_of = [&](Vertex v) -> int {
    auto it = std::lower_bound(index.begin(), index.end(),
                               std::make_pair(v, 0));
    return (it != index.end() && it->first == v) ? it->second : -1;
  };

  // Adjacency and degrees of the induced subgraph.
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i)
    for (Vertex w : g.neighbors(members[i])) {
      int j = local_of(w);
      if (j >= 0) adj[i].push_back(j);
    }

  SymMatrix L;
  L.n = k;
  L.a.assign(static_cast<std::size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i) {
    if (adj[i].empty()) continue;  // isolated in subgraph: all-zero row
    L.at(i, i) = 1.0;
    const double di = static_cast<double>(adj[i].size());
    for (int j : adj[i]) {
      const double dj = static_cast<double>(adj[j].size());
      L.at(i, j) = -1.0 / std::sqrt(di * dj);
    }
  }
  return L;
}

std::vector<double> symmetric_eigenvalues(const SymMatrix& m, double tol) {
  const int n = m.n;
  if (n <= 0) throw usage_error("symmetric_eigenvalues: empty matrix");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::fabs(m.at(i, j) - m.at(j, i)) > tol)
        throw data_error("symmetric_eigenvalues: matrix asymmetric beyond tol");

  std::vector<double> a(m.a);
  auto at = [&](int i, int j) -> double& {
    return a[static_cast<std::size_t>(i) * n + j];
  };

  const double kConvergence = 1e-10;
  const int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += 2.0 * at(i, j) * at(i, j);
    if (std::sqrt(off) < kConvergence) {
      std::vector<double> eig(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) eig[i] = at(i, i);
      std::sort(eig.begin(), eig.end());
      return eig;
    }
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double app = at(p, p), aqq = at(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const double aip = at(i, p), aiq = at(i, q);
          at(i, p) = c * aip - s * aiq;
          at(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = at(p, i), aqi = at(q, i);
          at(p, i) = c * api - s * aqi;
          at(q, i) = s * api + c * aqi;
        }
      }
    }
  }
  throw numeric_error("symmetric_eigenvalues: Jacobi failed to converge");
}

SpectrumMeasure node_spectrum(const Graph& g, Vertex v, int hops, int cap) {
  const std::vector<Vertex> members = khop_vertices(g, v, hops, cap);
  const SymMatrix lap = normalized_laplacian(g, members);
  return SpectrumMeasure{symmetric_eigenvalues(lap)};
}

const SpectrumMeasure& SpectraCache::at(Vertex v) const {
  if (v < 0 || static_cast<std::size_t>(v) >= spectra.size())
    throw data_error("vertex " + std::to_string(v) + " missing from spectra cache");
  return spectra[static_cast<std::size_t>(v)];
}

SpectraCache build_spectra_cache(const Graph& g, int hops, int cap,
                                 int threads) {
  SpectraCache cache;
  cache.graph_digest = g.digest();
  cache.hops = hops;
  cache.cap = cap;
  cache.spectra.resize(static_cast<std::size_t>(g.num_vertices()));

  const Vertex n = g.num_vertices();
  auto work = [&](Vertex begin, Vertex end) {
    for (Vertex v = begin; v < end; ++v)
      cache.spectra[static_cast<std::size_t>(v)] =
          node_spectrum(g, v, hops, cap);
  };
  if (threads <= 1 || n < 64) {
    work(0, n);
  } else {
    const int t = std::min<int>(threads, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    const Vertex chunk = (n + t - 1) / t;
    for (int i = 0; i < t; ++i) {
      Vertex b = i * chunk, e = std::min<Vertex>(n, b + chunk);
      if (b >= e) break;
      pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return cache;
}

namespace {
constexpr char kTextMagic[] = "# spectra-cache v1";
constexpr char kBinMagic[8] = {'S', 'W', 'S', 'P', 'E', 'C', '0', '1'};
}  // namespace

void save_spectra_cache(const SpectraCache& c, const std::string& path,
                        bool binary) {
  if (binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write spectra cache: " + path);
    out.write(kBinMagic, sizeof kBinMagic);
    std::uint64_t head[4] = {c.graph_digest, static_cast<std::uint64_t>(c.hops),
                             static_cast<std::uint64_t>(c.cap),
                             c.spectra.size()};
    out.write(reinterpret_cast<const char*>(head), sizeof head);
    for (const auto& s : c.spectra) {
      std::uint64_t count = s.atoms.size();
      out.write(reinterpret_cast<const char*>(&count), sizeof count);
      out.write(reinterpret_cast<const char*>(s.atoms.data()),
                static_cast<std::streamsize>(count * sizeof(double)));
    }
    return;
  }
  std::ofstream out(path);
  if (!out) throw data_error("cannot write spectra cache: " + path);
  out << kTextMagic << '\n';
  char buf[64];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(c.graph_digest));
  out << buf << ' ' << c.hops << ' ' << c.cap << ' ' << c.spectra.size()
      << '\n';
  out.precision(17);
  for (const auto& s : c.spectra) {
    out << s.atoms.size();
    for (double a : s.atoms) out << ' ' << a;
    out << '\n';
  }
}

SpectraCache load_spectra_cache(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw data_error("cannot open spectra cache: " + path);
  char magic[8] = {};
  probe.read(magic, sizeof magic);
  SpectraCache c;
  if (probe.gcount() == 8 && std::memcmp(magic, kBinMagic, 8) == 0) {
    std::uint64_t head[4];
    probe.read(reinterpret_cast<char*>(head), sizeof head);
    if (!probe) throw data_error("truncated spectra cache: " + path);
    c.graph_digest = head[0];
    c.hops = static_cast<int>(head[1]);
    c.cap = static_cast<int>(head[2]);
    c.spectra.resize(head[3]);
    for (auto& s : c.spectra) {
      std::uint64_t count = 0;
      probe.read(reinterpret_cast<char*>(&count), sizeof count);
      s.atoms.resize(count);
      probe.read(reinterpret_cast<char*>(s.atoms.data()),
                 static_cast<std::streamsize>(count * sizeof(double)));
      if (!probe) throw data_error("truncated spectra cache: " + path);
    }
    return c;
  }

  std::ifstream in(path);
  std::string line;
  if (!std::getline(in, line) || line != kTextMagic)
    throw data_error("not a spectra cache (bad magic): " + path);
  std::uint64_t n = 0;
  unsigned long long dig = 0;
  if (!(in >> std::hex >> dig)) throw data_error("bad cache header: " + path);
  in >> std::dec;
  if (!(in >> c.hops >> c.cap >> n))
    throw data_error("bad cache header: " + path);
  c.graph_digest = dig;
  c.spectra.resize(n);
  for (auto& s : c.spectra) {
    std::size_t count = 0;
    if (!(in >> count)) throw data_error("truncated spectra cache: " + path);
    s.atoms.resize(count);
    for (auto& a : s.atoms)
      if (!(in >> a)) throw data_error("truncated spectra cache: " + path);
  }
  return c;
}

double spectral_distance(const SpectraCache& cache, Vertex u, Vertex v,
                         double p) {
  const auto& mu = cache.at(u);
  const auto& nu = cache.at(v);
  return wasserstein_1d_uniform(mu.atoms, nu.atoms, p);
}

std::vector<Vertex> wasserstein_ball(const SpectraCache& cache, Vertex v,
                                     double c, double p) {
  if (c < 0.0) throw usage_error("wasserstein_ball: radius must be >= 0");
  std::vector<Vertex> ball;
  for (Vertex u = 0; u < static_cast<Vertex>(cache.spectra.size()); ++u)
    if (u == v || spectral_distance(cache, u, v, p) <= c) ball.push_back(u);
  return ball;
}

}  // namespace specwalk
