#include "specwalk/graph.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "specwalk/digest.hpp"
#include "specwalk/errors.hpp"

namespace specwalk {

Graph::Graph(Vertex n, const std::vector<Edge>& edges) : n_(n) {
  offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw data_error("edge endpoint out of range");
    if (u == v) throw data_error("self-loop passed to Graph constructor");
    ++offsets_[static_cast<std::size_t>(u) + 1];
    ++offsets_[static_cast<std::size_t>(v) + 1];
  }
  for (Vertex v = 0; v < n; ++v) offsets_[v + 1] += offsets_[v];
  adjacency_.resize(static_cast<std::size_t>(offsets_[n]));
  std::vector<std::int64_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [u, v] : edges) {
    adjacency_[static_cast<std::size_t>(cursor[u]++)] = v;
    adjacency_[static_cast<std::size_t>(cursor[v]++)] = u;
  }
  for (Vertex v = 0; v < n; ++v) {
    auto* first = adjacency_.data() + offsets_[v];
    auto* last = adjacency_.data() + offsets_[v + 1];
    std::sort(first, last);
    if (std::adjacent_find(first, last) != last)
      throw data_error("duplicate edge passed to Graph constructor");
  }
  m_ = static_cast<std::int64_t>(edges.size());
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(m_));
  for (Vertex u = 0; u < n_; ++u)
    for (Vertex v : neighbors(u))
      if (u < v) out.emplace_back(u, v);
  return out;
}

std::uint64_t Graph::digest() const {
  Digest d;
  d.update_u64(static_cast<std::uint64_t>(n_));
  d.update_u64(static_cast<std::uint64_t>(m_));
  for (Vertex u = 0; u < n_; ++u)
    for (Vertex v : neighbors(u))
      if (u < v) {
        d.update_u64(static_cast<std::uint64_t>(u));
        d.update_u64(static_cast<std::uint64_t>(v));
      }
  return d.value();
}

std::vector<int> Graph::component_ids() const {
  std::vector<int> comp(static_cast<std::size_t>(n_), -1);
  std::vector<Vertex> stack;
  int next = 0;
  for (Vertex s = 0; s < n_; ++s) {
    if (comp[s] != -1) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      Vertex u = stack.back();
      stack.pop_back();
      for (Vertex v : neighbors(u))
        if (comp[v] == -1) {
          comp[v] = next;
          stack.push_back(v);
        }
    }
    ++next;
  }
  return comp;
}

GraphLoadResult load_edge_list(std::istream& in) {
  GraphLoadResult result;
  std::unordered_map<std::string, Vertex> token_to_id;
  std::vector<Edge> edges;
  std::unordered_set<std::uint64_t> seen;
  std::string line;
  std::int64_t line_no = 0;

  auto intern = [&](const std::string& tok) {
    auto [it, inserted] =
        token_to_id.emplace(tok, static_cast<Vertex>(result.id_to_token.size()));
    if (inserted) result.id_to_token.push_back(tok);
    return it->second;
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream ls(line);
    std::string a, b, extra;
    if (!(ls >> a >> b))
      throw data_error("edge list parse error at line " +
                       std::to_string(line_no) + ": expected two tokens");
    if (ls >> extra)
      throw data_error("edge list parse error at line " +
                       std::to_string(line_no) + ": trailing token '" + extra +
                       "'");
    Vertex u = intern(a);
    Vertex v = intern(b);
    if (u == v) {
      ++result.dropped_self_loops;
      continue;
    }
    Vertex lo = std::min(u, v), hi = std::max(u, v);
    std::uint64_t key =
        (static_cast<std::uint64_t>(lo) << 32) | static_cast<std::uint32_t>(hi);
    if (!seen.insert(key).second) {
      ++result.dropped_duplicates;
      continue;
    }
    edges.emplace_back(lo, hi);
  }
  if (result.id_to_token.empty()) throw data_error("empty graph");

  // When the tokens are exactly the integers 0..n-1, keep them as the ids so
  // that saving and reloading preserves adjacency verbatim.
  const auto n = static_cast<Vertex>(result.id_to_token.size());
  {
    std::vector<char> seen_ids(static_cast<std::size_t>(n), 0);
    bool canonical = true;
    std::vector<Vertex> numeric(static_cast<std::size_t>(n), 0);
    for (Vertex id = 0; id < n && canonical; ++id) {
      const std::string& tok = result.id_to_token[static_cast<std::size_t>(id)];
      if (tok.empty() || (tok.size() > 1 && tok[0] == '0') ||
          tok.find_first_not_of("0123456789") != std::string::npos) {
        canonical = false;
        break;
      }
      errno = 0;
      char* end = nullptr;
      const long long v = std::strtoll(tok.c_str(), &end, 10);
      if (errno != 0 || v < 0 || v >= n || seen_ids[static_cast<std::size_t>(v)]) {
        canonical = false;
        break;
      }
      seen_ids[static_cast<std::size_t>(v)] = 1;
      numeric[static_cast<std::size_t>(id)] = static_cast<Vertex>(v);
    }
    if (canonical) {
      for (auto& [u, v] : edges) {
        u = numeric[static_cast<std::size_t>(u)];
        v = numeric[static_cast<std::size_t>(v)];
        if (u > v) std::swap(u, v);
      }
      for (Vertex id = 0; id < n; ++id)
        result.id_to_token[static_cast<std::size_t>(id)] = std::to_string(id);
    }
  }
  result.graph = Graph(n, edges);
  return result;
}

GraphLoadResult load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open edge list: " + path);
  return load_edge_list(in);
}

void save_edge_list(const Graph& g, std::ostream& out) {
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

void save_edge_list_file(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write edge list: " + path);
  save_edge_list(g, out);
}

void save_id_map(const std::vector<std::string>& id_to_token,
                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write id map: " + path);
  for (std::size_t i = 0; i < id_to_token.size(); ++i)
    out << id_to_token[i] << '\t' << i << '\n';
}

std::vector<std::string> load_id_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open id map: " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw data_error("malformed id map: " + path);
    tokens.push_back(line.substr(0, tab));
  }
  return tokens;
}

std::vector<Vertex> khop_vertices(const Graph& g, Vertex v, int hops,
                                  int cap) {
  if (hops < 1) throw usage_error("khop_vertices: hops must be >= 1");
  if (cap < 1) throw usage_error("khop_vertices: cap must be >= 1");
  std::vector<Vertex> order{v};
  if (cap == 1) return order;

  std::vector<char> visited(static_cast<std::size_t>(g.num_vertices()), 0);
  visited[v] = 1;
  std::vector<Vertex> ring{v};
  for (int h = 0; h < hops && !ring.empty(); ++h) {
    std::vector<Vertex> next;
    for (Vertex u : ring)
      for (Vertex w : g.neighbors(u))
        if (!visited[w]) {
          visited[w] = 1;
          next.push_back(w);
        }
    std::sort(next.begin(), next.end());
    for (Vertex w : next) {
      order.push_back(w);
      if (static_cast<int>(order.size()) == cap) return order;
    }
    ring = std::move(next);
  }
  return order;
}

Graph remove_edges(const Graph& g, const std::vector<Edge>& removed) {
  std::unordered_set<std::uint64_t> gone;
  gone.reserve(removed.size() * 2);
  for (auto [u, v] : removed) {
    Vertex lo = std::min(u, v), hi = std::max(u, v);
    gone.insert((static_cast<std::uint64_t>(lo) << 32) |
                static_cast<std::uint32_t>(hi));
  }
  std::vector<Edge> kept;
  kept.reserve(static_cast<std::size_t>(g.num_edges()));
  for (const auto& [u, v] : g.edges()) {
    std::uint64_t key =
        (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
    if (!gone.count(key)) kept.emplace_back(u, v);
  }
  return Graph(g.num_vertices(), kept);
}

}  // namespace specwalk
