#include "specwalk/split.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "specwalk/errors.hpp"
#include "specwalk/rng.hpp"

namespace specwalk {

namespace {

std::uint64_t pair_key(Vertex u, Vertex v) {
  Vertex lo = std::min(u, v), hi = std::max(u, v);
  return (static_cast<std::uint64_t>(lo) << 32) |
         static_cast<std::uint32_t>(hi);
}

// Draws `count` distinct non-edges. Rejection sampling is fine for sparse
// graphs; beyond density 0.5 we enumerate the complement instead.
std::vector<Edge> sample_non_edges(const Graph& g, std::int64_t count,
                                   Rng& rng) {
  const auto n = static_cast<std::int64_t>(g.num_vertices());
  const std::int64_t total_pairs = n * (n - 1) / 2;
  const std::int64_t non_edges = total_pairs - g.num_edges();
  if (non_edges < count)
    throw data_error("graph too dense: only " + std::to_string(non_edges) +
                     " non-edges available, need " + std::to_string(count));

  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(count));
  const double density =
      static_cast<double>(g.num_edges()) / static_cast<double>(total_pairs);
  if (density <= 0.5) {
    std::unordered_set<std::uint64_t> taken;
    taken.reserve(static_cast<std::size_t>(count) * 2);
    while (static_cast<std::int64_t>(out.size()) < count) {
      auto u = static_cast<Vertex>(rng.bounded(static_cast<std::uint64_t>(n)));
      auto v = static_cast<Vertex>(rng.bounded(static_cast<std::uint64_t>(n)));
      if (u == v || g.has_edge(u, v)) continue;
      if (!taken.insert(pair_key(u, v)).second) continue;
      out.emplace_back(std::min(u, v), std::max(u, v));
    }
  } else {
    std::vector<Edge> complement;
    complement.reserve(static_cast<std::size_t>(non_edges));
    for (Vertex u = 0; u < g.num_vertices(); ++u)
      for (Vertex v = u + 1; v < g.num_vertices(); ++v)
        if (!g.has_edge(u, v)) complement.emplace_back(u, v);
    rng.shuffle(complement);
    out.assign(complement.begin(), complement.begin() + count);
  }
  return out;
}

}  // namespace

EdgeSplit split_edges(const Graph& g, double test_fraction,
                      std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw usage_error("test_fraction must lie in (0,1)");
  EdgeSplit s;
  s.seed = seed;
  s.test_fraction = test_fraction;
  s.graph_digest = g.digest();

  std::vector<Edge> edges = g.edges();
  const auto m = static_cast<std::int64_t>(edges.size());
  const auto n_test = static_cast<std::int64_t>(
      std::llround(test_fraction * static_cast<double>(m)));
  if (n_test < 1 || n_test >= m)
    throw usage_error("test fraction leaves an empty train or test set");

  Rng rng(seed_hash({seed, 0x5911707ULL}));
  rng.shuffle(edges);
  s.test_pos.assign(edges.begin(), edges.begin() + n_test);
  s.train_pos.assign(edges.begin() + n_test, edges.end());
  std::sort(s.test_pos.begin(), s.test_pos.end());
  std::sort(s.train_pos.begin(), s.train_pos.end());

  std::vector<Edge> negatives = sample_non_edges(g, m, rng);
  s.test_neg.assign(negatives.begin(), negatives.begin() + n_test);
  s.train_neg.assign(negatives.begin() + n_test, negatives.end());

  std::vector<int> train_degree(static_cast<std::size_t>(g.num_vertices()), 0);
  for (auto [u, v] : s.train_pos) {
    ++train_degree[u];
    ++train_degree[v];
  }
  for (Vertex v = 0; v < g.num_vertices(); ++v)
    if (g.degree(v) > 0 && train_degree[v] == 0) ++s.isolated_train_vertices;
  return s;
}

namespace {
void write_section(std::ofstream& out, const char* name,
                   const std::vector<Edge>& edges) {
  out << '%' << name << '\n';
  for (auto [u, v] : edges) out << u << ' ' << v << '\n';
}
}  // namespace

void save_split(const EdgeSplit& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write split file: " + path);
  char head[128];
  std::snprintf(head, sizeof head,
                "# edge split: graph=%016llx seed=%llu test_fraction=%.17g\n",
                static_cast<unsigned long long>(s.graph_digest),
                static_cast<unsigned long long>(s.seed), s.test_fraction);
  out << head;
  write_section(out, "train_pos", s.train_pos);
  write_section(out, "train_neg", s.train_neg);
  write_section(out, "test_pos", s.test_pos);
  write_section(out, "test_neg", s.test_neg);
}

EdgeSplit load_split(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open split file: " + path);
  EdgeSplit s;
  std::vector<Edge>* section = nullptr;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::uint64_t dig = 0, seed = 0;
      double frac = 0;
      if (std::sscanf(line.c_str(),
                      "# edge split: graph=%llx seed=%llu test_fraction=%lg",
                      reinterpret_cast<unsigned long long*>(&dig),
                      reinterpret_cast<unsigned long long*>(&seed),
                      &frac) == 3) {
        s.graph_digest = dig;
        s.seed = seed;
        s.test_fraction = frac;
      }
      continue;
    }
    if (line[0] == '%') {
      if (line == "%train_pos")
        section = &s.train_pos;
      else if (line == "%train_neg")
        section = &s.train_neg;
      else if (line == "%test_pos")
        section = &s.test_pos;
      else if (line == "%test_neg")
        section = &s.test_neg;
      else
        throw data_error("unknown split section: " + line);
      continue;
    }
    if (!section) throw data_error("split data before section header");
    std::istringstream ls(line);
    Vertex u, v;
    if (!(ls >> u >> v)) throw data_error("malformed split line: " + line);
    section->emplace_back(u, v);
  }
  return s;
}

std::vector<int> load_labels(const std::string& path,
                             const std::vector<std::string>& id_to_token) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open label file: " + path);
  std::unordered_map<std::string, Vertex> token_to_id;
  for (std::size_t i = 0; i < id_to_token.size(); ++i)
    token_to_id.emplace(id_to_token[i], static_cast<Vertex>(i));

  std::vector<int> labels(id_to_token.size(), -1);
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw data_error("label file line " + std::to_string(line_no) +
                       ": expected vertex<TAB>class");
    std::string tok = line.substr(0, tab);
    int cls = std::stoi(line.substr(tab + 1));
    auto it = token_to_id.find(tok);
    if (it == token_to_id.end())
      throw data_error("label file line " + std::to_string(line_no) +
                       ": unknown vertex '" + tok + "'");
    labels[static_cast<std::size_t>(it->second)] = cls;
  }
  return labels;
}

LabeledNodes stratified_label_split(const std::vector<int>& labels,
                                    int per_class, int test_cap,
                                    std::uint64_t seed) {
  LabeledNodes out;
  out.labels = labels;
  int max_label = -1;
  for (int c : labels) max_label = std::max(max_label, c);
  out.num_classes = max_label + 1;
  if (out.num_classes < 2) throw data_error("need at least two label classes");

  std::vector<std::vector<Vertex>> by_class(
      static_cast<std::size_t>(out.num_classes));
  for (std::size_t v = 0; v < labels.size(); ++v)
    if (labels[v] >= 0) by_class[labels[v]].push_back(static_cast<Vertex>(v));

  Rng rng(seed_hash({seed, 0x1abe15ULL}));
  std::vector<Vertex> rest;
  for (auto& members : by_class) {
    rng.shuffle(members);
    const int take = std::min<int>(per_class, static_cast<int>(members.size()));
    out.train_ids.insert(out.train_ids.end(), members.begin(),
                         members.begin() + take);
    rest.insert(rest.end(), members.begin() + take, members.end());
  }
  rng.shuffle(rest);
  if (test_cap > 0 && static_cast<int>(rest.size()) > test_cap)
    rest.resize(static_cast<std::size_t>(test_cap));
  out.test_ids = std::move(rest);
  std::sort(out.train_ids.begin(), out.train_ids.end());
  std::sort(out.test_ids.begin(), out.test_ids.end());
  return out;
}

}  // namespace specwalk
