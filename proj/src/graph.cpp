#include "stochsync/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace stochsync {

namespace {

std::string edge_str(const Edge& e) {
  return "(" + std::to_string(e.first) + "," + std::to_string(e.second) + ")";
}

}  // namespace

Graph::Graph(std::size_t node_count, std::vector<Edge> edges, std::string name)
    : node_count_(node_count), name_(std::move(name)) {
  if (node_count_ == 0) throw ValidationError("graph must have at least one node");
  std::set<Edge> seen;
  edges_.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.first >= node_count_ || e.second >= node_count_) {
      throw ValidationError("edge " + edge_str(e) + " has endpoint out of range [0," +
                            std::to_string(node_count_) + ")");
    }
    if (e.first == e.second) throw ValidationError("edge " + edge_str(e) + " is a self-loop");
    const Edge norm{std::min(e.first, e.second), std::max(e.first, e.second)};
    if (!seen.insert(norm).second) throw ValidationError("duplicate edge " + edge_str(e));
    edges_.push_back(norm);
  }
  std::sort(edges_.begin(), edges_.end());
}

std::size_t Graph::degree(std::size_t node) const {
  return static_cast<std::size_t>(std::count_if(edges_.begin(), edges_.end(), [node](const Edge& e) {
    return e.first == node || e.second == node;
  }));
}

std::size_t Graph::max_degree() const {
  std::vector<std::size_t> deg(node_count_, 0);
  for (const auto& [i, j] : edges_) {
    ++deg[i];
    ++deg[j];
  }
  return *std::max_element(deg.begin(), deg.end());
}

Graph build_graph(std::size_t node_count, const std::vector<Edge>& edges) {
  return Graph(node_count, edges);
}

Graph path_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph(n, std::move(e), "path" + std::to_string(n));
}

Graph cycle_graph(std::size_t n) {
  if (n < 3) throw ValidationError("cycle graph needs at least 3 nodes");
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph(n, std::move(e), "cycle" + std::to_string(n));
}

Graph complete_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph(n, std::move(e), "complete" + std::to_string(n));
}

Graph star_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 1; i < n; ++i) e.emplace_back(0, i);
  return Graph(n, std::move(e), "star" + std::to_string(n));
}

Graph empty_graph(std::size_t n) { return Graph(n, {}, "empty" + std::to_string(n)); }

Graph complete_multipartite_graph(const std::vector<std::size_t>& parts) {
  std::vector<std::size_t> part_of;
  for (std::size_t p = 0; p < parts.size(); ++p) part_of.insert(part_of.end(), parts[p], p);
  std::vector<Edge> e;
  for (std::size_t i = 0; i < part_of.size(); ++i)
    for (std::size_t j = i + 1; j < part_of.size(); ++j)
      if (part_of[i] != part_of[j]) e.emplace_back(i, j);
  return Graph(part_of.size(), std::move(e), "multipartite");
}

Graph relabel(const Graph& g, const std::vector<std::size_t>& perm) {
  if (perm.size() != g.node_count()) throw ValidationError("relabel: permutation size mismatch");
  std::vector<std::size_t> check(perm);
  std::sort(check.begin(), check.end());
  for (std::size_t i = 0; i < check.size(); ++i)
    if (check[i] != i) throw ValidationError("relabel: not a permutation");
  std::vector<Edge> e;
  e.reserve(g.edges().size());
  for (const auto& [i, j] : g.edges()) e.emplace_back(perm[i], perm[j]);
  return Graph(g.node_count(), std::move(e), g.name());
}

Eigen::SparseMatrix<double> sparse_laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(4 * g.edges().size());
  for (const auto& [i, j] : g.edges()) {
    const auto a = static_cast<Eigen::Index>(i);
    const auto b = static_cast<Eigen::Index>(j);
    t.emplace_back(a, a, 1.0);
    t.emplace_back(b, b, 1.0);
    t.emplace_back(a, b, -1.0);
    t.emplace_back(b, a, -1.0);
  }
  Eigen::SparseMatrix<double> L(n, n);
  L.setFromTriplets(t.begin(), t.end());
  return L;
}

Graph read_edge_list(std::istream& in, const std::string& source) {
  std::string line;
  int lineno = 0;
  long long n = -1;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    auto where = [&] { return source + ":" + std::to_string(lineno) + ": "; };
    auto parse_index = [&](const std::string& tok) {
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || v < 0) throw ValidationError(where() + "expected non-negative integer, got '" + tok + "'");
      return v;
    };
    if (n < 0) {
      n = parse_index(first);
      std::string extra;
      if (ls >> extra) throw ValidationError(where() + "first line must hold only the node count");
      continue;
    }
    std::string second, extra;
    if (!(ls >> second) || (ls >> extra)) throw ValidationError(where() + "expected 'i j'");
    edges.emplace_back(static_cast<std::size_t>(parse_index(first)),
                       static_cast<std::size_t>(parse_index(second)));
  }
  if (n < 0) throw ValidationError(source + ": missing node count");
  try {
    return Graph(static_cast<std::size_t>(n), std::move(edges), source);
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open graph file '" + path + "'");
  return read_edge_list(in, path);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.node_count() << '\n';
  for (const auto& [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

}  // namespace stochsync
