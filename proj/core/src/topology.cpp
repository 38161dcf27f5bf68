#include "eqalloc/topology.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "eqalloc/error.hpp"
#include "eqalloc/rng.hpp"

namespace eqalloc {

NeighborhoodGraph::NeighborhoodGraph(std::size_t n_nodes) : adjacency_(n_nodes) {}

NeighborhoodGraph NeighborhoodGraph::from_edges(std::size_t n_nodes, std::span<const Edge> edges) {
  NeighborhoodGraph g(n_nodes);
  for (const auto& [i, j] : edges) g.add_edge(i, j);
  return g;
}

void NeighborhoodGraph::add_edge(std::size_t i, std::size_t j) {
  if (i >= size() || j >= size())
    throw Error(ErrorKind::InvalidInput, "edge (" + std::to_string(i) + ", " + std::to_string(j) +
                                             ") out of range for " + std::to_string(size()) + " nodes");
  if (i == j) throw Error(ErrorKind::InvalidInput, "self-loop at node " + std::to_string(i));
  auto insert = [](std::vector<std::size_t>& list, std::size_t v) {
    auto it = std::lower_bound(list.begin(), list.end(), v);
    if (it == list.end() || *it != v) list.insert(it, v);
  };
  insert(adjacency_[i], j);
  insert(adjacency_[j], i);
}

std::span<const std::size_t> NeighborhoodGraph::neighbors(std::size_t i) const {
  if (i >= size()) throw Error(ErrorKind::InvalidInput, "node " + std::to_string(i) + " out of range");
  return adjacency_[i];
}

bool NeighborhoodGraph::adjacent(std::size_t i, std::size_t j) const {
  auto list = neighbors(i);
  return std::binary_search(list.begin(), list.end(), j);
}

std::size_t NeighborhoodGraph::edge_count() const noexcept {
  std::size_t twice = 0;
  for (const auto& list : adjacency_) twice += list.size();
  return twice / 2;
}

bool NeighborhoodGraph::has_isolated_node() const noexcept {
  return std::any_of(adjacency_.begin(), adjacency_.end(), [](const auto& l) { return l.empty(); });
}

std::vector<Edge> NeighborhoodGraph::edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < size(); ++i)
    for (auto j : adjacency_[i])
      if (i < j) out.emplace_back(i, j);
  return out;
}

Vector neighbor_mean(const NeighborhoodGraph& graph, const Profile& values, std::size_t i) {
  if (static_cast<std::size_t>(values.rows()) != graph.size())
    throw Error(ErrorKind::InvalidInput, "profile has " + std::to_string(values.rows()) + " rows for " +
                                             std::to_string(graph.size()) + " nodes");
  auto nbrs = graph.neighbors(i);
  if (nbrs.empty()) throw Error(ErrorKind::IsolatedNode, "node " + std::to_string(i) + " has no neighbors");
  Vector sum = Vector::Zero(values.cols());
  for (auto j : nbrs) sum += values.row(static_cast<Eigen::Index>(j)).transpose();
  return sum / static_cast<double>(nbrs.size());
}

NeighborhoodGraph random_graph(std::size_t n, double edge_prob, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorKind::InvalidInput, "random graph needs at least 2 nodes");
  if (!(edge_prob > 0.0 && edge_prob <= 1.0))
    throw Error(ErrorKind::InvalidInput, "edge probability must lie in (0, 1]");
  Rng rng = make_rng({seed, stream::kGraph});
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  NeighborhoodGraph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng) < edge_prob) g.add_edge(i, j);
  std::uniform_int_distribution<std::size_t> pick(0, n - 2);
  for (std::size_t i = 0; i < n; ++i) {
    if (g.degree(i) > 0) continue;
    std::size_t j = pick(rng);
    if (j >= i) ++j;
    g.add_edge(i, j);
  }
  return g;
}

NeighborhoodGraph read_edge_list(std::istream& in, std::optional<std::size_t> n_nodes) {
  std::vector<Edge> edges;
  std::size_t max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long long i = 0;
    long long j = 0;
    if (!(fields >> i)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw Error(ErrorKind::Parse, "edge list line " + std::to_string(line_no) + ": expected 'i j'");
    }
    std::string rest;
    if (!(fields >> j) || (fields >> rest) || i < 0 || j < 0)
      throw Error(ErrorKind::Parse, "edge list line " + std::to_string(line_no) + ": expected 'i j'");
    edges.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    max_index = std::max({max_index, edges.back().first, edges.back().second});
  }
  const std::size_t n = n_nodes.value_or(edges.empty() ? 0 : max_index + 1);
  return NeighborhoodGraph::from_edges(n, edges);
}

NeighborhoodGraph load_edge_list(const std::filesystem::path& path, std::optional<std::size_t> n_nodes) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open edge list " + path.string());
  return read_edge_list(in, n_nodes);
}

void write_edge_list(std::ostream& out, const NeighborhoodGraph& graph) {
  for (const auto& [i, j] : graph.edges()) out << i << ' ' << j << '\n';
}

}  // namespace eqalloc
