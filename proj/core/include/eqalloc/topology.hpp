#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "eqalloc/types.hpp"

namespace eqalloc {

using Edge = std::pair<std::size_t, std::size_t>;

/// Undirected, unweighted community adjacency without self-loops.
/// Neighbor lists are kept sorted ascending.
class NeighborhoodGraph {
 public:
  NeighborhoodGraph() = default;
  explicit NeighborhoodGraph(std::size_t n_nodes);

  /// Duplicate edges (in either orientation) collapse; self-loops and
  /// out-of-range endpoints throw.
  static NeighborhoodGraph from_edges(std::size_t n_nodes, std::span<const Edge> edges);

  std::size_t size() const noexcept { return adjacency_.size(); }
  std::span<const std::size_t> neighbors(std::size_t i) const;
  std::size_t degree(std::size_t i) const { return neighbors(i).size(); }
  bool adjacent(std::size_t i, std::size_t j) const;
  std::size_t edge_count() const noexcept;
  bool has_isolated_node() const noexcept;

  /// Each undirected edge once, as (i, j) with i < j, sorted.
  std::vector<Edge> edges() const;

  void add_edge(std::size_t i, std::size_t j);

 private:
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// (1/N_i) * sum over neighbors j of values.row(j).
Vector neighbor_mean(const NeighborhoodGraph& graph, const Profile& values, std::size_t i);

/// Erdos-Renyi G(n, edge_prob); any isolated node is then attached to one
/// uniformly drawn other node.
NeighborhoodGraph random_graph(std::size_t n, double edge_prob, std::uint64_t seed);

/// Text edge list: one "i j" pair per line, zero-based; '#' starts a comment.
/// Without n_nodes the node count is max index + 1.
NeighborhoodGraph read_edge_list(std::istream& in, std::optional<std::size_t> n_nodes = std::nullopt);
NeighborhoodGraph load_edge_list(const std::filesystem::path& path,
                                 std::optional<std::size_t> n_nodes = std::nullopt);
void write_edge_list(std::ostream& out, const NeighborhoodGraph& graph);

}  // namespace eqalloc
