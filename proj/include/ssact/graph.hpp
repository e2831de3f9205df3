#pragma once

// Finite directed multigraphs with the range/source convention used
// throughout: an edge e runs s(e) -> r(e), a path mu = e_1...e_n satisfies
// s(e_i) = r(e_{i+1}), and A(v,w) counts edges with range v and source w.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ssact/linalg.hpp"

namespace ssact {

struct RawEdge {
  std::string name;
  std::string range;
  std::string source;
};

struct RawGraph {
  std::vector<std::string> vertices;
  std::vector<RawEdge> edges;
};

class DirectedMultigraph {
 public:
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edge_range_.size(); }

  const std::string& vertex_label(int v) const { return vertices_[v]; }
  const std::string& edge_label(int e) const { return edge_labels_[e]; }
  int range(int e) const { return edge_range_[e]; }
  int source(int e) const { return edge_source_[e]; }

  // Edges e with r(e) = v, in declaration order.
  const std::vector<int>& out_edges(int v) const { return out_by_range_[v]; }

  std::optional<int> vertex_id(const std::string& label) const;
  std::optional<int> edge_id(const std::string& label) const;

  RawGraph to_raw() const;

  friend DirectedMultigraph validate_graph(const RawGraph& raw);

 private:
  std::vector<std::string> vertices_;
  std::vector<std::string> edge_labels_;
  std::vector<int> edge_range_;
  std::vector<int> edge_source_;
  std::vector<std::vector<int>> out_by_range_;
};

// Throws ValidationError listing every violated constraint.
DirectedMultigraph validate_graph(const RawGraph& raw);

// A path of length n >= 0.  Empty paths carry their vertex (range == source).
struct Path {
  int range = -1;
  int source = -1;
  std::vector<int> edges;  // first edge has r(e) = range

  std::size_t length() const { return edges.size(); }
  bool operator==(const Path& o) const {
    return range == o.range && source == o.source && edges == o.edges;
  }
};

Path empty_path(int vertex);
// Validates composability of the edge sequence; throws ValidationError.
Path make_path(const DirectedMultigraph& g, const std::vector<int>& edges,
               int vertex_if_empty = -1);

constexpr int kDefaultDepthGuard = 20;

// All paths of length exactly k, in lexicographic order of their edge
// sequences (edges ordered by declaration).  `start` constrains r(mu).
std::vector<Path> enumerate_paths(const DirectedMultigraph& g,
                                  std::optional<int> start, int k,
                                  int depth_guard = kDefaultDepthGuard);

// Visitor form of the above, for counting without materializing.
void for_each_path(const DirectedMultigraph& g, std::optional<int> start,
                   int k, const std::function<void(const Path&)>& fn,
                   int depth_guard = kDefaultDepthGuard);

using AdjacencyMatrix = IntMatrix;

// A(v,w) = number of edges with r(e) = v, s(e) = w; declaration order.
AdjacencyMatrix adjacency_matrix(const DirectedMultigraph& g);

// True iff every ordered vertex pair is joined by a path.
bool is_strongly_connected(const DirectedMultigraph& g);

std::string path_to_string(const DirectedMultigraph& g, const Path& p);
// Dot-separated edge labels; "" or "@vertex" denotes an empty path.  An
// empty string needs `empty_vertex` from context.
Path parse_path(const DirectedMultigraph& g, const std::string& text,
                std::optional<int> empty_vertex = std::nullopt);

}  // namespace ssact
