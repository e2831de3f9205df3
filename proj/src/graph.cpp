#include "ssact/graph.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace ssact {

std::optional<int> DirectedMultigraph::vertex_id(
    const std::string& label) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    if (vertices_[i] == label) return static_cast<int>(i);
  return std::nullopt;
}

std::optional<int> DirectedMultigraph::edge_id(const std::string& label) const {
  for (std::size_t i = 0; i < edge_labels_.size(); ++i)
    if (edge_labels_[i] == label) return static_cast<int>(i);
  return std::nullopt;
}

RawGraph DirectedMultigraph::to_raw() const {
  RawGraph raw;
  raw.vertices = vertices_;
  for (std::size_t e = 0; e < edge_count(); ++e)
    raw.edges.push_back({edge_labels_[e], vertices_[edge_range_[e]],
                         vertices_[edge_source_[e]]});
  return raw;
}

namespace {

void check_label(const std::string& label, const std::string& what,
                 std::vector<std::string>& issues) {
  if (label.empty()) {
    issues.push_back(what + " label is empty");
    return;
  }
  for (char c : label) {
    if (c == '.' || c == '^' || c == ',' || c == '"' || c == ' ' ||
        c == '\t' || c == '\n') {
      issues.push_back(what + " label '" + label +
                       "' contains a reserved character (one of . ^ , \" or "
                       "whitespace)");
      return;
    }
  }
}

}  // namespace

DirectedMultigraph validate_graph(const RawGraph& raw) {
  std::vector<std::string> issues;
  if (raw.vertices.empty()) issues.push_back("empty vertex set");

  std::set<std::string> vseen;
  for (const auto& v : raw.vertices) {
    check_label(v, "vertex", issues);
    if (!vseen.insert(v).second)
      issues.push_back("duplicate label: vertex '" + v + "'");
  }
  std::set<std::string> eseen;
  for (const auto& e : raw.edges) {
    check_label(e.name, "edge", issues);
    if (!eseen.insert(e.name).second)
      issues.push_back("duplicate label: edge '" + e.name + "'");
    if (!vseen.count(e.range))
      issues.push_back("dangling endpoint: edge '" + e.name +
                       "' has undeclared range vertex '" + e.range + "'");
    if (!vseen.count(e.source))
      issues.push_back("dangling endpoint: edge '" + e.name +
                       "' has undeclared source vertex '" + e.source + "'");
  }
  if (!issues.empty()) throw ValidationError(issues);

  DirectedMultigraph g;
  g.vertices_ = raw.vertices;
  g.out_by_range_.resize(raw.vertices.size());
  for (const auto& e : raw.edges) {
    int id = static_cast<int>(g.edge_labels_.size());
    g.edge_labels_.push_back(e.name);
    g.edge_range_.push_back(*g.vertex_id(e.range));
    g.edge_source_.push_back(*g.vertex_id(e.source));
    g.out_by_range_[g.edge_range_[id]].push_back(id);
  }
  return g;
}

Path empty_path(int vertex) {
  Path p;
  p.range = p.source = vertex;
  return p;
}

Path make_path(const DirectedMultigraph& g, const std::vector<int>& edges,
               int vertex_if_empty) {
  if (edges.empty()) {
    if (vertex_if_empty < 0 ||
        vertex_if_empty >= static_cast<int>(g.vertex_count()))
      throw ValidationError("empty path needs a valid vertex tag");
    return empty_path(vertex_if_empty);
  }
  Path p;
  p.range = g.range(edges.front());
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (g.source(edges[i]) != g.range(edges[i + 1]))
      throw ValidationError("path not composable at position " +
                            std::to_string(i) + ": s(" +
                            g.edge_label(edges[i]) + ") != r(" +
                            g.edge_label(edges[i + 1]) + ")");
  }
  p.edges = edges;
  p.source = g.source(edges.back());
  return p;
}

void for_each_path(const DirectedMultigraph& g, std::optional<int> start,
                   int k, const std::function<void(const Path&)>& fn,
                   int depth_guard) {
  if (k < 0) throw ValidationError("path length must be >= 0");
  if (k > depth_guard)
    throw ValidationError("path length " + std::to_string(k) +
                          " exceeds enumeration depth guard " +
                          std::to_string(depth_guard));
  std::vector<int> stack;
  // Depth-first with edges tried in declaration order gives lexicographic
  // output order.
  std::function<void(int, int)> walk = [&](int at, int remaining) {
    if (remaining == 0) {
      Path p;
      if (stack.empty()) {
        p = empty_path(at);
      } else {
        p.range = g.range(stack.front());
        p.edges = stack;
        p.source = g.source(stack.back());
      }
      fn(p);
      return;
    }
    for (int e : g.out_edges(at)) {
      stack.push_back(e);
      walk(g.source(e), remaining - 1);
      stack.pop_back();
    }
  };
  if (start) {
    walk(*start, k);
  } else {
    for (int v = 0; v < static_cast<int>(g.vertex_count()); ++v) walk(v, k);
  }
}

std::vector<Path> enumerate_paths(const DirectedMultigraph& g,
                                  std::optional<int> start, int k,
                                  int depth_guard) {
  std::vector<Path> out;
  for_each_path(
      g, start, k, [&](const Path& p) { out.push_back(p); }, depth_guard);
  return out;
}

AdjacencyMatrix adjacency_matrix(const DirectedMultigraph& g) {
  AdjacencyMatrix a(g.vertex_count(), g.vertex_count(), 0);
  for (std::size_t e = 0; e < g.edge_count(); ++e)
    a(g.range(static_cast<int>(e)), g.source(static_cast<int>(e))) += 1;
  return a;
}

namespace {

std::vector<bool> reachable(const std::vector<std::vector<int>>& adj,
                            int start) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<int> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
  }
  return seen;
}

}  // namespace

bool is_strongly_connected(const DirectedMultigraph& g) {
  const int n = static_cast<int>(g.vertex_count());
  if (n == 0) return false;
  std::vector<std::vector<int>> fwd(n), bwd(n);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    int r = g.range(static_cast<int>(e)), s = g.source(static_cast<int>(e));
    fwd[s].push_back(r);
    bwd[r].push_back(s);
  }
  auto f = reachable(fwd, 0);
  auto b = reachable(bwd, 0);
  for (int v = 0; v < n; ++v)
    if (!f[v] || !b[v]) return false;
  return true;
}

std::string path_to_string(const DirectedMultigraph& g, const Path& p) {
  if (p.edges.empty()) return "@" + g.vertex_label(p.range);
  std::string s;
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    if (i) s += ".";
    s += g.edge_label(p.edges[i]);
  }
  return s;
}

Path parse_path(const DirectedMultigraph& g, const std::string& text,
                std::optional<int> empty_vertex) {
  if (text.empty()) {
    if (!empty_vertex)
      throw ValidationError("empty path given without a vertex context");
    return empty_path(*empty_vertex);
  }
  if (text[0] == '@') {
    auto v = g.vertex_id(text.substr(1));
    if (!v) throw ValidationError("unknown vertex '" + text.substr(1) + "'");
    return empty_path(*v);
  }
  std::vector<int> edges;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t dot = text.find('.', pos);
    std::string tok = text.substr(pos, dot == std::string::npos
                                           ? std::string::npos
                                           : dot - pos);
    auto e = g.edge_id(tok);
    if (!e) throw ValidationError("unknown edge '" + tok + "' in path '" +
                                  text + "'");
    edges.push_back(*e);
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return make_path(g, edges);
}

}  // namespace ssact
