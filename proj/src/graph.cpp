#include "sigmastrip/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace sigmastrip {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

}  // namespace

void BaseGraph::validate() const {
  if (n <= 0) throw std::invalid_argument("base graph: empty vertex set");
  if (pin < 0 || pin >= n) throw std::invalid_argument("base graph: pin out of range");
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n || a == b)
      throw std::invalid_argument("base graph: bad edge endpoints");
    if (a > b) throw std::invalid_argument("base graph: edges must be stored (low, high)");
  }
  if (static_cast<int>(tree.size()) != n - 1)
    throw std::invalid_argument("base graph: base tree must have n-1 edges");
  UnionFind uf(n);
  for (int idx : tree) {
    if (idx < 0 || idx >= static_cast<int>(edges.size()))
      throw std::invalid_argument("base graph: base tree edge index out of range");
    if (!uf.merge(edges[idx].first, edges[idx].second))
      throw std::invalid_argument("base graph: base tree contains a cycle");
  }
  UnionFind conn(n);
  for (auto [a, b] : edges) conn.merge(a, b);
  for (int v = 1; v < n; ++v)
    if (conn.find(v) != conn.find(0))
      throw std::invalid_argument("base graph: not connected");
}

BaseGraph BaseGraph::single_vertex() {
  BaseGraph g;
  g.n = 1;
  g.pin = 0;
  return g;
}

BaseGraph BaseGraph::k2() {
  BaseGraph g;
  g.n = 2;
  g.edges = {{0, 1}};
  g.tree = {0};
  g.pin = 0;
  return g;
}

BaseGraph BaseGraph::path(int n_vertices, int pin) {
  BaseGraph g;
  g.n = n_vertices;
  g.pin = pin;
  for (int v = 0; v + 1 < n_vertices; ++v) {
    g.edges.push_back({v, v + 1});
    g.tree.push_back(v);
  }
  return g;
}

Weights Weights::unit(const BaseGraph& base, double eps) {
  Weights w;
  w.vertical.assign(base.edges.size(), 1.0);
  w.horizontal.assign(base.n, 1.0);
  w.epsilon = eps;
  return w;
}

StripGraph::StripGraph(BaseGraph base, int lo, int hi, Weights weights)
    : base_(std::move(base)), lo_(lo), hi_(hi), weights_(std::move(weights)) {
  base_.validate();
  if (lo_ > 0 || hi_ < 0) throw std::invalid_argument("strip: need lo <= 0 <= hi");
  if (static_cast<int>(weights_.vertical.size()) != static_cast<int>(base_.edges.size()) ||
      static_cast<int>(weights_.horizontal.size()) != base_.n)
    throw std::invalid_argument("strip: weights do not cover the base graph");
  for (double b : weights_.vertical)
    if (!(b > 0)) throw std::invalid_argument("strip: non-positive vertical weight");
  for (double b : weights_.horizontal)
    if (!(b > 0)) throw std::invalid_argument("strip: non-positive horizontal weight");
  if (!(weights_.epsilon > 0)) throw std::invalid_argument("strip: non-positive epsilon");

  const int n0 = base_.n;
  n_vertices_ = levels() * n0;
  adj_.resize(n_vertices_);

  // Edges ordered by doubled level, then base index.
  const int slots_per_dlevel = std::max<int>(base_.edges.size(), n0);
  edge_lookup_.assign(static_cast<size_t>(2 * levels()) * slots_per_dlevel, -1);
  for (int n = lo_; n <= hi_; ++n) {
    for (int k = 0; k < static_cast<int>(base_.edges.size()); ++k) {
      Edge e;
      e.tail = vertex(n, base_.edges[k].first);
      e.head = vertex(n, base_.edges[k].second);
      e.dlevel = 2 * n;
      e.horizontal = false;
      e.base_index = k;
      e.beta = weights_.vertical[k];
      edge_lookup_[lookup_slot(e.dlevel, k)] = static_cast<int>(edges_.size());
      edges_.push_back(e);
    }
    if (n < hi_) {
      for (int v = 0; v < n0; ++v) {
        Edge e;
        e.tail = vertex(n, v);
        e.head = vertex(n + 1, v);
        e.dlevel = 2 * n + 1;
        e.horizontal = true;
        e.base_index = v;
        e.beta = weights_.horizontal[v];
        edge_lookup_[lookup_slot(e.dlevel, v)] = static_cast<int>(edges_.size());
        edges_.push_back(e);
      }
    }
  }
  for (int e = 0; e < n_edges(); ++e) {
    adj_[edges_[e].tail].push_back({e, edges_[e].head});
    adj_[edges_[e].head].push_back({e, edges_[e].tail});
  }

  root_ = vertex(lo_, base_.pin);
  top_root_ = vertex(hi_, base_.pin);
  pin0_ = vertex(0, base_.pin);

  // Backbone tree: one copy of the base tree per level, joined along the pin line.
  backbone_index_.assign(n_edges(), -1);
  for (int n = lo_; n <= hi_; ++n) {
    for (int idx : base_.tree) backbone_.edges.push_back(find_edge(2 * n, idx));
    if (n < hi_) backbone_.edges.push_back(find_edge(2 * n + 1, base_.pin));
  }
  std::sort(backbone_.edges.begin(), backbone_.edges.end());
  for (int i = 0; i < static_cast<int>(backbone_.edges.size()); ++i)
    backbone_index_[backbone_.edges[i]] = i;
  backbone_view_ = TreeView(*this, backbone_, root_);
}

int StripGraph::vertex(int level, int base_vertex) const {
  if (level < lo_ || level > hi_ || base_vertex < 0 || base_vertex >= base_.n)
    throw std::out_of_range("strip: vertex out of range");
  return (level - lo_) * base_.n + base_vertex;
}

int StripGraph::lookup_slot(int dlevel, int base_index) const {
  const int slots = std::max<int>(base_.edges.size(), base_.n);
  return (dlevel - 2 * lo_) * slots + base_index;
}

int StripGraph::find_edge(int dlevel, int base_index) const {
  if (dlevel < 2 * lo_ || dlevel > 2 * hi_) return -1;
  if (base_index < 0) return -1;
  const bool horizontal = (dlevel & 1) != 0;
  if (horizontal && base_index >= base_.n) return -1;
  if (!horizontal && base_index >= static_cast<int>(base_.edges.size())) return -1;
  return edge_lookup_[lookup_slot(dlevel, base_index)];
}

int StripGraph::find_edge_between(int u, int v) const {
  for (auto [e, w] : adj_[u])
    if (w == v) return e;
  return -1;
}

int StripGraph::backbone_index_vertical(int level, int tree_pos) const {
  return backbone_index_[find_edge(2 * level, base_.tree[tree_pos])];
}

int StripGraph::backbone_index_pin(int n) const {
  return backbone_index_[find_edge(2 * n + 1, base_.pin)];
}

bool StripGraph::is_pin_line_edge(int e) const {
  return edges_[e].horizontal && edges_[e].base_index == base_.pin;
}

int StripGraph::reflect_edge(int e) const {
  const Edge& ed = edges_[e];
  const int rdlevel = -ed.dlevel;
  const int r = find_edge(rdlevel, ed.base_index);
  if (r < 0) throw std::out_of_range("reflect: image level outside the strip");
  return r;
}

SpanningTree StripGraph::reflect_tree(const SpanningTree& t) const {
  SpanningTree out;
  out.edges.reserve(t.edges.size());
  for (int e : t.edges) out.edges.push_back(reflect_edge(e));
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

TreeView::TreeView(const StripGraph& strip, const SpanningTree& tree, int root)
    : root_(root) {
  const int nv = strip.n_vertices();
  const int ne = strip.n_edges();
  in_tree_.assign(ne, 0);
  tree_tail_.assign(ne, -1);
  tree_head_.assign(ne, -1);
  parent_vertex_.assign(nv, -1);
  parent_edge_.assign(nv, -1);
  depth_.assign(nv, -1);
  for (int e : tree.edges) in_tree_[e] = 1;

  std::queue<int> q;
  q.push(root);
  depth_[root] = 0;
  int visited = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (auto [e, w] : strip.adjacency(v)) {
      if (!in_tree_[e] || depth_[w] >= 0) continue;
      depth_[w] = depth_[v] + 1;
      parent_vertex_[w] = v;
      parent_edge_[w] = e;
      tree_tail_[e] = v;
      tree_head_[e] = w;
      q.push(w);
      ++visited;
    }
  }
  if (visited != nv) throw std::invalid_argument("tree view: edge set does not span the graph");
}

std::vector<OrientedEdge> TreeView::path(int i, int j) const {
  std::vector<OrientedEdge> up, down;
  int a = i, b = j;
  while (depth_[a] > depth_[b]) {
    int e = parent_edge_[a];
    up.push_back({e, a, parent_vertex_[a]});
    a = parent_vertex_[a];
  }
  while (depth_[b] > depth_[a]) {
    int e = parent_edge_[b];
    down.push_back({e, parent_vertex_[b], b});
    b = parent_vertex_[b];
  }
  while (a != b) {
    up.push_back({parent_edge_[a], a, parent_vertex_[a]});
    a = parent_vertex_[a];
    down.push_back({parent_edge_[b], parent_vertex_[b], b});
    b = parent_vertex_[b];
  }
  up.insert(up.end(), down.rbegin(), down.rend());
  return up;
}

bool TreeView::on_root_path(int v, int e) const {
  // e lies on root->v iff head(e) is an ancestor of v (or v itself).
  if (!in_tree_[e]) return false;
  int h = tree_head_[e];
  int x = v;
  while (x >= 0 && depth_[x] >= depth_[h]) {
    if (x == h) return true;
    x = parent_vertex_[x];
  }
  return false;
}

bool is_spanning_tree(const StripGraph& strip, const SpanningTree& tree) {
  if (static_cast<int>(tree.edges.size()) != strip.n_vertices() - 1) return false;
  UnionFind uf(strip.n_vertices());
  for (int e : tree.edges) {
    if (e < 0 || e >= strip.n_edges()) return false;
    if (!uf.merge(strip.edge(e).tail, strip.edge(e).head)) return false;
  }
  return true;
}

void require_spanning_tree(const StripGraph& strip, const SpanningTree& tree) {
  if (!is_spanning_tree(strip, tree))
    throw std::invalid_argument("edge set is not a spanning tree of the strip");
}

StripGraph build_strip(const BaseGraph& base, int lo, int hi, const Weights& weights) {
  return StripGraph(base, lo, hi, weights);
}

SpanningTree backbone_tree(const StripGraph& strip) { return strip.backbone_tree(); }

std::vector<OrientedEdge> tree_path(const StripGraph& strip, const SpanningTree& tree,
                                    int i, int j) {
  TreeView view(strip, tree, strip.root());
  return view.path(i, j);
}

}  // namespace sigmastrip
