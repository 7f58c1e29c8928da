#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sigmastrip {

// Base graph G0 together with a fixed spanning tree and the pin vertex.
struct BaseGraph {
  int n = 0;                                // number of base vertices
  std::vector<std::pair<int, int>> edges;   // undirected, stored with first < second
  std::vector<int> tree;                    // indices into `edges` forming a spanning tree
  int pin = 0;

  void validate() const;  // throws std::invalid_argument on a broken graph

  static BaseGraph single_vertex();
  static BaseGraph k2();
  static BaseGraph path(int n_vertices, int pin = 0);
};

// Translation-invariant edge weights: one value per base edge (repeated on
// every level) and one per base vertex (repeated on every half level), plus
// the pinning strength at the distinguished vertex.
struct Weights {
  std::vector<double> vertical;
  std::vector<double> horizontal;
  double epsilon = 1.0;

  static Weights unit(const BaseGraph& base, double eps = 1.0);
};

struct OrientedEdge {
  int edge = -1;  // strip edge id
  int tail = -1;  // strip vertex ids
  int head = -1;
};

struct SpanningTree {
  std::vector<int> edges;  // sorted strip edge ids
};

class StripGraph;

// Orientation and path structure of a spanning tree rooted at a vertex.
// Tree edges are oriented away from the root: tail(e) is the endpoint
// closer to the root. Holds no reference to the strip after construction.
class TreeView {
 public:
  TreeView() = default;
  TreeView(const StripGraph& strip, const SpanningTree& tree, int root);

  bool in_tree(int e) const { return in_tree_[e]; }
  int tail(int e) const { return tree_tail_[e]; }
  int head(int e) const { return tree_head_[e]; }
  int parent(int v) const { return parent_vertex_[v]; }
  int parent_edge(int v) const { return parent_edge_[v]; }
  int depth(int v) const { return depth_[v]; }
  int root() const { return root_; }

  // Unique tree path i -> j, each edge oriented in traversal direction.
  std::vector<OrientedEdge> path(int i, int j) const;
  // Whether e lies on the path root -> v.
  bool on_root_path(int v, int e) const;

 private:
  int root_ = -1;
  std::vector<char> in_tree_;
  std::vector<int> tree_tail_, tree_head_;
  std::vector<int> parent_vertex_, parent_edge_, depth_;
};

// Finite strip: levels lo..hi of copies of the base graph, joined by
// horizontal edges. Edge levels are stored doubled so that half-integer
// levels stay exact: a vertical edge at level n has dlevel 2n, the
// horizontal edge (n,v)-(n+1,v) has dlevel 2n+1.
//
// Immutable after construction; cheap lookup tables (adjacency, the backbone
// tree and its root paths) are built once in the constructor.
class StripGraph {
 public:
  struct Edge {
    int tail = 0;        // bookkeeping orientation: tail -> head
    int head = 0;
    int dlevel = 0;
    bool horizontal = false;
    int base_index = 0;  // E0 index (vertical) or V0 index (horizontal)
    double beta = 1.0;
  };

  StripGraph(BaseGraph base, int lo, int hi, Weights weights);

  const BaseGraph& base() const { return base_; }
  const Weights& weights() const { return weights_; }
  int lo() const { return lo_; }
  int hi() const { return hi_; }
  int levels() const { return hi_ - lo_ + 1; }
  int n_vertices() const { return n_vertices_; }
  int n_edges() const { return static_cast<int>(edges_.size()); }

  int vertex(int level, int base_vertex) const;
  int level_of(int v) const { return lo_ + v / base_.n; }
  int base_of(int v) const { return v % base_.n; }

  const Edge& edge(int e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }
  // Neighbours of v as (edge id, other endpoint).
  const std::vector<std::pair<int, int>>& adjacency(int v) const { return adj_[v]; }

  // Edge lookup by (doubled level, base index); -1 if absent.
  int find_edge(int dlevel, int base_index) const;
  int find_edge_between(int u, int v) const;

  int root() const { return root_; }           // (lo, pin)
  int top_root() const { return top_root_; }   // (hi, pin)
  int pin_vertex() const { return pin0_; }     // (0, pin)

  const SpanningTree& backbone_tree() const { return backbone_; }
  const TreeView& backbone_view() const { return backbone_view_; }
  bool in_backbone_tree(int e) const { return backbone_index_[e] >= 0; }
  // Position of edge e in the backbone-tree coordinate order, or -1.
  int backbone_index(int e) const { return backbone_index_[e]; }
  const std::vector<int>& backbone_edges() const { return backbone_.edges; }
  // Backbone-tree coordinate index of the vertical copy of base tree edge k
  // at `level`, and of the pin edge at level n+1/2.
  int backbone_index_vertical(int level, int tree_pos) const;
  int backbone_index_pin(int n) const;
  bool is_pin_line_edge(int e) const;  // horizontal edge on the pin line

  int reflect_edge(int e) const;  // e_n -> e_{-n}; throws if out of range
  SpanningTree reflect_tree(const SpanningTree& t) const;

 private:
  BaseGraph base_;
  int lo_, hi_;
  Weights weights_;
  int n_vertices_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
  std::vector<int> edge_lookup_;  // (dlevel,base_index) -> edge id
  int root_ = 0, top_root_ = 0, pin0_ = 0;
  SpanningTree backbone_;
  std::vector<int> backbone_index_;
  TreeView backbone_view_;

  int lookup_slot(int dlevel, int base_index) const;
};

bool is_spanning_tree(const StripGraph& strip, const SpanningTree& tree);
void require_spanning_tree(const StripGraph& strip, const SpanningTree& tree);

StripGraph build_strip(const BaseGraph& base, int lo, int hi, const Weights& weights);
SpanningTree backbone_tree(const StripGraph& strip);
std::vector<OrientedEdge> tree_path(const StripGraph& strip, const SpanningTree& tree,
                                    int i, int j);

}  // namespace sigmastrip
