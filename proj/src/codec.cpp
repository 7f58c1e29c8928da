#include "sigmastrip/codec.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "json.hpp"

namespace sigmastrip {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void merge(int a, int b) { parent[find(a)] = find(b); }
};

std::vector<std::vector<int>> canonical_partition(std::map<int, std::vector<int>>& blocks) {
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : blocks) {
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Extended strip (two margin levels of backbone copies on each side) used to
// evaluate local variables with the padding convention.
class LocalVarScanner {
 public:
  explicit LocalVarScanner(const StripGraph& strip)
      : strip_(strip), ext_(strip.base(), strip.lo() - 2, strip.hi() + 2, strip.weights()) {
    for (int e = 0; e < ext_.n_edges(); ++e) {
      const auto& ed = ext_.edge(e);
      if (ed.dlevel >= 2 * strip.lo() && ed.dlevel <= 2 * strip.hi()) continue;
      const bool backbone_type =
          ed.horizontal ? (ed.base_index == strip.base().pin)
                        : (std::find(strip.base().tree.begin(), strip.base().tree.end(),
                                     ed.base_index) != strip.base().tree.end());
      if (backbone_type) outside_.push_back(e);
    }
  }

  std::vector<LocalTreeVar> scan(const SpanningTree& tree) const {
    SpanningTree ext_tree;
    ext_tree.edges = outside_;
    for (int e : tree.edges) {
      const auto& ed = strip_.edge(e);
      ext_tree.edges.push_back(ext_.find_edge(ed.dlevel, ed.base_index));
    }
    std::sort(ext_tree.edges.begin(), ext_tree.edges.end());
    TreeView view(ext_, ext_tree, ext_.root());

    const int lo = strip_.lo(), hi = strip_.hi();
    const int n0 = strip_.base().n;
    std::vector<LocalTreeVar> vars(hi - lo + 1);

    // Window edge sets per level.
    for (int n = lo; n <= hi; ++n) {
      auto& v = vars[n - lo];
      for (int k = 0; k < static_cast<int>(strip_.base().edges.size()); ++k)
        if (view.in_tree(ext_.find_edge(2 * n, k))) v.f_vertical.push_back(k);
      for (int u = 0; u < n0; ++u) {
        if (view.in_tree(ext_.find_edge(2 * n - 1, u))) v.f_left.push_back(u);
        if (view.in_tree(ext_.find_edge(2 * n + 1, u))) v.f_right.push_back(u);
      }
    }

    // Backbone endpoints: first/last level-n vertex on the path between the
    // far ends of the extended tree.
    {
      auto bpath = view.path(ext_.root(), ext_.top_root());
      std::vector<int> walk;
      walk.push_back(ext_.root());
      for (const auto& oe : bpath) walk.push_back(oe.head);
      std::vector<char> seen(hi - lo + 1, 0);
      for (int v : walk) {
        const int n = ext_.level_of(v);
        if (n < lo || n > hi) continue;
        if (!seen[n - lo]) {
          vars[n - lo].b_left = ext_.base_of(v);
          seen[n - lo] = 1;
        }
        vars[n - lo].b_right = ext_.base_of(v);
      }
    }

    // Left partitions: sweep levels upward, adding tree edges at levels
    // <= n - 1/2 before reading off connectivity among level-n vertices.
    {
      std::vector<std::vector<int>> by_dlevel(2 * (ext_.hi() - ext_.lo()) + 1);
      for (int e : ext_tree.edges) by_dlevel[ext_.edge(e).dlevel - 2 * ext_.lo()].push_back(e);
      UnionFind uf(ext_.n_vertices());
      int next_dlevel = 2 * ext_.lo();
      for (int n = lo; n <= hi; ++n) {
        while (next_dlevel <= 2 * n - 1) {
          for (int e : by_dlevel[next_dlevel - 2 * ext_.lo()])
            uf.merge(ext_.edge(e).tail, ext_.edge(e).head);
          ++next_dlevel;
        }
        std::map<int, std::vector<int>> blocks;
        for (int u : vars[n - lo].f_left) blocks[uf.find(ext_.vertex(n, u))].push_back(u);
        vars[n - lo].a_left = canonical_partition(blocks);
      }
      // Right partitions: mirror sweep.
      UnionFind ufr(ext_.n_vertices());
      next_dlevel = 2 * ext_.hi();
      for (int n = hi; n >= lo; --n) {
        while (next_dlevel >= 2 * n + 1) {
          for (int e : by_dlevel[next_dlevel - 2 * ext_.lo()])
            ufr.merge(ext_.edge(e).tail, ext_.edge(e).head);
          --next_dlevel;
        }
        std::map<int, std::vector<int>> blocks;
        for (int u : vars[n - lo].f_right) blocks[ufr.find(ext_.vertex(n, u))].push_back(u);
        vars[n - lo].a_right = canonical_partition(blocks);
      }
    }
    return vars;
  }

 private:
  const StripGraph& strip_;
  StripGraph ext_;
  std::vector<int> outside_;
};

// Auxiliary tree of a local variable: level-0 vertices plus one node per
// left/right class, with the window's level-0 edges and one line per
// horizontal window edge.
class AuxTree {
 public:
  AuxTree(const BaseGraph& base, const LocalTreeVar& var) : base_(base), var_(var) {
    const int n0 = base.n;
    n_vertices_ = n0 + static_cast<int>(var.a_left.size() + var.a_right.size());
    left_class_.assign(n0, -1);
    right_class_.assign(n0, -1);
    for (int c = 0; c < static_cast<int>(var.a_left.size()); ++c)
      for (int v : var.a_left[c]) left_class_[v] = n0 + c;
    for (int c = 0; c < static_cast<int>(var.a_right.size()); ++c)
      for (int v : var.a_right[c]) right_class_[v] = n0 + static_cast<int>(var.a_left.size()) + c;

    adj_.resize(n_vertices_);
    left_line_.assign(n0, -1);
    right_line_.assign(n0, -1);
    vertical_id_.assign(base.edges.size(), -1);
    for (int k : var.f_vertical)
      vertical_id_[k] = add_edge(base.edges[k].first, base.edges[k].second);
    for (int v : var.f_left) left_line_[v] = add_edge(v, left_class_[v]);
    for (int v : var.f_right) right_line_[v] = add_edge(v, right_class_[v]);

    if (n_edges_ != n_vertices_ - 1) throw CodecError("local variable: auxiliary graph is not a tree");
    // BFS from b_left; doubles as the connectivity check.
    parent_.assign(n_vertices_, -1);
    parent_edge_.assign(n_vertices_, -1);
    depth_.assign(n_vertices_, -1);
    std::queue<int> q;
    q.push(var.b_left);
    depth_[var.b_left] = 0;
    int visited = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (auto [e, w] : adj_[v]) {
        if (depth_[w] >= 0) continue;
        depth_[w] = depth_[v] + 1;
        parent_[w] = v;
        parent_edge_[w] = e;
        q.push(w);
        ++visited;
      }
    }
    if (visited != n_vertices_) throw CodecError("local variable: auxiliary graph is not connected");
  }

  // Whether aux edge id lies on the path b_left -> u.
  bool on_path_from_bleft(int u, int id) const {
    for (int x = u; parent_[x] >= 0; x = parent_[x])
      if (parent_edge_[x] == id) return true;
    return false;
  }

  int vertical_id(int k) const { return vertical_id_[k]; }
  int left_line(int v) const { return left_line_[v]; }
  int right_line(int v) const { return right_line_[v]; }

 private:
  int add_edge(int a, int b) {
    adj_[a].push_back({n_edges_, b});
    adj_[b].push_back({n_edges_, a});
    return n_edges_++;
  }

  const BaseGraph& base_;
  const LocalTreeVar& var_;
  int n_vertices_ = 0;
  int n_edges_ = 0;
  std::vector<std::vector<std::pair<int, int>>> adj_;
  std::vector<int> left_class_, right_class_, left_line_, right_line_, vertical_id_;
  std::vector<int> parent_, parent_edge_, depth_;
};

bool contains(const std::vector<int>& sorted, int x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

}  // namespace

LocalTreeVar reflect_var(const LocalTreeVar& v) {
  LocalTreeVar out;
  out.f_vertical = v.f_vertical;
  out.f_left = v.f_right;
  out.f_right = v.f_left;
  out.a_left = v.a_right;
  out.a_right = v.a_left;
  out.b_left = v.b_right;
  out.b_right = v.b_left;
  return out;
}

LocalTreeVar backbone_var(const BaseGraph& base) {
  LocalTreeVar v;
  v.f_vertical = base.tree;
  std::sort(v.f_vertical.begin(), v.f_vertical.end());
  v.f_left = {base.pin};
  v.f_right = {base.pin};
  v.a_left = {{base.pin}};
  v.a_right = {{base.pin}};
  v.b_left = v.b_right = base.pin;
  return v;
}

EdgeFacts recover_edge(const BaseGraph& base, const LocalTreeVar& var, LocalEdge e) {
  EdgeFacts facts;
  switch (e.slot) {
    case LocalSlot::LeftHalf:
      facts.in_tree = contains(var.f_left, e.index);
      break;
    case LocalSlot::Vertical:
      facts.in_tree = contains(var.f_vertical, e.index);
      break;
    case LocalSlot::RightHalf:
      facts.in_tree = contains(var.f_right, e.index);
      break;
  }
  if (!facts.in_tree) return facts;

  AuxTree aux(base, var);
  if (e.slot == LocalSlot::LeftHalf && e.index == var.b_left) {
    // Entry edge of the backbone: oriented toward this level.
    facts.tail_is_low = true;
    facts.on_backbone = true;
    return facts;
  }
  int id = -1;
  int u = -1;  // level-0 endpoint to test against
  switch (e.slot) {
    case LocalSlot::LeftHalf:
      id = aux.left_line(e.index);
      u = e.index;
      facts.tail_is_low = aux.on_path_from_bleft(u, id);
      break;
    case LocalSlot::Vertical:
      id = aux.vertical_id(e.index);
      u = base.edges[e.index].first;
      facts.tail_is_low = !aux.on_path_from_bleft(u, id);
      break;
    case LocalSlot::RightHalf:
      id = aux.right_line(e.index);
      u = e.index;
      facts.tail_is_low = !aux.on_path_from_bleft(u, id);
      break;
  }
  facts.on_backbone = (e.slot == LocalSlot::RightHalf && e.index == var.b_right) ||
                      aux.on_path_from_bleft(var.b_right, id);
  return facts;
}

std::vector<SpanningTree> enumerate_spanning_trees(const StripGraph& strip, int max_vertices) {
  if (strip.n_vertices() > max_vertices)
    throw std::invalid_argument("enumerate_spanning_trees: strip exceeds the enumeration guard");

  struct MEdge {
    int u, v, orig;
  };
  std::vector<SpanningTree> out;
  std::vector<int> chosen;

  // Contraction/deletion enumeration on a shrinking multigraph.
  auto connected = [](const std::vector<MEdge>& edges, const std::vector<int>& alive) {
    if (alive.empty()) return true;
    std::map<int, int> index;
    for (int i = 0; i < static_cast<int>(alive.size()); ++i) index[alive[i]] = i;
    UnionFind uf(static_cast<int>(alive.size()));
    for (const auto& e : edges) uf.merge(index.at(e.u), index.at(e.v));
    for (int i = 1; i < static_cast<int>(alive.size()); ++i)
      if (uf.find(i) != uf.find(0)) return false;
    return true;
  };

  std::function<void(std::vector<MEdge>, std::vector<int>)> rec =
      [&](std::vector<MEdge> edges, std::vector<int> alive) {
        if (alive.size() == 1) {
          SpanningTree t;
          t.edges = chosen;
          std::sort(t.edges.begin(), t.edges.end());
          out.push_back(std::move(t));
          return;
        }
        const MEdge e = edges.front();
        // Include e: contract its endpoints.
        {
          std::vector<MEdge> next;
          next.reserve(edges.size());
          for (size_t i = 1; i < edges.size(); ++i) {
            MEdge f = edges[i];
            if (f.u == e.v) f.u = e.u;
            if (f.v == e.v) f.v = e.u;
            if (f.u != f.v) next.push_back(f);
          }
          std::vector<int> next_alive;
          for (int v : alive)
            if (v != e.v) next_alive.push_back(v);
          chosen.push_back(e.orig);
          rec(std::move(next), std::move(next_alive));
          chosen.pop_back();
        }
        // Exclude e: allowed only if the rest stays connected.
        {
          std::vector<MEdge> rest(edges.begin() + 1, edges.end());
          if (connected(rest, alive)) rec(std::move(rest), alive);
        }
      };

  std::vector<MEdge> edges;
  for (int e = 0; e < strip.n_edges(); ++e)
    edges.push_back({strip.edge(e).tail, strip.edge(e).head, e});
  std::vector<int> alive(strip.n_vertices());
  std::iota(alive.begin(), alive.end(), 0);
  rec(std::move(edges), std::move(alive));
  return out;
}

double spanning_tree_count(const StripGraph& strip) {
  const int n = strip.n_vertices();
  if (n == 1) return 1.0;
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < strip.n_edges(); ++e) {
    int a = strip.edge(e).tail, b = strip.edge(e).head;
    lap(a, a) += 1;
    lap(b, b) += 1;
    lap(a, b) -= 1;
    lap(b, a) -= 1;
  }
  return std::round(lap.topLeftCorner(n - 1, n - 1).determinant());
}

LocalTreeVar local_var(const StripGraph& strip, const SpanningTree& tree, int level) {
  if (level < strip.lo() || level > strip.hi())
    throw std::out_of_range("local_var: level outside the strip");
  return LocalVarScanner(strip).scan(tree)[level - strip.lo()];
}

std::vector<LocalTreeVar> local_vars(const StripGraph& strip, const SpanningTree& tree) {
  return LocalVarScanner(strip).scan(tree);
}

int Alphabet::id_of(const LocalTreeVar& v) const {
  auto it = std::lower_bound(letters_.begin(), letters_.end(), v);
  if (it == letters_.end() || !(*it == v)) return -1;
  return static_cast<int>(it - letters_.begin());
}

int Alphabet::pair_count() const {
  int c = 0;
  for (const auto& row : follows_)
    for (uint8_t x : row) c += x;
  return c;
}

void Alphabet::finalize() {
  // Directed BFS diameter of the matching graph; every letter must be
  // reachable from and co-reachable to every other one.
  const int n = size();
  diameter_ = 0;
  for (int s = 0; s < n; ++s) {
    std::vector<int> dist(n, -1);
    std::queue<int> q;
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int w = 0; w < n; ++w)
        if (follows_[v][w] && dist[w] < 0) {
          dist[w] = dist[v] + 1;
          q.push(w);
        }
    }
    for (int w = 0; w < n; ++w) {
      if (dist[w] < 0) throw CodecError("alphabet: matching graph is not strongly connected");
      diameter_ = std::max(diameter_, dist[w]);
    }
  }
}

bool Alphabet::operator==(const Alphabet& other) const {
  return letters_ == other.letters_ && follows_ == other.follows_ && bb_id_ == other.bb_id_ &&
         diameter_ == other.diameter_ && width_ == other.width_;
}

Alphabet build_alphabet(const BaseGraph& base, int max_width, int max_vertices) {
  base.validate();
  const Weights unit = Weights::unit(base);
  const LocalTreeVar bb = backbone_var(base);

  std::set<LocalTreeVar> letters{bb};
  std::set<std::pair<LocalTreeVar, LocalTreeVar>> pairs{{bb, bb}};
  int stabilized = -1;

  for (int w = 1; w <= max_width; ++w) {
    if ((2 * w + 1) * base.n > max_vertices)
      throw CodecError("alphabet: enumeration guard hit before the letter set stabilized");
    const size_t n_letters = letters.size();
    const size_t n_pairs = pairs.size();

    StripGraph strip(base, -w, w, unit);
    LocalVarScanner scanner(strip);
    for (const auto& tree : enumerate_spanning_trees(strip, max_vertices)) {
      auto vars = scanner.scan(tree);
      for (const auto& v : vars) letters.insert(v);
      pairs.insert({bb, vars.front()});
      for (size_t i = 0; i + 1 < vars.size(); ++i) pairs.insert({vars[i], vars[i + 1]});
      pairs.insert({vars.back(), bb});
    }
    if (letters.size() == n_letters && pairs.size() == n_pairs && w >= 2) {
      stabilized = w;
      break;
    }
  }
  if (stabilized < 0)
    throw CodecError("alphabet: letter set did not stabilize within the width guard");

  Alphabet a;
  a.letters_.assign(letters.begin(), letters.end());
  a.width_ = stabilized;
  a.bb_id_ = a.id_of(bb);
  a.follows_.assign(a.size(), std::vector<uint8_t>(a.size(), 0));
  for (const auto& [x, y] : pairs) a.follows_[a.id_of(x)][a.id_of(y)] = 1;
  a.finalize();
  return a;
}

Word encode(const StripGraph& strip, const SpanningTree& tree, const Alphabet& alphabet) {
  require_spanning_tree(strip, tree);
  Word w;
  for (const auto& v : local_vars(strip, tree)) {
    int id = alphabet.id_of(v);
    if (id < 0) throw CodecError("encode: letter missing from the alphabet");
    w.letters.push_back(id);
  }
  return w;
}

SpanningTree decode(const Word& word, const StripGraph& strip, const Alphabet& alphabet) {
  const int levels = strip.levels();
  if (static_cast<int>(word.letters.size()) != levels)
    throw CodecError("decode: word length does not match the strip");
  for (int id : word.letters)
    if (id < 0 || id >= alphabet.size()) throw CodecError("decode: unknown letter id");

  const int bb = alphabet.backbone_id();
  if (!alphabet.follows(bb, word.letters.front()) ||
      !alphabet.follows(word.letters.back(), bb))
    throw CodecError("decode: matching violated at the strip boundary");
  for (int i = 0; i + 1 < levels; ++i)
    if (!alphabet.follows(word.letters[i], word.letters[i + 1]))
      throw CodecError("decode: matching violated");

  std::set<int> edges;
  for (int i = 0; i < levels; ++i) {
    const int n = strip.lo() + i;
    const LocalTreeVar& v = alphabet.letter(word.letters[i]);
    for (int k : v.f_vertical) edges.insert(strip.find_edge(2 * n, k));
    if (n > strip.lo())
      for (int u : v.f_left) edges.insert(strip.find_edge(2 * n - 1, u));
    else if (v.f_left != std::vector<int>{strip.base().pin})
      throw CodecError("decode: left boundary letter is not backbone-compatible");
    if (n < strip.hi())
      for (int u : v.f_right) edges.insert(strip.find_edge(2 * n + 1, u));
    else if (v.f_right != std::vector<int>{strip.base().pin})
      throw CodecError("decode: right boundary letter is not backbone-compatible");
  }
  SpanningTree t;
  t.edges.assign(edges.begin(), edges.end());
  if (!is_spanning_tree(strip, t))
    throw CodecError("decode: reconstructed edge set is not a spanning tree");
  return t;
}

std::vector<Word> enumerate_words(const Alphabet& alphabet, int length) {
  std::vector<Word> out;
  Word current;
  const int bb = alphabet.backbone_id();
  std::function<void(int, int)> rec = [&](int prev, int remaining) {
    if (remaining == 0) {
      if (alphabet.follows(prev, bb)) out.push_back(current);
      return;
    }
    for (int id = 0; id < alphabet.size(); ++id) {
      if (!alphabet.follows(prev, id)) continue;
      current.letters.push_back(id);
      rec(id, remaining - 1);
      current.letters.pop_back();
    }
  };
  rec(bb, length);
  return out;
}

double count_words(const Alphabet& alphabet, int length) {
  const int n = alphabet.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (alphabet.follows(i, j)) m(i, j) = 1;
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
  for (int k = 0; k < length + 1; ++k) p = p * m;
  return p(alphabet.backbone_id(), alphabet.backbone_id());
}

namespace {

nlohmann::json var_to_json(const LocalTreeVar& v) {
  return nlohmann::json{{"f_vertical", v.f_vertical}, {"f_left", v.f_left},
                        {"f_right", v.f_right},       {"a_left", v.a_left},
                        {"a_right", v.a_right},       {"b_left", v.b_left},
                        {"b_right", v.b_right}};
}

LocalTreeVar var_from_json(const nlohmann::json& j) {
  LocalTreeVar v;
  v.f_vertical = j.at("f_vertical").get<std::vector<int>>();
  v.f_left = j.at("f_left").get<std::vector<int>>();
  v.f_right = j.at("f_right").get<std::vector<int>>();
  v.a_left = j.at("a_left").get<std::vector<std::vector<int>>>();
  v.a_right = j.at("a_right").get<std::vector<std::vector<int>>>();
  v.b_left = j.at("b_left").get<int>();
  v.b_right = j.at("b_right").get<int>();
  return v;
}

}  // namespace

std::string Alphabet::to_json() const {
  nlohmann::json j;
  j["letters"] = nlohmann::json::array();
  for (const auto& v : letters_) j["letters"].push_back(var_to_json(v));
  j["backbone"] = bb_id_;
  nlohmann::json pairs = nlohmann::json::array();
  for (int a = 0; a < size(); ++a)
    for (int b = 0; b < size(); ++b)
      if (follows_[a][b]) pairs.push_back({a, b});
  j["follows"] = pairs;
  j["diameter"] = diameter_;
  j["stabilized_width"] = width_;
  return j.dump(2);
}

Alphabet Alphabet::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Alphabet a;
  for (const auto& lj : j.at("letters")) a.letters_.push_back(var_from_json(lj));
  a.bb_id_ = j.at("backbone").get<int>();
  a.follows_.assign(a.size(), std::vector<uint8_t>(a.size(), 0));
  for (const auto& p : j.at("follows")) a.follows_[p.at(0).get<int>()][p.at(1).get<int>()] = 1;
  a.diameter_ = j.at("diameter").get<int>();
  a.width_ = j.at("stabilized_width").get<int>();
  return a;
}

}  // namespace sigmastrip
