#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sigmastrip/graph.hpp"

namespace sigmastrip {

// Summary of a spanning tree's structure at one level: the tree edges in the
// window (level -1/2, level 0, level +1/2), the left/right connectivity
// partitions, and the first/last level-0 vertex visited by the tree's
// backbone. Vertices/edges are base-graph indices, partitions are stored in
// canonical sorted form so equality is structural.
struct LocalTreeVar {
  std::vector<int> f_vertical;            // E0 indices present at level 0
  std::vector<int> f_left;                // V0 indices v with v_{-1/2} in the tree
  std::vector<int> f_right;               // V0 indices v with v_{+1/2} in the tree
  std::vector<std::vector<int>> a_left;   // partition of f_left
  std::vector<std::vector<int>> a_right;  // partition of f_right
  int b_left = 0;
  int b_right = 0;

  auto operator<=>(const LocalTreeVar&) const = default;
  bool operator==(const LocalTreeVar&) const = default;
};

LocalTreeVar reflect_var(const LocalTreeVar& v);
LocalTreeVar backbone_var(const BaseGraph& base);  // the letter of the backbone tree

// Local edge address inside a level window.
enum class LocalSlot { LeftHalf, Vertical, RightHalf };
struct LocalEdge {
  LocalSlot slot;
  int index;  // V0 index for half levels, E0 index for Vertical
};

struct EdgeFacts {
  bool in_tree = false;
  // Tree orientation: true if the tree's tail (the endpoint nearer the left
  // end of the backbone) is the bookkeeping tail (lower level resp. lower
  // base id). Meaningful only when in_tree.
  bool tail_is_low = false;
  bool on_backbone = false;
};

// Recover membership / orientation / backbone status of a window edge from
// the local variable alone.
EdgeFacts recover_edge(const BaseGraph& base, const LocalTreeVar& var, LocalEdge e);

// All spanning trees of the strip (no duplicates). Guarded: strips beyond
// `max_vertices` are refused since the tree count explodes.
std::vector<SpanningTree> enumerate_spanning_trees(const StripGraph& strip,
                                                   int max_vertices = 14);
// Unweighted spanning tree count via the Kirchhoff determinant.
double spanning_tree_count(const StripGraph& strip);

// Local variable of `tree` at one level / at every level lo..hi. Outside the
// strip the tree is extended by backbone copies.
LocalTreeVar local_var(const StripGraph& strip, const SpanningTree& tree, int level);
std::vector<LocalTreeVar> local_vars(const StripGraph& strip, const SpanningTree& tree);

struct Word {
  std::vector<int> letters;  // alphabet ids, one per level lo..hi
  bool operator==(const Word&) const = default;
};

// The finite letter set with its matching relation, built by enumerating
// spanning trees of strips of growing half-width until the observed letters
// and matched pairs stop changing.
class Alphabet {
 public:
  int size() const { return static_cast<int>(letters_.size()); }
  const LocalTreeVar& letter(int id) const { return letters_[id]; }
  int id_of(const LocalTreeVar& v) const;  // -1 if unknown
  int backbone_id() const { return bb_id_; }
  bool follows(int a, int b) const { return follows_[a][b] != 0; }
  int pair_count() const;
  int diameter() const { return diameter_; }          // directed BFS diameter of (letters, follows)
  int stabilized_width() const { return width_; }

  std::string to_json() const;
  static Alphabet from_json(const std::string& text);

  friend Alphabet build_alphabet(const BaseGraph& base, int max_width, int max_vertices);
  bool operator==(const Alphabet& other) const;

 private:
  std::vector<LocalTreeVar> letters_;
  std::vector<std::vector<uint8_t>> follows_;
  int bb_id_ = -1;
  int diameter_ = 0;
  int width_ = 0;

  void finalize();
};

Alphabet build_alphabet(const BaseGraph& base, int max_width = 8, int max_vertices = 18);

struct CodecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Word encode(const StripGraph& strip, const SpanningTree& tree, const Alphabet& alphabet);
SpanningTree decode(const Word& word, const StripGraph& strip, const Alphabet& alphabet);

// All words of the given length (strip levels) admitted by the matching
// relation, and their count via powers of the matching matrix.
std::vector<Word> enumerate_words(const Alphabet& alphabet, int length);
double count_words(const Alphabet& alphabet, int length);

}  // namespace sigmastrip
