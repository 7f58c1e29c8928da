#pragma once

#include <vector>

#include "sigmastrip/codec.hpp"
#include "sigmastrip/measure.hpp"

namespace sigmastrip {

// Local form of the interpolated Hamiltonian: per-level and per-half-level
// energies evaluated on (gradient block, letter) states. A vertical gradient
// block omega holds the tree-oriented t-gradients of the base-tree copies in
// base-tree order followed by the matching y-gradients, so its dimension is
// 2 * |base tree|. The horizontal block is the (t, y) gradient pair of the
// pin-line edge between two levels.
//
// Hard matching constraints are encoded as +infinity, which exponentiation
// maps to weight zero.
class BlockSystem {
 public:
  BlockSystem(const BaseGraph& base, const Weights& weights, const Alphabet& alphabet);

  const Alphabet& alphabet() const { return alphabet_; }
  int tree_edges() const { return ns_; }
  int vertical_dim() const { return 2 * ns_; }

  // Sum of the per-edge terms of the level copy: the omega pointer addresses
  // vertical_dim() doubles.
  double level_energy(const double* omega, int tau) const;
  // Sum over the base vertices of the half-level edge terms; +infinity when
  // the letters do not match.
  double bond_energy(const double* omega, int tau, double dt_hor, double y_hor,
                     const double* omega2, int tau2) const;
  // Same, with the window coordinate arrays (2*tree_edges()+1 each, layout
  // [left level, pin edge, right level]) filled by the caller.
  double bond_energy_window(const double* tc, const double* yc, int tau, int tau2) const;
  // Half level energy on each side plus the bond between them.
  double block_energy(const double* omega, int tau, double dt_hor, double y_hor,
                      const double* omega2, int tau2) const;
  // block_energy +- dt_hor / 2 (the interpolation boundary terms).
  double block_energy_shifted(int sign, const double* omega, int tau, double dt_hor,
                              double y_hor, const double* omega2, int tau2) const;
  // Half level energy plus the backbone matching constraint at the open end.
  double left_cap_energy(const double* omega, int tau) const;
  double right_cap_energy(const double* omega, int tau) const;

  // Deformation cutoff on a block triple (independent of the letters).
  double cutoff(const double* omega, double dt_hor, double y_hor, const double* omega2,
                double eta) const;

  // Letter-independent pieces of the bond, for fast kernel assembly: the
  // bookkeeping-oriented gradients of the half-level edge of base vertex v.
  void horizontal_gradients(const double* tc, const double* yc, int v, double& dt,
                            double& y) const;
  // Letter-dependent piece as a small code: 0 absent, 1 on the backbone,
  // 2 in the tree oriented low->high, 3 in the tree oriented high->low.
  int horizontal_code(int tau, int v) const;
  double beta_horizontal(int v) const { return beta_horizontal_[v]; }
  int base_vertices() const { return n0_; }

 private:
  struct YTerm {
    int coord;
    double sign;
    std::vector<std::pair<int, double>> expo;  // (t-coordinate, weight)
  };
  struct EdgeFormula {
    std::vector<std::pair<int, double>> dt;
    std::vector<YTerm> y;
  };
  struct Facts {
    bool in_tree = false;
    double orient = 0;  // +1 if tree orientation matches bookkeeping
    bool on_backbone = false;
  };

  double edge_term(const EdgeFormula& formula, const Facts& facts, double beta,
                   const double* tc, const double* yc, double bb_coordinate) const;

  const Alphabet& alphabet_;
  int ns_ = 0;
  int n0_ = 0;
  std::vector<double> beta_vertical_, beta_horizontal_;
  std::vector<int> tree_pos_of_edge_;             // E0 index -> base-tree position or -1
  std::vector<EdgeFormula> vertical_formulas_;    // per E0 edge, level-window coordinates
  std::vector<EdgeFormula> horizontal_formulas_;  // per V0 vertex, full window coordinates
  std::vector<std::vector<Facts>> vertical_facts_;    // [tau][E0 edge]
  std::vector<std::vector<Facts>> horizontal_facts_;  // [tau][V0 vertex], edge v_{+1/2}
};

// Interpolated Hamiltonian assembled from caps and blocks along the strip.
double block_sum_hamiltonian(const StripGraph& strip, const BlockSystem& blocks,
                             const GradientConfig& g, const Word& word, int l);

}  // namespace sigmastrip
