#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "sigmastrip/blocks.hpp"

namespace sigmastrip {

// Tensor Gauss-Legendre truncation of the vertical gradient coordinates and
// of the horizontal integral. Nodes are symmetric about zero unless hor_shift
// is set (the deliberate symmetry-breaking control).
struct GridSpec {
  double radius = 4.0;
  int points_per_dim = 7;  // odd, >= 3
  double hor_radius = 6.0;
  int hor_points = 20;
  double hor_shift = 0.0;
  // Node count per dimension of the dedicated rule that integrates the
  // compactly supported cutoff term of the tilted kernel over its own
  // support box; the global rule is far too coarse there.
  int cutoff_points = 24;

  void validate() const;
  static GridSpec defaults(const Weights& weights, double eta);
};

// Gauss-Legendre nodes/weights on [-r + shift, r + shift].
void gauss_legendre(int n, double r, double shift, std::vector<double>& nodes,
                    std::vector<double>& weights);

enum class KernelKind { Plain, ShiftPlus, ShiftMinus, Tilted };

// Dense transfer operator on (vertical grid node, letter) states. Column
// quadrature weights are baked into the matrix, so apply() is the discrete
// integral operator; inner products carry the state weights.
struct KernelMatrix {
  KernelKind kind = KernelKind::Plain;
  double alpha = 0;
  Eigen::MatrixXd m;
  Eigen::VectorXd state_weight;

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const { return m * f; }
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& g) const {
    return (m.transpose() * state_weight.cwiseProduct(g)).cwiseQuotient(state_weight);
  }
  double dot(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
    return f.cwiseProduct(g).dot(state_weight);
  }
};

class TransferSystem {
 public:
  TransferSystem(const BaseGraph& base, const Weights& weights, const Alphabet& alphabet,
                 GridSpec grid, double eta = 1.0);

  int n_states() const { return n_states_; }
  int n_nodes() const { return n_nodes_; }
  const BlockSystem& blocks() const { return blocks_; }
  const Alphabet& alphabet() const { return blocks_.alphabet(); }
  const GridSpec& grid() const { return grid_; }
  double eta() const { return eta_; }

  KernelMatrix assemble(KernelKind kind, double alpha = 0) const;
  Eigen::VectorXd left_cap() const;
  Eigen::VectorXd right_cap() const;
  double dot(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const;

  int state_of(int node, int tau) const { return node * alphabet().size() + tau; }
  int tau_of(int state) const { return state % alphabet().size(); }
  int node_of(int state) const { return state / alphabet().size(); }
  const std::vector<double>& node_coords(int node) const { return node_coords_[node]; }

 private:
  BlockSystem blocks_;
  GridSpec grid_;
  double eta_;
  int n_nodes_ = 0, n_states_ = 0;
  std::vector<std::vector<double>> node_coords_;  // vertical_dim() values per node
  std::vector<double> node_weight_;
  std::vector<double> hor_nodes_, hor_weights_;   // per horizontal coordinate
  std::vector<std::vector<double>> level_cache_;  // level_energy per (node, tau)
};

struct SpectralData {
  double lambda = 0;
  Eigen::VectorXd phi_right, phi_left;  // entrywise positive, <phi_l, phi_r> = 1
  double gap_ratio = 0;                 // fitted a with ||lambda^-n K^n - P|| = O(a^n)
  double gap_fit_r2 = 0;
  double residual_right = 0, residual_left = 0;
  int iterations = 0;
};

SpectralData perron(const KernelMatrix& k, double tol = 1e-11, int max_iter = 200000);

struct GapFit {
  double ratio = 0;
  double r2 = 0;
  std::vector<double> norms;  // ||lambda^-n K^n - P||_F for n = 1..n_max
};
GapFit fit_gap(const KernelMatrix& k, const SpectralData& s, int n_max = 20, int n_fit_min = 5);

// |<phi_left, tilted_0 phi_right>| / lambda; zero up to quadrature rounding on
// reflection-symmetric grids.
double symmetry_defect(const TransferSystem& sys, const SpectralData& spectral);

// <phi_l, (K_alpha - K_0) phi_r> = 2 alpha lambda c4; returns c4.
double c4_estimate(const TransferSystem& sys, const SpectralData& spectral,
                   double alpha = 0.01);

struct EnergyEstimate {
  double value = 0;  // E(alpha) on the given strip
  double c4 = 0;
  double c3 = 0;  // value - alpha * l * c4
  double normalization = 0;
};
EnergyEstimate energy_transfer(const TransferSystem& sys, int lo, int hi, int l, double alpha);

// Discrete check that the capped chain with no tilt integrates to one.
double cap_normalization(const TransferSystem& sys, int lo, int hi);

// Optimal deformation size and the decay rate it certifies.
std::pair<double, double> predicted_decay(double c4, double c5, double eta, double c9);

}  // namespace sigmastrip
