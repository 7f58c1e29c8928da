#pragma once

#include <Eigen/Dense>
#include <utility>

#include "sigmastrip/graph.hpp"

namespace sigmastrip {

struct FieldConfig {
  Eigen::VectorXd t;
  Eigen::VectorXd s;
};

// Backbone-tree gradient coordinates of a field configuration. grad_t/grad_y
// are indexed by the strip's backbone coordinate order (backbone_index).
struct GradientConfig {
  double t0 = 0;
  double s0 = 0;
  Eigen::VectorXd grad_t;
  Eigen::VectorXd grad_y;
};

// Weighted graph Laplacian A_L(t): off-diagonal -beta_ij e^{t_i+t_j}, rows sum
// to zero.
Eigen::MatrixXd weight_matrix(const StripGraph& strip, const Eigen::VectorXd& t);
// A_L(t) plus the pinning term epsilon e^{t_0} at the pin vertex.
Eigen::MatrixXd pinned_weight_matrix(const StripGraph& strip, const Eigen::VectorXd& t);

double coupling_energy(const StripGraph& strip, const Eigen::VectorXd& t);  // sum beta (cosh grad - 1)
double s_quadratic_form(const StripGraph& strip, const Eigen::VectorXd& t,
                        const Eigen::VectorXd& s);
double pin_energy(const StripGraph& strip, double t0, double s0);
double log_det_pinned(const StripGraph& strip, const Eigen::VectorXd& t);

// Log of the full field density, reference factors e^{-t_j}/(2 pi) included.
double log_density(const StripGraph& strip, const FieldConfig& f);
// Same value assembled from the per-tree decomposition (enumeration oracle).
double log_density_by_tree_sum(const StripGraph& strip, const FieldConfig& f,
                               int max_vertices = 14);

// (dense determinant, epsilon e^{t_0} weighted spanning tree sum).
std::pair<double, double> matrix_tree_check(const StripGraph& strip, const Eigen::VectorXd& t,
                                            int max_vertices = 12);

// Hamiltonian of the (fields, tree) pair before the gradient change of
// variables; density of the joint measure is e^{-H} / (2 pi)^{|V|}.
double tree_hamiltonian(const StripGraph& strip, const FieldConfig& f, const SpanningTree& tree);
// Pin-block Hamiltonian; e^{-H_pin} integrates to one.
double pin_hamiltonian(const StripGraph& strip, double t0, double s0);
// Log Jacobian of the (t,s) -> (t0, s0, gradients) change of variables.
double log_gradient_jacobian(const StripGraph& strip, const Eigen::VectorXd& t);

GradientConfig to_gradient(const StripGraph& strip, const FieldConfig& f);
FieldConfig from_gradient(const StripGraph& strip, const GradientConfig& g);

// t_j - t_i from gradient coordinates, via the signed sum along the backbone
// tree path.
double t_difference(const StripGraph& strip, const GradientConfig& g, int i, int j);
// Rescaled s-gradient (s_head - s_tail) e^{(t_tail+t_head)/2} of an oriented
// edge, from gradient coordinates alone.
double y_edge(const StripGraph& strip, const GradientConfig& g, int tail, int head);

// Gradient-block Hamiltonian of (gradients, tree); e^{-H} summed over trees
// and integrated is one.
double grad_hamiltonian(const StripGraph& strip, const GradientConfig& g,
                        const SpanningTree& tree);
// Hamiltonian of the measure tilted by e^{(t_level - t_0)/2}, written as a sum
// of per-edge terms plus backbone boundary terms.
double interpolated_hamiltonian(const StripGraph& strip, const GradientConfig& g,
                                const SpanningTree& tree, int l);

}  // namespace sigmastrip
