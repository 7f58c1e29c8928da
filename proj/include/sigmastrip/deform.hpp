#pragma once

#include "sigmastrip/measure.hpp"

namespace sigmastrip {

struct DeformationParams {
  double alpha = 0.0;
  double eta = 1.0;
  double c9 = 0.15;  // must stay below 1 / (2 sup|chi_tilde'|) = 1/6
};

// C^1 plateau cutoff: 1 on x <= 1/2, 0 on x >= 1, cubic in between.
// sup |chi_tilde'| = 3 exactly (attained at x = 3/4).
double chi_tilde(double x);
double chi_tilde_prime(double x);
inline constexpr double kChiTildePrimeSup = 3.0;

// chi at the half level n+1/2: product of plateau cutoffs of the squared
// norms of the vertical gradient blocks at levels n and n+1 and of the
// horizontal block at n+1/2, all scaled by eta^-2.
double cutoff_chi(const StripGraph& strip, const GradientConfig& g, int n, double eta);
// Derivative of cutoff_chi with respect to the horizontal t-gradient at n+1/2.
double cutoff_chi_dhor(const StripGraph& strip, const GradientConfig& g, int n, double eta);

// Shift the horizontal backbone t-gradients between the pin and level l by
// alpha * chi. Requires |alpha| <= c9 * eta so the map stays invertible.
GradientConfig deform(const StripGraph& strip, const GradientConfig& g,
                      const DeformationParams& p, int l);
double deform_log_jacobian(const StripGraph& strip, const GradientConfig& g,
                           const DeformationParams& p, int l);
// Inverse by per-coordinate fixed-point iteration.
GradientConfig deform_inverse(const StripGraph& strip, const GradientConfig& g,
                              const DeformationParams& p, int l,
                              double tol = 1e-14, int max_iter = 200);

// Quadratic entropy-bound constants for the deformed measure.
double entropy_c12(const BaseGraph& base, const Weights& weights, double eta, double c9);
double entropy_c13(double eta, double c9);
// c5 = (c12 + c13) / 2.
double entropy_constant(const BaseGraph& base, const Weights& weights, double eta, double c9);

}  // namespace sigmastrip
