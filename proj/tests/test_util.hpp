#pragma once

// Shared numeric helpers for the test and acceptance suites.

#include <cmath>
#include <functional>
#include <vector>

#include "sigmastrip/measure.hpp"
#include "sigmastrip/transfer.hpp"

namespace testutil {

// Quadrature of obs(t0, s0) against the full field density of the
// single-vertex strip. The s integral is rescaled per t node so a fixed rule
// tracks the t-dependent Gaussian width.
inline double single_vertex_quadrature(
    const sigmastrip::StripGraph& strip,
    const std::function<double(double, double)>& obs) {
  std::vector<double> tn, tw, un, uw;
  sigmastrip::gauss_legendre(240, 12.0, 0.0, tn, tw);
  sigmastrip::gauss_legendre(80, 8.0, 0.0, un, uw);
  const double eps = strip.weights().epsilon;
  double total = 0;
  for (size_t i = 0; i < tn.size(); ++i) {
    const double t = tn[i];
    const double sigma = std::exp(-0.5 * t) / std::sqrt(eps);
    double inner = 0;
    for (size_t j = 0; j < un.size(); ++j) {
      const double s = sigma * un[j];
      sigmastrip::FieldConfig f;
      f.t = Eigen::VectorXd::Constant(1, t);
      f.s = Eigen::VectorXd::Constant(1, s);
      inner += uw[j] * sigma * std::exp(log_density(strip, f)) * obs(t, s);
    }
    total += tw[i] * inner;
  }
  return total;
}

}  // namespace testutil
