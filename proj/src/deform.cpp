#include "sigmastrip/deform.hpp"

#include <cmath>
#include <stdexcept>

namespace sigmastrip {

double chi_tilde(double x) {
  if (x <= 0.5) return 1.0;
  if (x >= 1.0) return 0.0;
  const double u = 2.0 * x - 1.0;  // in (0,1)
  return 1.0 - u * u * (3.0 - 2.0 * u);
}

double chi_tilde_prime(double x) {
  if (x <= 0.5 || x >= 1.0) return 0.0;
  const double u = 2.0 * x - 1.0;
  return -12.0 * u * (1.0 - u);
}

namespace {

// Squared norm of the vertical gradient block at a level.
double vertical_block_sq(const StripGraph& strip, const GradientConfig& g, int level, int pos) {
  const int bi = strip.backbone_index_vertical(level, pos);
  return g.grad_t[bi] * g.grad_t[bi] + g.grad_y[bi] * g.grad_y[bi];
}

double vertical_factor(const StripGraph& strip, const GradientConfig& g, int n, double eta) {
  double f = 1.0;
  const int ns = static_cast<int>(strip.base().tree.size());
  for (int pos = 0; pos < ns; ++pos) {
    f *= chi_tilde(vertical_block_sq(strip, g, n, pos) / (eta * eta));
    f *= chi_tilde(vertical_block_sq(strip, g, n + 1, pos) / (eta * eta));
  }
  return f;
}

void require_invertible(const DeformationParams& p) {
  if (!(p.eta > 0)) throw std::invalid_argument("deform: eta must be positive");
  if (!(p.c9 > 0) || !(p.c9 < 1.0 / (2.0 * kChiTildePrimeSup)))
    throw std::invalid_argument("deform: c9 outside (0, 1/(2 sup|chi'|))");
  if (std::abs(p.alpha) > p.c9 * p.eta)
    throw std::invalid_argument("deform: |alpha| exceeds c9 * eta");
}

}  // namespace

double cutoff_chi(const StripGraph& strip, const GradientConfig& g, int n, double eta) {
  const int bi = strip.backbone_index_pin(n);
  const double hor_sq = g.grad_t[bi] * g.grad_t[bi] + g.grad_y[bi] * g.grad_y[bi];
  return chi_tilde(hor_sq / (eta * eta)) * vertical_factor(strip, g, n, eta);
}

double cutoff_chi_dhor(const StripGraph& strip, const GradientConfig& g, int n, double eta) {
  const int bi = strip.backbone_index_pin(n);
  const double hor_sq = g.grad_t[bi] * g.grad_t[bi] + g.grad_y[bi] * g.grad_y[bi];
  return chi_tilde_prime(hor_sq / (eta * eta)) * (2.0 * g.grad_t[bi] / (eta * eta)) *
         vertical_factor(strip, g, n, eta);
}

GradientConfig deform(const StripGraph& strip, const GradientConfig& g,
                      const DeformationParams& p, int l) {
  require_invertible(p);
  if (l > strip.hi()) throw std::out_of_range("deform: level outside the strip");
  GradientConfig out = g;
  for (int n = 0; n <= l - 1; ++n) {
    const int bi = strip.backbone_index_pin(n);
    out.grad_t[bi] = g.grad_t[bi] + p.alpha * cutoff_chi(strip, g, n, p.eta);
  }
  return out;
}

double deform_log_jacobian(const StripGraph& strip, const GradientConfig& g,
                           const DeformationParams& p, int l) {
  require_invertible(p);
  double sum = 0;
  for (int n = 0; n <= l - 1; ++n) {
    const double factor = 1.0 + p.alpha * cutoff_chi_dhor(strip, g, n, p.eta);
    if (!(factor > 0)) throw std::runtime_error("deform: non-positive Jacobian factor");
    sum += std::log(factor);
  }
  return sum;
}

GradientConfig deform_inverse(const StripGraph& strip, const GradientConfig& g,
                              const DeformationParams& p, int l, double tol, int max_iter) {
  require_invertible(p);
  GradientConfig out = g;
  // Only the shifted coordinates move; each one solves u + alpha*chi(u) = v
  // with all other coordinates frozen at their (unchanged) values.
  for (int n = 0; n <= l - 1; ++n) {
    const int bi = strip.backbone_index_pin(n);
    const double target = g.grad_t[bi];
    double u = target;
    for (int it = 0; it < max_iter; ++it) {
      GradientConfig probe = out;
      probe.grad_t[bi] = u;
      const double next = target - p.alpha * cutoff_chi(strip, probe, n, p.eta);
      if (std::abs(next - u) <= tol) {
        u = next;
        break;
      }
      u = next;
    }
    out.grad_t[bi] = u;
  }
  return out;
}

double entropy_c12(const BaseGraph& base, const Weights& weights, double eta, double c9) {
  const double ns = static_cast<double>(base.tree.size());
  double beta_max = 0;
  for (double b : weights.horizontal) beta_max = std::max(beta_max, b);
  const double half_edges = static_cast<double>(base.n);
  return half_edges * beta_max *
         (std::cosh(eta * (2.0 * ns + 1.0 + c9)) +
          3.0 * ns * ns * eta * eta * std::exp(eta * (2.0 * ns + c9)));
}

double entropy_c13(double eta, double c9) {
  const double d = kChiTildePrimeSup;
  const double denom = eta * (1.0 - 2.0 * c9 * d);
  return 4.0 * d * d / (denom * denom);
}

double entropy_constant(const BaseGraph& base, const Weights& weights, double eta, double c9) {
  return 0.5 * (entropy_c12(base, weights, eta, c9) + entropy_c13(eta, c9));
}

}  // namespace sigmastrip
