#include "sigmastrip/transfer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sigmastrip {

void GridSpec::validate() const {
  if (points_per_dim < 3 || points_per_dim % 2 == 0)
    throw std::invalid_argument("grid: points_per_dim must be odd and >= 3");
  if (hor_points < 3) throw std::invalid_argument("grid: too few horizontal nodes");
  if (!(radius > 0) || !(hor_radius > 0)) throw std::invalid_argument("grid: radius must be positive");
}

GridSpec GridSpec::defaults(const Weights& weights, double eta) {
  double beta_min = std::numeric_limits<double>::infinity();
  for (double b : weights.vertical) beta_min = std::min(beta_min, b);
  for (double b : weights.horizontal) beta_min = std::min(beta_min, b);
  if (!std::isfinite(beta_min)) beta_min = 1.0;
  GridSpec g;
  g.radius = std::max(6.0 / std::sqrt(beta_min), 2.0 * eta);
  g.hor_radius = g.radius;
  // Keep the node spacing near 0.7 field units regardless of the radius,
  // otherwise a wide box is silently under-resolved.
  int p = static_cast<int>(std::ceil(2.0 * g.radius / 0.7));
  if (p % 2 == 0) ++p;
  g.points_per_dim = std::max(7, p);
  g.hor_points = std::max(20, g.points_per_dim);
  return g;
}

void gauss_legendre(int n, double r, double shift, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;  // exact midpoint for odd rules
  for (int i = 0; i < n; ++i) {
    nodes[i] = nodes[i] * r + shift;
    weights[i] *= r;
  }
}

TransferSystem::TransferSystem(const BaseGraph& base, const Weights& weights,
                               const Alphabet& alphabet, GridSpec grid, double eta)
    : blocks_(base, weights, alphabet), grid_(grid), eta_(eta) {
  grid_.validate();
  const int dim = blocks_.vertical_dim();
  std::vector<double> nodes, ws;
  gauss_legendre(grid_.points_per_dim, grid_.radius, 0.0, nodes, ws);

  n_nodes_ = 1;
  for (int d = 0; d < dim; ++d) n_nodes_ *= grid_.points_per_dim;
  node_coords_.resize(n_nodes_);
  node_weight_.assign(n_nodes_, 1.0);
  for (int node = 0; node < n_nodes_; ++node) {
    auto& c = node_coords_[node];
    c.resize(dim);
    int rem = node;
    for (int d = 0; d < dim; ++d) {
      const int k = rem % grid_.points_per_dim;
      rem /= grid_.points_per_dim;
      c[d] = nodes[k];
      node_weight_[node] *= ws[k];
    }
  }
  gauss_legendre(grid_.hor_points, grid_.hor_radius, grid_.hor_shift, hor_nodes_, hor_weights_);

  n_states_ = n_nodes_ * alphabet.size();
  level_cache_.assign(n_nodes_, std::vector<double>(alphabet.size()));
  for (int node = 0; node < n_nodes_; ++node)
    for (int tau = 0; tau < alphabet.size(); ++tau)
      level_cache_[node][tau] = blocks_.level_energy(node_coords_[node].data(), tau);

  if ((static_cast<long long>(n_states_)) > 20000)
    throw std::invalid_argument("transfer: state space exceeds the dense-size cap");
  if (!(grid_.hor_radius > eta_) || (dim > 0 && !(grid_.radius > eta_)))
    throw std::invalid_argument("transfer: truncation radius must exceed the cutoff scale eta");
}

KernelMatrix TransferSystem::assemble(KernelKind kind, double alpha) const {
  const int nl = alphabet().size();
  const int ns = blocks_.tree_edges();
  const int n0 = blocks_.base_vertices();
  KernelMatrix K;
  K.kind = kind;
  K.alpha = alpha;
  K.m.setZero(n_states_, n_states_);
  K.state_weight.resize(n_states_);
  for (int s = 0; s < n_states_; ++s) K.state_weight[s] = node_weight_[node_of(s)];

  // The bond's letter dependence is a per-vertex factor picked by a small
  // code, so the transcendental work is shared across all letter pairs.
  std::vector<std::vector<double>> cap_half(n_nodes_, std::vector<double>(nl));
  for (int n = 0; n < n_nodes_; ++n)
    for (int t = 0; t < nl; ++t) cap_half[n][t] = std::exp(-0.5 * level_cache_[n][t]);
  std::vector<int> codes(static_cast<size_t>(nl) * n0);
  for (int t = 0; t < nl; ++t)
    for (int v = 0; v < n0; ++v) codes[t * n0 + v] = blocks_.horizontal_code(t, v);
  std::vector<double> beta_over(n0);
  for (int v = 0; v < n0; ++v) beta_over[v] = blocks_.beta_horizontal(v) / 6.283185307179586;

  const double hshift =
      kind == KernelKind::ShiftPlus ? 0.5 : kind == KernelKind::ShiftMinus ? -0.5 : 0.0;
  // The tilted kernel splits into a smooth drift part, integrated on the
  // global rule, and alpha times the cutoff part, integrated on a rule
  // matched to the cutoff's support.
  std::vector<double> box_nodes, box_weights;
  if (kind == KernelKind::Tilted && alpha != 0.0)
    gauss_legendre(grid_.cutoff_points, eta_, 0.0, box_nodes, box_weights);

  std::vector<double> tc(2 * ns + 1), yc(2 * ns + 1);
  std::vector<double> acc(nl), pick(static_cast<size_t>(n0) * 4);
  for (int xn = 0; xn < n_nodes_; ++xn) {
    const auto& cx = node_coords_[xn];
    for (int pos = 0; pos < ns; ++pos) {
      tc[pos] = cx[pos];
      yc[pos] = cx[ns + pos];
    }
    for (int yn = 0; yn < n_nodes_; ++yn) {
      const auto& cy = node_coords_[yn];
      for (int pos = 0; pos < ns; ++pos) {
        tc[ns + 1 + pos] = cy[pos];
        yc[ns + 1 + pos] = cy[ns + pos];
      }
      std::fill(acc.begin(), acc.end(), 0.0);

      auto accumulate = [&](double tnode, double ynode, double qw, bool cutoff_part) {
        tc[ns] = tnode;
        yc[ns] = ynode;
        double quad_sum = 0;
        for (int v = 0; v < n0; ++v) {
          double dt, yv;
          blocks_.horizontal_gradients(tc.data(), yc.data(), v, dt, yv);
          quad_sum += blocks_.beta_horizontal(v) * (std::cosh(dt) - 1.0 + 0.5 * yv * yv);
          const double edt = std::exp(dt);
          pick[v * 4 + 0] = 1.0;
          pick[v * 4 + 1] = beta_over[v];
          pick[v * 4 + 2] = beta_over[v] / edt;
          pick[v * 4 + 3] = beta_over[v] * edt;
        }
        double base = qw * std::exp(-(quad_sum + hshift * tnode));
        if (kind == KernelKind::Tilted && base != 0.0) {
          if (cutoff_part) {
            const double chi = blocks_.cutoff(cx.data(), tnode, ynode, cy.data(), eta_);
            if (chi == 0.0) return;
            base *= alpha * chi;
          } else {
            base *= tnode;
          }
        }
        if (base == 0.0) return;
        for (int t = 0; t < nl; ++t) {
          double f = base;
          for (int v = 0; v < n0; ++v) f *= pick[v * 4 + codes[t * n0 + v]];
          acc[t] += f;
        }
      };

      for (size_t it = 0; it < hor_nodes_.size(); ++it)
        for (size_t iy = 0; iy < hor_nodes_.size(); ++iy)
          accumulate(hor_nodes_[it], hor_nodes_[iy], hor_weights_[it] * hor_weights_[iy],
                     false);
      for (size_t it = 0; it < box_nodes.size(); ++it)
        for (size_t iy = 0; iy < box_nodes.size(); ++iy)
          accumulate(box_nodes[it], box_nodes[iy], box_weights[it] * box_weights[iy], true);

      for (int ta = 0; ta < nl; ++ta) {
        if (acc[ta] == 0.0) continue;
        const double left = cap_half[xn][ta] * acc[ta] * node_weight_[yn];
        for (int tb = 0; tb < nl; ++tb)
          if (alphabet().follows(ta, tb))
            K.m(state_of(xn, ta), state_of(yn, tb)) = left * cap_half[yn][tb];
      }
    }
  }
  if (kind != KernelKind::Tilted) {
    // A vanishing backbone-letter row means the truncation swallowed all of
    // the kernel's mass there.
    const int bb = alphabet().backbone_id();
    for (int n = 0; n < n_nodes_; ++n)
      if (K.m.row(state_of(n, bb)).cwiseAbs().maxCoeff() == 0.0)
        throw std::runtime_error("transfer: all-zero backbone row (truncation radius too small)");
  }
  return K;
}

Eigen::VectorXd TransferSystem::left_cap() const {
  Eigen::VectorXd v(n_states_);
  for (int s = 0; s < n_states_; ++s) {
    const int tau = tau_of(s);
    v[s] = alphabet().follows(alphabet().backbone_id(), tau)
               ? std::exp(-0.5 * level_cache_[node_of(s)][tau])
               : 0.0;
  }
  return v;
}

Eigen::VectorXd TransferSystem::right_cap() const {
  Eigen::VectorXd v(n_states_);
  for (int s = 0; s < n_states_; ++s) {
    const int tau = tau_of(s);
    v[s] = alphabet().follows(tau, alphabet().backbone_id())
               ? std::exp(-0.5 * level_cache_[node_of(s)][tau])
               : 0.0;
  }
  return v;
}

double TransferSystem::dot(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
  double acc = 0;
  for (int s = 0; s < n_states_; ++s) acc += node_weight_[node_of(s)] * f[s] * g[s];
  return acc;
}

namespace {

double weighted_norm(const KernelMatrix& k, const Eigen::VectorXd& f) {
  return std::sqrt(k.dot(f, f));
}

}  // namespace

SpectralData perron(const KernelMatrix& k, double tol, int max_iter) {
  const int n = static_cast<int>(k.m.rows());
  SpectralData out;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd u = Eigen::VectorXd::Ones(n);
  v /= weighted_norm(k, v);
  u /= weighted_norm(k, u);
  double lam = 0, lam_left = 0;
  int it = 0;
  bool converged = false;
  for (; it < max_iter && !converged; ++it) {
    Eigen::VectorXd vn = k.apply(v);
    const double nv = weighted_norm(k, vn);
    if (!(nv > 0)) throw std::runtime_error("perron: operator annihilated the iterate");
    vn /= nv;
    Eigen::VectorXd un = k.apply_adjoint(u);
    const double nu = weighted_norm(k, un);
    un /= nu;
    lam = nv;
    lam_left = nu;
    v = vn;
    u = un;
    if (it % 8 == 7 || it + 1 == max_iter) {
      const double rr = (k.apply(v) - lam * v).cwiseAbs().maxCoeff() / lam;
      const double rl = (k.apply_adjoint(u) - lam_left * u).cwiseAbs().maxCoeff() / lam_left;
      converged = rr <= tol && rl <= tol && std::abs(lam - lam_left) <= 1e-9 * lam;
    }
  }
  if (!converged) throw std::runtime_error("perron: power iteration did not converge");

  if (v.sum() < 0) v = -v;
  if (u.sum() < 0) u = -u;
  const double scale = k.dot(u, v);
  if (!(scale > 0)) throw std::runtime_error("perron: left/right eigenvector pairing degenerate");
  u /= scale;

  out.lambda = lam;
  out.phi_right = v;
  out.phi_left = u;
  out.iterations = it + 1;
  out.residual_right = (k.apply(v) - lam * v).cwiseAbs().maxCoeff() / lam;
  out.residual_left = (k.apply_adjoint(u) - lam * u).cwiseAbs().maxCoeff() / lam;

  const double floor_right = v.minCoeff();
  const double floor_left = u.minCoeff();
  if (floor_right <= 0 || floor_left <= 0)
    throw std::runtime_error("perron: eigenvector has a non-positive entry");
  return out;
}

GapFit fit_gap(const KernelMatrix& k, const SpectralData& s, int n_max, int n_fit_min) {
  const int n = static_cast<int>(k.m.rows());
  // Projection in the weighted convention: P f = <phi_l, f> phi_r.
  Eigen::MatrixXd p(n, n);
  for (int j = 0; j < n; ++j) p.col(j) = s.phi_right * (s.phi_left[j] * k.state_weight[j]);
  const Eigen::MatrixXd b = k.m / s.lambda;
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  GapFit fit;
  for (int i = 1; i <= n_max; ++i) {
    power = b * power;
    fit.norms.push_back((power - p).norm());
  }
  std::vector<double> xs, ys;
  for (int i = n_fit_min; i <= n_max; ++i) {
    const double v = fit.norms[i - 1];
    if (v > 1e-13) {
      xs.push_back(i);
      ys.push_back(std::log(v));
    }
  }
  if (xs.size() < 4) {
    // Decay hit the rounding floor almost immediately; report a tiny ratio.
    fit.ratio = 1e-8;
    fit.r2 = 1.0;
    return fit;
  }
  const double nn = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / nn;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / nn;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double pred = slope * xs[i] + intercept;
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
  }
  fit.ratio = std::exp(slope);
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

double symmetry_defect(const TransferSystem& sys, const SpectralData& spectral) {
  KernelMatrix tilted0 = sys.assemble(KernelKind::Tilted, 0.0);
  const double val = tilted0.dot(spectral.phi_left, tilted0.apply(spectral.phi_right));
  return std::abs(val) / spectral.lambda;
}

double c4_estimate(const TransferSystem& sys, const SpectralData& spectral,
                   double alpha) {
  KernelMatrix ka = sys.assemble(KernelKind::Tilted, alpha);
  KernelMatrix k0 = sys.assemble(KernelKind::Tilted, 0.0);
  const Eigen::VectorXd diff = ka.apply(spectral.phi_right) - k0.apply(spectral.phi_right);
  const double val = ka.dot(spectral.phi_left, diff);
  const double c4 = val / (2.0 * alpha * spectral.lambda);
  if (!(c4 > 0)) throw std::runtime_error("c4_estimate: non-positive value (grid or cutoff misconfigured)");
  return c4;
}

EnergyEstimate energy_transfer(const TransferSystem& sys, int lo, int hi, int l, double alpha) {
  if (!(lo <= 0 && 0 < l && l <= hi))
    throw std::invalid_argument("energy_transfer: need lo <= 0 < l <= hi");
  KernelMatrix k = sys.assemble(KernelKind::Plain);
  KernelMatrix kp = sys.assemble(KernelKind::ShiftPlus);
  KernelMatrix km = sys.assemble(KernelKind::ShiftMinus);
  KernelMatrix kt = sys.assemble(KernelKind::Tilted, alpha);

  Eigen::VectorXd u = sys.left_cap();
  for (int i = 0; i < -lo; ++i) u = km.apply_adjoint(u);
  Eigen::VectorXd v = sys.right_cap();
  for (int i = 0; i < hi - l; ++i) v = kp.apply(v);

  std::vector<Eigen::VectorXd> right(l);  // K^j v
  right[0] = v;
  for (int j = 1; j < l; ++j) right[j] = k.apply(right[j - 1]);
  const double denom = k.dot(u, k.apply(right[l - 1]));
  if (!(std::abs(denom) > 1e-300))
    throw std::runtime_error("energy_transfer: normalization underflow");

  Eigen::VectorXd un = u;
  double acc = 0;
  for (int n = 0; n < l; ++n) {
    acc += k.dot(un, kt.apply(right[l - 1 - n]));
    if (n + 1 < l) un = k.apply_adjoint(un);
  }
  EnergyEstimate e;
  e.value = 0.5 * acc / denom;
  SpectralData s = perron(k);
  e.c4 = c4_estimate(sys, s);
  e.c3 = e.value - alpha * l * e.c4;
  e.normalization = denom;
  return e;
}

double cap_normalization(const TransferSystem& sys, int lo, int hi) {
  KernelMatrix kp = sys.assemble(KernelKind::ShiftPlus);
  KernelMatrix km = sys.assemble(KernelKind::ShiftMinus);
  Eigen::VectorXd u = sys.left_cap();
  for (int i = 0; i < -lo; ++i) u = km.apply_adjoint(u);
  Eigen::VectorXd v = sys.right_cap();
  for (int i = 0; i < hi; ++i) v = kp.apply(v);
  return kp.dot(u, v);
}

std::pair<double, double> predicted_decay(double c4, double c5, double eta, double c9) {
  if (!(c4 > 0) || !(c5 > 0)) throw std::invalid_argument("predicted_decay: need c4, c5 > 0");
  const double bound = c9 * eta * (1.0 - 1e-9);
  const double alpha_star = -std::min(c4 / (2.0 * c5), bound);
  const double rate = -alpha_star * (c5 * alpha_star + c4);
  return {alpha_star, rate};
}

}  // namespace sigmastrip
