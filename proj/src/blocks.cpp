#include "sigmastrip/blocks.hpp"

#include <cmath>
#include <limits>

#include "sigmastrip/deform.hpp"

namespace sigmastrip {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

BlockSystem::BlockSystem(const BaseGraph& base, const Weights& weights, const Alphabet& alphabet)
    : alphabet_(alphabet), ns_(static_cast<int>(base.tree.size())), n0_(base.n) {
  beta_vertical_ = weights.vertical;
  beta_horizontal_ = weights.horizontal;
  tree_pos_of_edge_.assign(base.edges.size(), -1);
  for (int pos = 0; pos < ns_; ++pos) tree_pos_of_edge_[base.tree[pos]] = pos;

  // Coordinate slots of the two-level window: base-tree copies of the left
  // level, the pin edge, base-tree copies of the right level.
  StripGraph window(base, 0, 1, weights);
  const TreeView& view = window.backbone_view();
  auto slot_of = [&](int edge) {
    const auto& ed = window.edge(edge);
    if (ed.horizontal) return ns_;
    const int pos = tree_pos_of_edge_[ed.base_index];
    return ed.dlevel == 0 ? pos : ns_ + 1 + pos;
  };
  auto formula_for = [&](int tail, int head) {
    EdgeFormula f;
    const auto path = view.path(tail, head);
    for (const auto& oe : path) {
      const double sgn = (oe.tail == view.tail(oe.edge)) ? 1.0 : -1.0;
      f.dt.push_back({slot_of(oe.edge), sgn});
    }
    for (const auto& oe : path) {
      YTerm term;
      term.coord = slot_of(oe.edge);
      term.sign = (oe.tail == view.tail(oe.edge)) ? 1.0 : -1.0;
      const int anchor = view.tail(oe.edge);
      for (const auto& other : path) {
        if (other.edge == oe.edge) continue;
        const double w = view.on_root_path(anchor, other.edge) ? -0.5 : 0.5;
        term.expo.push_back({slot_of(other.edge), w});
      }
      f.y.push_back(std::move(term));
    }
    return f;
  };

  for (int k = 0; k < static_cast<int>(base.edges.size()); ++k)
    vertical_formulas_.push_back(
        formula_for(window.vertex(0, base.edges[k].first), window.vertex(0, base.edges[k].second)));
  for (int v = 0; v < n0_; ++v)
    horizontal_formulas_.push_back(formula_for(window.vertex(0, v), window.vertex(1, v)));

  vertical_facts_.resize(alphabet.size());
  horizontal_facts_.resize(alphabet.size());
  for (int tau = 0; tau < alphabet.size(); ++tau) {
    vertical_facts_[tau].resize(base.edges.size());
    for (int k = 0; k < static_cast<int>(base.edges.size()); ++k) {
      const EdgeFacts ef = recover_edge(base, alphabet.letter(tau), {LocalSlot::Vertical, k});
      vertical_facts_[tau][k] = {ef.in_tree, ef.tail_is_low ? 1.0 : -1.0, ef.on_backbone};
    }
    horizontal_facts_[tau].resize(n0_);
    for (int v = 0; v < n0_; ++v) {
      const EdgeFacts ef = recover_edge(base, alphabet.letter(tau), {LocalSlot::RightHalf, v});
      horizontal_facts_[tau][v] = {ef.in_tree, ef.tail_is_low ? 1.0 : -1.0, ef.on_backbone};
    }
  }
}

double BlockSystem::edge_term(const EdgeFormula& formula, const Facts& facts, double beta,
                              const double* tc, const double* yc, double bb_coordinate) const {
  double dt = 0;
  for (auto [c, s] : formula.dt) dt += s * tc[c];
  double y = 0;
  for (const auto& term : formula.y) {
    double expo = 0;
    for (auto [c, w] : term.expo) expo += w * tc[c];
    y += term.sign * yc[term.coord] * std::exp(expo);
  }
  double h = beta * (std::cosh(dt) - 1.0 + 0.5 * y * y);
  if (facts.in_tree) {
    h -= std::log(beta / kTwoPi);
    if (!facts.on_backbone) h += facts.orient * dt;
  }
  h -= 0.5 * bb_coordinate;
  return h;
}

double BlockSystem::level_energy(const double* omega, int tau) const {
  if (tau < 0 || tau >= alphabet_.size())
    throw std::out_of_range("blocks: letter id out of range");
  // Window coordinates with only the left level populated.
  std::vector<double> tc(2 * ns_ + 1, 0.0), yc(2 * ns_ + 1, 0.0);
  for (int pos = 0; pos < ns_; ++pos) {
    tc[pos] = omega[pos];
    yc[pos] = omega[ns_ + pos];
  }
  double h = 0;
  for (int k = 0; k < static_cast<int>(vertical_formulas_.size()); ++k) {
    const int pos = tree_pos_of_edge_[k];
    h += edge_term(vertical_formulas_[k], vertical_facts_[tau][k], beta_vertical_[k], tc.data(),
                   yc.data(), pos >= 0 ? omega[pos] : 0.0);
  }
  return h;
}

double BlockSystem::bond_energy(const double* omega, int tau, double dt_hor, double y_hor,
                                const double* omega2, int tau2) const {
  std::vector<double> tc(2 * ns_ + 1), yc(2 * ns_ + 1);
  for (int pos = 0; pos < ns_; ++pos) {
    tc[pos] = omega[pos];
    yc[pos] = omega[ns_ + pos];
    tc[ns_ + 1 + pos] = omega2[pos];
    yc[ns_ + 1 + pos] = omega2[ns_ + pos];
  }
  tc[ns_] = dt_hor;
  yc[ns_] = y_hor;
  return bond_energy_window(tc.data(), yc.data(), tau, tau2);
}

double BlockSystem::bond_energy_window(const double* tc, const double* yc, int tau,
                                       int tau2) const {
  if (!alphabet_.follows(tau, tau2)) return kInf;
  double h = 0;
  for (int v = 0; v < n0_; ++v)
    h += edge_term(horizontal_formulas_[v], horizontal_facts_[tau][v], beta_horizontal_[v], tc,
                   yc, 0.0);
  return h;
}

double BlockSystem::block_energy(const double* omega, int tau, double dt_hor, double y_hor,
                                 const double* omega2, int tau2) const {
  const double bond = bond_energy(omega, tau, dt_hor, y_hor, omega2, tau2);
  if (bond == kInf) return kInf;
  return 0.5 * level_energy(omega, tau) + bond + 0.5 * level_energy(omega2, tau2);
}

double BlockSystem::block_energy_shifted(int sign, const double* omega, int tau, double dt_hor,
                                         double y_hor, const double* omega2, int tau2) const {
  const double h = block_energy(omega, tau, dt_hor, y_hor, omega2, tau2);
  if (h == kInf) return kInf;
  return h + 0.5 * sign * dt_hor;
}

double BlockSystem::left_cap_energy(const double* omega, int tau) const {
  if (!alphabet_.follows(alphabet_.backbone_id(), tau)) return kInf;
  return 0.5 * level_energy(omega, tau);
}

double BlockSystem::right_cap_energy(const double* omega, int tau) const {
  if (!alphabet_.follows(tau, alphabet_.backbone_id())) return kInf;
  return 0.5 * level_energy(omega, tau);
}

double BlockSystem::cutoff(const double* omega, double dt_hor, double y_hor,
                           const double* omega2, double eta) const {
  double f = chi_tilde((dt_hor * dt_hor + y_hor * y_hor) / (eta * eta));
  for (int pos = 0; pos < ns_; ++pos) {
    const double a = omega[pos] * omega[pos] + omega[ns_ + pos] * omega[ns_ + pos];
    const double b = omega2[pos] * omega2[pos] + omega2[ns_ + pos] * omega2[ns_ + pos];
    f *= chi_tilde(a / (eta * eta)) * chi_tilde(b / (eta * eta));
  }
  return f;
}

void BlockSystem::horizontal_gradients(const double* tc, const double* yc, int v, double& dt,
                                       double& y) const {
  const EdgeFormula& f = horizontal_formulas_[v];
  dt = 0;
  for (auto [c, s] : f.dt) dt += s * tc[c];
  y = 0;
  for (const auto& term : f.y) {
    double expo = 0;
    for (auto [c, w] : term.expo) expo += w * tc[c];
    y += term.sign * yc[term.coord] * std::exp(expo);
  }
}

int BlockSystem::horizontal_code(int tau, int v) const {
  const Facts& f = horizontal_facts_[tau][v];
  if (!f.in_tree) return 0;
  if (f.on_backbone) return 1;
  return f.orient > 0 ? 2 : 3;
}

double block_sum_hamiltonian(const StripGraph& strip, const BlockSystem& blocks,
                             const GradientConfig& g, const Word& word, int l) {
  const int ns = blocks.tree_edges();
  auto omega_at = [&](int level) {
    std::vector<double> w(2 * ns);
    for (int pos = 0; pos < ns; ++pos) {
      const int bi = strip.backbone_index_vertical(level, pos);
      w[pos] = g.grad_t[bi];
      w[ns + pos] = g.grad_y[bi];
    }
    return w;
  };

  const int lo = strip.lo(), hi = strip.hi();
  std::vector<std::vector<double>> omegas;
  for (int n = lo; n <= hi; ++n) omegas.push_back(omega_at(n));

  double h = blocks.left_cap_energy(omegas.front().data(), word.letters.front()) +
             blocks.right_cap_energy(omegas.back().data(), word.letters.back());
  for (int n = lo; n <= hi - 1; ++n) {
    const int bi = strip.backbone_index_pin(n);
    int sign = 0;
    if (n <= -1) sign -= 1;
    if (n >= l) sign += 1;
    h += blocks.block_energy_shifted(sign, omegas[n - lo].data(), word.letters[n - lo],
                                     g.grad_t[bi], g.grad_y[bi], omegas[n + 1 - lo].data(),
                                     word.letters[n + 1 - lo]);
  }
  return h;
}

}  // namespace sigmastrip
