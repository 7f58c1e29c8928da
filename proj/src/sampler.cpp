#include "sigmastrip/sampler.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace sigmastrip {

void SamplerConfig::validate() const {
  if (samples < 1) throw std::invalid_argument("sampler: samples must be >= 1");
  if (!(t_step > 0)) throw std::invalid_argument("sampler: t_step must be positive");
  if (thin < 1 || burn_in < 0) throw std::invalid_argument("sampler: bad thin/burn_in");
}

TChain::TChain(const StripGraph& strip, SamplerConfig config)
    : strip_(strip), config_(config), rng_(config.seed) {
  config_.validate();
  t_ = Eigen::VectorXd::Zero(strip.n_vertices());
  log_det_ = log_det_pinned(strip_, t_);
  step_ = config_.t_step;

  const TreeView& view = strip.backbone_view();
  const auto& bb = strip.backbone_edges();
  subtree_vertices_.resize(bb.size());
  boundary_edges_.resize(bb.size());
  pin_in_subtree_.assign(bb.size(), 0);
  for (size_t k = 0; k < bb.size(); ++k) {
    std::vector<char> inside(strip.n_vertices(), 0);
    for (int v = 0; v < strip.n_vertices(); ++v)
      if (view.on_root_path(v, bb[k])) {
        subtree_vertices_[k].push_back(v);
        inside[v] = 1;
      }
    for (int e = 0; e < strip.n_edges(); ++e)
      if (inside[strip.edge(e).tail] != inside[strip.edge(e).head])
        boundary_edges_[k].push_back(e);
    pin_in_subtree_[k] = inside[strip.pin_vertex()];
  }
}

double TChain::site_log_terms(int j) const {
  double lp = -t_[j];
  for (auto [e, w] : strip_.adjacency(j)) {
    const auto& ed = strip_.edge(e);
    lp -= ed.beta * (std::cosh(t_[ed.head] - t_[ed.tail]) - 1.0);
  }
  if (j == strip_.pin_vertex())
    lp -= strip_.weights().epsilon * (std::cosh(t_[j]) - 1.0);
  return lp;
}

double TChain::subtree_log_terms(int k) const {
  double lp = 0;
  for (int e : boundary_edges_[k]) {
    const auto& ed = strip_.edge(e);
    lp -= ed.beta * (std::cosh(t_[ed.head] - t_[ed.tail]) - 1.0);
  }
  if (pin_in_subtree_[k])
    lp -= strip_.weights().epsilon * (std::cosh(t_[strip_.pin_vertex()]) - 1.0);
  return lp;
}

void TChain::sweep(bool tune) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int j = 0; j < strip_.n_vertices(); ++j) {
    const double old_t = t_[j];
    const double old_local = site_log_terms(j);
    const double old_logdet = log_det_;
    t_[j] = old_t + step_ * gauss(rng_);
    double new_logdet;
    try {
      new_logdet = log_det_pinned(strip_, t_);
    } catch (const std::runtime_error&) {
      t_[j] = old_t;  // numerically broken proposal
      ++proposed_;
      continue;
    }
    const double delta = (site_log_terms(j) + 0.5 * new_logdet) - (old_local + 0.5 * old_logdet);
    ++proposed_;
    if (delta >= 0 || unif(rng_) < std::exp(delta)) {
      log_det_ = new_logdet;
      ++accepted_;
    } else {
      t_[j] = old_t;
    }
  }
  // Collective gradient-coordinate moves: shift everything past one
  // backbone-tree edge by a common amount.
  for (size_t k = 0; k < subtree_vertices_.size(); ++k) {
    const double shift = step_ * gauss(rng_);
    const double old_local = subtree_log_terms(static_cast<int>(k));
    const double old_logdet = log_det_;
    for (int v : subtree_vertices_[k]) t_[v] += shift;
    double new_logdet;
    try {
      new_logdet = log_det_pinned(strip_, t_);
    } catch (const std::runtime_error&) {
      for (int v : subtree_vertices_[k]) t_[v] -= shift;
      ++proposed_;
      continue;
    }
    const double delta = (subtree_log_terms(static_cast<int>(k)) + 0.5 * new_logdet) -
                         (old_local + 0.5 * old_logdet) -
                         shift * static_cast<double>(subtree_vertices_[k].size());
    ++proposed_;
    if (delta >= 0 || unif(rng_) < std::exp(delta)) {
      log_det_ = new_logdet;
      ++accepted_;
    } else {
      for (int v : subtree_vertices_[k]) t_[v] -= shift;
    }
  }
  if (tune && config_.autotune && proposed_ >= 50l * strip_.n_vertices()) {
    const double rate = acceptance_rate();
    if (rate > 0.5) step_ = std::min(step_ * 1.2, 10.0);
    if (rate < 0.3) step_ = std::max(step_ / 1.2, 1e-3);
    accepted_ = 0;
    proposed_ = 0;
  }
}

void TChain::run(const std::function<void(const Eigen::VectorXd&)>& per_sample) {
  for (int i = 0; i < config_.burn_in; ++i) sweep(true);
  accepted_ = 0;
  proposed_ = 0;
  for (int s = 0; s < config_.samples; ++s) {
    for (int k = 0; k < config_.thin; ++k) sweep(false);
    per_sample(t_);
  }
}

double TChain::acceptance_rate() const {
  return proposed_ > 0 ? static_cast<double>(accepted_) / proposed_ : 0.0;
}

bool TChain::acceptance_warning() const {
  const double rate = acceptance_rate();
  return proposed_ > 0 && (rate < 0.05 || rate > 0.95);
}

Eigen::VectorXd sample_s_given_t(const StripGraph& strip, const Eigen::VectorXd& t,
                                 std::mt19937_64& rng) {
  Eigen::LLT<Eigen::MatrixXd> llt(pinned_weight_matrix(strip, t));
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("sample_s_given_t: factorization failed");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd z(strip.n_vertices());
  for (int i = 0; i < z.size(); ++i) z[i] = gauss(rng);
  return llt.matrixU().solve(z);
}

SpanningTree wilson_tree(const StripGraph& strip, const Eigen::VectorXd& t,
                         std::mt19937_64& rng) {
  const int n = strip.n_vertices();
  std::vector<char> in_tree(n, 0);
  std::vector<int> next_edge(n, -1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto step = [&](int v) {
    const auto& adj = strip.adjacency(v);
    double total = 0;
    for (auto [e, w] : adj) total += strip.edge(e).beta * std::exp(t[v] + t[w]);
    double u = unif(rng) * total;
    for (auto [e, w] : adj) {
      u -= strip.edge(e).beta * std::exp(t[v] + t[w]);
      if (u <= 0) return std::pair<int, int>{e, w};
    }
    return std::pair<int, int>{adj.back().first, adj.back().second};
  };

  in_tree[strip.root()] = 1;
  SpanningTree tree;
  for (int start = 0; start < n; ++start) {
    if (in_tree[start]) continue;
    int v = start;
    while (!in_tree[v]) {
      auto [e, w] = step(v);
      next_edge[v] = e;
      v = w;  // loops erased implicitly by overwriting next_edge
    }
    v = start;
    while (!in_tree[v]) {
      in_tree[v] = 1;
      const int e = next_edge[v];
      tree.edges.push_back(e);
      const auto& ed = strip.edge(e);
      v = (ed.tail == v) ? ed.head : ed.tail;
    }
  }
  std::sort(tree.edges.begin(), tree.edges.end());
  return tree;
}

EstimateWithError mcmc_t(const StripGraph& strip, const SamplerConfig& config,
                         const std::function<double(const Eigen::VectorXd&)>& observable) {
  TChain chain(strip, config);
  std::vector<double> values;
  values.reserve(config.samples);
  chain.run([&](const Eigen::VectorXd& t) { values.push_back(observable(t)); });
  if (chain.acceptance_warning())
    std::fprintf(stderr, "mcmc_t: acceptance rate %.3f outside [0.05, 0.95]\n",
                 chain.acceptance_rate());
  return batch_means(values);
}

DecayCurve decay_curve(const StripGraph& strip, const std::vector<int>& levels,
                       const SamplerConfig& config) {
  for (int l : levels)
    if (l < strip.lo() || l > strip.hi())
      throw std::invalid_argument("decay_curve: level outside the strip");

  TChain chain(strip, config);
  std::vector<std::vector<double>> values(levels.size());
  const int pin = strip.pin_vertex();
  chain.run([&](const Eigen::VectorXd& t) {
    for (size_t i = 0; i < levels.size(); ++i) {
      const int lv = strip.vertex(levels[i], strip.base().pin);
      values[i].push_back(std::exp(0.5 * (t[lv] - t[pin])));
    }
  });

  DecayCurve curve;
  std::vector<double> xs, ys, ws;
  for (size_t i = 0; i < levels.size(); ++i) {
    const EstimateWithError e = batch_means(values[i]);
    curve.points.push_back({levels[i], e.mean, e.stderr_, e.n_effective});
    if (!(e.mean > 0) || !(e.mean > 3.0 * e.stderr_))
      throw std::runtime_error("decay_curve: estimate consistent with zero (too few samples)");
    xs.push_back(levels[i]);
    ys.push_back(std::log(e.mean));
    const double rel = e.stderr_ / e.mean;
    ws.push_back(1.0 / (rel * rel));
  }
  curve.log_fit = weighted_least_squares(xs, ys, ws);
  return curve;
}

IndependenceReport independence_check(const StripGraph& strip, const SamplerConfig& config,
                                      int n_gradient_coords) {
  TChain chain(strip, config);
  std::mt19937_64 pick(config.seed ^ 0x9e3779b97f4a7c15ull);
  const int n_bb = static_cast<int>(strip.backbone_edges().size());
  std::vector<int> coords;
  for (int i = 0; i < n_gradient_coords; ++i)
    coords.push_back(static_cast<int>(pick() % n_bb));

  std::vector<double> t0s, s0s;
  std::vector<std::vector<double>> grads(coords.size());
  chain.run([&](const Eigen::VectorXd& t) {
    Eigen::VectorXd s = sample_s_given_t(strip, t, chain.rng());
    const GradientConfig g = to_gradient(strip, {t, s});
    t0s.push_back(g.t0);
    s0s.push_back(g.s0);
    for (size_t i = 0; i < coords.size(); ++i) {
      // Alternate between t- and y-gradient coordinates.
      grads[i].push_back(i % 2 == 0 ? g.grad_t[coords[i]] : g.grad_y[coords[i]]);
    }
  });

  IndependenceReport report;
  report.pass = true;
  const double n_eff = std::min(batch_means(t0s).n_effective, batch_means(s0s).n_effective);
  for (size_t i = 0; i < coords.size(); ++i) {
    const double bound = 3.0 / std::sqrt(std::max(1.0, n_eff));
    for (const auto* pinned : {&t0s, &s0s}) {
      CorrelationEntry e;
      e.name = (pinned == &t0s ? "t0 vs " : "s0 vs ") +
               std::string(i % 2 == 0 ? "grad_t[" : "grad_y[") + std::to_string(coords[i]) + "]";
      e.correlation = pearson_correlation(*pinned, grads[i]);
      e.bound = bound;
      e.pass = std::abs(e.correlation) <= bound;
      report.pass = report.pass && e.pass;
      report.entries.push_back(e);
    }
  }
  return report;
}

EnergyEntropyEstimate mc_energy_entropy(const StripGraph& strip, int l, double alpha,
                                        const DeformationParams& dp,
                                        const SamplerConfig& config) {
  if (l < 1 || l > strip.hi()) throw std::invalid_argument("mc_energy_entropy: bad level");
  DeformationParams params = dp;
  params.alpha = alpha;
  if (std::abs(alpha) > params.c9 * params.eta)
    throw std::invalid_argument("mc_energy_entropy: |alpha| exceeds c9 * eta");

  TChain chain(strip, config);
  const int pin = strip.pin_vertex();
  const int lvert = strip.vertex(l, strip.base().pin);
  std::vector<double> weights, energy_vals, entropy_vals;
  chain.run([&](const Eigen::VectorXd& t) {
    Eigen::VectorXd s = sample_s_given_t(strip, t, chain.rng());
    const GradientConfig g = to_gradient(strip, {t, s});
    const SpanningTree tree = wilson_tree(strip, t, chain.rng());
    const double tilt = std::exp(0.5 * (t[lvert] - t[pin]));

    double shift_sum = 0;
    for (int n = 0; n <= l - 1; ++n)
      shift_sum += g.grad_t[strip.backbone_index_pin(n)] +
                   alpha * cutoff_chi(strip, g, n, params.eta);

    double entropy_term = 0;
    if (alpha != 0.0) {
      const GradientConfig gd = deform(strip, g, params, l);
      entropy_term = interpolated_hamiltonian(strip, gd, tree, l) -
                     interpolated_hamiltonian(strip, g, tree, l) -
                     deform_log_jacobian(strip, g, params, l);
    }
    weights.push_back(tilt);
    energy_vals.push_back(0.5 * shift_sum);
    entropy_vals.push_back(entropy_term);
  });

  double sw = 0, sww = 0;
  for (double w : weights) {
    sw += w;
    sww += w * w;
  }
  EnergyEntropyEstimate out;
  out.effective_samples = sw * sw / sww;
  out.n = static_cast<int>(weights.size());
  if (out.effective_samples < 50)
    throw std::runtime_error("mc_energy_entropy: effective sample size below 50");
  const EstimateWithError e = weighted_ratio(energy_vals, weights);
  const EstimateWithError s = weighted_ratio(entropy_vals, weights);
  out.energy = e.mean;
  out.energy_stderr = e.stderr_;
  out.entropy = s.mean;
  out.entropy_stderr = s.stderr_;
  return out;
}

}  // namespace sigmastrip
