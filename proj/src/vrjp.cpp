#include "sigmastrip/vrjp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace sigmastrip {

PinnedGraph::PinnedGraph(StripGraph strip) : strip_(std::move(strip)) {
  rho_ = strip_.n_vertices();
  adj_.resize(rho_ + 1);
  for (int e = 0; e < strip_.n_edges(); ++e) {
    const auto& ed = strip_.edge(e);
    adj_[ed.tail].push_back({ed.head, ed.beta});
    adj_[ed.head].push_back({ed.tail, ed.beta});
  }
  adj_[rho_].push_back({strip_.pin_vertex(), strip_.weights().epsilon});
  adj_[strip_.pin_vertex()].push_back({rho_, strip_.weights().epsilon});
}

int PinnedGraph::level_of(int v) const {
  return v == rho_ ? 0 : strip_.level_of(v);
}

Trajectory simulate_vrjp(const PinnedGraph& pg, double horizon, std::mt19937_64& rng,
                         long max_jumps) {
  if (!(horizon > 0)) throw std::invalid_argument("simulate_vrjp: horizon must be positive");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);

  std::vector<double> local_time(pg.n_vertices(), 0.0);
  Trajectory traj;
  int at = pg.rho();
  traj.vertices.push_back(at);
  double clock = 0;
  while (true) {
    if (max_jumps >= 0 && static_cast<long>(traj.vertices.size()) - 1 >= max_jumps) break;
    const auto& nbrs = pg.adjacency(at);
    double total = 0;
    for (auto [w, beta] : nbrs) total += beta * (1.0 + local_time[w]);
    const double hold = expo(rng) / total;
    if (clock + hold >= horizon) {
      local_time[at] += horizon - clock;
      clock = horizon;
      break;
    }
    clock += hold;
    local_time[at] += hold;
    double u = unif(rng) * total;
    int target = nbrs.back().first;
    for (auto [w, beta] : nbrs) {
      u -= beta * (1.0 + local_time[w]);
      if (u <= 0) {
        target = w;
        break;
      }
    }
    at = target;
    traj.vertices.push_back(at);
    traj.times.push_back(clock);
  }
  traj.clock = clock;
  return traj;
}

std::vector<int> skeleton(const Trajectory& traj) {
  if (traj.vertices.empty()) throw std::invalid_argument("skeleton: empty trajectory");
  return traj.vertices;
}

EnvWeights env_from_t(const PinnedGraph& pg, const Eigen::VectorXd& t) {
  const StripGraph& strip = pg.strip();
  EnvWeights w;
  w.strip_edge.resize(strip.n_edges());
  for (int e = 0; e < strip.n_edges(); ++e) {
    const auto& ed = strip.edge(e);
    w.strip_edge[e] = ed.beta * std::exp(t[ed.tail] + t[ed.head]);
  }
  w.rho_edge = strip.weights().epsilon * std::exp(t[strip.pin_vertex()]);
  return w;
}

namespace {

double env_weight_between(const PinnedGraph& pg, const EnvWeights& w, int a, int b) {
  if (a == pg.rho() || b == pg.rho()) {
    const int other = a == pg.rho() ? b : a;
    return other == pg.strip().pin_vertex() ? w.rho_edge : 0.0;
  }
  const int e = pg.strip().find_edge_between(a, b);
  return e >= 0 ? w.strip_edge[e] : 0.0;
}

}  // namespace

double env_stationary(const PinnedGraph& pg, const EnvWeights& w, int v) {
  double pi = 0;
  for (auto [u, beta] : pg.adjacency(v)) pi += env_weight_between(pg, w, v, u);
  return pi;
}

double rwre_path_prob(const PinnedGraph& pg, const EnvWeights& w, const std::vector<int>& path) {
  if (path.empty() || path.front() != pg.rho())
    throw std::invalid_argument("rwre_path_prob: path must start at rho");
  double p = 1.0;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const double wij = env_weight_between(pg, w, path[i], path[i + 1]);
    if (wij == 0.0) return 0.0;
    p *= wij / env_stationary(pg, w, path[i]);
  }
  return p;
}

double reversibility_defect(const PinnedGraph& pg, const EnvWeights& w) {
  double defect = 0;
  for (int v = 0; v < pg.n_vertices(); ++v) {
    const double pv = env_stationary(pg, w, v);
    for (auto [u, beta] : pg.adjacency(v)) {
      const double pu = env_stationary(pg, w, u);
      const double wij = env_weight_between(pg, w, v, u);
      const double lhs = pv * (wij / pv);
      const double rhs = pu * (wij / pu);
      defect = std::max(defect, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
  }
  return defect;
}

MixingReport mixing_check(const PinnedGraph& pg, int t_max, int n_vrjp, int n_env,
                          const SamplerConfig& config) {
  if (t_max < 1 || t_max > 3) throw std::invalid_argument("mixing_check: t_max must be 1..3");

  // All paths from rho of length 1..t_max.
  std::vector<std::vector<int>> paths;
  std::vector<int> current{pg.rho()};
  std::function<void(int)> grow = [&](int remaining) {
    if (static_cast<int>(current.size()) > 1) paths.push_back(current);
    if (remaining == 0) return;
    for (auto [w, beta] : pg.adjacency(current.back())) {
      current.push_back(w);
      grow(remaining - 1);
      current.pop_back();
    }
  };
  grow(t_max);

  // Direct VRJP frequencies.
  std::mt19937_64 rng(config.seed ^ 0x5bf0a8b1u);
  std::map<std::vector<int>, long> counts;
  for (int run = 0; run < n_vrjp; ++run) {
    Trajectory tr = simulate_vrjp(pg, 1e18, rng, t_max);
    const auto sk = skeleton(tr);
    for (int len = 2; len <= static_cast<int>(sk.size()); ++len)
      counts[std::vector<int>(sk.begin(), sk.begin() + len)]++;
  }

  // Environment mixture: average path probabilities over sampled weights.
  SamplerConfig env_config = config;
  env_config.samples = n_env;
  TChain chain(pg.strip(), env_config);
  std::vector<std::vector<double>> env_probs(paths.size());
  double max_defect = 0;
  chain.run([&](const Eigen::VectorXd& t) {
    const EnvWeights w = env_from_t(pg, t);
    max_defect = std::max(max_defect, reversibility_defect(pg, w));
    for (size_t i = 0; i < paths.size(); ++i)
      env_probs[i].push_back(rwre_path_prob(pg, w, paths[i]));
  });

  MixingReport report;
  report.max_reversibility_defect = max_defect;
  report.pass = true;
  for (size_t i = 0; i < paths.size(); ++i) {
    PathLawEntry e;
    e.path = paths[i];
    const long c = counts.count(paths[i]) ? counts[paths[i]] : 0;
    e.vrjp_prob = static_cast<double>(c) / n_vrjp;
    e.vrjp_stderr = std::sqrt(std::max(e.vrjp_prob * (1.0 - e.vrjp_prob), 1e-12) / n_vrjp);
    const EstimateWithError env = batch_means(env_probs[i]);
    e.env_prob = env.mean;
    e.env_stderr = env.stderr_;
    const double tol = 3.0 * std::sqrt(e.vrjp_stderr * e.vrjp_stderr + e.env_stderr * e.env_stderr);
    e.pass = std::abs(e.vrjp_prob - e.env_prob) <= std::max(tol, 1e-9);
    report.pass = report.pass && e.pass;
    report.entries.push_back(e);
  }
  return report;
}

LocalizationReport localization_stats(const PinnedGraph& pg, long n_steps, int n_runs,
                                      uint64_t seed) {
  const int lo = pg.strip().lo(), hi = pg.strip().hi();
  const int n_levels = hi - lo + 1;
  int n_windows = 0;
  while ((1l << n_windows) < n_steps) ++n_windows;
  ++n_windows;

  // counts[level][window]: visits at skeleton times n with 2^k <= n < 2^(k+1).
  std::vector<std::vector<long>> counts(n_levels, std::vector<long>(n_windows, 0));
  std::vector<long> checkpoints;
  for (long cp : {1000l, 10000l, 100000l, 1000000l})
    if (cp <= n_steps) checkpoints.push_back(cp);
  if (checkpoints.empty()) checkpoints.push_back(n_steps);
  std::vector<double> mean_range(checkpoints.size(), 0.0);

  for (int run = 0; run < n_runs; ++run) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull * static_cast<uint64_t>(run + 1));
    std::vector<double> local_time(pg.n_vertices(), 0.0);
    std::exponential_distribution<double> expo(1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int at = pg.rho();
    int max_abs_level = 0;
    size_t next_cp = 0;
    for (long n = 1; n <= n_steps; ++n) {
      const auto& nbrs = pg.adjacency(at);
      double total = 0;
      for (auto [w, beta] : nbrs) total += beta * (1.0 + local_time[w]);
      local_time[at] += expo(rng) / total;
      double u = unif(rng) * total;
      int target = nbrs.back().first;
      for (auto [w, beta] : nbrs) {
        u -= beta * (1.0 + local_time[w]);
        if (u <= 0) {
          target = w;
          break;
        }
      }
      at = target;
      if (at != pg.rho()) {
        int win = 0;
        while ((1l << (win + 1)) <= n) ++win;
        counts[pg.level_of(at) - lo][win]++;
        max_abs_level = std::max(max_abs_level, std::abs(pg.level_of(at)));
      }
      while (next_cp < checkpoints.size() && n == checkpoints[next_cp]) {
        mean_range[next_cp] += max_abs_level;
        ++next_cp;
      }
    }
  }
  for (double& r : mean_range) r /= n_runs;

  LocalizationReport rep;
  for (int lev = 0; lev < n_levels; ++lev) {
    double best = 0;
    for (int win = 0; win < n_windows; ++win) {
      const long lo_n = 1l << win;
      const long hi_n = std::min(n_steps + 1, 2l << win);
      if (hi_n <= lo_n) continue;
      const double denom = static_cast<double>(hi_n - lo_n) * n_runs;
      best = std::max(best, counts[lev][win] / denom);
    }
    if (best > 0) {
      rep.levels.push_back(lev + lo);
      rep.max_occupation.push_back(best);
    }
  }

  std::vector<double> xs, ys, ws;
  for (size_t i = 0; i < rep.levels.size(); ++i) {
    xs.push_back(std::abs(rep.levels[i]));
    ys.push_back(std::log(rep.max_occupation[i]));
    ws.push_back(1.0);
  }
  if (xs.size() >= 3) rep.decay_fit = weighted_least_squares(xs, ys, ws);

  rep.range_checkpoints = checkpoints;
  rep.mean_range = mean_range;
  for (size_t i = 0; i < checkpoints.size(); ++i)
    rep.range_over_log.push_back(mean_range[i] / std::log(static_cast<double>(checkpoints[i])));
  rep.range_bounded =
      rep.range_over_log.back() <= 1.25 * rep.range_over_log.front() + 0.05;
  return rep;
}

}  // namespace sigmastrip
