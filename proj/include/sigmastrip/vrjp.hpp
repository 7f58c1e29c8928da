#pragma once

#include <random>
#include <string>
#include <vector>

#include "sigmastrip/sampler.hpp"

namespace sigmastrip {

// Strip with the extra starting vertex joined to the pin by an edge of
// weight epsilon (the convention t_rho = 0).
class PinnedGraph {
 public:
  explicit PinnedGraph(StripGraph strip);

  const StripGraph& strip() const { return strip_; }
  int rho() const { return rho_; }
  int n_vertices() const { return rho_ + 1; }
  // Neighbours of v as (other endpoint, beta weight).
  const std::vector<std::pair<int, double>>& adjacency(int v) const { return adj_[v]; }
  int level_of(int v) const;  // rho sits at level 0

 private:
  StripGraph strip_;
  int rho_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
};

struct Trajectory {
  std::vector<int> vertices;    // visited vertices, starting at rho
  std::vector<double> times;    // jump times (one fewer than vertices is allowed
                                // only if the horizon cut the last holding period)
  double clock = 0;             // total simulated time
};

// Event-driven simulation of the reinforced jump process: while sitting at i
// only L_i grows, so every neighbour rate beta_ij (1 + L_j) stays constant
// between jumps and holding times are exactly exponential.
Trajectory simulate_vrjp(const PinnedGraph& pg, double horizon, std::mt19937_64& rng,
                         long max_jumps = -1);

std::vector<int> skeleton(const Trajectory& traj);

// Random environment W_ij = beta_ij e^{t_i + t_j}, W_{rho,pin} = eps e^{t_pin}.
struct EnvWeights {
  std::vector<double> strip_edge;  // per strip edge
  double rho_edge = 0;
};
EnvWeights env_from_t(const PinnedGraph& pg, const Eigen::VectorXd& t);

// Probability that the W-weighted reversible walk from rho follows `path`.
double rwre_path_prob(const PinnedGraph& pg, const EnvWeights& w, const std::vector<int>& path);
// pi_i = sum_j W_ij; reversibility check pi_i P(i->j) = pi_j P(j->i).
double env_stationary(const PinnedGraph& pg, const EnvWeights& w, int v);
double reversibility_defect(const PinnedGraph& pg, const EnvWeights& w);

struct PathLawEntry {
  std::vector<int> path;
  double vrjp_prob = 0, vrjp_stderr = 0;
  double env_prob = 0, env_stderr = 0;
  bool pass = false;
};
struct MixingReport {
  std::vector<PathLawEntry> entries;
  double max_reversibility_defect = 0;
  bool pass = false;
};
// Compare direct VRJP path frequencies against the environment mixture on the
// same finite pinned graph.
MixingReport mixing_check(const PinnedGraph& pg, int t_max, int n_vrjp, int n_env,
                          const SamplerConfig& config);

struct LocalizationReport {
  std::vector<int> levels;           // |v| with data
  std::vector<double> max_occupation;  // sup over time windows of P(Y_n = v), per level
  LinearFit decay_fit;               // log max occupation vs |level|
  std::vector<long> range_checkpoints;
  std::vector<double> mean_range;    // E[max_{k<=n} |Y_k|] at the checkpoints
  std::vector<double> range_over_log;
  bool range_bounded = false;
};
LocalizationReport localization_stats(const PinnedGraph& pg, long n_steps, int n_runs,
                                      uint64_t seed);

}  // namespace sigmastrip
