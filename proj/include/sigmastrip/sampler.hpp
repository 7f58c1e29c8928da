#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "sigmastrip/deform.hpp"
#include "sigmastrip/measure.hpp"
#include "sigmastrip/stats.hpp"

namespace sigmastrip {

struct SamplerConfig {
  uint64_t seed = 1;
  int burn_in = 1000;   // sweeps
  int samples = 4000;   // retained samples
  int thin = 2;         // sweeps between retained samples
  double t_step = 0.8;  // random-walk proposal scale
  bool autotune = true;

  void validate() const;
};

// Metropolis random walk on the t field targeting the s-integrated marginal:
// log pi(t) = -sum_j t_j - F(t) + log det(A(t)+pin)/2 - eps (cosh t_0 - 1),
// up to a constant. Each sweep mixes site moves with collective moves that
// shift every vertex hanging off one backbone-tree edge, i.e. single-step
// updates of the backbone gradient coordinates; the coordinate change is
// unimodular so the same marginal applies. The Gaussian s block is handled
// exactly via sample_s_given_t.
class TChain {
 public:
  TChain(const StripGraph& strip, SamplerConfig config);

  // Burn in, then deliver `samples` retained field configurations.
  void run(const std::function<void(const Eigen::VectorXd&)>& per_sample);

  double acceptance_rate() const;
  // True when the post-burn-in acceptance rate left [0.05, 0.95].
  bool acceptance_warning() const;
  double step() const { return step_; }
  std::mt19937_64& rng() { return rng_; }

 private:
  void sweep(bool tune);
  double site_log_terms(int j) const;  // t-local part of log pi around site j
  double subtree_log_terms(int k) const;

  const StripGraph& strip_;
  SamplerConfig config_;
  Eigen::VectorXd t_;
  double log_det_;
  double step_;
  std::mt19937_64 rng_;
  long accepted_ = 0, proposed_ = 0;
  // Per backbone edge: vertices past its head, and the edges crossing that cut.
  std::vector<std::vector<int>> subtree_vertices_;
  std::vector<std::vector<int>> boundary_edges_;
  std::vector<char> pin_in_subtree_;
};

// Exact draw from the centered Gaussian with precision matrix A(t) + pin.
Eigen::VectorXd sample_s_given_t(const StripGraph& strip, const Eigen::VectorXd& t,
                                 std::mt19937_64& rng);

// Random spanning tree with edge weights beta_e e^{t_i+t_j} (loop-erased
// random walk construction), matching the conditional tree law of the
// gradient measure.
SpanningTree wilson_tree(const StripGraph& strip, const Eigen::VectorXd& t,
                         std::mt19937_64& rng);

struct DecayPoint {
  int l = 0;
  double estimate = 0;
  double stderr_ = 0;
  double n_effective = 0;
};

struct DecayCurve {
  std::vector<DecayPoint> points;
  LinearFit log_fit;  // log estimate vs l
};

DecayCurve decay_curve(const StripGraph& strip, const std::vector<int>& levels,
                       const SamplerConfig& config);

// MCMC estimate of a t-observable together with its error bar.
EstimateWithError mcmc_t(const StripGraph& strip, const SamplerConfig& config,
                         const std::function<double(const Eigen::VectorXd&)>& observable);

struct CorrelationEntry {
  std::string name;
  double correlation = 0;
  double bound = 0;  // 3 / sqrt(n_effective)
  bool pass = false;
};
struct IndependenceReport {
  std::vector<CorrelationEntry> entries;
  bool pass = false;
};
IndependenceReport independence_check(const StripGraph& strip, const SamplerConfig& config,
                                      int n_gradient_coords = 10);

struct EnergyEntropyEstimate {
  double energy = 0, energy_stderr = 0;
  double entropy = 0, entropy_stderr = 0;
  double effective_samples = 0;
  int n = 0;
};
// Energy and entropy of the deformed measure at deformation size alpha,
// importance-reweighted from the gradient measure to the tilted one.
EnergyEntropyEstimate mc_energy_entropy(const StripGraph& strip, int l, double alpha,
                                        const DeformationParams& dp,
                                        const SamplerConfig& config);

}  // namespace sigmastrip
