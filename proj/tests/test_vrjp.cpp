#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "sigmastrip/vrjp.hpp"

using namespace sigmastrip;

namespace {

PinnedGraph two_vertex_pinned() {
  // rho -- pin only.
  auto base = BaseGraph::single_vertex();
  return PinnedGraph(StripGraph(base, 0, 0, Weights::unit(base)));
}

PinnedGraph three_vertex_pinned(double eps = 1.0) {
  auto base = BaseGraph::single_vertex();
  auto w = Weights::unit(base, eps);
  return PinnedGraph(StripGraph(base, 0, 1, w));
}

}  // namespace

TEST_CASE("pinned graph wiring") {
  PinnedGraph pg = three_vertex_pinned();
  CHECK(pg.n_vertices() == 3);
  CHECK(pg.adjacency(pg.rho()).size() == 1);
  CHECK(pg.adjacency(pg.rho())[0].first == pg.strip().pin_vertex());
  CHECK(pg.adjacency(pg.rho())[0].second == doctest::Approx(1.0));
  CHECK(pg.level_of(pg.rho()) == 0);
}

TEST_CASE("holding times at the start are Exp(eps)") {
  for (double eps : {0.5, 1.0, 2.0}) {
    auto base = BaseGraph::single_vertex();
    PinnedGraph pg(StripGraph(base, 0, 0, Weights::unit(base, eps)));
    std::mt19937_64 rng(17);
    const int n = 100000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
      Trajectory tr = simulate_vrjp(pg, 1e18, rng, 1);
      const double h = tr.times[0];
      sum += h;
      sq += h * h;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sq / n - mean * mean);
    CHECK(std::abs(mean - 1.0 / eps) <= 3.0 * sd / std::sqrt(n));
  }
}

TEST_CASE("holding times pass a KS test against the exponential law") {
  // At a fixed state the total jump rate is constant, so holding times are
  // exactly exponential with the summed neighbour rate.
  PinnedGraph pg = two_vertex_pinned();
  std::mt19937_64 rng(23);
  const int n = 20000;
  std::vector<double> first_holds;
  for (int i = 0; i < n; ++i)
    first_holds.push_back(simulate_vrjp(pg, 1e18, rng, 1).times[0]);
  std::sort(first_holds.begin(), first_holds.end());
  double ks = 0;
  for (int i = 0; i < n; ++i) {
    const double f = 1.0 - std::exp(-first_holds[i]);  // rate eps*(1+0) = 1
    ks = std::max(ks, std::abs(f - (i + 1.0) / n));
    ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
  }
  // 1% critical value of the KS statistic.
  CHECK(ks <= 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("skeleton structure") {
  PinnedGraph pg = two_vertex_pinned();
  std::mt19937_64 rng(29);
  Trajectory one = simulate_vrjp(pg, 1e18, rng, 1);
  auto sk1 = skeleton(one);
  REQUIRE(sk1.size() == 2);
  CHECK(sk1[0] == pg.rho());
  CHECK(sk1[1] == pg.strip().pin_vertex());

  Trajectory many = simulate_vrjp(pg, 1e18, rng, 9);
  auto sk = skeleton(many);
  CHECK(sk.size() == 10);  // jump count + 1
  for (size_t i = 0; i < sk.size(); ++i)
    CHECK(sk[i] == (i % 2 == 0 ? pg.rho() : pg.strip().pin_vertex()));

  // Horizon cuts the trajectory at finite time with at least one jump for
  // a long horizon.
  std::mt19937_64 rng2(31);
  Trajectory bounded = simulate_vrjp(pg, 50.0, rng2);
  CHECK(bounded.clock == 50.0);
  CHECK(bounded.vertices.size() >= 2);
}

TEST_CASE("environment path probabilities") {
  PinnedGraph pg = three_vertex_pinned();
  Eigen::VectorXd t(2);
  t << 0.4, -0.7;
  EnvWeights w = env_from_t(pg, t);
  CHECK(w.rho_edge == doctest::Approx(std::exp(0.4)));

  const int pin = pg.strip().pin_vertex();
  const int up = 1 - pin;  // the other strip vertex

  // Forced first jump.
  CHECK(rwre_path_prob(pg, w, {pg.rho(), pin}) == doctest::Approx(1.0));
  // Return probability from the pin.
  const double wext = w.strip_edge[0];
  CHECK(rwre_path_prob(pg, w, {pg.rho(), pin, pg.rho()}) ==
        doctest::Approx(w.rho_edge / (w.rho_edge + wext)));
  // Total probability over two-step continuations.
  const double total = rwre_path_prob(pg, w, {pg.rho(), pin, pg.rho()}) +
                       rwre_path_prob(pg, w, {pg.rho(), pin, up});
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // Non-adjacent step.
  CHECK(rwre_path_prob(pg, w, {pg.rho(), up}) == 0.0);

  CHECK(reversibility_defect(pg, w) <= 1e-14);
}

TEST_CASE("mixture representation on the three-vertex pinned graph") {
  PinnedGraph pg = three_vertex_pinned();
  SamplerConfig cfg;
  cfg.seed = 5150;
  cfg.burn_in = 500;
  cfg.samples = 2000;
  cfg.thin = 2;
  MixingReport rep = mixing_check(pg, 3, 30000, 2000, cfg);
  CHECK(rep.max_reversibility_defect <= 1e-14);
  for (const auto& e : rep.entries) {
    CAPTURE(e.path.size());
    CHECK(e.pass);
  }
  CHECK(rep.pass);

  // Path laws are probability distributions per length.
  for (size_t len = 2; len <= 4; ++len) {
    double vr = 0, env = 0, err = 0;
    for (const auto& e : rep.entries)
      if (e.path.size() == len) {
        vr += e.vrjp_prob;
        env += e.env_prob;
        err += e.env_stderr;
      }
    CHECK(vr == doctest::Approx(1.0));
    CHECK(std::abs(env - 1.0) <= 3.0 * err + 1e-9);
  }
}

TEST_CASE("localization statistics on a long strip") {
  auto k2 = BaseGraph::k2();
  PinnedGraph pg(StripGraph(k2, -15, 15, Weights::unit(k2)));
  LocalizationReport rep = localization_stats(pg, 100000, 40, 808);
  REQUIRE(rep.levels.size() >= 3);

  // Occupation decays away from the pin.
  double at0 = 0, far = 0;
  for (size_t i = 0; i < rep.levels.size(); ++i) {
    if (rep.levels[i] == 0) at0 = rep.max_occupation[i];
    if (std::abs(rep.levels[i]) >= 5) far = std::max(far, rep.max_occupation[i]);
  }
  CHECK(at0 > far);
  CHECK(rep.decay_fit.slope < 0);
  CHECK(rep.decay_fit.slope + 2.0 * rep.decay_fit.slope_stderr < 0);
  CHECK(rep.range_bounded);
}
