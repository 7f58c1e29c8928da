#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "sigmastrip/blocks.hpp"

using namespace sigmastrip;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kInf = std::numeric_limits<double>::infinity();

GradientConfig random_gradients(const StripGraph& strip, std::mt19937_64& rng,
                                double scale = 0.7) {
  std::normal_distribution<double> gauss(0.0, scale);
  GradientConfig g;
  g.t0 = gauss(rng);
  g.s0 = gauss(rng);
  g.grad_t.resize(strip.backbone_edges().size());
  g.grad_y.resize(strip.backbone_edges().size());
  for (int i = 0; i < g.grad_t.size(); ++i) {
    g.grad_t[i] = gauss(rng);
    g.grad_y[i] = gauss(rng);
  }
  return g;
}

}  // namespace

TEST_CASE("block sum equals the interpolated Hamiltonian: chain") {
  auto base = BaseGraph::single_vertex();
  Alphabet a = build_alphabet(base);
  BlockSystem blocks(base, Weights::unit(base), a);
  StripGraph strip(base, -2, 3, Weights::unit(base));
  std::mt19937_64 rng(41);
  const SpanningTree tree = strip.backbone_tree();
  const Word word = encode(strip, tree, a);
  for (int rep = 0; rep < 50; ++rep) {
    GradientConfig g = random_gradients(strip, rng);
    for (int l = strip.lo(); l <= strip.hi(); ++l) {
      const double global = interpolated_hamiltonian(strip, g, tree, l);
      const double local = block_sum_hamiltonian(strip, blocks, g, word, l);
      CHECK(global == doctest::Approx(local).epsilon(1e-10));
    }
  }
}

TEST_CASE("block sum equals the interpolated Hamiltonian: K2, all trees") {
  auto k2 = BaseGraph::k2();
  Alphabet a = build_alphabet(k2);
  BlockSystem blocks(k2, Weights::unit(k2), a);
  StripGraph strip(k2, -1, 2, Weights::unit(k2));
  std::mt19937_64 rng(43);
  auto trees = enumerate_spanning_trees(strip);
  for (int rep = 0; rep < 10; ++rep) {
    GradientConfig g = random_gradients(strip, rng);
    for (const auto& tree : trees) {
      const Word word = encode(strip, tree, a);
      for (int l = strip.lo(); l <= strip.hi(); ++l) {
        const double global = interpolated_hamiltonian(strip, g, tree, l);
        const double local = block_sum_hamiltonian(strip, blocks, g, word, l);
        CHECK(global == doctest::Approx(local).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("block sum with non-unit weights") {
  auto k2 = BaseGraph::k2();
  Weights w;
  w.vertical = {1.7};
  w.horizontal = {0.6, 2.3};
  w.epsilon = 0.8;
  Alphabet a = build_alphabet(k2);
  BlockSystem blocks(k2, w, a);
  StripGraph strip(k2, -1, 1, w);
  std::mt19937_64 rng(47);
  auto trees = enumerate_spanning_trees(strip);
  for (int rep = 0; rep < 10; ++rep) {
    GradientConfig g = random_gradients(strip, rng);
    for (const auto& tree : trees) {
      const Word word = encode(strip, tree, a);
      for (int l : {-1, 0, 1}) {
        CHECK(interpolated_hamiltonian(strip, g, tree, l) ==
              doctest::Approx(block_sum_hamiltonian(strip, blocks, g, word, l)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("mismatched letters carry infinite energy") {
  auto k2 = BaseGraph::k2();
  Alphabet a = build_alphabet(k2);
  BlockSystem blocks(k2, Weights::unit(k2), a);
  std::vector<double> omega(blocks.vertical_dim(), 0.1);
  int bad_a = -1, bad_b = -1;
  for (int i = 0; i < a.size() && bad_a < 0; ++i)
    for (int j = 0; j < a.size(); ++j)
      if (!a.follows(i, j)) {
        bad_a = i;
        bad_b = j;
        break;
      }
  REQUIRE(bad_a >= 0);
  CHECK(blocks.bond_energy(omega.data(), bad_a, 0.2, -0.1, omega.data(), bad_b) == kInf);
  CHECK(blocks.block_energy(omega.data(), bad_a, 0.2, -0.1, omega.data(), bad_b) == kInf);
  CHECK(std::exp(-blocks.block_energy(omega.data(), bad_a, 0.2, -0.1, omega.data(), bad_b)) ==
        0.0);

  // Caps enforce matching with the backbone letter.
  bool found_unmatched_left = false;
  for (int i = 0; i < a.size(); ++i)
    if (!a.follows(a.backbone_id(), i)) {
      CHECK(blocks.left_cap_energy(omega.data(), i) == kInf);
      found_unmatched_left = true;
    }
  CHECK(found_unmatched_left);
}

TEST_CASE("zero-gradient block value from the weights alone") {
  auto k2 = BaseGraph::k2();
  Weights w;
  w.vertical = {1.3};
  w.horizontal = {0.9, 1.8};
  w.epsilon = 1.0;
  Alphabet a = build_alphabet(k2);
  BlockSystem blocks(k2, w, a);
  std::vector<double> zero(blocks.vertical_dim(), 0.0);
  const int bb = a.backbone_id();
  // Backbone letter: base tree edge in the tree (off backbone), pin edge in
  // the tree (on backbone), the other horizontal edge absent.
  const double level = -std::log(w.vertical[0] / kTwoPi) - 0.5 * 0.0;
  const double bond = -std::log(w.horizontal[k2.pin] / kTwoPi);
  const double expect = 0.5 * level + bond + 0.5 * level;
  CHECK(blocks.block_energy(zero.data(), bb, 0.0, 0.0, zero.data(), bb) ==
        doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("reflection symmetry of the block energy") {
  auto k2 = BaseGraph::k2();
  Alphabet a = build_alphabet(k2);
  BlockSystem blocks(k2, Weights::unit(k2), a);
  std::mt19937_64 rng(53);
  std::normal_distribution<double> gauss(0.0, 0.8);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> om(blocks.vertical_dim()), om2(blocks.vertical_dim());
    for (auto& x : om) x = gauss(rng);
    for (auto& x : om2) x = gauss(rng);
    const double dt = gauss(rng), yy = gauss(rng);
    for (int ta = 0; ta < a.size(); ++ta) {
      for (int tb = 0; tb < a.size(); ++tb) {
        const int ra = a.id_of(reflect_var(a.letter(ta)));
        const int rb = a.id_of(reflect_var(a.letter(tb)));
        const double lhs = blocks.block_energy(om.data(), ta, dt, yy, om2.data(), tb);
        const double rhs = blocks.block_energy(om2.data(), rb, -dt, -yy, om.data(), ra);
        if (lhs == kInf) {
          CHECK(rhs == kInf);
        } else {
          CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("level energy is reflection invariant") {
  auto k2 = BaseGraph::k2();
  Alphabet a = build_alphabet(k2);
  BlockSystem blocks(k2, Weights::unit(k2), a);
  std::mt19937_64 rng(59);
  std::normal_distribution<double> gauss(0.0, 0.8);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> om(blocks.vertical_dim());
    for (auto& x : om) x = gauss(rng);
    for (int tau = 0; tau < a.size(); ++tau) {
      const int r = a.id_of(reflect_var(a.letter(tau)));
      CHECK(blocks.level_energy(om.data(), tau) ==
            doctest::Approx(blocks.level_energy(om.data(), r)).epsilon(1e-12));
    }
  }
}

TEST_CASE("cutoff factorizes over blocks") {
  auto k2 = BaseGraph::k2();
  Alphabet a = build_alphabet(k2);
  BlockSystem blocks(k2, Weights::unit(k2), a);
  std::vector<double> zero(blocks.vertical_dim(), 0.0);
  CHECK(blocks.cutoff(zero.data(), 0.0, 0.0, zero.data(), 1.0) == 1.0);
  CHECK(blocks.cutoff(zero.data(), 2.0, 0.0, zero.data(), 1.0) == 0.0);
  std::vector<double> big(blocks.vertical_dim(), 3.0);
  CHECK(blocks.cutoff(big.data(), 0.0, 0.0, zero.data(), 1.0) == 0.0);
}
