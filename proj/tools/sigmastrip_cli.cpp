// Command-line driver: configuration in, CSV/JSON artifacts out.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sigmastrip/blocks.hpp"
#include "sigmastrip/io.hpp"
#include "sigmastrip/vrjp.hpp"

using namespace sigmastrip;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  RunConfig config;
  std::string config_text;
  std::string command;
  fs::path out_dir;
  std::vector<std::string> files;

  void open(const std::string& cmd) {
    command = cmd;
    const char* env = std::getenv("SIGMASTRIP_OUTPUT_DIR");
    out_dir = env ? fs::path(env) : fs::path(config.output_dir);
    fs::create_directories(out_dir);
  }

  std::ofstream file(const std::string& name) {
    files.push_back(name);
    std::ofstream out(out_dir / name);
    out.setf(std::ios::scientific);
    out.precision(12);
    return out;
  }

  void manifest() {
    json m;
    m["command"] = command;
    m["config_hash"] = config_hash(config_text);
    m["seed"] = config.sampler.seed;
    m["outputs"] = files;
    std::ofstream out(out_dir / "manifest.json");
    out << m.dump(2) << "\n";
  }
};

json check(const std::string& name, bool pass, double value, double bound) {
  std::cout << (pass ? "[pass] " : "[FAIL] ") << name << "  value=" << value
            << " bound=" << bound << "\n";
  return json{{"name", name}, {"pass", pass}, {"value", value}, {"bound", bound}};
}

int cmd_verify(Run& run) {
  run.open("verify");
  const RunConfig& c = run.config;
  json checks = json::array();
  bool all = true;
  std::mt19937_64 rng(c.sampler.seed);
  std::normal_distribution<double> gauss(0.0, 0.7);

  // Matrix-tree identity on a small strip of the configured base.
  {
    int hi = 1;
    while ((hi + 2) * c.base.n <= 12) ++hi;
    StripGraph strip(c.base, 0, hi, c.weights);
    double worst = 0;
    for (int rep = 0; rep < 20; ++rep) {
      Eigen::VectorXd t(strip.n_vertices());
      for (int i = 0; i < t.size(); ++i) t[i] = gauss(rng);
      auto [det, sum] = matrix_tree_check(strip, t);
      worst = std::max(worst, std::abs(det - sum) / sum);
    }
    const bool ok = worst <= 1e-10;
    all = all && ok;
    checks.push_back(check("matrix_tree_identity", ok, worst, 1e-10));
  }
  // Gradient change of variables round trip.
  {
    StripGraph strip = c.make_strip();
    double worst = 0;
    for (int rep = 0; rep < 100; ++rep) {
      FieldConfig f;
      f.t.resize(strip.n_vertices());
      f.s.resize(strip.n_vertices());
      for (int i = 0; i < f.t.size(); ++i) {
        f.t[i] = gauss(rng);
        f.s[i] = gauss(rng);
      }
      FieldConfig b = from_gradient(strip, to_gradient(strip, f));
      worst = std::max(worst, (b.t - f.t).cwiseAbs().maxCoeff());
      worst = std::max(worst, (b.s - f.s).cwiseAbs().maxCoeff());
    }
    const bool ok = worst <= 1e-12;
    all = all && ok;
    checks.push_back(check("gradient_round_trip", ok, worst, 1e-12));
  }
  // Codec bijection on a small strip.
  {
    Alphabet a = build_alphabet(c.base);
    int hi = 1;
    while ((hi + 2) * c.base.n <= 14) ++hi;
    StripGraph strip(c.base, 0, hi, c.weights);
    auto trees = enumerate_spanning_trees(strip);
    bool ok = static_cast<double>(trees.size()) == spanning_tree_count(strip);
    for (const auto& tree : trees) {
      const SpanningTree back = decode(encode(strip, tree, a), strip, a);
      ok = ok && back.edges == tree.edges;
    }
    ok = ok && count_words(a, strip.levels()) == static_cast<double>(trees.size());
    all = all && ok;
    checks.push_back(check("codec_bijection", ok, static_cast<double>(trees.size()), 0));
  }
  // Local block decomposition against the global Hamiltonian.
  {
    Alphabet a = build_alphabet(c.base);
    BlockSystem blocks(c.base, c.weights, a);
    StripGraph strip(c.base, -1, 2, c.weights);
    auto trees = enumerate_spanning_trees(strip, 20);
    double worst = 0;
    for (int rep = 0; rep < 5; ++rep) {
      GradientConfig g;
      g.grad_t.resize(strip.backbone_edges().size());
      g.grad_y.resize(strip.backbone_edges().size());
      for (int i = 0; i < g.grad_t.size(); ++i) {
        g.grad_t[i] = gauss(rng);
        g.grad_y[i] = gauss(rng);
      }
      for (const auto& tree : trees) {
        const Word w = encode(strip, tree, a);
        for (int l = strip.lo(); l <= strip.hi(); ++l) {
          const double gl = interpolated_hamiltonian(strip, g, tree, l);
          const double lc = block_sum_hamiltonian(strip, blocks, g, w, l);
          worst = std::max(worst, std::abs(gl - lc) / std::max(1.0, std::abs(gl)));
        }
      }
    }
    const bool ok = worst <= 1e-10;
    all = all && ok;
    checks.push_back(check("local_block_decomposition", ok, worst, 1e-10));
  }
  // Deformation inversion.
  {
    StripGraph strip = c.make_strip();
    DeformationParams dp;
    dp.eta = c.eta;
    dp.c9 = c.c9;
    dp.alpha = 0.9 * c.c9 * c.eta;
    const int l = std::max(1, std::min(3, c.hi));
    double worst = 0;
    for (int rep = 0; rep < 50; ++rep) {
      GradientConfig g;
      g.grad_t.resize(strip.backbone_edges().size());
      g.grad_y.resize(strip.backbone_edges().size());
      for (int i = 0; i < g.grad_t.size(); ++i) {
        g.grad_t[i] = 0.5 * gauss(rng);
        g.grad_y[i] = 0.5 * gauss(rng);
      }
      GradientConfig back = deform_inverse(strip, deform(strip, g, dp, l), dp, l);
      worst = std::max(worst, (back.grad_t - g.grad_t).cwiseAbs().maxCoeff());
    }
    const bool ok = worst <= 1e-8;
    all = all && ok;
    checks.push_back(check("deformation_inverse", ok, worst, 1e-8));
  }
  // Environment reversibility on sampled weights.
  {
    PinnedGraph pg(c.make_strip());
    SamplerConfig cfg = c.sampler;
    cfg.samples = 10;
    cfg.burn_in = std::min(cfg.burn_in, 200);
    TChain chain(pg.strip(), cfg);
    double worst = 0;
    chain.run([&](const Eigen::VectorXd& t) {
      worst = std::max(worst, reversibility_defect(pg, env_from_t(pg, t)));
    });
    const bool ok = worst <= 1e-14;
    all = all && ok;
    checks.push_back(check("environment_reversibility", ok, worst, 1e-14));
  }

  auto out = run.file("verify.json");
  out << json{{"pass", all}, {"checks", checks}}.dump(2) << "\n";
  run.manifest();
  return all ? 0 : 1;
}

int cmd_decay(Run& run, int l_max) {
  run.open("decay");
  const RunConfig& c = run.config;
  StripGraph strip = c.make_strip();
  std::vector<int> levels;
  for (int l = 1; l <= std::min(l_max, c.hi); ++l) levels.push_back(l);
  DecayCurve curve = decay_curve(strip, levels, c.sampler);
  auto out = run.file("decay.csv");
  out << "l,estimate,stderr,n_eff\n";
  for (const auto& p : curve.points)
    out << p.l << "," << p.estimate << "," << p.stderr_ << "," << p.n_effective << "\n";
  auto fit = run.file("decay_fit.json");
  fit << json{{"slope", curve.log_fit.slope},
              {"slope_stderr", curve.log_fit.slope_stderr},
              {"intercept", curve.log_fit.intercept},
              {"r2", curve.log_fit.r2}}
             .dump(2)
      << "\n";
  std::cout << "decay slope " << curve.log_fit.slope << " +- " << curve.log_fit.slope_stderr
            << "\n";
  run.manifest();
  return 0;
}

int cmd_spectrum(Run& run) {
  run.open("spectrum");
  const RunConfig& c = run.config;
  Alphabet a = build_alphabet(c.base);
  TransferSystem sys(c.base, c.weights, a, c.make_grid(), c.eta);
  KernelMatrix k = sys.assemble(KernelKind::Plain);
  SpectralData s = perron(k);
  GapFit gap = fit_gap(k, s);
  const double defect = symmetry_defect(sys, s);
  const double c4 = c4_estimate(sys, s);
  const double c5 = entropy_constant(c.base, c.weights, c.eta, c.c9);
  const auto [alpha_star, rate] = predicted_decay(c4, c5, c.eta, c.c9);
  const double z = cap_normalization(sys, c.lo, c.hi);

  json j{{"lambda", s.lambda},
         {"gap_ratio", gap.ratio},
         {"gap_fit_r2", gap.r2},
         {"perron_residual_right", s.residual_right},
         {"perron_residual_left", s.residual_left},
         {"symmetry_defect", defect},
         {"c4", c4},
         {"c5", c5},
         {"alpha_star", alpha_star},
         {"certified_rate", rate},
         {"cap_normalization", z},
         {"states", sys.n_states()}};
  auto out = run.file("spectrum.json");
  out << j.dump(2) << "\n";
  std::cout << "lambda " << s.lambda << "  gap_ratio " << gap.ratio << "  defect " << defect
            << "  c4 " << c4 << "\n";
  run.manifest();
  return 0;
}

int cmd_codec(Run& run) {
  run.open("codec");
  Alphabet a = build_alphabet(run.config.base);
  auto out = run.file("alphabet.json");
  out << a.to_json() << "\n";
  json j{{"letters", a.size()},
         {"pairs", a.pair_count()},
         {"diameter", a.diameter()},
         {"stabilized_width", a.stabilized_width()}};
  auto rep = run.file("codec.json");
  rep << j.dump(2) << "\n";
  std::cout << "letters " << a.size() << "  pairs " << a.pair_count() << "  diameter "
            << a.diameter() << "\n";
  run.manifest();
  return 0;
}

int cmd_vrjp(Run& run, double horizon, int runs, int tmax, long steps) {
  run.open("vrjp");
  const RunConfig& c = run.config;
  PinnedGraph pg(c.make_strip());

  std::mt19937_64 rng(c.sampler.seed);
  auto traj_csv = run.file("trajectories.csv");
  traj_csv << "run,jumps,final_level,max_abs_level\n";
  for (int r = 0; r < runs; ++r) {
    Trajectory tr = simulate_vrjp(pg, horizon, rng);
    int maxlev = 0;
    for (int v : tr.vertices) maxlev = std::max(maxlev, std::abs(pg.level_of(v)));
    traj_csv << r << "," << tr.vertices.size() - 1 << "," << pg.level_of(tr.vertices.back())
             << "," << maxlev << "\n";
  }

  LocalizationReport loc = localization_stats(pg, steps, runs, c.sampler.seed);
  auto occ = run.file("occupation.csv");
  occ << "level,max_occupation\n";
  for (size_t i = 0; i < loc.levels.size(); ++i)
    occ << loc.levels[i] << "," << loc.max_occupation[i] << "\n";
  json locj{{"decay_slope", loc.decay_fit.slope},
            {"decay_slope_stderr", loc.decay_fit.slope_stderr},
            {"range_checkpoints", loc.range_checkpoints},
            {"mean_range", loc.mean_range},
            {"range_over_log", loc.range_over_log},
            {"range_bounded", loc.range_bounded}};

  json mixj;
  if (pg.n_vertices() <= 4 && tmax >= 1) {
    MixingReport rep = mixing_check(pg, tmax, 20000, 2000, c.sampler);
    mixj["pass"] = rep.pass;
    mixj["max_reversibility_defect"] = rep.max_reversibility_defect;
    mixj["paths"] = json::array();
    for (const auto& e : rep.entries)
      mixj["paths"].push_back(json{{"path", e.path},
                                   {"vrjp", e.vrjp_prob},
                                   {"vrjp_stderr", e.vrjp_stderr},
                                   {"env", e.env_prob},
                                   {"env_stderr", e.env_stderr},
                                   {"pass", e.pass}});
  } else {
    mixj["skipped"] = "pinned graph larger than 4 vertices";
  }
  auto mix = run.file("vrjp_report.json");
  mix << json{{"localization", locj}, {"mixing", mixj}}.dump(2) << "\n";
  std::cout << "localization slope " << loc.decay_fit.slope << "  range bounded "
            << (loc.range_bounded ? "yes" : "no") << "\n";
  run.manifest();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pinned strip sigma-model toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("-c,--config", config_path, "JSON run configuration")->required();

  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  auto* decay = app.add_subcommand("decay", "tilted-expectation decay experiment");
  int l_max = 8;
  decay->add_option("--lmax", l_max, "largest level probed");
  auto* spectrum = app.add_subcommand("spectrum", "transfer operator diagnostics");
  auto* codec = app.add_subcommand("codec", "letter alphabet report");
  auto* vrjp = app.add_subcommand("vrjp", "reinforced jump process experiments");
  double horizon = 1000.0;
  int runs = 200, tmax = 3;
  long steps = 100000;
  vrjp->add_option("--horizon", horizon, "clock horizon per trajectory");
  vrjp->add_option("--runs", runs, "number of trajectories");
  vrjp->add_option("--tmax", tmax, "path-law length for the mixing check");
  vrjp->add_option("--steps", steps, "skeleton steps for occupation statistics");
  uint64_t seed_override = 0;
  auto* seed_opt = app.add_option("--seed", seed_override, "override the configured seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Run run;
  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("config: cannot open " + config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    run.config_text = ss.str();
    run.config = parse_config(run.config_text);
    if (seed_opt->count() > 0) run.config.sampler.seed = seed_override;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*verify) return cmd_verify(run);
    if (*decay) return cmd_decay(run, l_max);
    if (*spectrum) return cmd_spectrum(run);
    if (*codec) return cmd_codec(run);
    if (*vrjp) return cmd_vrjp(run, horizon, runs, tmax, steps);
  } catch (const std::exception& e) {
    std::cerr << "numerical guard: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
