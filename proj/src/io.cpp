#include "sigmastrip/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sigmastrip {

using nlohmann::json;

namespace {

BaseGraph base_from_json(const json& j) {
  BaseGraph b;
  b.n = j.at("vertices").get<int>();
  for (const auto& e : j.at("edges")) {
    int a = e.at(0).get<int>(), c = e.at(1).get<int>();
    if (a > c) std::swap(a, c);
    b.edges.push_back({a, c});
  }
  b.tree = j.at("base_tree").get<std::vector<int>>();
  b.pin = j.at("pin").get<int>();
  return b;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  RunConfig c;
  try {
    if (j.contains("base_graph_file")) {
      std::ifstream in(j.at("base_graph_file").get<std::string>());
      if (!in) throw ConfigError("config: base_graph_file not readable");
      json bj;
      in >> bj;
      c.base = base_from_json(bj);
    } else {
      c.base = base_from_json(j.at("base_graph"));
    }
    const auto& w = j.at("weights");
    c.weights.vertical = w.at("vertical").get<std::vector<double>>();
    c.weights.horizontal = w.at("horizontal").get<std::vector<double>>();
    c.weights.epsilon = w.at("epsilon").get<double>();
    c.lo = j.at("strip").at("lo").get<int>();
    c.hi = j.at("strip").at("hi").get<int>();
    if (!j.contains("seed")) throw ConfigError("config: seed is mandatory");
    c.sampler.seed = j.at("seed").get<uint64_t>();
    if (j.contains("sampler")) {
      const auto& s = j.at("sampler");
      if (s.contains("burn_in")) c.sampler.burn_in = s.at("burn_in").get<int>();
      if (s.contains("samples")) c.sampler.samples = s.at("samples").get<int>();
      if (s.contains("thin")) c.sampler.thin = s.at("thin").get<int>();
      if (s.contains("t_step")) c.sampler.t_step = s.at("t_step").get<double>();
    }
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      c.grid_given = true;
      if (g.contains("radius")) c.grid.radius = g.at("radius").get<double>();
      if (g.contains("points_per_dim")) c.grid.points_per_dim = g.at("points_per_dim").get<int>();
      if (g.contains("hor_radius")) c.grid.hor_radius = g.at("hor_radius").get<double>();
      if (g.contains("hor_points")) c.grid.hor_points = g.at("hor_points").get<int>();
      if (g.contains("hor_shift")) c.grid.hor_shift = g.at("hor_shift").get<double>();
    }
    if (j.contains("deformation")) {
      const auto& d = j.at("deformation");
      if (d.contains("eta")) c.eta = d.at("eta").get<double>();
      if (d.contains("c9")) c.c9 = d.at("c9").get<double>();
      if (d.contains("alpha")) c.alpha = d.at("alpha").get<double>();
    }
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  // Field-level validation with named diagnostics.
  try {
    c.base.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: base_graph: ") + e.what());
  }
  if (static_cast<int>(c.weights.vertical.size()) != static_cast<int>(c.base.edges.size()))
    throw ConfigError("config: weights.vertical size mismatch");
  if (static_cast<int>(c.weights.horizontal.size()) != c.base.n)
    throw ConfigError("config: weights.horizontal size mismatch");
  for (double b : c.weights.vertical)
    if (!(b > 0)) throw ConfigError("config: weights.vertical must be positive");
  for (double b : c.weights.horizontal)
    if (!(b > 0)) throw ConfigError("config: weights.horizontal must be positive");
  if (!(c.weights.epsilon > 0)) throw ConfigError("config: weights.epsilon must be positive");
  if (c.lo > 0 || c.hi < 0) throw ConfigError("config: strip must satisfy lo <= 0 <= hi");
  if (c.grid_given) {
    try {
      c.grid.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: grid: ") + e.what());
    }
  }
  if (!(c.eta > 0)) throw ConfigError("config: deformation.eta must be positive");
  if (!(c.c9 > 0) || !(c.c9 < 1.0 / 6.0))
    throw ConfigError("config: deformation.c9 must lie in (0, 1/6)");
  try {
    c.sampler.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: sampler: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_hash(const std::string& text) {
  // FNV-1a over the canonical dump so whitespace does not matter.
  std::string canon;
  try {
    canon = json::parse(text).dump();
  } catch (const json::exception&) {
    canon = text;
  }
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string gradient_to_json(const GradientConfig& g) {
  json j;
  j["t0"] = g.t0;
  j["s0"] = g.s0;
  j["grad_t"] = std::vector<double>(g.grad_t.data(), g.grad_t.data() + g.grad_t.size());
  j["grad_y"] = std::vector<double>(g.grad_y.data(), g.grad_y.data() + g.grad_y.size());
  return j.dump(2);
}

GradientConfig gradient_from_json(const std::string& text) {
  json j = json::parse(text);
  GradientConfig g;
  g.t0 = j.at("t0").get<double>();
  g.s0 = j.at("s0").get<double>();
  auto gt = j.at("grad_t").get<std::vector<double>>();
  auto gy = j.at("grad_y").get<std::vector<double>>();
  g.grad_t = Eigen::Map<Eigen::VectorXd>(gt.data(), gt.size());
  g.grad_y = Eigen::Map<Eigen::VectorXd>(gy.data(), gy.size());
  return g;
}

std::string fields_to_json(const FieldConfig& f) {
  json j;
  j["t"] = std::vector<double>(f.t.data(), f.t.data() + f.t.size());
  j["s"] = std::vector<double>(f.s.data(), f.s.data() + f.s.size());
  return j.dump(2);
}

FieldConfig fields_from_json(const std::string& text) {
  json j = json::parse(text);
  auto t = j.at("t").get<std::vector<double>>();
  auto s = j.at("s").get<std::vector<double>>();
  FieldConfig f;
  f.t = Eigen::Map<Eigen::VectorXd>(t.data(), t.size());
  f.s = Eigen::Map<Eigen::VectorXd>(s.data(), s.size());
  return f;
}

}  // namespace sigmastrip
