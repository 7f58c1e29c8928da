#pragma once

#include <string>

#include "sigmastrip/deform.hpp"
#include "sigmastrip/sampler.hpp"
#include "sigmastrip/transfer.hpp"

namespace sigmastrip {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Full experiment configuration, parse-validated from JSON.
struct RunConfig {
  BaseGraph base;
  Weights weights;
  int lo = 0, hi = 0;
  SamplerConfig sampler;
  GridSpec grid;
  double eta = 1.0;
  double c9 = 0.15;
  double alpha = -0.05;
  std::string output_dir = "out";
  bool grid_given = false;

  StripGraph make_strip() const { return StripGraph(base, lo, hi, weights); }
  GridSpec make_grid() const { return grid_given ? grid : GridSpec::defaults(weights, eta); }
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

// FNV-1a hash of the canonical JSON dump, for output manifests.
std::string config_hash(const std::string& text);

// Regression-fixture serialization.
std::string gradient_to_json(const GradientConfig& g);
GradientConfig gradient_from_json(const std::string& text);
std::string fields_to_json(const FieldConfig& f);
FieldConfig fields_from_json(const std::string& text);

}  // namespace sigmastrip
