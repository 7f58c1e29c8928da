#pragma once

#include <vector>

namespace sigmastrip {

struct EstimateWithError {
  double mean = 0;
  double stderr_ = 0;
  double n_effective = 0;
  int batches = 0;
};

// Batch-means error bar with 20 batches (trailing remainder dropped).
EstimateWithError batch_means(const std::vector<double>& samples, int n_batches = 20);
// Ratio estimator sum(w*x)/sum(w) with batch-means error bar.
EstimateWithError weighted_ratio(const std::vector<double>& values,
                                 const std::vector<double>& weights, int n_batches = 20);

struct LinearFit {
  double slope = 0;
  double slope_stderr = 0;
  double intercept = 0;
  double r2 = 0;
};
// Weighted least squares of y on x (weights = inverse variances).
LinearFit weighted_least_squares(const std::vector<double>& x, const std::vector<double>& y,
                                 const std::vector<double>& w);

double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace sigmastrip
