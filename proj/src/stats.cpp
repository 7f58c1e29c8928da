#include "sigmastrip/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace sigmastrip {

EstimateWithError batch_means(const std::vector<double>& samples, int n_batches) {
  const int n = static_cast<int>(samples.size());
  if (n < n_batches) throw std::invalid_argument("batch_means: fewer samples than batches");
  const int m = n / n_batches;
  const int used = m * n_batches;
  double mean = 0;
  for (int i = 0; i < used; ++i) mean += samples[i];
  mean /= used;

  double var_bm = 0;
  for (int b = 0; b < n_batches; ++b) {
    double bm = 0;
    for (int i = b * m; i < (b + 1) * m; ++i) bm += samples[i];
    bm /= m;
    var_bm += (bm - mean) * (bm - mean);
  }
  var_bm /= (n_batches - 1);

  double var_s = 0;
  for (int i = 0; i < used; ++i) var_s += (samples[i] - mean) * (samples[i] - mean);
  var_s /= (used - 1);

  EstimateWithError e;
  e.mean = mean;
  e.stderr_ = std::sqrt(var_bm / n_batches);
  e.n_effective = e.stderr_ > 0 ? var_s / (e.stderr_ * e.stderr_) : static_cast<double>(used);
  e.batches = n_batches;
  return e;
}

EstimateWithError weighted_ratio(const std::vector<double>& values,
                                 const std::vector<double>& weights, int n_batches) {
  const int n = static_cast<int>(values.size());
  if (n != static_cast<int>(weights.size()) || n < n_batches)
    throw std::invalid_argument("weighted_ratio: bad input sizes");
  const int m = n / n_batches;
  const int used = m * n_batches;
  double num = 0, den = 0;
  std::vector<double> batch_ratios(n_batches);
  for (int b = 0; b < n_batches; ++b) {
    double bn = 0, bd = 0;
    for (int i = b * m; i < (b + 1) * m; ++i) {
      bn += weights[i] * values[i];
      bd += weights[i];
    }
    if (!(bd > 0)) throw std::runtime_error("weighted_ratio: batch with zero total weight");
    batch_ratios[b] = bn / bd;
    num += bn;
    den += bd;
  }
  (void)used;
  EstimateWithError e;
  e.mean = num / den;
  double var_bm = 0;
  for (double r : batch_ratios) var_bm += (r - e.mean) * (r - e.mean);
  var_bm /= (n_batches - 1);
  e.stderr_ = std::sqrt(var_bm / n_batches);
  e.n_effective = 0;
  e.batches = n_batches;
  return e;
}

LinearFit weighted_least_squares(const std::vector<double>& x, const std::vector<double>& y,
                                 const std::vector<double>& w) {
  if (x.size() != y.size() || x.size() != w.size() || x.size() < 3)
    throw std::invalid_argument("weighted_least_squares: bad input sizes");
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
    swxx += w[i] * x[i] * x[i];
    swxy += w[i] * x[i] * y[i];
  }
  const double det = sw * swxx - swx * swx;
  LinearFit f;
  f.slope = (sw * swxy - swx * swy) / det;
  f.intercept = (swxx * swy - swx * swxy) / det;
  f.slope_stderr = std::sqrt(sw / det);
  double ss_res = 0, ss_tot = 0;
  const double ybar = swy / sw;
  for (size_t i = 0; i < x.size(); ++i) {
    const double pred = f.slope * x[i] + f.intercept;
    ss_res += w[i] * (y[i] - pred) * (y[i] - pred);
    ss_tot += w[i] * (y[i] - ybar) * (y[i] - ybar);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("pearson_correlation: bad input sizes");
  double ma = 0, mb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  double saa = 0, sbb = 0, sab = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
    sab += (a[i] - ma) * (b[i] - mb);
  }
  if (saa <= 0 || sbb <= 0) return 0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace sigmastrip
