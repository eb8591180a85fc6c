#pragma once

#include <vector>

namespace geoboot {

/// Inverse standard normal cdf (Wichura's AS241, double precision).
double normal_quantile(double p);

/// Standard normal cdf.
double normal_cdf(double x);

/// Empirical distribution of a data sample, with the normal-score tables
/// direct sequential simulation draws through. The sample is sorted once;
/// sorted value v_(i) is paired with the Gaussian quantile of (i + 0.5) / n.
/// Both transforms interpolate linearly between table entries; the
/// back-transform extrapolates tails linearly and clamps to [min, max] so
/// simulated values stay inside the data support.
class EmpiricalCdf {
 public:
  /// Throws on an empty or non-finite sample.
  explicit EmpiricalCdf(std::vector<double> sample);

  std::size_t size() const { return values_.size(); }
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }
  double mean() const { return mean_; }
  /// Population variance (1/n).
  double variance() const { return variance_; }

  /// Forward normal-score transform of an original-unit value.
  double to_gaussian(double value) const;

  /// Back-transform of a Gaussian score to original units.
  double from_gaussian(double score) const;

  /// Right-continuous empirical cdf P(X <= value).
  double cdf(double value) const;

  const std::vector<double>& sorted_values() const { return values_; }

 private:
  std::vector<double> values_;  // ascending
  std::vector<double> scores_;  // strictly ascending Gaussian quantiles
  double mean_ = 0.0;
  double variance_ = 0.0;
};

}  // namespace geoboot
