#include "geoboot/cdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geoboot/error.hpp"

namespace geoboot {

// Wichura's algorithm AS241 (PPND16): inverse normal cdf accurate to about
// 1e-16 over (0, 1). Saturates at the representable extremes.
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw Error("normal_quantile: p outside [0, 1]");
  }
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
              6.7265770927008700853e4) *
                 r +
             4.5921953931549871457e4) *
                r +
            1.3731693765509461125e4) *
               r +
           1.9715909503065514427e3) *
              r +
          1.3314166789178437745e2) *
             r +
         3.3871328727963666080);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) *
                 r +
             2.1213794301586595867e4) *
                r +
            5.3941960214247511077e3) *
               r +
           6.8718700749205790830e2) *
              r +
          4.2313330701600911252e1) *
             r +
         1.0);
    return q * num / den;
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) *
                 r +
             1.27045825245236838258) *
                r +
            3.64784832476320460504) *
               r +
           5.76949722146069140550) *
              r +
          4.63033784615654529590) *
             r +
         1.42343711074968357734);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) *
                 r +
             1.48103976427480074590e-1) *
                r +
            6.89767334985100004550e-1) *
               r +
           1.67638483018380384940) *
              r +
          2.05319162663775882187) *
             r +
         1.0);
    value = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) *
                 r +
             2.65321895265761230930e-2) *
                r +
            2.96560571828504891230e-1) *
               r +
           1.78482653991729133580) *
              r +
          5.46378491116411436990) *
             r +
         6.65790464350110377720);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) *
                  r +
              1.84631831751005468180e-5) *
                 r +
             7.86869131145613259100e-4) *
                r +
            1.48753612908506148525e-2) *
               r +
           1.36929880922735805310e-1) *
              r +
          5.99832206555887937690e-1) *
             r +
         1.0);
    value = num / den;
  }
  return (q < 0.0) ? -value : value;
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / 1.4142135623730950488016887242097);
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> sample)
    : values_(std::move(sample)) {
  if (values_.empty()) {
    throw Error("empirical cdf: empty sample");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw Error("empirical cdf: non-finite sample value");
    }
  }
  std::sort(values_.begin(), values_.end());

  const double n = static_cast<double>(values_.size());
  double sum = 0.0;
  for (double v : values_) sum += v;
  mean_ = sum / n;
  double ss = 0.0;
  for (double v : values_) ss += (v - mean_) * (v - mean_);
  variance_ = ss / n;

  scores_.resize(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    scores_[i] = normal_quantile((static_cast<double>(i) + 0.5) / n);
  }
}

double EmpiricalCdf::to_gaussian(double value) const {
  const std::size_t n = values_.size();
  if (n == 1) return 0.0;
  if (value < values_.front()) return scores_.front();
  if (value > values_.back()) return scores_.back();
  const auto lo = std::lower_bound(values_.begin(), values_.end(), value);
  const auto hi = std::upper_bound(lo, values_.end(), value);
  const auto a = static_cast<std::size_t>(lo - values_.begin());
  const auto b = static_cast<std::size_t>(hi - values_.begin());
  if (a < b) {
    // value coincides with a (possibly tied) sample: mid-run score
    return 0.5 * (scores_[a] + scores_[b - 1]);
  }
  // strictly between two distinct samples
  const double v0 = values_[a - 1];
  const double v1 = values_[a];
  const double t = (value - v0) / (v1 - v0);
  return scores_[a - 1] + t * (scores_[a] - scores_[a - 1]);
}

double EmpiricalCdf::from_gaussian(double score) const {
  const std::size_t n = values_.size();
  if (n == 1) return values_[0];
  double v;
  if (score <= scores_.front()) {
    const double slope =
        (values_[1] - values_[0]) / (scores_[1] - scores_[0]);
    v = values_.front() + (score - scores_.front()) * slope;
  } else if (score >= scores_.back()) {
    const double slope = (values_[n - 1] - values_[n - 2]) /
                         (scores_[n - 1] - scores_[n - 2]);
    v = values_.back() + (score - scores_.back()) * slope;
  } else {
    const auto it = std::lower_bound(scores_.begin(), scores_.end(), score);
    const auto i = static_cast<std::size_t>(it - scores_.begin());
    const double t = (score - scores_[i - 1]) / (scores_[i] - scores_[i - 1]);
    v = values_[i - 1] + t * (values_[i] - values_[i - 1]);
  }
  return std::clamp(v, values_.front(), values_.back());
}

double EmpiricalCdf::cdf(double value) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), value);
  return static_cast<double>(it - values_.begin()) /
         static_cast<double>(values_.size());
}

}  // namespace geoboot
