#include "ld3/pcd/stats.hpp"

#include <algorithm>
#include <cmath>

#include "ld3/errors.hpp"

namespace ld3 {

double pearson_r(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw LengthMismatch("pearson_r: series differ in length");
  if (a.size() < 2) throw LengthMismatch("pearson_r: need at least 2 samples");
  const double n = static_cast<double>(a.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) throw ZeroVariance("pearson_r: constant series");
  // sqrt(s*s) == s exactly, so identical series give exactly 1.
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double rmse(std::span<const Vec2> a, std::span<const Vec2> b) {
  if (a.size() != b.size() || a.empty()) throw LengthMismatch("rmse: need equal, non-empty series");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Vec2 d = a[i] - b[i];
    acc += dot(d, d);
  }
  return std::sqrt(acc / static_cast<double>(a.size()));
}

double lower_median(std::vector<double> values) {
  if (values.empty()) throw LengthMismatch("median of empty set");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

double median_abs_deviation(const std::vector<double>& values) {
  const double med = lower_median(values);
  std::vector<double> dev;
  dev.reserve(values.size());
  for (double v : values) dev.push_back(std::abs(v - med));
  return lower_median(std::move(dev));
}

}  // namespace ld3
