#pragma once

#include <span>
#include <vector>

#include "ld3/geometry.hpp"

namespace ld3 {

/// Sample Pearson correlation. Throws LengthMismatch for unequal or short
/// inputs and ZeroVariance when either series is constant.
double pearson_r(std::span<const double> a, std::span<const double> b);

/// Root mean squared Euclidean distance between paired points.
double rmse(std::span<const Vec2> a, std::span<const Vec2> b);

/// Lower median (element (n-1)/2 of the sorted values). Takes a copy.
double lower_median(std::vector<double> values);

/// Lower median of absolute deviations from the lower median.
double median_abs_deviation(const std::vector<double>& values);

}  // namespace ld3
