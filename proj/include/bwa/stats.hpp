#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bwa {

struct ProportionEstimate {
  std::size_t successes = 0;
  std::size_t trials = 0;
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Wilson score interval, two-sided 95%.
ProportionEstimate wilson_interval(std::size_t successes, std::size_t trials);

/// Linear-interpolated quantile (type 7) of a copy of the data.
double quantile(std::vector<double> values, double q);
inline double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

/// Mean and standard error from non-overlapping batch means.
struct BatchMeans {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t batches = 0;
};
BatchMeans batch_means(std::span<const double> samples, std::size_t batches);

}  // namespace bwa
