#pragma once

#include <span>

#include "robustrl/random.hpp"

namespace robustrl {

/// Interquartile mean: sort, drop floor(n/4) values from each end, average
/// the rest. Requires at least 4 samples.
double iqm(std::span<const double> samples);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Percentile bootstrap interval of the IQM. Draws n_resamples resamples
/// with replacement (each of the original size), computes their IQMs and
/// returns the (1-level)/2 and (1+level)/2 empirical quantiles (linear
/// interpolation between order statistics). Requires at least 4 samples.
Interval bootstrap_ci(std::span<const double> samples, int n_resamples, double level,
                      Rng& rng);

}  // namespace robustrl
