#include "robustrl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "robustrl/errors.hpp"

namespace robustrl {

namespace {

double iqm_of_sorted(const std::vector<double>& sorted) {
  const std::size_t n = sorted.size();
  const std::size_t cut = n / 4;
  // a constant middle block averages to itself without rounding drift
  if (sorted[cut] == sorted[n - cut - 1]) return sorted[cut];
  double sum = 0.0;
  for (std::size_t i = cut; i < n - cut; ++i) sum += sorted[i];
  return sum / static_cast<double>(n - 2 * cut);
}

double quantile_of_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (sorted[lo] == sorted[hi]) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double iqm(std::span<const double> samples) {
  if (samples.size() < 4) throw ContractError("iqm: needs at least 4 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  return iqm_of_sorted(sorted);
}

Interval bootstrap_ci(std::span<const double> samples, int n_resamples, double level,
                      Rng& rng) {
  if (samples.size() < 4) throw ContractError("bootstrap_ci: needs at least 4 samples");
  if (n_resamples < 1) throw ContractError("bootstrap_ci: n_resamples must be >= 1");
  if (!(level > 0.0 && level < 1.0)) throw ContractError("bootstrap_ci: level in (0, 1)");

  const std::size_t n = samples.size();
  std::vector<double> stats;
  stats.reserve(static_cast<std::size_t>(n_resamples));
  std::vector<double> draw(n);
  for (int r = 0; r < n_resamples; ++r) {
    for (std::size_t i = 0; i < n; ++i)
      draw[i] = samples[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n))];
    std::sort(draw.begin(), draw.end());
    stats.push_back(iqm_of_sorted(draw));
  }
  std::sort(stats.begin(), stats.end());
  const double tail = 0.5 * (1.0 - level);
  return {quantile_of_sorted(stats, tail), quantile_of_sorted(stats, 1.0 - tail)};
}

}  // namespace robustrl
