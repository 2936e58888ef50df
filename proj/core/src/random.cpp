#include "robustrl/random.hpp"

#include "robustrl/errors.hpp"

namespace robustrl {

std::size_t sample_categorical(std::span<const double> weights, Rng& rng) {
  if (weights.empty()) throw ContractError("sample_categorical: empty weights");
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw ContractError("sample_categorical: weights sum to zero");
  const double target = uniform01(rng) * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (target < acc) return i;
  }
  // rounding can leave target == total
  return last_positive;
}

}  // namespace robustrl
