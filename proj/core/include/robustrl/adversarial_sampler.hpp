#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "robustrl/mdp.hpp"
#include "robustrl/random.hpp"

namespace robustrl {

/// One draw from the nominal dynamics.
struct Outcome {
  int next_state = 0;
  double reward = 0.0;
  bool terminal = false;
};

/// Environment with generative-model access: sample() may be called any
/// number of times on the same (state, action) and each call is an
/// independent draw from the nominal kernel. Implementations hold no mutable
/// state; all randomness comes from the caller's generator.
class GenerativeEnv {
 public:
  virtual ~GenerativeEnv() = default;

  virtual int n_states() const = 0;
  virtual int n_actions() const = 0;
  virtual int initial(Rng& rng) const = 0;
  virtual Outcome sample(int state, int action, Rng& rng) const = 0;
};

/// kappa value meaning "uniform resampling weights".
inline constexpr double kUniformKappa = std::numeric_limits<double>::infinity();

struct SamplerConfig {
  int n_samples = 1;
  double kappa = kUniformKappa;
  std::uint64_t rng_seed = 0;

  /// Throws ContractError unless n_samples >= 1 and kappa > 0.
  void validate() const;
};

struct Transition {
  int state = 0;
  int action = 0;
  int next_state = 0;
  double reward = 0.0;
  bool terminal = false;
};

using ValueFn = std::function<double(int)>;
using ActionFn = std::function<int(int, Rng&)>;

/// Selection probabilities softmax_i(-(v_i - mean(v)) / kappa).
///
/// The batch mean cancels in the normalization, so the logits are computed as
/// -(v_i - min v) / kappa. That is the usual max-shift for a stable softmax,
/// and it makes the result independent of any constant added to v whenever
/// the shifted values are exactly representable.
std::vector<double> resample_probabilities(std::span<const double> values, double kappa);

std::size_t adversarial_resample(std::span<const Outcome> candidates,
                                 std::span<const double> values, double kappa, Rng& rng);

/// Draws cfg.n_samples candidates from env, weights them by the value of
/// their next state (0 for terminal candidates), and returns the chosen one.
/// With n_samples == 1 no resampling draw is made, so the random stream is
/// exactly that of nominal stepping.
Transition wrapped_step(const GenerativeEnv& env, int state, int action,
                        const ValueFn& value_fn, const SamplerConfig& cfg, Rng& rng);

/// Owns a generator seeded from cfg.rng_seed and steps a shared environment.
class AdversarialWrapper {
 public:
  AdversarialWrapper(const GenerativeEnv& env, SamplerConfig cfg);

  int reset() { return env_->initial(rng_); }
  Transition step(int state, int action, const ValueFn& value_fn) {
    return wrapped_step(*env_, state, action, value_fn, cfg_, rng_);
  }

  const SamplerConfig& config() const { return cfg_; }
  Rng& rng() { return rng_; }

 private:
  const GenerativeEnv* env_;
  SamplerConfig cfg_;
  Rng rng_;
};

struct Episode {
  std::vector<Transition> transitions;
  /// Undiscounted sum of rewards.
  double episodic_return = 0.0;
};

/// Runs one episode until a terminal transition or max_steps.
Episode run_episode(const GenerativeEnv& env, const ActionFn& act,
                    const ValueFn& value_fn, const SamplerConfig& cfg, Rng& rng,
                    int max_steps);

Episode run_episode(const GenerativeEnv& env, const Policy& policy,
                    const ValueFn& value_fn, const SamplerConfig& cfg, Rng& rng,
                    int max_steps);

}  // namespace robustrl
