#include "robustrl/adversarial_sampler.hpp"

#include <algorithm>
#include <cmath>

#include "robustrl/errors.hpp"

namespace robustrl {

void SamplerConfig::validate() const {
  if (n_samples < 1) throw ContractError("sampler: n_samples must be >= 1");
  if (!(kappa > 0.0)) throw ContractError("sampler: kappa must be > 0");
}

std::vector<double> resample_probabilities(std::span<const double> values, double kappa) {
  if (values.empty()) throw ContractError("resample: no candidates");
  if (!(kappa > 0.0)) throw ContractError("resample: kappa must be > 0");
  std::vector<double> probs(values.size());
  if (std::isinf(kappa)) {
    std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(values.size()));
    return probs;
  }
  double vmin = values[0];
  for (double v : values) {
    if (!std::isfinite(v)) throw ContractError("resample: non-finite value");
    vmin = std::min(vmin, v);
  }
  double z = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    probs[i] = std::exp(-(values[i] - vmin) / kappa);
    z += probs[i];
  }
  for (double& p : probs) p /= z;
  return probs;
}

std::size_t adversarial_resample(std::span<const Outcome> candidates,
                                 std::span<const double> values, double kappa, Rng& rng) {
  if (candidates.empty()) throw ContractError("resample: no candidates");
  if (candidates.size() != values.size())
    throw ContractError("resample: one value per candidate required");
  if (candidates.size() == 1) return 0;
  return sample_categorical(resample_probabilities(values, kappa), rng);
}

Transition wrapped_step(const GenerativeEnv& env, int state, int action,
                        const ValueFn& value_fn, const SamplerConfig& cfg, Rng& rng) {
  cfg.validate();
  Transition t{state, action, 0, 0.0, false};
  if (cfg.n_samples == 1) {
    const Outcome o = env.sample(state, action, rng);
    t.next_state = o.next_state;
    t.reward = o.reward;
    t.terminal = o.terminal;
    return t;
  }
  std::vector<Outcome> candidates(static_cast<std::size_t>(cfg.n_samples));
  std::vector<double> values(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    candidates[i] = env.sample(state, action, rng);
    values[i] = candidates[i].terminal ? 0.0 : value_fn(candidates[i].next_state);
  }
  const Outcome& chosen = candidates[adversarial_resample(candidates, values, cfg.kappa, rng)];
  t.next_state = chosen.next_state;
  t.reward = chosen.reward;
  t.terminal = chosen.terminal;
  return t;
}

AdversarialWrapper::AdversarialWrapper(const GenerativeEnv& env, SamplerConfig cfg)
    : env_(&env), cfg_(cfg), rng_(cfg.rng_seed) {
  cfg_.validate();
}

Episode run_episode(const GenerativeEnv& env, const ActionFn& act, const ValueFn& value_fn,
                    const SamplerConfig& cfg, Rng& rng, int max_steps) {
  if (max_steps < 1) throw ContractError("run_episode: max_steps must be >= 1");
  Episode ep;
  int state = env.initial(rng);
  for (int step = 0; step < max_steps; ++step) {
    const int action = act(state, rng);
    const Transition t = wrapped_step(env, state, action, value_fn, cfg, rng);
    ep.episodic_return += t.reward;
    ep.transitions.push_back(t);
    if (t.terminal) break;
    state = t.next_state;
  }
  return ep;
}

Episode run_episode(const GenerativeEnv& env, const Policy& policy, const ValueFn& value_fn,
                    const SamplerConfig& cfg, Rng& rng, int max_steps) {
  if (policy.n_states() != env.n_states() || policy.n_actions() != env.n_actions())
    throw ContractError("run_episode: policy shape does not match the environment");
  return run_episode(
      env,
      [&policy](int s, Rng& r) { return static_cast<int>(sample_categorical(policy.row(s), r)); },
      value_fn, cfg, rng, max_steps);
}

}  // namespace robustrl
