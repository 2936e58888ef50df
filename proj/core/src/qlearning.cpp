#include "robustrl/qlearning.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "robustrl/errors.hpp"
#include "robustrl/format.hpp"

namespace robustrl {

QTable::QTable(int n_states, int n_actions, double learning_rate, double epsilon,
               double discount)
    : n_states_(n_states),
      n_actions_(n_actions),
      learning_rate_(0.0),
      epsilon_(0.0),
      discount_(discount),
      values_(static_cast<std::size_t>(n_states) * n_actions, 0.0) {
  if (n_states <= 0 || n_actions <= 0) throw ContractError("QTable: counts must be positive");
  if (!(discount >= 0.0 && discount < 1.0)) throw ContractError("QTable: discount in [0, 1)");
  set_learning_rate(learning_rate);
  set_epsilon(epsilon);
}

void QTable::set_learning_rate(double lr) {
  // zero is accepted so that a frozen table can be expressed
  if (!(lr >= 0.0 && lr <= 1.0)) throw ContractError("QTable: learning rate in [0, 1]");
  learning_rate_ = lr;
}

void QTable::set_epsilon(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw ContractError("QTable: epsilon in [0, 1]");
  epsilon_ = eps;
}

double QTable::state_value(int s) const {
  const auto first = values_.begin() + static_cast<std::ptrdiff_t>(index(s, 0));
  return *std::max_element(first, first + n_actions_);
}

int QTable::greedy_action(int s) const {
  const auto first = values_.begin() + static_cast<std::ptrdiff_t>(index(s, 0));
  return static_cast<int>(std::max_element(first, first + n_actions_) - first);
}

void apply_q_update(QTable& q, const Transition& t) {
  const double bootstrap = t.terminal ? 0.0 : q.discount() * q.state_value(t.next_state);
  double& cell = q.at(t.state, t.action);
  cell += q.learning_rate() * (t.reward + bootstrap - cell);
}

QTable q_update(QTable q, const Transition& t) {
  apply_q_update(q, t);
  return q;
}

Policy greedy_policy(const QTable& q) {
  return greedy_from_action_values(q.n_states(), q.n_actions(), q.values());
}

double TrainingSchedule::epsilon_at(long step) const {
  const double horizon = decay_fraction * static_cast<double>(total_steps);
  if (horizon <= 0.0 || static_cast<double>(step) >= horizon) return epsilon_end;
  const double frac = static_cast<double>(step) / horizon;
  return epsilon_start + frac * (epsilon_end - epsilon_start);
}

void TrainingSchedule::validate() const {
  if (total_steps < 1) throw ContractError("schedule: total_steps must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0))
    throw ContractError("schedule: learning_rate in (0, 1]");
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0 && epsilon_end >= 0.0 &&
        epsilon_end <= 1.0))
    throw ContractError("schedule: epsilon values in [0, 1]");
  if (!(decay_fraction >= 0.0 && decay_fraction <= 1.0))
    throw ContractError("schedule: decay_fraction in [0, 1]");
  if (!(discount >= 0.0 && discount < 1.0)) throw ContractError("schedule: discount in [0, 1)");
  if (max_episode_steps < 1) throw ContractError("schedule: max_episode_steps must be >= 1");
}

TrainingResult train(const GenerativeEnv& env, const std::optional<SamplerConfig>& sampler,
                     const TrainingSchedule& schedule, std::uint64_t seed) {
  schedule.validate();
  if (sampler) sampler->validate();
  TrainingResult result{QTable(env.n_states(), env.n_actions(), schedule.learning_rate,
                               schedule.epsilon_start, schedule.discount),
                        {}};
  QTable& q = result.q;
  Rng rng(seed);
  const ValueFn value_fn = [&q](int s) { return q.state_value(s); };
  const SamplerConfig nominal{};

  long step = 0;
  int episode = 0;
  while (step < schedule.total_steps) {
    int state = env.initial(rng);
    double ret = 0.0;
    for (int t = 0; t < schedule.max_episode_steps && step < schedule.total_steps; ++t) {
      q.set_epsilon(schedule.epsilon_at(step));
      const int action = uniform01(rng) < q.epsilon()
                             ? static_cast<int>(rng() % static_cast<std::uint64_t>(env.n_actions()))
                             : q.greedy_action(state);
      const Transition tr =
          wrapped_step(env, state, action, value_fn, sampler ? *sampler : nominal, rng);
      apply_q_update(q, tr);
      ret += tr.reward;
      ++step;
      if (tr.terminal) break;
      state = tr.next_state;
    }
    result.log.push_back({episode++, step, ret});
  }
  return result;
}

void write_training_log(std::ostream& out, const std::vector<EpisodeLog>& log) {
  out << "episode_index,env_steps,return\n";
  for (const EpisodeLog& e : log)
    out << e.episode_index << ',' << e.env_steps << ',' << format_double(e.episodic_return)
        << '\n';
}

}  // namespace robustrl
