#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "robustrl/adversarial_sampler.hpp"
#include "robustrl/mdp.hpp"

namespace robustrl {

class QTable {
 public:
  QTable(int n_states, int n_actions, double learning_rate, double epsilon,
         double discount);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  double learning_rate() const { return learning_rate_; }
  double epsilon() const { return epsilon_; }
  double discount() const { return discount_; }

  double& at(int s, int a) { return values_[index(s, a)]; }
  double at(int s, int a) const { return values_[index(s, a)]; }
  const std::vector<double>& values() const { return values_; }

  /// max_a Q(s, a).
  double state_value(int s) const;
  /// argmax_a Q(s, a), lowest index on ties.
  int greedy_action(int s) const;

  void set_learning_rate(double lr);
  void set_epsilon(double eps);

 private:
  std::size_t index(int s, int a) const {
    return static_cast<std::size_t>(s) * n_actions_ + a;
  }

  int n_states_;
  int n_actions_;
  double learning_rate_;
  double epsilon_;
  double discount_;
  std::vector<double> values_;
};

/// Q(s,a) += alpha (r + gamma (1 - terminal) max_a' Q(s',a') - Q(s,a)).
void apply_q_update(QTable& q, const Transition& t);
QTable q_update(QTable q, const Transition& t);

Policy greedy_policy(const QTable& q);

/// Epsilon-greedy exploration decays linearly from epsilon_start to
/// epsilon_end over the first decay_fraction of total_steps.
struct TrainingSchedule {
  long total_steps = 50000;
  double learning_rate = 0.1;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double decay_fraction = 0.5;
  double discount = 0.99;
  int max_episode_steps = 200;

  double epsilon_at(long step) const;
  void validate() const;
};

struct EpisodeLog {
  int episode_index = 0;
  long env_steps = 0;
  double episodic_return = 0.0;
};

struct TrainingResult {
  QTable q;
  std::vector<EpisodeLog> log;
};

/// Tabular Q-learning. Without a sampler the environment is stepped
/// nominally; with one, every step goes through wrapped_step weighted by the
/// live estimate v(s) = max_a Q(s, a).
TrainingResult train(const GenerativeEnv& env, const std::optional<SamplerConfig>& sampler,
                     const TrainingSchedule& schedule, std::uint64_t seed);

/// `episode_index,env_steps,return` with a header row.
void write_training_log(std::ostream& out, const std::vector<EpisodeLog>& log);

}  // namespace robustrl
