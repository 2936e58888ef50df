#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace robustrl {

/// Default convergence tolerance for exact dynamic programming.
inline constexpr double kExactTol = 1e-10;

/// Finite MDP with a dense nominal kernel.
///
/// The kernel is stored row-major as kernel[(s * n_actions + a) * n_states + s'],
/// rewards as reward[s * n_actions + a]. The constructor validates every row
/// and the initial distribution (sum to one within 1e-12, no negative entry)
/// and requires 0 <= discount < 1; violations throw ContractError.
class TabularMDP {
 public:
  TabularMDP(int n_states, int n_actions, std::vector<double> kernel,
             std::vector<double> reward, double discount,
             std::vector<double> initial_dist);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  double discount() const { return discount_; }

  std::span<const double> row(int s, int a) const {
    return {kernel_.data() + row_offset(s, a), static_cast<std::size_t>(n_states_)};
  }
  double reward(int s, int a) const {
    return reward_[static_cast<std::size_t>(s) * n_actions_ + a];
  }

  const std::vector<double>& kernel() const { return kernel_; }
  const std::vector<double>& rewards() const { return reward_; }
  const std::vector<double>& initial_dist() const { return initial_dist_; }

  /// Same model with a different kernel (validated like the constructor).
  TabularMDP with_kernel(std::vector<double> kernel) const;

 private:
  std::size_t row_offset(int s, int a) const {
    return (static_cast<std::size_t>(s) * n_actions_ + a) * n_states_;
  }

  int n_states_;
  int n_actions_;
  std::vector<double> kernel_;
  std::vector<double> reward_;
  double discount_;
  std::vector<double> initial_dist_;
};

/// Stationary stochastic policy, probs[s * n_actions + a] = pi(a|s).
class Policy {
 public:
  Policy(int n_states, int n_actions, std::vector<double> probs);

  static Policy deterministic(int n_actions, std::span<const int> actions);
  static Policy uniform(int n_states, int n_actions);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  double prob(int s, int a) const {
    return probs_[static_cast<std::size_t>(s) * n_actions_ + a];
  }
  std::span<const double> row(int s) const {
    return {probs_.data() + static_cast<std::size_t>(s) * n_actions_,
            static_cast<std::size_t>(n_actions_)};
  }
  const std::vector<double>& probs() const { return probs_; }

  /// Action of a deterministic policy (the first action with probability 1).
  int action(int s) const;

  bool operator==(const Policy&) const = default;

 private:
  int n_states_;
  int n_actions_;
  std::vector<double> probs_;
};

/// State values (discounted return), indexed by state.
using ValueFunction = std::vector<double>;

/// R^pi and the row-major n_states x n_states matrix P^pi.
struct PolicyModel {
  std::vector<double> reward;
  std::vector<double> kernel;
};

PolicyModel expected_reward_and_kernel(const TabularMDP& mdp, const Policy& policy);

/// T^pi v = R^pi + gamma P^pi v.
ValueFunction bellman_apply(const TabularMDP& mdp, const Policy& policy,
                            const ValueFunction& v);

/// Synchronous fixed-point iteration of T^pi. Stops once the Bellman
/// residual is at most tol * (1 - gamma) and returns one further sweep, so
/// the result is within tol of the true fixed point.
ValueFunction policy_evaluation(const TabularMDP& mdp, const Policy& policy,
                                double tol = kExactTol);

struct OptimalSolution {
  ValueFunction values;
  Policy policy;
};

/// Standard value iteration; the policy is greedy in the returned values,
/// ties broken toward the lowest action index.
OptimalSolution value_iteration(const TabularMDP& mdp, double tol = kExactTol);

/// Q(s, a) = R(s, a) + gamma <P(.|s, a), v>, row-major.
std::vector<double> action_values(const TabularMDP& mdp, const ValueFunction& v);

/// Greedy deterministic policy over a row-major Q table; lowest index wins ties.
Policy greedy_from_action_values(int n_states, int n_actions,
                                 std::span<const double> q);

/// J^pi = <mu, v^pi>.
double discounted_return(const TabularMDP& mdp, const Policy& policy,
                         double tol = kExactTol);

double sup_norm_distance(std::span<const double> a, std::span<const double> b);

}  // namespace robustrl
