#include "robustrl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "robustrl/errors.hpp"

namespace robustrl {
namespace {

constexpr double kSumTol = 1e-12;

void check_distribution(std::span<const double> p, const char* what) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x))
      throw ContractError(std::string(what) + ": negative or non-finite entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSumTol)
    throw ContractError(std::string(what) + ": does not sum to 1");
}

}  // namespace

TabularMDP::TabularMDP(int n_states, int n_actions, std::vector<double> kernel,
                       std::vector<double> reward, double discount,
                       std::vector<double> initial_dist)
    : n_states_(n_states),
      n_actions_(n_actions),
      kernel_(std::move(kernel)),
      reward_(std::move(reward)),
      discount_(discount),
      initial_dist_(std::move(initial_dist)) {
  if (n_states_ <= 0 || n_actions_ <= 0)
    throw ContractError("TabularMDP: state and action counts must be positive");
  const auto sa = static_cast<std::size_t>(n_states_) * n_actions_;
  if (kernel_.size() != sa * n_states_) throw ContractError("TabularMDP: kernel shape");
  if (reward_.size() != sa) throw ContractError("TabularMDP: reward shape");
  if (initial_dist_.size() != static_cast<std::size_t>(n_states_))
    throw ContractError("TabularMDP: initial_dist shape");
  if (!(discount_ >= 0.0 && discount_ < 1.0))
    throw ContractError("TabularMDP: discount must lie in [0, 1)");
  for (int s = 0; s < n_states_; ++s)
    for (int a = 0; a < n_actions_; ++a) check_distribution(row(s, a), "TabularMDP kernel row");
  for (double r : reward_)
    if (!std::isfinite(r)) throw ContractError("TabularMDP: non-finite reward");
  check_distribution(initial_dist_, "TabularMDP initial_dist");
}

TabularMDP TabularMDP::with_kernel(std::vector<double> kernel) const {
  return TabularMDP(n_states_, n_actions_, std::move(kernel), reward_, discount_,
                    initial_dist_);
}

Policy::Policy(int n_states, int n_actions, std::vector<double> probs)
    : n_states_(n_states), n_actions_(n_actions), probs_(std::move(probs)) {
  if (n_states_ <= 0 || n_actions_ <= 0)
    throw ContractError("Policy: state and action counts must be positive");
  if (probs_.size() != static_cast<std::size_t>(n_states_) * n_actions_)
    throw ContractError("Policy: shape");
  for (int s = 0; s < n_states_; ++s) check_distribution(row(s), "Policy row");
}

Policy Policy::deterministic(int n_actions, std::span<const int> actions) {
  std::vector<double> probs(actions.size() * n_actions, 0.0);
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (actions[s] < 0 || actions[s] >= n_actions)
      throw ContractError("Policy::deterministic: action out of range");
    probs[s * n_actions + actions[s]] = 1.0;
  }
  return Policy(static_cast<int>(actions.size()), n_actions, std::move(probs));
}

Policy Policy::uniform(int n_states, int n_actions) {
  return Policy(n_states, n_actions,
                std::vector<double>(static_cast<std::size_t>(n_states) * n_actions,
                                    1.0 / n_actions));
}

int Policy::action(int s) const {
  const auto r = row(s);
  return static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
}

namespace {

void check_shapes(const TabularMDP& mdp, const Policy& policy) {
  if (mdp.n_states() != policy.n_states() || mdp.n_actions() != policy.n_actions())
    throw ContractError("policy shape does not match the MDP");
}

void check_values(const TabularMDP& mdp, const ValueFunction& v) {
  if (v.size() != static_cast<std::size_t>(mdp.n_states()))
    throw ContractError("value function shape does not match the MDP");
}

}  // namespace

PolicyModel expected_reward_and_kernel(const TabularMDP& mdp, const Policy& policy) {
  check_shapes(mdp, policy);
  const int n = mdp.n_states();
  PolicyModel out{std::vector<double>(n, 0.0),
                  std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
  for (int s = 0; s < n; ++s) {
    double* dst = out.kernel.data() + static_cast<std::size_t>(s) * n;
    for (int a = 0; a < mdp.n_actions(); ++a) {
      const double w = policy.prob(s, a);
      if (w == 0.0) continue;
      out.reward[s] += w * mdp.reward(s, a);
      const auto src = mdp.row(s, a);
      for (int t = 0; t < n; ++t) dst[t] += w * src[t];
    }
  }
  return out;
}

namespace {

ValueFunction apply_model(const PolicyModel& m, double discount, const ValueFunction& v) {
  const std::size_t n = v.size();
  ValueFunction out(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double* row = m.kernel.data() + s * n;
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) acc += row[t] * v[t];
    out[s] = m.reward[s] + discount * acc;
  }
  return out;
}

void check_tol(double tol) {
  if (!(tol > 0.0)) throw ContractError("tolerance must be positive");
}

}  // namespace

ValueFunction bellman_apply(const TabularMDP& mdp, const Policy& policy,
                            const ValueFunction& v) {
  check_values(mdp, v);
  return apply_model(expected_reward_and_kernel(mdp, policy), mdp.discount(), v);
}

ValueFunction policy_evaluation(const TabularMDP& mdp, const Policy& policy, double tol) {
  check_tol(tol);
  const PolicyModel model = expected_reward_and_kernel(mdp, policy);
  const double stop = tol * (1.0 - mdp.discount());
  ValueFunction v(mdp.n_states(), 0.0);
  for (;;) {
    ValueFunction next = apply_model(model, mdp.discount(), v);
    const double residual = sup_norm_distance(next, v);
    v = std::move(next);
    if (residual <= stop) break;
  }
  return apply_model(model, mdp.discount(), v);
}

std::vector<double> action_values(const TabularMDP& mdp, const ValueFunction& v) {
  check_values(mdp, v);
  const int n = mdp.n_states();
  const int m = mdp.n_actions();
  std::vector<double> q(static_cast<std::size_t>(n) * m);
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < m; ++a) {
      const auto row = mdp.row(s, a);
      double acc = 0.0;
      for (int t = 0; t < n; ++t) acc += row[t] * v[t];
      q[static_cast<std::size_t>(s) * m + a] = mdp.reward(s, a) + mdp.discount() * acc;
    }
  return q;
}

Policy greedy_from_action_values(int n_states, int n_actions, std::span<const double> q) {
  std::vector<int> actions(n_states);
  for (int s = 0; s < n_states; ++s) {
    const auto row = q.subspan(static_cast<std::size_t>(s) * n_actions, n_actions);
    actions[s] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return Policy::deterministic(n_actions, actions);
}

OptimalSolution value_iteration(const TabularMDP& mdp, double tol) {
  check_tol(tol);
  const int n = mdp.n_states();
  const int m = mdp.n_actions();
  const double stop = tol * (1.0 - mdp.discount());
  ValueFunction v(n, 0.0);
  auto sweep = [&](const ValueFunction& cur) {
    const auto q = action_values(mdp, cur);
    ValueFunction out(n);
    for (int s = 0; s < n; ++s)
      out[s] = *std::max_element(q.begin() + static_cast<std::ptrdiff_t>(s) * m,
                                 q.begin() + static_cast<std::ptrdiff_t>(s + 1) * m);
    return out;
  };
  for (;;) {
    ValueFunction next = sweep(v);
    const double residual = sup_norm_distance(next, v);
    v = std::move(next);
    if (residual <= stop) break;
  }
  v = sweep(v);
  const auto q = action_values(mdp, v);
  return {v, greedy_from_action_values(n, m, q)};
}

double discounted_return(const TabularMDP& mdp, const Policy& policy, double tol) {
  const ValueFunction v = policy_evaluation(mdp, policy, tol);
  double j = 0.0;
  for (int s = 0; s < mdp.n_states(); ++s) j += mdp.initial_dist()[s] * v[s];
  return j;
}

double sup_norm_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractError("sup_norm_distance: size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace robustrl
