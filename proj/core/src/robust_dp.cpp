#include "robustrl/robust_dp.hpp"

#include <algorithm>
#include <string>

#include "robustrl/errors.hpp"

namespace robustrl {
namespace {

void check_spec(const TabularMDP& mdp, const UncertaintySpec& spec, DivergenceKind kind) {
  if (spec.n_states() != mdp.n_states() || spec.n_actions() != mdp.n_actions())
    throw ContractError("uncertainty spec shape does not match the MDP");
  if (spec.kind() != kind)
    throw ContractError(kind == DivergenceKind::kl ? "operation requires a KL uncertainty set"
                                                   : "operation requires an L2 uncertainty set");
}

void check_policy(const TabularMDP& mdp, const Policy& policy) {
  if (policy.n_states() != mdp.n_states() || policy.n_actions() != mdp.n_actions())
    throw ContractError("policy shape does not match the MDP");
}

// Worst-case Q(s, a) = R(s, a) + gamma * min_p <p, v> for every (s, a) with a
// non-zero weight under `mask` (all pairs when mask is empty).
std::vector<double> robust_action_values(const TabularMDP& mdp, const UncertaintySpec& spec,
                                         const ValueFunction& v, const Policy* mask) {
  const int n = mdp.n_states();
  const int m = mdp.n_actions();
  std::vector<double> q(static_cast<std::size_t>(n) * m, 0.0);
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < m; ++a) {
      if (mask != nullptr && mask->prob(s, a) == 0.0) continue;
      const DualSolution sol = worst_case_expectation_kl(mdp.row(s, a), v, spec.radius(s, a));
      q[static_cast<std::size_t>(s) * m + a] = mdp.reward(s, a) + mdp.discount() * sol.worst_value;
    }
  return q;
}

ValueFunction average_over_policy(const Policy& policy, const std::vector<double>& q) {
  const int m = policy.n_actions();
  ValueFunction v(policy.n_states(), 0.0);
  for (int s = 0; s < policy.n_states(); ++s)
    for (int a = 0; a < m; ++a) {
      const double w = policy.prob(s, a);
      if (w != 0.0) v[s] += w * q[static_cast<std::size_t>(s) * m + a];
    }
  return v;
}

ValueFunction max_over_actions(int n, int m, const std::vector<double>& q) {
  ValueFunction v(n);
  for (int s = 0; s < n; ++s)
    v[s] = *std::max_element(q.begin() + static_cast<std::ptrdiff_t>(s) * m,
                             q.begin() + static_cast<std::ptrdiff_t>(s + 1) * m);
  return v;
}

// Iterates `op` until the residual drops to tol * (1 - gamma), then applies
// it once more; see policy_evaluation for the error bound.
template <class Op>
ValueFunction iterate_to_fixed_point(const TabularMDP& mdp, double tol, const Op& op,
                                     int& iterations) {
  if (!(tol > 0.0)) throw ContractError("tolerance must be positive");
  const double stop = tol * (1.0 - mdp.discount());
  ValueFunction v(mdp.n_states(), 0.0);
  iterations = 0;
  for (;;) {
    ValueFunction next = op(v);
    ++iterations;
    const double residual = sup_norm_distance(next, v);
    v = std::move(next);
    if (residual <= stop) break;
  }
  ++iterations;
  return op(v);
}

}  // namespace

ValueFunction robust_bellman_apply(const TabularMDP& mdp, const Policy& policy,
                                   const UncertaintySpec& spec, const ValueFunction& v) {
  check_spec(mdp, spec, DivergenceKind::kl);
  check_policy(mdp, policy);
  if (v.size() != static_cast<std::size_t>(mdp.n_states()))
    throw ContractError("value function shape does not match the MDP");
  return average_over_policy(policy, robust_action_values(mdp, spec, v, &policy));
}

RobustSolution robust_policy_evaluation(const TabularMDP& mdp, const Policy& policy,
                                        const UncertaintySpec& spec, double tol) {
  check_spec(mdp, spec, DivergenceKind::kl);
  check_policy(mdp, policy);
  RobustSolution out{ValueFunction{}, policy, {}, 0};
  out.robust_values = iterate_to_fixed_point(
      mdp, tol,
      [&](const ValueFunction& v) {
        return average_over_policy(policy, robust_action_values(mdp, spec, v, &policy));
      },
      out.iterations);
  out.adversarial_kernel = extract_adversarial_kernel(mdp, policy, spec, out.robust_values, tol);
  return out;
}

RobustSolution robust_value_iteration(const TabularMDP& mdp, const UncertaintySpec& spec,
                                      double tol) {
  check_spec(mdp, spec, DivergenceKind::kl);
  const int n = mdp.n_states();
  const int m = mdp.n_actions();
  int iterations = 0;
  ValueFunction v = iterate_to_fixed_point(
      mdp, tol,
      [&](const ValueFunction& cur) {
        return max_over_actions(n, m, robust_action_values(mdp, spec, cur, nullptr));
      },
      iterations);
  Policy policy = greedy_from_action_values(n, m, robust_action_values(mdp, spec, v, nullptr));
  auto kernel = extract_adversarial_kernel(mdp, policy, spec, v, tol);
  return {std::move(v), std::move(policy), std::move(kernel), iterations};
}

std::vector<double> extract_adversarial_kernel(const TabularMDP& mdp, const Policy& policy,
                                               const UncertaintySpec& spec,
                                               const ValueFunction& robust_values,
                                               double tol) {
  check_spec(mdp, spec, DivergenceKind::kl);
  check_policy(mdp, policy);
  if (robust_values.size() != static_cast<std::size_t>(mdp.n_states()))
    throw ContractError("value function shape does not match the MDP");
  const int n = mdp.n_states();
  const int m = mdp.n_actions();
  std::vector<double> kernel(mdp.kernel().size());
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < m; ++a) {
      const DualSolution sol =
          worst_case_expectation_kl(mdp.row(s, a), robust_values, spec.radius(s, a));
      std::copy(sol.adversarial_dist.begin(), sol.adversarial_dist.end(),
                kernel.begin() + (static_cast<std::ptrdiff_t>(s) * m + a) * n);
    }

  // The extracted kernel must reproduce the robust values it came from.
  const ValueFunction check = policy_evaluation(mdp.with_kernel(kernel), policy, 0.1 * tol);
  const double gap = sup_norm_distance(check, robust_values);
  if (gap > 10.0 * tol)
    throw ValidationError("adversarial kernel does not reproduce the robust values (gap " +
                          std::to_string(gap) + "); were the values converged?");
  return kernel;
}

std::vector<double> extract_adversarial_kernel_l2(const TabularMDP& mdp,
                                                  const UncertaintySpec& spec,
                                                  const ValueFunction& values) {
  check_spec(mdp, spec, DivergenceKind::l2);
  if (values.size() != static_cast<std::size_t>(mdp.n_states()))
    throw ContractError("value function shape does not match the MDP");
  const int n = mdp.n_states();
  const int m = mdp.n_actions();
  std::vector<double> kernel(mdp.kernel().size());
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < m; ++a) {
      const auto row = worst_kernel_l2(mdp.row(s, a), values, spec.radius(s, a));
      std::copy(row.begin(), row.end(),
                kernel.begin() + (static_cast<std::ptrdiff_t>(s) * m + a) * n);
    }
  return kernel;
}

double robust_return(const TabularMDP& mdp, const Policy& policy,
                     const UncertaintySpec& spec, double tol) {
  const RobustSolution sol = robust_policy_evaluation(mdp, policy, spec, tol);
  double j = 0.0;
  for (int s = 0; s < mdp.n_states(); ++s) j += mdp.initial_dist()[s] * sol.robust_values[s];
  return j;
}

}  // namespace robustrl
