#pragma once

#include <vector>

#include "robustrl/mdp.hpp"
#include "robustrl/uncertainty.hpp"

namespace robustrl {

struct RobustSolution {
  ValueFunction robust_values;
  Policy policy;
  /// Worst-case kernel in the same layout as TabularMDP::kernel().
  std::vector<double> adversarial_kernel;
  int iterations = 0;
};

/// (T v)(s) = sum_a pi(a|s) [R(s,a) + gamma * min_{p in ball(s,a)} <p, v>].
/// Requires a KL spec.
ValueFunction robust_bellman_apply(const TabularMDP& mdp, const Policy& policy,
                                   const UncertaintySpec& spec, const ValueFunction& v);

/// Robust policy evaluation. Same stopping rule as policy_evaluation, so the
/// values are within tol of the robust fixed point and the extracted kernel
/// reproduces them within tol.
RobustSolution robust_policy_evaluation(const TabularMDP& mdp, const Policy& policy,
                                        const UncertaintySpec& spec,
                                        double tol = kExactTol);

/// Robust value iteration with T* v = max_pi T^pi v; the returned policy is
/// deterministic and greedy (lowest action index on ties).
RobustSolution robust_value_iteration(const TabularMDP& mdp, const UncertaintySpec& spec,
                                      double tol = kExactTol);

/// Row (s, a) is the KL-worst distribution against robust_values. The result
/// is checked by evaluating the policy under the extracted kernel; a mismatch
/// larger than 10 * tol throws ValidationError.
std::vector<double> extract_adversarial_kernel(const TabularMDP& mdp, const Policy& policy,
                                               const UncertaintySpec& spec,
                                               const ValueFunction& robust_values,
                                               double tol = kExactTol);

/// Row-wise L2 worst kernel against the given values. No fixed-point check:
/// the L2 path exists to show that the worst kernel leaves the nominal support.
std::vector<double> extract_adversarial_kernel_l2(const TabularMDP& mdp,
                                                  const UncertaintySpec& spec,
                                                  const ValueFunction& values);

/// J^pi_P = <mu, robust values>.
double robust_return(const TabularMDP& mdp, const Policy& policy,
                     const UncertaintySpec& spec, double tol = kExactTol);

}  // namespace robustrl
