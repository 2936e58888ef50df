#include <gtest/gtest.h>

#include "robustrl/envs.hpp"
#include "robustrl/errors.hpp"
#include "robustrl/oracle.hpp"
#include "robustrl/robust_dp.hpp"
#include "test_support.hpp"

namespace rt = robustrl::testing;
using robustrl::DivergenceKind;
using robustrl::Policy;
using robustrl::Rng;
using robustrl::TabularMDP;
using robustrl::UncertaintySpec;

namespace {

UncertaintySpec kl_ball(const TabularMDP& mdp, double beta) {
  return UncertaintySpec::uniform(DivergenceKind::kl, mdp.n_states(), mdp.n_actions(), beta);
}

TabularMDP small_garnet(std::uint64_t seed) {
  return robustrl::make_garnet({.n_states = 4, .n_actions = 2, .branching = 3,
                                .discount = 0.9, .seed = seed});
}

}  // namespace

TEST(RobustBellman, ZeroRadiusEqualsNominalOperator) {
  Rng rng(1);
  const TabularMDP mdp = rt::random_mdp(6, 3, 0.9, rng);
  const Policy pi = rt::random_policy(6, 3, rng);
  const auto v = rt::random_values(6, rng, -5, 5);
  const auto robust = robustrl::robust_bellman_apply(mdp, pi, kl_ball(mdp, 0.0), v);
  const auto nominal = robustrl::bellman_apply(mdp, pi, v);
  for (int s = 0; s < 6; ++s) EXPECT_NEAR(robust[s], nominal[s], 1e-14);
}

TEST(RobustBellman, SingleStateIgnoresRadius) {
  const TabularMDP mdp(1, 2, {1.0, 1.0}, {0.5, 2.0}, 0.9, {1.0});
  const Policy pi(1, 2, {0.25, 0.75});
  const std::vector<double> v = {3.0};
  for (double beta : {0.0, 0.3, 10.0}) {
    const auto out = robustrl::robust_bellman_apply(mdp, pi, kl_ball(mdp, beta), v);
    EXPECT_NEAR(out[0], 0.25 * 0.5 + 0.75 * 2.0 + 0.9 * 3.0, 1e-14);
  }
}

TEST(RobustBellman, InnerMinimizationMatchesGridOracle) {
  Rng rng(2);
  const TabularMDP mdp = rt::random_mdp(3, 2, 0.9, rng);
  const auto v = rt::random_values(3, rng, -2, 2);
  for (int s = 0; s < 3; ++s)
    for (int a = 0; a < 2; ++a) {
      const std::vector<int> acts(3, a);
      const Policy pi = Policy::deterministic(2, acts);
      const auto out = robustrl::robust_bellman_apply(mdp, pi, kl_ball(mdp, 0.1), v);
      const auto ref = robustrl::oracle_worst_case_kl(mdp.row(s, a), v, 0.1, 0.001);
      const double expected = mdp.reward(s, a) + 0.9 * ref.value;
      EXPECT_NEAR(out[s], expected, 0.9 * 2.0 * 0.001 * 2.0) << "s=" << s << " a=" << a;
      EXPECT_LE(out[s], expected + 1e-12);
    }
}

TEST(RobustEvaluation, BelowNominalAndFixedPointConsistent) {
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const TabularMDP mdp = rt::random_mdp(5 + i, 3, 0.95, rng);
    const Policy pi = rt::random_policy(mdp.n_states(), 3, rng);
    const auto spec = kl_ball(mdp, 0.05 + 0.05 * i);
    const auto sol = robustrl::robust_policy_evaluation(mdp, pi, spec);
    const auto nominal = robustrl::policy_evaluation(mdp, pi);
    for (int s = 0; s < mdp.n_states(); ++s) EXPECT_LE(sol.robust_values[s], nominal[s] + 1e-9);

    const TabularMDP adv = mdp.with_kernel(sol.adversarial_kernel);
    const auto replay = robustrl::policy_evaluation(adv, pi);
    EXPECT_LE(robustrl::sup_norm_distance(replay, sol.robust_values), 10 * robustrl::kExactTol);

    const auto residual = robustrl::robust_bellman_apply(mdp, pi, spec, sol.robust_values);
    EXPECT_LE(robustrl::sup_norm_distance(residual, sol.robust_values), robustrl::kExactTol);

    for (int s = 0; s < mdp.n_states(); ++s)
      for (int a = 0; a < 3; ++a) {
        const auto row = adv.row(s, a);
        for (int t = 0; t < mdp.n_states(); ++t)
          if (mdp.row(s, a)[t] == 0.0) EXPECT_EQ(row[t], 0.0);
        EXPECT_LE(robustrl::kl_divergence(row, mdp.row(s, a)), spec.radius(s, a) + 1e-8);
      }
  }
}

TEST(RobustEvaluation, DominatedByKernelsInsideTheBall) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TabularMDP mdp = small_garnet(seed);
    Rng rng(100 + seed);
    const Policy pi = rt::random_policy(4, 2, rng);
    const auto spec = kl_ball(mdp, 0.2);
    const double robust = robustrl::robust_return(mdp, pi, spec);
    for (int k = 0; k < 200; ++k) {
      const TabularMDP other = mdp.with_kernel(rt::random_kernel_in_ball(mdp, spec, rng));
      EXPECT_LE(robust, rt::linear_solve_return(other, pi) + 1e-9);
    }
  }
}

TEST(RobustEvaluation, NonIncreasingInRadius) {
  Rng rng(4);
  const TabularMDP mdp = rt::random_mdp(6, 2, 0.9, rng);
  const Policy pi = rt::random_policy(6, 2, rng);
  std::vector<double> prev = robustrl::policy_evaluation(mdp, pi);
  for (double beta = 0.02; beta < 1.5; beta += 0.1) {
    const auto v = robustrl::robust_policy_evaluation(mdp, pi, kl_ball(mdp, beta)).robust_values;
    for (int s = 0; s < 6; ++s) EXPECT_LE(v[s], prev[s] + 1e-9);
    prev = v;
  }
}

TEST(RobustEvaluation, PerPairRadiusTableIsHonoured) {
  Rng rng(5);
  const TabularMDP mdp = rt::random_mdp(4, 2, 0.9, rng);
  const Policy pi = rt::random_policy(4, 2, rng);
  std::vector<double> radii(8, 0.0);
  radii[3] = 0.4;
  const UncertaintySpec spec(DivergenceKind::kl, 4, 2, radii);
  const auto sol = robustrl::robust_policy_evaluation(mdp, pi, spec);
  for (int s = 0; s < 4; ++s)
    for (int a = 0; a < 2; ++a) {
      if (s * 2 + a == 3) continue;
      for (int t = 0; t < 4; ++t)
        EXPECT_DOUBLE_EQ(sol.adversarial_kernel[(s * 2 + a) * 4 + t], mdp.row(s, a)[t]);
    }
}

TEST(RobustValueIteration, BeatsRandomPoliciesOnRobustReturn) {
  Rng rng(6);
  const TabularMDP mdp = rt::random_mdp(6, 3, 0.9, rng);
  const auto spec = kl_ball(mdp, 0.2);
  const auto opt = robustrl::robust_value_iteration(mdp, spec);
  const double best = robustrl::robust_return(mdp, opt.policy, spec);
  for (int i = 0; i < 50; ++i) {
    const Policy pi = (i % 2 == 0) ? rt::random_policy(6, 3, rng)
                                   : rt::random_deterministic_policy(6, 3, rng);
    EXPECT_GE(best, robustrl::robust_return(mdp, pi, spec) - 1e-9);
  }
}

TEST(RobustValueIteration, AgreesWithEvaluationOfItsGreedyPolicy) {
  Rng rng(7);
  const TabularMDP mdp = rt::random_mdp(8, 3, 0.95, rng);
  const auto spec = kl_ball(mdp, 0.3);
  const auto opt = robustrl::robust_value_iteration(mdp, spec);
  const auto eval = robustrl::robust_policy_evaluation(mdp, opt.policy, spec);
  EXPECT_LE(robustrl::sup_norm_distance(opt.robust_values, eval.robust_values), 1e-8);
  const TabularMDP adv = mdp.with_kernel(opt.adversarial_kernel);
  EXPECT_LE(robustrl::sup_norm_distance(robustrl::policy_evaluation(adv, opt.policy),
                                        opt.robust_values),
            10 * robustrl::kExactTol);
}

TEST(RobustValueIteration, ZeroRadiusReproducesValueIteration) {
  Rng rng(8);
  const TabularMDP mdp = rt::random_mdp(7, 2, 0.9, rng);
  const auto robust = robustrl::robust_value_iteration(mdp, kl_ball(mdp, 0.0));
  const auto nominal = robustrl::value_iteration(mdp);
  EXPECT_LE(robustrl::sup_norm_distance(robust.robust_values, nominal.values), 1e-9);
  EXPECT_EQ(robust.policy, nominal.policy);
  EXPECT_EQ(robust.adversarial_kernel, mdp.kernel());
}

TEST(KernelExtraction, ConstantRewardKeepsNominalKernel) {
  Rng rng(9);
  const TabularMDP base = rt::random_mdp(5, 2, 0.9, rng);
  const TabularMDP mdp(5, 2, base.kernel(), std::vector<double>(10, 1.0), 0.9,
                       base.initial_dist());
  const Policy pi = rt::random_policy(5, 2, rng);
  const std::vector<double> v(5, 10.0);
  const auto kernel = robustrl::extract_adversarial_kernel(mdp, pi, kl_ball(mdp, 0.5), v);
  EXPECT_EQ(kernel, mdp.kernel());
}

TEST(KernelExtraction, NonConvergedValuesAreRejected) {
  Rng rng(10);
  const TabularMDP mdp = rt::random_mdp(5, 2, 0.9, rng);
  const Policy pi = rt::random_policy(5, 2, rng);
  const auto spec = kl_ball(mdp, 0.2);
  auto v = robustrl::robust_policy_evaluation(mdp, pi, spec).robust_values;
  v[0] += 1e-3;
  EXPECT_THROW(robustrl::extract_adversarial_kernel(mdp, pi, spec, v), robustrl::ValidationError);
}

TEST(KernelExtraction, L2KernelLeavesNominalSupport) {
  const TabularMDP mdp(3, 1, {0.0, 0.5, 0.5, 0.0, 0.5, 0.5, 0.0, 0.5, 0.5}, {0, 0, 0}, 0.9,
                       {0, 1, 0});
  const auto spec = UncertaintySpec::uniform(DivergenceKind::l2, 3, 1, 0.2);
  const std::vector<double> v = {-1.0, 0.0, 1.0};
  const auto kernel = robustrl::extract_adversarial_kernel_l2(mdp, spec, v);
  EXPECT_GT(kernel[0], 0.0);
  // the KL ball cannot move mass there
  const auto kl = robustrl::robust_policy_evaluation(mdp, Policy::uniform(3, 1),
                                                     kl_ball(mdp, 0.2));
  EXPECT_EQ(kl.adversarial_kernel[0], 0.0);
}

TEST(RobustDp, ShapeAndKindMismatchesAreContractErrors) {
  Rng rng(11);
  const TabularMDP mdp = rt::random_mdp(3, 2, 0.9, rng);
  const Policy pi = Policy::uniform(3, 2);
  const auto l2 = UncertaintySpec::uniform(DivergenceKind::l2, 3, 2, 0.1);
  EXPECT_THROW(robustrl::robust_policy_evaluation(mdp, pi, l2), robustrl::ContractError);
  const auto wrong = UncertaintySpec::uniform(DivergenceKind::kl, 4, 2, 0.1);
  EXPECT_THROW(robustrl::robust_value_iteration(mdp, wrong), robustrl::ContractError);
  EXPECT_THROW(robustrl::robust_policy_evaluation(mdp, pi, kl_ball(mdp, 0.1), 0.0),
               robustrl::ContractError);
}
