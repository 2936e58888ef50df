#pragma once

// Generators and independent reference computations shared by the test
// suites. Nothing here calls into the solver code it is meant to check.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "robustrl/mdp.hpp"
#include "robustrl/random.hpp"
#include "robustrl/uncertainty.hpp"

namespace robustrl::testing {

/// Random probability vector of length n with `support` non-zero entries.
inline std::vector<double> random_distribution(int n, Rng& rng, int support = -1) {
  if (support < 0 || support > n) support = n;
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < support; ++i) {
    const int j = i + static_cast<int>(rng() % static_cast<std::uint64_t>(n - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<double> p(n, 0.0);
  double total = 0.0;
  for (int i = 0; i < support; ++i) {
    const double w = 0.05 + uniform01(rng);
    p[idx[i]] = w;
    total += w;
  }
  for (double& x : p) x /= total;
  return p;
}

inline std::vector<double> random_values(int n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = lo + (hi - lo) * uniform01(rng);
  return v;
}

/// Dense random MDP; every kernel row has the given support size.
inline TabularMDP random_mdp(int n, int m, double discount, Rng& rng, int support = -1) {
  std::vector<double> kernel;
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < m; ++a) {
      const auto row = random_distribution(n, rng, support);
      kernel.insert(kernel.end(), row.begin(), row.end());
    }
  std::vector<double> reward = random_values(n * m, rng, 0.0, 1.0);
  return TabularMDP(n, m, std::move(kernel), std::move(reward), discount,
                    random_distribution(n, rng));
}

inline Policy random_policy(int n, int m, Rng& rng) {
  std::vector<double> probs;
  for (int s = 0; s < n; ++s) {
    const auto row = random_distribution(m, rng);
    probs.insert(probs.end(), row.begin(), row.end());
  }
  return Policy(n, m, std::move(probs));
}

inline Policy random_deterministic_policy(int n, int m, Rng& rng) {
  std::vector<int> actions(n);
  for (int& a : actions) a = static_cast<int>(rng() % static_cast<std::uint64_t>(m));
  return Policy::deterministic(m, actions);
}

/// v = (I - gamma P^pi)^{-1} R^pi by an Eigen LU solve, with P^pi and R^pi
/// summed directly from the MDP.
inline std::vector<double> linear_solve_values(const TabularMDP& mdp, const Policy& pi) {
  const int n = mdp.n_states();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  for (int s = 0; s < n; ++s)
    for (int act = 0; act < mdp.n_actions(); ++act) {
      const double w = pi.prob(s, act);
      r(s) += w * mdp.reward(s, act);
      const auto row = mdp.row(s, act);
      for (int t = 0; t < n; ++t) a(s, t) -= mdp.discount() * w * row[t];
    }
  const Eigen::VectorXd v = a.partialPivLu().solve(r);
  return {v.data(), v.data() + n};
}

inline double linear_solve_return(const TabularMDP& mdp, const Policy& pi) {
  const auto v = linear_solve_values(mdp, pi);
  double j = 0.0;
  for (int s = 0; s < mdp.n_states(); ++s) j += mdp.initial_dist()[s] * v[s];
  return j;
}

/// Plain-loop KL(p || q) used as the reference for the library function.
inline double reference_kl(std::span<const double> p, std::span<const double> q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) acc += p[i] * std::log(p[i] / q[i]);
  return acc;
}

/// Random point of {p : KL(p || q) <= beta, supp p within supp q}: walk from
/// q toward a random target on the support, find the largest feasible step
/// by bisection (KL is convex and zero at q along the segment), then pick a
/// uniform fraction of it.
inline std::vector<double> sample_in_kl_ball(std::span<const double> q, double beta, Rng& rng) {
  const int n = static_cast<int>(q.size());
  int support = 0;
  for (double x : q) support += x > 0.0;
  std::vector<double> target(n, 0.0);
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    if (q[i] > 0.0) {
      // occasionally aim at a vertex so the sampler reaches the ball boundary
      target[i] = (rng() % 4 == 0) ? std::pow(uniform01(rng), 8.0) : uniform01(rng);
      total += target[i];
    }
  if (total <= 0.0 || support == 1) return {q.begin(), q.end()};
  for (double& x : target) x /= total;
  auto point = [&](double t) {
    std::vector<double> p(n);
    for (int i = 0; i < n; ++i) p[i] = (1.0 - t) * q[i] + t * target[i];
    return p;
  };
  double lo = 0.0, hi = 1.0;
  if (reference_kl(point(1.0), q) > beta) {
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (reference_kl(point(mid), q) <= beta ? lo : hi) = mid;
    }
  } else {
    lo = 1.0;
  }
  return point(lo * uniform01(rng));
}

/// Random kernel whose every (s, a) row lies in that row's KL ball.
inline std::vector<double> random_kernel_in_ball(const TabularMDP& mdp, const UncertaintySpec& spec,
                                                 Rng& rng) {
  std::vector<double> kernel;
  for (int s = 0; s < mdp.n_states(); ++s)
    for (int a = 0; a < mdp.n_actions(); ++a) {
      const auto row = sample_in_kl_ball(mdp.row(s, a), spec.radius(s, a), rng);
      kernel.insert(kernel.end(), row.begin(), row.end());
    }
  return kernel;
}

/// Two-sided Mann-Whitney U test p-value (normal approximation with tie
/// correction).
inline double mann_whitney_p(std::vector<double> a, std::vector<double> b) {
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  std::vector<std::pair<double, int>> all;
  for (double x : a) all.push_back({x, 0});
  for (double x : b) all.push_back({x, 1});
  std::sort(all.begin(), all.end());
  double rank_sum_a = 0.0, tie_term = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k)
      if (all[k].second == 0) rank_sum_a += avg_rank;
    i = j;
  }
  const double u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
  const double n = n1 + n2;
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) return 1.0;
  const double z = (u - n1 * n2 / 2.0) / std::sqrt(var);
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

/// Three-sigma band for a Bernoulli frequency estimate.
inline double three_sigma(double p, long n) {
  return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace robustrl::testing
