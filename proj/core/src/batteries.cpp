#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "robustrl/errors.hpp"
#include "robustrl/experiment.hpp"
#include "robustrl/oracle.hpp"

namespace robustrl {

namespace {

constexpr int kInstanceLength = 6;

struct KlInstance {
  std::vector<double> q;
  std::vector<double> v;
  double beta = 0.0;
};

// Support of size 3 or 4 scattered over a length-6 vector; weights from
// normalized exponentials, values uniform in [-5, 5].
KlInstance random_kl_instance(Rng& rng, double beta_min, double beta_max) {
  KlInstance inst;
  inst.q.assign(kInstanceLength, 0.0);
  inst.v.resize(kInstanceLength);
  const int support = 3 + static_cast<int>(rng() % 2);
  std::vector<int> slots(kInstanceLength);
  for (int i = 0; i < kInstanceLength; ++i) slots[i] = i;
  for (int i = 0; i < support; ++i) {
    const int j = i + static_cast<int>(rng() % static_cast<std::uint64_t>(kInstanceLength - i));
    std::swap(slots[i], slots[j]);
  }
  double total = 0.0;
  for (int i = 0; i < support; ++i) {
    const double w = -std::log1p(-uniform01(rng));
    inst.q[slots[i]] = w;
    total += w;
  }
  for (double& x : inst.q) x /= total;
  for (double& x : inst.v) x = -5.0 + 10.0 * uniform01(rng);
  inst.beta = beta_min + (beta_max - beta_min) * uniform01(rng);
  return inst;
}

}  // namespace

KlBatteryReport run_kl_battery(const OracleCheckConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  KlBatteryReport report;
  report.instances = cfg.kl_instances;
  for (int i = 0; i < cfg.kl_instances; ++i) {
    const KlInstance inst = random_kl_instance(rng, cfg.beta_min, cfg.beta_max);
    const DualSolution dual = worst_case_expectation_kl(inst.q, inst.v, inst.beta);
    const OracleResult grid = oracle_worst_case_kl(inst.q, inst.v, inst.beta, cfg.resolution);
    double vmax = 0.0;
    for (double x : inst.v) vmax = std::max(vmax, std::abs(x));
    const double ratio = std::abs(dual.worst_value - grid.value) / (cfg.resolution * vmax);
    const double tv = total_variation(dual.adversarial_dist, grid.dist);
    report.max_value_ratio = std::max(report.max_value_ratio, ratio);
    report.max_tv = std::max(report.max_tv, tv);
    if (ratio > cfg.value_factor) ++report.value_failures;
    if (tv > cfg.tv_tol) ++report.tv_failures;
  }
  report.passed = report.value_failures == 0 && report.tv_failures == 0;
  return report;
}

std::vector<double> sampler_empirical_distribution(const std::vector<double>& q,
                                                   const std::vector<double>& v,
                                                   const SamplerConfig& cfg, int steps,
                                                   Rng& rng) {
  if (q.size() != v.size() || q.empty())
    throw ContractError("sampler check: q and v must be non-empty and of equal length");
  const int n = static_cast<int>(q.size());
  std::vector<double> kernel;
  kernel.reserve(q.size() * q.size());
  for (int s = 0; s < n; ++s) kernel.insert(kernel.end(), q.begin(), q.end());
  const TabularEnv env(TabularMDP(n, 1, std::move(kernel), std::vector<double>(n, 0.0), 0.0,
                                  q));
  const ValueFn value_fn = [&v](int s) { return v[static_cast<std::size_t>(s)]; };
  std::vector<double> freq(q.size(), 0.0);
  for (int t = 0; t < steps; ++t)
    freq[static_cast<std::size_t>(wrapped_step(env, 0, 0, value_fn, cfg, rng).next_state)] += 1.0;
  for (double& f : freq) f /= steps;
  return freq;
}

double chi_squared_p_value(const std::vector<long>& counts, const std::vector<double>& probs) {
  if (counts.size() != probs.size()) throw ContractError("chi-squared: length mismatch");
  long total = 0;
  for (long c : counts) total += c;
  double stat = 0.0;
  int cells = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (probs[i] <= 0.0) {
      if (counts[i] > 0) return 0.0;
      continue;
    }
    const double expected = probs[i] * static_cast<double>(total);
    stat += (counts[i] - expected) * (counts[i] - expected) / expected;
    ++cells;
  }
  if (cells < 2) return 1.0;
  const boost::math::chi_squared dist(cells - 1);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

SamplerBatteryReport run_sampler_battery(const OracleCheckConfig& cfg, std::uint64_t seed) {
  const std::vector<double> q = {0.1, 0.15, 0.2, 0.25, 0.3};
  const std::vector<double> v = {1.0, -0.5, 0.25, 2.0, 0.0};
  SamplerBatteryReport report;

  Rng rng(seed);
  const SamplerConfig limit{cfg.sampler_candidates, cfg.sampler_kappa, 0};
  const auto empirical = sampler_empirical_distribution(q, v, limit, cfg.sampler_steps, rng);
  report.limit_tv = total_variation(empirical, gibbs_reweight(q, v, cfg.sampler_kappa));

  const SamplerConfig single{1, cfg.sampler_kappa, 0};
  const auto freq = sampler_empirical_distribution(q, v, single, cfg.sampler_steps, rng);
  std::vector<long> counts;
  for (double f : freq) counts.push_back(std::lround(f * cfg.sampler_steps));
  report.nominal_p_value = chi_squared_p_value(counts, q);

  report.passed = report.limit_tv <= cfg.sampler_tv_tol && report.nominal_p_value > cfg.chi2_min_p;
  return report;
}

}  // namespace robustrl
