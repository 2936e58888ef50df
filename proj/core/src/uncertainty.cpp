#include "robustrl/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "robustrl/errors.hpp"

namespace robustrl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bracket for the scalar dual, in units of the value span on the support.
constexpr double kMinTemperature = 1e-8;
constexpr double kTemperatureRelTol = 1e-12;
constexpr int kMaxBisections = 400;

void check_pair(std::span<const double> q, std::span<const double> v) {
  if (q.size() != v.size()) throw ContractError("q and v must have the same length");
  if (q.empty()) throw ContractError("empty distribution");
  double sum = 0.0;
  for (double x : q) {
    if (!(x >= 0.0)) throw ContractError("q has a negative entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ContractError("q does not sum to 1");
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Gibbs reweighting of q by normalized values u in [0, 1] at temperature tau,
// along with log Z and KL(p || q).
struct GibbsState {
  std::vector<double> p;
  double log_z = 0.0;
  double kl = 0.0;
};

GibbsState gibbs_normalized(std::span<const double> q, std::span<const double> u,
                            double tau) {
  GibbsState g;
  g.p.assign(q.size(), 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;
    g.p[i] = q[i] * std::exp(-u[i] / tau);
    z += g.p[i];
  }
  g.log_z = std::log(z);
  double kl = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;
    g.p[i] /= z;
    if (g.p[i] > 0.0) kl += g.p[i] * (-u[i] / tau - g.log_z);
  }
  g.kl = std::max(kl, 0.0);
  return g;
}

}  // namespace

UncertaintySpec::UncertaintySpec(DivergenceKind kind, int n_states, int n_actions,
                                 std::vector<double> radii)
    : kind_(kind), n_states_(n_states), n_actions_(n_actions), radii_(std::move(radii)) {
  if (n_states_ <= 0 || n_actions_ <= 0)
    throw ContractError("UncertaintySpec: counts must be positive");
  if (radii_.size() != static_cast<std::size_t>(n_states_) * n_actions_)
    throw ContractError("UncertaintySpec: radius table shape");
  for (double r : radii_) {
    if (!(r >= 0.0)) throw ContractError("UncertaintySpec: radius must be non-negative");
    if (!std::isfinite(r)) throw ContractError("UncertaintySpec: radius must be finite");
  }
}

UncertaintySpec UncertaintySpec::uniform(DivergenceKind kind, int n_states,
                                         int n_actions, double radius) {
  return UncertaintySpec(kind, n_states, n_actions,
                         std::vector<double>(static_cast<std::size_t>(n_states) * n_actions,
                                             radius));
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ContractError("kl_divergence: size mismatch");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return kInf;
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ContractError("total_variation: size mismatch");
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
  return 0.5 * tv;
}

DualSolution worst_case_expectation_kl(std::span<const double> q,
                                       std::span<const double> v, double beta) {
  check_pair(q, v);
  if (!(beta >= 0.0)) throw ContractError("worst_case_expectation_kl: beta must be >= 0");

  double vmin = kInf;
  double vmax = -kInf;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;
    if (!std::isfinite(v[i])) throw ContractError("worst_case_expectation_kl: non-finite v");
    vmin = std::min(vmin, v[i]);
    vmax = std::max(vmax, v[i]);
  }
  const double span = vmax - vmin;

  DualSolution sol;
  if (beta == 0.0 || span == 0.0) {
    sol.temperature = kInf;
    sol.adversarial_dist.assign(q.begin(), q.end());
    sol.worst_value = dot(q, v);
    sol.threshold = sol.worst_value;
    sol.constraint_active = false;
    return sol;
  }

  double argmin_mass = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i] > 0.0 && v[i] == vmin) argmin_mass += q[i];

  std::vector<double> u(q.size(), 0.0);
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i] > 0.0) u[i] = (v[i] - vmin) / span;

  auto finish = [&](GibbsState g, double tau, bool active) {
    sol.temperature = tau * span;
    // p = q exp(-(v - omega) / lambda) with sum p = 1 gives omega = vmin - lambda log Z.
    sol.threshold = vmin - sol.temperature * g.log_z;
    sol.adversarial_dist = std::move(g.p);
    sol.worst_value = dot(sol.adversarial_dist, v);
    sol.constraint_active = active;
    return sol;
  };

  if (beta >= -std::log(argmin_mass)) {
    // The point mass on argmin v is feasible: report the vertex exactly.
    GibbsState g = gibbs_normalized(q, u, kMinTemperature);
    for (std::size_t i = 0; i < q.size(); ++i)
      g.p[i] = (q[i] > 0.0 && v[i] == vmin) ? q[i] / argmin_mass : 0.0;
    sol = finish(std::move(g), kMinTemperature, false);
    sol.worst_value = vmin;
    return sol;
  }

  double lo = kMinTemperature;
  {
    GibbsState g = gibbs_normalized(q, u, lo);
    if (g.kl <= beta) return finish(std::move(g), lo, false);
  }
  double hi = 1.0;
  while (gibbs_normalized(q, u, hi).kl > beta) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < kMaxBisections && hi - lo > kTemperatureRelTol * hi; ++it) {
    const double mid = (hi > 4.0 * lo) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (gibbs_normalized(q, u, mid).kl > beta)
      lo = mid;
    else
      hi = mid;
  }
  return finish(gibbs_normalized(q, u, hi), hi, true);
}

std::vector<double> gibbs_reweight(std::span<const double> q, std::span<const double> v,
                                   double temperature) {
  check_pair(q, v);
  if (!(temperature > 0.0)) throw ContractError("gibbs_reweight: temperature must be > 0");
  if (std::isinf(temperature)) return {q.begin(), q.end()};
  double vmin = kInf;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i] > 0.0) vmin = std::min(vmin, v[i]);
  std::vector<double> p(q.size(), 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;
    p[i] = q[i] * std::exp(-(v[i] - vmin) / temperature);
    z += p[i];
  }
  for (double& x : p) x /= z;
  return p;
}

namespace {

// Minimizer of <d, v> + ||d||^2 / (2t) subject to sum d = 0 and d >= -q:
// d_i = max(-q_i, t (mu - v_i)) with mu fixed by sum d = 0.
std::vector<double> l2_path_point(std::span<const double> q, std::span<const double> v,
                                  double t, double vmin, double vmax) {
  auto displacement = [&](double mu, std::vector<double>& d) {
    double sum = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      d[i] = std::max(-q[i], t * (mu - v[i]));
      sum += d[i];
    }
    return sum;
  };
  std::vector<double> d(q.size());
  double lo = vmin;
  double hi = vmax + 1.0 / t;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (displacement(mid, d) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  displacement(0.5 * (lo + hi), d);
  return d;
}

double norm2(std::span<const double> d) {
  double s = 0.0;
  for (double x : d) s += x * x;
  return std::sqrt(s);
}

std::vector<double> apply_displacement(std::span<const double> q,
                                       const std::vector<double>& d) {
  std::vector<double> p(q.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    p[i] = std::max(0.0, q[i] + d[i]);
    sum += p[i];
  }
  for (double& x : p) x /= sum;
  return p;
}

}  // namespace

std::vector<double> worst_kernel_l2(std::span<const double> q, std::span<const double> v,
                                    double beta) {
  check_pair(q, v);
  if (!(beta >= 0.0)) throw ContractError("worst_kernel_l2: beta must be >= 0");
  for (double x : v)
    if (!std::isfinite(x)) throw ContractError("worst_kernel_l2: non-finite v");
  const auto [vmin_it, vmax_it] = std::minmax_element(v.begin(), v.end());
  const double vmin = *vmin_it;
  const double vmax = *vmax_it;
  if (beta == 0.0 || vmax == vmin) return {q.begin(), q.end()};

  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  std::vector<double> u(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) u[i] = v[i] - mean;
  const double unorm = norm2(u);
  std::vector<double> interior(q.size());
  bool inside = true;
  for (std::size_t i = 0; i < q.size(); ++i) {
    interior[i] = q[i] - beta * u[i] / unorm;
    inside = inside && interior[i] >= 0.0;
  }
  if (inside) return interior;

  // ||d(t)|| is non-decreasing along the regularization path; find t with
  // ||d(t)|| = beta, or stop at the vertex if the whole path stays inside.
  const double span = vmax - vmin;
  double lo = 0.0;
  double hi = 1.0 / span;
  for (int grow = 0; norm2(l2_path_point(q, v, hi, vmin, vmax)) < beta; ++grow) {
    if (grow > 200) return apply_displacement(q, l2_path_point(q, v, hi, vmin, vmax));
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (norm2(l2_path_point(q, v, mid, vmin, vmax)) < beta)
      lo = mid;
    else
      hi = mid;
  }
  return apply_displacement(q, l2_path_point(q, v, lo, vmin, vmax));
}

}  // namespace robustrl
