#pragma once

#include <span>
#include <vector>

namespace robustrl {

enum class DivergenceKind { kl, l2 };

/// sa-rectangular uncertainty: one radius per (s, a), row-major.
class UncertaintySpec {
 public:
  UncertaintySpec(DivergenceKind kind, int n_states, int n_actions,
                  std::vector<double> radii);

  /// Same radius broadcast to every (s, a).
  static UncertaintySpec uniform(DivergenceKind kind, int n_states, int n_actions,
                                 double radius);

  DivergenceKind kind() const { return kind_; }
  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  double radius(int s, int a) const {
    return radii_[static_cast<std::size_t>(s) * n_actions_ + a];
  }
  const std::vector<double>& radii() const { return radii_; }

 private:
  DivergenceKind kind_;
  int n_states_;
  int n_actions_;
  std::vector<double> radii_;
};

/// Solution of min <p, v> s.t. KL(p || q) <= beta for one (s, a).
///
/// The minimizer has the Gibbs form p(s) = q(s) exp(-(v(s) - threshold) / temperature).
/// temperature is +inf when the reweighting is the identity (beta = 0 or v
/// constant on the support of q).
struct DualSolution {
  double temperature = 0.0;
  double threshold = 0.0;
  std::vector<double> adversarial_dist;
  double worst_value = 0.0;
  bool constraint_active = false;
};

/// KL(p || q) = sum p log(p / q) with 0 log 0 = 0. Returns +inf when p puts
/// mass where q has none.
double kl_divergence(std::span<const double> p, std::span<const double> q);

double total_variation(std::span<const double> p, std::span<const double> q);

/// Worst-case expectation of v over the KL ball of radius beta around q.
///
/// The temperature maximizes the concave scalar dual
///   g(lambda) = -lambda log sum_s q(s) exp(-v(s) / lambda) - lambda beta,
/// whose derivative is KL(p_lambda || q) - beta. The root is bracketed by
/// growing lambda geometrically from a lower bound of 1e-8 (in units of the
/// value span of v on the support) and then bisected to a relative width of
/// 1e-12. The returned distribution is taken from the feasible side of the
/// bracket, so KL(p || q) <= beta always holds.
///
/// When beta >= -log q(argmin v) the minimizer is the (q-weighted) point mass
/// on the argmin set; it is returned with constraint_active = false.
DualSolution worst_case_expectation_kl(std::span<const double> q,
                                       std::span<const double> v, double beta);

/// Fixed-temperature reweighting p ∝ q exp(-v / temperature). An infinite
/// temperature returns q.
std::vector<double> gibbs_reweight(std::span<const double> q,
                                   std::span<const double> v, double temperature);

/// Worst-case distribution over the simplex intersected with the L2 ball
/// ||p - q||_2 <= beta. Unlike the KL case the result may put mass outside
/// the support of q. When q - beta u (u the centered, unit-norm v) stays in
/// the simplex it is returned directly.
std::vector<double> worst_kernel_l2(std::span<const double> q,
                                    std::span<const double> v, double beta);

}  // namespace robustrl
