#include "robustrl/oracle.hpp"

#include <cmath>
#include <limits>

#include "robustrl/errors.hpp"

namespace robustrl {
namespace {

// Exhaustive search over grid points n / M of the simplex on `dims`
// coordinates for min sum_i value_i[n_i] subject to sum_i cost_i[n_i] <= budget.
// Both objective and constraint are separable, so each coordinate contributes
// a precomputed table entry and partial sums are carried down the recursion.
class GridSearch {
 public:
  GridSearch(int grid, std::vector<std::vector<double>> cost,
             std::vector<std::vector<double>> value, double budget)
      : grid_(grid), cost_(std::move(cost)), value_(std::move(value)), budget_(budget),
        current_(cost_.size(), 0), best_(cost_.size(), 0) {}

  bool run() {
    recurse(0, grid_, 0.0, 0.0);
    return found_;
  }
  const std::vector<int>& best() const { return best_; }
  double best_value() const { return best_value_; }

 private:
  void recurse(std::size_t dim, int remaining, double cost, double value) {
    const std::size_t last = cost_.size() - 1;
    if (dim == last) {
      const double c = cost + cost_[dim][remaining];
      if (c > budget_) return;
      const double val = value + value_[dim][remaining];
      if (!found_ || val < best_value_) {
        found_ = true;
        best_value_ = val;
        current_[dim] = remaining;
        best_ = current_;
      }
      return;
    }
    for (int n = 0; n <= remaining; ++n) {
      current_[dim] = n;
      recurse(dim + 1, remaining - n, cost + cost_[dim][n], value + value_[dim][n]);
    }
  }

  int grid_;
  std::vector<std::vector<double>> cost_;
  std::vector<std::vector<double>> value_;
  double budget_;
  std::vector<int> current_;
  std::vector<int> best_;
  double best_value_ = std::numeric_limits<double>::infinity();
  bool found_ = false;
};

int grid_size(double resolution) {
  if (!(resolution > 0.0 && resolution <= 0.5))
    throw ContractError("oracle: resolution must lie in (0, 0.5]");
  return static_cast<int>(std::lround(1.0 / resolution));
}

}  // namespace

OracleResult oracle_worst_case_kl(std::span<const double> q, std::span<const double> v,
                                  double beta, double resolution) {
  if (q.size() != v.size() || q.empty()) throw ContractError("oracle: shape mismatch");
  if (!(beta >= 0.0)) throw ContractError("oracle: beta must be >= 0");
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i] > 0.0) support.push_back(i);
  if (support.size() > static_cast<std::size_t>(kOracleMaxSupport))
    throw ContractError("oracle: support larger than 4 is refused");

  const int m = grid_size(resolution);
  std::vector<std::vector<double>> cost(support.size(), std::vector<double>(m + 1, 0.0));
  std::vector<std::vector<double>> value(support.size(), std::vector<double>(m + 1, 0.0));
  for (std::size_t k = 0; k < support.size(); ++k) {
    const double lq = std::log(q[support[k]]);
    for (int n = 1; n <= m; ++n) {
      const double p = static_cast<double>(n) / m;
      cost[k][n] = p * (std::log(p) - lq);
      value[k][n] = p * v[support[k]];
    }
  }
  GridSearch search(m, std::move(cost), std::move(value), beta);
  OracleResult out;
  out.dist.assign(q.size(), 0.0);
  if (!search.run()) {
    // Only the grid point nearest q can fail to exist when q is off-grid and
    // beta is tiny; fall back to q itself, which is always feasible.
    out.dist.assign(q.begin(), q.end());
  } else {
    for (std::size_t k = 0; k < support.size(); ++k)
      out.dist[support[k]] = static_cast<double>(search.best()[k]) / m;
  }
  for (std::size_t i = 0; i < q.size(); ++i) out.value += out.dist[i] * v[i];
  return out;
}

OracleResult oracle_worst_case_l2(std::span<const double> q, std::span<const double> v,
                                  double beta, double resolution) {
  if (q.size() != v.size() || q.empty()) throw ContractError("oracle: shape mismatch");
  if (q.size() > static_cast<std::size_t>(kOracleMaxSupport))
    throw ContractError("oracle: support larger than 4 is refused");
  const int m = grid_size(resolution);
  std::vector<std::vector<double>> cost(q.size(), std::vector<double>(m + 1, 0.0));
  std::vector<std::vector<double>> value(q.size(), std::vector<double>(m + 1, 0.0));
  for (std::size_t k = 0; k < q.size(); ++k)
    for (int n = 0; n <= m; ++n) {
      const double p = static_cast<double>(n) / m;
      cost[k][n] = (p - q[k]) * (p - q[k]);
      value[k][n] = p * v[k];
    }
  GridSearch search(m, std::move(cost), std::move(value), beta * beta);
  OracleResult out;
  if (!search.run()) {
    out.dist.assign(q.begin(), q.end());
  } else {
    out.dist.resize(q.size());
    for (std::size_t k = 0; k < q.size(); ++k)
      out.dist[k] = static_cast<double>(search.best()[k]) / m;
  }
  for (std::size_t i = 0; i < q.size(); ++i) out.value += out.dist[i] * v[i];
  return out;
}

}  // namespace robustrl
