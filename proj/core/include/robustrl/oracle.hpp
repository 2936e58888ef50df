#pragma once

#include <span>
#include <vector>

namespace robustrl {

/// Largest support the grid oracles accept; the grid at resolution 0.002 on a
/// 4-simplex already has ~2.1e7 points.
inline constexpr int kOracleMaxSupport = 4;

struct OracleResult {
  std::vector<double> dist;
  double value = 0.0;
};

/// Exhaustive simplex-grid minimizer of <p, v> over {KL(p || q) <= beta},
/// restricted to the support of q. Grid points are multiples of
/// 1 / round(1 / resolution). Intended for verification only.
OracleResult oracle_worst_case_kl(std::span<const double> q,
                                  std::span<const double> v, double beta,
                                  double resolution);

/// Same enumeration for the L2 ball ||p - q||_2 <= beta over the full
/// simplex (q may have zeros; the L2 ball is not support-restricted).
OracleResult oracle_worst_case_l2(std::span<const double> q,
                                  std::span<const double> v, double beta,
                                  double resolution);

}  // namespace robustrl
