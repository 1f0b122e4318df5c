#pragma once

#include <span>
#include <vector>

namespace hbatk::detail {

struct LinearSolution {
  std::vector<double> beta;
  std::vector<double> covariance;  // row-major p x p, already scaled
  double weighted_rss = 0.0;
  int dof = 0;
};

/// Weighted linear least squares y ~ X beta with one or two columns, solved by
/// a re-orthogonalised Gram-Schmidt QR in extended precision. With
/// `scale_by_residual` the covariance is multiplied by rss / dof (unknown
/// noise level); otherwise the weights are taken as absolute 1/sigma^2.
/// Throws NumericalError on a rank-deficient design.
LinearSolution solve_linear(const std::vector<std::span<const double>>& columns, std::span<const double> y,
                            std::span<const double> weights, bool scale_by_residual);

}  // namespace hbatk::detail
