#include "least_squares.hpp"

#include <cmath>

#include "hbatk/errors.hpp"

namespace hbatk::detail {

namespace {

using Real = long double;

Real dot(const std::vector<Real>& a, const std::vector<Real>& b) {
  Real s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

LinearSolution solve_linear(const std::vector<std::span<const double>>& columns, std::span<const double> y,
                            std::span<const double> weights, bool scale_by_residual) {
  const std::size_t p = columns.size();
  const std::size_t n = y.size();
  if (p < 1 || p > 2) throw NumericalError("solve_linear: supports one or two columns");
  if (n < p) throw NumericalError("solve_linear: fewer observations than parameters");

  std::vector<Real> sw(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(weights[i] > 0.0)) throw NumericalError("solve_linear: weights must be > 0");
    sw[i] = std::sqrt(static_cast<Real>(weights[i]));
  }
  std::vector<std::vector<Real>> a(p, std::vector<Real>(n));
  std::vector<Real> colscale(p);
  for (std::size_t j = 0; j < p; ++j) {
    Real norm = 0;
    for (std::size_t i = 0; i < n; ++i) {
      a[j][i] = sw[i] * columns[j][i];
      norm += a[j][i] * a[j][i];
    }
    norm = std::sqrt(norm);
    if (!(norm > 0)) throw NumericalError("solve_linear: zero design column");
    colscale[j] = norm;
    for (auto& v : a[j]) v /= norm;
  }
  std::vector<Real> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = sw[i] * y[i];

  // QR of the column-normalised design.
  Real r11 = std::sqrt(dot(a[0], a[0]));
  std::vector<Real> q1 = a[0];
  for (auto& v : q1) v /= r11;
  Real r12 = 0, r22 = 0;
  std::vector<Real> q2;
  if (p == 2) {
    q2 = a[1];
    for (int pass = 0; pass < 2; ++pass) {
      const Real c = dot(q1, q2);
      r12 += c;
      for (std::size_t i = 0; i < n; ++i) q2[i] -= c * q1[i];
    }
    r22 = std::sqrt(dot(q2, q2));
    if (!(r22 > 1e-14L)) throw NumericalError("solve_linear: design matrix is rank deficient");
    for (auto& v : q2) v /= r22;
  }

  std::vector<Real> beta(p);
  std::vector<Real> rinv(p * p, 0);  // upper triangular R^-1
  if (p == 1) {
    beta[0] = dot(q1, b) / r11;
    rinv[0] = 1 / r11;
  } else {
    const Real c1 = dot(q1, b);
    const Real c2 = dot(q2, b);
    beta[1] = c2 / r22;
    beta[0] = (c1 - r12 * beta[1]) / r11;
    rinv[0] = 1 / r11;
    rinv[1] = -r12 / (r11 * r22);
    rinv[3] = 1 / r22;
  }
  // One refinement step against the residual.
  for (int pass = 0; pass < 1; ++pass) {
    std::vector<Real> res(n);
    for (std::size_t i = 0; i < n; ++i) {
      Real m = 0;
      for (std::size_t j = 0; j < p; ++j) m += a[j][i] * beta[j];
      res[i] = b[i] - m;
    }
    if (p == 1) {
      beta[0] += dot(q1, res) / r11;
    } else {
      const Real d2 = dot(q2, res) / r22;
      const Real d1 = (dot(q1, res) - r12 * d2) / r11;
      beta[0] += d1;
      beta[1] += d2;
    }
  }

  Real rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Real m = 0;
    for (std::size_t j = 0; j < p; ++j) m += a[j][i] * beta[j];
    const Real r = b[i] - m;
    rss += r * r;
  }

  LinearSolution out;
  out.dof = static_cast<int>(n - p);
  out.weighted_rss = static_cast<double>(rss);
  const Real scale = scale_by_residual ? (out.dof > 0 ? rss / out.dof : 0) : 1;
  out.beta.resize(p);
  out.covariance.assign(p * p, 0.0);
  for (std::size_t j = 0; j < p; ++j) out.beta[j] = static_cast<double>(beta[j] / colscale[j]);
  // cov = R^-1 R^-T, then undo the column normalisation.
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      Real s = 0;
      for (std::size_t k = 0; k < p; ++k) s += rinv[i * p + k] * rinv[j * p + k];
      out.covariance[i * p + j] = static_cast<double>(scale * s / (colscale[i] * colscale[j]));
    }
  }
  return out;
}

}  // namespace hbatk::detail
