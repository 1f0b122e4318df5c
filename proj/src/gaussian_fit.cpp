#include <array>
#include <cmath>
#include <numbers>

#include "hbatk/errors.hpp"
#include "hbatk/spectrum.hpp"

namespace hbatk {

namespace {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

// Solves a symmetric positive-definite 3x3 system by Cholesky; false if not SPD.
bool solve_spd(Mat3 a, Vec3 b, Vec3& x) {
  Mat3 l{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = a[i][j];
      for (int k = 0; k < j; ++k) sum -= l[i][k] * l[j][k];
      if (i == j) {
        if (!(sum > 0.0)) return false;
        l[i][i] = std::sqrt(sum);
      } else {
        l[i][j] = sum / l[j][j];
      }
    }
  }
  Vec3 y{};
  for (int i = 0; i < 3; ++i) {
    double sum = b[i];
    for (int k = 0; k < i; ++k) sum -= l[i][k] * y[k];
    y[i] = sum / l[i][i];
  }
  for (int i = 2; i >= 0; --i) {
    double sum = y[i];
    for (int k = i + 1; k < 3; ++k) sum -= l[k][i] * x[k];
    x[i] = sum / l[i][i];
  }
  return true;
}

// params: amplitude, center, fwhm
double sum_squares(const Spectrum& s, const Vec3& p) {
  double ss = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = s.values()[i] - gaussian_profile(s.wavelengths()[i], p[1], p[2], p[0]);
    ss += r * r;
  }
  return ss;
}

Vec3 initial_guess(const Spectrum& s) {
  const double peak = s.peak_value();
  const double center = s.peak_wavelength();
  const double half = 0.5 * peak;
  const auto x = s.wavelengths();
  const auto y = s.values();
  double left = x.front();
  double right = x.back();
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] > center) break;
    if (y[i - 1] < half && y[i] >= half) left = x[i - 1] + (half - y[i - 1]) / (y[i] - y[i - 1]) * (x[i] - x[i - 1]);
  }
  for (std::size_t i = x.size() - 1; i > 0; --i) {
    if (x[i - 1] < center) break;
    if (y[i] < half && y[i - 1] >= half) right = x[i - 1] + (y[i - 1] - half) / (y[i - 1] - y[i]) * (x[i] - x[i - 1]);
  }
  double fwhm = right - left;
  if (!(fwhm > 0.0)) fwhm = 0.25 * (x.back() - x.front());
  return {peak, center, fwhm};
}

}  // namespace

GaussianFit fit_gaussian(const Spectrum& s) {
  if (!(s.peak_value() > 0.0)) throw DomainError("fit_gaussian: spectrum is identically zero");
  if (s.size() < 4) throw DomainError("fit_gaussian: need at least 4 samples");

  constexpr int max_iterations = 500;
  const double k4ln2 = 4.0 * std::numbers::ln2;
  Vec3 p = initial_guess(s);
  double cost = sum_squares(s, p);
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;

  for (; iter < max_iterations; ++iter) {
    Mat3 jtj{};
    Vec3 jtr{};
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double x = s.wavelengths()[i];
      const double d = (x - p[1]) / p[2];
      const double e = std::exp(-k4ln2 * d * d);
      const double model = p[0] * e;
      const Vec3 j{e, model * 2.0 * k4ln2 * d / p[2], model * 2.0 * k4ln2 * d * d / p[2]};
      const double r = s.values()[i] - model;
      for (int a = 0; a < 3; ++a) {
        jtr[a] += j[a] * r;
        for (int b = 0; b < 3; ++b) jtj[a][b] += j[a] * j[b];
      }
    }

    bool improved = false;
    for (int attempt = 0; attempt < 40 && !improved; ++attempt) {
      Mat3 damped = jtj;
      for (int a = 0; a < 3; ++a) damped[a][a] *= 1.0 + lambda;
      Vec3 step{};
      if (!solve_spd(damped, jtr, step)) {
        lambda *= 10.0;
        continue;
      }
      Vec3 trial{p[0] + step[0], p[1] + step[1], p[2] + step[2]};
      if (!(trial[0] > 0.0) || !(trial[2] > 0.0)) {
        lambda *= 10.0;
        continue;
      }
      const double trial_cost = sum_squares(s, trial);
      if (trial_cost <= cost) {
        const double rel_step = std::abs(step[0] / trial[0]) + std::abs(step[1] / trial[2]) +
                                std::abs(step[2] / trial[2]);
        const double rel_cost = cost > 0.0 ? (cost - trial_cost) / cost : 0.0;
        p = trial;
        cost = trial_cost;
        lambda = std::max(lambda * 0.1, 1e-12);
        improved = true;
        if (rel_step < 1e-13 || rel_cost < 1e-15 || cost == 0.0) converged = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) {
      // No downhill step at any damping: already at the minimum to machine precision.
      converged = true;
    }
    if (converged) break;
  }

  if (!converged) {
    throw NumericalError("fit_gaussian: no convergence after " + std::to_string(max_iterations) + " iterations");
  }
  GaussianFit fit;
  fit.amplitude = p[0];
  fit.center_nm = p[1];
  fit.fwhm_nm = p[2];
  fit.residual_rms = std::sqrt(cost / static_cast<double>(s.size()));
  fit.iterations = iter + 1;
  return fit;
}

}  // namespace hbatk
