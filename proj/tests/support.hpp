#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hbatk/signal_model.hpp"

namespace hbatk::testing {

inline std::string fixture(const std::string& name) { return std::string(HBATK_FIXTURE_DIR) + "/" + name; }

inline bool rel_close(double got, double want, double tol) {
  if (want == 0.0) return std::abs(got) <= tol;
  return std::abs(got - want) <= tol * std::abs(want);
}

inline std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) {
    x[i] = std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * i / (n - 1));
  }
  x.front() = lo;
  x.back() = hi;
  return x;
}

inline ExperimentConfig rh6g_config() {
  ExperimentConfig c;
  c.fluorophore.name = "Rh6G";
  c.fluorophore.eta = 0.9;
  c.fluorophore.sigma_c2pa_cm4s = 9.9e-50;
  c.concentration_molar = 1.1e-3;
  c.path_length_cm = 1.0;
  c.beam = {55.0, 57.0, std::nullopt};
  c.collection.kappa = 0.042;
  c.collection.gamma = 0.075;
  return c;
}

inline ExperimentConfig lds798_config() {
  ExperimentConfig c;
  c.fluorophore.name = "LDS798";
  c.fluorophore.eta = 0.054;
  c.fluorophore.sigma_c2pa_cm4s = 220e-50;
  c.fluorophore.epsilon_max = 1.54e4;
  c.fluorophore.nu_max_hz = wavelength_to_frequency(672.0);
  c.fluorophore.absorption = read_spectrum_csv(fixture("lds798_absorption.csv"), SpectrumKind::absorption);
  c.fluorophore.emission = read_spectrum_csv(fixture("lds798_emission.csv"), SpectrumKind::emission);
  c.concentration_molar = 0.3e-3;
  c.path_length_cm = 1.0;
  c.beam = {55.0, 57.0, std::nullopt};
  c.collection.kappa = 0.042;
  c.collection.gamma = 0.025;
  c.temperature_k = 298.15;
  return c;
}

// Gaussian SPDC density over +-5 FWHM on a uniform grid.
inline Spectrum spdc_density(double center_nm, double fwhm_nm, double step_nm) {
  const double lo = center_nm - 5.0 * fwhm_nm;
  const double hi = center_nm + 5.0 * fwhm_nm;
  const int n = static_cast<int>(std::lround((hi - lo) / step_nm)) + 1;
  std::vector<double> w(n), v(n);
  for (int i = 0; i < n; ++i) {
    w[i] = lo + (hi - lo) * i / (n - 1);
    v[i] = gaussian_profile(w[i], center_nm, fwhm_nm, 1.0);
  }
  return Spectrum(w, v, SpectrumKind::spectral_power_density);
}

inline PowerSeries series_from(const std::vector<double>& x, const std::vector<double>& y, SweepKind sweep,
                               Axis axis, double err = 0.0) {
  std::vector<SeriesPoint> pts;
  for (std::size_t i = 0; i < x.size(); ++i) pts.push_back({x[i], y[i], err, 100.0, false});
  return PowerSeries(pts, sweep, axis);
}

}  // namespace hbatk::testing
