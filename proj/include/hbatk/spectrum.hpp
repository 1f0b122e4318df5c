#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hbatk {

enum class SpectrumKind {
  transmission,
  emission,
  absorption,
  quantum_efficiency,
  spectral_power_density,
};

std::string_view to_string(SpectrumKind kind);
SpectrumKind spectrum_kind_from_string(std::string_view name);

/// A sampled function of wavelength. The grid is in nm, strictly ascending;
/// values are dimensionless except for spectral_power_density (W/nm).
///
/// Instances are immutable once constructed; every constructor validates the
/// invariants for the given kind.
class Spectrum {
 public:
  Spectrum(std::vector<double> wavelengths_nm, std::vector<double> values, SpectrumKind kind);

  std::span<const double> wavelengths() const { return wavelengths_; }
  std::span<const double> values() const { return values_; }
  SpectrumKind kind() const { return kind_; }
  std::string_view unit() const;

  std::size_t size() const { return wavelengths_.size(); }
  double min_wavelength() const { return wavelengths_.front(); }
  double max_wavelength() const { return wavelengths_.back(); }
  bool covers(double lambda_nm) const {
    return lambda_nm >= min_wavelength() && lambda_nm <= max_wavelength();
  }

  /// Linear interpolation; throws OutOfRangeError outside the grid.
  double at(double lambda_nm) const;

  /// Wavelength of the largest sample (first one on ties).
  double peak_wavelength() const;
  double peak_value() const;

 private:
  std::vector<double> wavelengths_;
  std::vector<double> values_;
  SpectrumKind kind_;
};

struct GaussianFit {
  double center_nm = 0.0;
  double fwhm_nm = 0.0;
  double amplitude = 0.0;
  double residual_rms = 0.0;
  int iterations = 0;
};

/// nu = c / lambda. Throws DomainError on non-positive or non-finite input.
double wavelength_to_frequency(double lambda_nm);
double frequency_to_wavelength(double nu_hz);

/// h * nu in J.
double photon_energy(double nu_hz);

Spectrum resample(const Spectrum& s, std::span<const double> grid_nm);

/// Trapezoidal integral over the native grid, in value-units x nm.
double integrate(const Spectrum& s);

Spectrum normalize_peak(const Spectrum& s);

Spectrum scaled(const Spectrum& s, double factor);

/// Restrict to [lo, hi] nm, inserting interpolated end nodes when the bounds
/// fall between samples.
Spectrum truncate(const Spectrum& s, double lo_nm, double hi_nm);

/// Levenberg-Marquardt fit of amplitude * exp(-4 ln2 (x - center)^2 / fwhm^2).
GaussianFit fit_gaussian(const Spectrum& s);

double gaussian_profile(double lambda_nm, double center_nm, double fwhm_nm, double amplitude);

/// Replace the blue side (lambda < center) by the point reflection of the red
/// side about `center`. The red side is preserved as sampled.
Spectrum mirror_about_center(const Spectrum& s, double center_nm);

/// CSV with header `wavelength_nm,value`; the kind is supplied by the caller.
std::string format_spectrum_csv(const Spectrum& s);
Spectrum parse_spectrum_csv(std::string_view text, SpectrumKind kind);
Spectrum read_spectrum_csv(const std::string& path, SpectrumKind kind);

}  // namespace hbatk
