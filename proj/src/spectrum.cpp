#include "hbatk/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hbatk/constants.hpp"
#include "hbatk/errors.hpp"

namespace hbatk {

namespace {

bool bounded_unit(SpectrumKind kind) {
  return kind == SpectrumKind::transmission || kind == SpectrumKind::quantum_efficiency;
}

std::string nm(double v) { return std::to_string(v) + " nm"; }

}  // namespace

std::string_view to_string(SpectrumKind kind) {
  switch (kind) {
    case SpectrumKind::transmission: return "transmission";
    case SpectrumKind::emission: return "emission";
    case SpectrumKind::absorption: return "absorption";
    case SpectrumKind::quantum_efficiency: return "quantum_efficiency";
    case SpectrumKind::spectral_power_density: return "spectral_power_density";
  }
  return "unknown";
}

SpectrumKind spectrum_kind_from_string(std::string_view name) {
  for (auto k : {SpectrumKind::transmission, SpectrumKind::emission, SpectrumKind::absorption,
                 SpectrumKind::quantum_efficiency, SpectrumKind::spectral_power_density}) {
    if (to_string(k) == name) return k;
  }
  throw DomainError("unknown spectrum kind '" + std::string(name) + "'");
}

Spectrum::Spectrum(std::vector<double> wavelengths_nm, std::vector<double> values, SpectrumKind kind)
    : wavelengths_(std::move(wavelengths_nm)), values_(std::move(values)), kind_(kind) {
  if (wavelengths_.size() != values_.size()) {
    throw DomainError("spectrum: grid and value lengths differ");
  }
  if (wavelengths_.size() < 2) throw DomainError("spectrum: need at least 2 samples");
  for (std::size_t i = 0; i < wavelengths_.size(); ++i) {
    const double w = wavelengths_[i];
    if (!std::isfinite(w) || w <= 0.0) throw DomainError("spectrum: wavelength must be finite and > 0");
    if (i > 0 && !(w > wavelengths_[i - 1])) {
      throw DomainError("spectrum: grid not strictly ascending at " + nm(w));
    }
    const double v = values_[i];
    if (!std::isfinite(v)) throw DomainError("spectrum: non-finite value at " + nm(w));
    if (v < 0.0) throw DomainError("spectrum: negative value at " + nm(w));
    if (bounded_unit(kind_) && v > 1.0) {
      throw DomainError("spectrum: " + std::string(to_string(kind_)) + " value above 1 at " + nm(w));
    }
  }
}

std::string_view Spectrum::unit() const {
  return kind_ == SpectrumKind::spectral_power_density ? "W/nm" : "1";
}

double Spectrum::at(double lambda_nm) const {
  if (!std::isfinite(lambda_nm) || !covers(lambda_nm)) {
    throw OutOfRangeError("spectrum query at " + nm(lambda_nm) + " outside [" + nm(min_wavelength()) +
                          ", " + nm(max_wavelength()) + "]");
  }
  auto it = std::lower_bound(wavelengths_.begin(), wavelengths_.end(), lambda_nm);
  const auto i = static_cast<std::size_t>(it - wavelengths_.begin());
  if (*it == lambda_nm) return values_[i];
  const double x0 = wavelengths_[i - 1], x1 = wavelengths_[i];
  const double t = (lambda_nm - x0) / (x1 - x0);
  return values_[i - 1] + t * (values_[i] - values_[i - 1]);
}

double Spectrum::peak_wavelength() const {
  const auto it = std::max_element(values_.begin(), values_.end());
  return wavelengths_[static_cast<std::size_t>(it - values_.begin())];
}

double Spectrum::peak_value() const { return *std::max_element(values_.begin(), values_.end()); }

double wavelength_to_frequency(double lambda_nm) {
  if (!std::isfinite(lambda_nm) || lambda_nm <= 0.0) {
    throw DomainError("wavelength must be finite and > 0, got " + std::to_string(lambda_nm));
  }
  return constants::speed_of_light / (lambda_nm * 1e-9);
}

double frequency_to_wavelength(double nu_hz) {
  if (!std::isfinite(nu_hz) || nu_hz <= 0.0) {
    throw DomainError("frequency must be finite and > 0, got " + std::to_string(nu_hz));
  }
  return constants::speed_of_light / nu_hz * 1e9;
}

double photon_energy(double nu_hz) {
  if (!std::isfinite(nu_hz) || nu_hz <= 0.0) {
    throw DomainError("photon_energy: frequency must be > 0");
  }
  return constants::planck * nu_hz;
}

Spectrum resample(const Spectrum& s, std::span<const double> grid_nm) {
  std::vector<double> values;
  values.reserve(grid_nm.size());
  for (double w : grid_nm) values.push_back(s.at(w));
  return Spectrum({grid_nm.begin(), grid_nm.end()}, std::move(values), s.kind());
}

double integrate(const Spectrum& s) {
  const auto x = s.wavelengths();
  const auto y = s.values();
  double sum = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) sum += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return sum;
}

Spectrum normalize_peak(const Spectrum& s) {
  const double peak = s.peak_value();
  if (!(peak > 0.0)) throw DomainError("normalize_peak: spectrum is identically zero");
  return scaled(s, 1.0 / peak);
}

Spectrum scaled(const Spectrum& s, double factor) {
  if (!std::isfinite(factor) || factor < 0.0) throw DomainError("scaled: factor must be finite and >= 0");
  std::vector<double> v(s.values().begin(), s.values().end());
  for (double& x : v) x *= factor;
  // Guard against 1 + ulp after peak normalisation of bounded kinds.
  if (s.kind() == SpectrumKind::transmission || s.kind() == SpectrumKind::quantum_efficiency) {
    for (double& x : v) x = std::min(x, 1.0);
  }
  return Spectrum({s.wavelengths().begin(), s.wavelengths().end()}, std::move(v), s.kind());
}

Spectrum truncate(const Spectrum& s, double lo_nm, double hi_nm) {
  lo_nm = std::max(lo_nm, s.min_wavelength());
  hi_nm = std::min(hi_nm, s.max_wavelength());
  if (!(hi_nm > lo_nm)) throw DomainError("truncate: empty wavelength window");
  std::vector<double> grid;
  grid.push_back(lo_nm);
  for (double w : s.wavelengths()) {
    if (w > lo_nm && w < hi_nm) grid.push_back(w);
  }
  grid.push_back(hi_nm);
  return resample(s, grid);
}

Spectrum mirror_about_center(const Spectrum& s, double center_nm) {
  if (!std::isfinite(center_nm) || center_nm < s.min_wavelength() || center_nm >= s.max_wavelength()) {
    throw OutOfRangeError("mirror_about_center: center " + nm(center_nm) + " not inside the red-sampled grid");
  }
  std::vector<double> red_w;
  std::vector<double> red_v;
  red_w.push_back(center_nm);
  red_v.push_back(s.at(center_nm));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double w = s.wavelengths()[i];
    if (w > center_nm) {
      red_w.push_back(w);
      red_v.push_back(s.values()[i]);
    }
  }
  const double blue_limit = 2.0 * center_nm - red_w.back();
  if (blue_limit <= 0.0) throw DomainError("mirror_about_center: reflection reaches non-positive wavelengths");

  std::vector<double> w;
  std::vector<double> v;
  w.reserve(2 * red_w.size());
  v.reserve(2 * red_w.size());
  for (std::size_t i = red_w.size(); i-- > 1;) {
    w.push_back(2.0 * center_nm - red_w[i]);
    v.push_back(red_v[i]);
  }
  w.insert(w.end(), red_w.begin(), red_w.end());
  v.insert(v.end(), red_v.begin(), red_v.end());
  return Spectrum(std::move(w), std::move(v), s.kind());
}

double gaussian_profile(double lambda_nm, double center_nm, double fwhm_nm, double amplitude) {
  const double d = (lambda_nm - center_nm) / fwhm_nm;
  return amplitude * std::exp(-4.0 * std::numbers::ln2 * d * d);
}

}  // namespace hbatk
