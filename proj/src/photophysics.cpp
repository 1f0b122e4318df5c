#include "hbatk/photophysics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "hbatk/constants.hpp"
#include "hbatk/errors.hpp"

namespace hbatk {

void Fluorophore::validate() const {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError(name + ": quantum yield must lie in (0, 1]");
  if (epsilon_max && (!(*epsilon_max > 0.0) || !std::isfinite(*epsilon_max))) {
    throw DomainError(name + ": epsilon_max must be > 0");
  }
  if (nu_max_hz && (!(*nu_max_hz > 0.0) || !std::isfinite(*nu_max_hz))) {
    throw DomainError(name + ": nu_max must be > 0");
  }
  if (!(sigma_c2pa_cm4s >= 0.0) || !std::isfinite(sigma_c2pa_cm4s)) {
    throw DomainError(name + ": sigma_c2pa must be >= 0");
  }
  if (absorption && nu_max_hz) {
    if (!absorption->covers(frequency_to_wavelength(*nu_max_hz))) {
      throw DomainError(name + ": nu_max outside the absorption spectrum span");
    }
  }
}

double sigma_max_from_epsilon(double epsilon_max) {
  if (!(epsilon_max > 0.0) || !std::isfinite(epsilon_max)) {
    throw DomainError("sigma_max_from_epsilon: epsilon_max must be > 0");
  }
  return epsilon_max * constants::extinction_to_cross_section;
}

double find_nu_max(const Spectrum& absorption, const Spectrum& emission) {
  const Spectrum a = normalize_peak(absorption);
  const Spectrum e = normalize_peak(emission);
  const double lo = std::max(a.min_wavelength(), e.min_wavelength());
  const double hi = std::min(a.max_wavelength(), e.max_wavelength());
  if (!(hi > lo)) throw DomainError("find_nu_max: absorption and emission spectra do not overlap");

  double win_lo = std::min(a.peak_wavelength(), e.peak_wavelength());
  double win_hi = std::max(a.peak_wavelength(), e.peak_wavelength());
  win_lo = std::max(win_lo, lo);
  win_hi = std::min(win_hi, hi);
  if (win_hi < win_lo) throw DomainError("find_nu_max: peaks lie outside the common overlap");
  if (win_hi == win_lo) {
    if (a.at(win_lo) == e.at(win_lo)) return wavelength_to_frequency(win_lo);
    throw DomainError("find_nu_max: no crossing in the search window");
  }

  // Both profiles are linear between union nodes, so their difference is too.
  std::set<double> nodes{win_lo, win_hi};
  for (double w : a.wavelengths()) if (w > win_lo && w < win_hi) nodes.insert(w);
  for (double w : e.wavelengths()) if (w > win_lo && w < win_hi) nodes.insert(w);
  const std::vector<double> grid(nodes.begin(), nodes.end());

  // Scan from the red end; the first sign change found is the longest-wavelength crossing.
  for (std::size_t i = grid.size() - 1; i > 0; --i) {
    const double x1 = grid[i];
    const double x0 = grid[i - 1];
    const double d1 = a.at(x1) - e.at(x1);
    const double d0 = a.at(x0) - e.at(x0);
    if (d1 == 0.0) return wavelength_to_frequency(x1);
    if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0) || d0 == 0.0) {
      const double x = d0 == 0.0 ? x0 : x0 + d0 / (d0 - d1) * (x1 - x0);
      return wavelength_to_frequency(x);
    }
  }
  throw DomainError("find_nu_max: no crossing between the absorption and emission peaks");
}

double fc_ratio(double nu_hz, const Spectrum& absorption, double nu_max_hz) {
  const double reflected = 2.0 * nu_max_hz - nu_hz;
  if (!(reflected > 0.0)) throw OutOfRangeError("fc_ratio: reflected frequency is not positive");
  const double reference = absorption.at(frequency_to_wavelength(nu_max_hz));
  if (!(reference > 0.0)) throw DomainError("fc_ratio: absorption vanishes at nu_max");
  const double lambda = frequency_to_wavelength(reflected);
  if (!absorption.covers(lambda)) {
    throw OutOfRangeError("fc_ratio: reflected wavelength " + std::to_string(lambda) +
                          " nm outside the measured absorption range");
  }
  return absorption.at(lambda) / reference;
}

double boltzmann_factor(double nu_hz, double nu_max_hz, double temperature_k) {
  if (!(temperature_k > 0.0)) throw DomainError("temperature must be > 0 K");
  return std::exp(-constants::planck * (nu_max_hz - nu_hz) / (constants::boltzmann * temperature_k));
}

double hba_cross_section(double nu_hz, double temperature_k, double sigma_max_cm2, double nu_max_hz,
                         double fc) {
  if (!(temperature_k > 0.0)) throw DomainError("hba_cross_section: temperature must be > 0 K");
  if (!(nu_hz > 0.0)) throw DomainError("hba_cross_section: frequency must be > 0");
  if (nu_hz > nu_max_hz) {
    throw DomainError("hba_cross_section: excitation is blue of nu_max (not a hot-band transition)");
  }
  return sigma_max_cm2 * boltzmann_factor(nu_hz, nu_max_hz, temperature_k) * fc;
}

double hba_cross_section(double nu_hz, double temperature_k, const Fluorophore& f) {
  if (!f.absorption) throw DomainError(f.name + ": HBA cross section needs an absorption spectrum");
  if (!f.epsilon_max || !f.nu_max_hz) {
    throw DomainError(f.name + ": HBA cross section needs epsilon_max and nu_max");
  }
  if (!(temperature_k > 0.0)) throw DomainError("hba_cross_section: temperature must be > 0 K");
  return hba_cross_section(nu_hz, temperature_k, sigma_max_from_epsilon(*f.epsilon_max), *f.nu_max_hz,
                           fc_ratio(nu_hz, *f.absorption, *f.nu_max_hz));
}

}  // namespace hbatk
