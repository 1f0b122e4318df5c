#pragma once

#include <optional>
#include <string>

#include "hbatk/spectrum.hpp"

namespace hbatk {

/// Photophysical record of one dye. Cross sections in cm units; nu_max in Hz.
struct Fluorophore {
  std::string name;
  double eta = 1.0;             // fluorescence quantum yield
  // Needed only for one-photon (HBA) modelling; C2PA-only records may omit them.
  std::optional<double> epsilon_max;  // M^-1 cm^-1 at nu_max
  std::optional<double> nu_max_hz;    // "0-0" transition frequency
  double sigma_c2pa_cm4s = 0.0; // 1 GM = 1e-50
  std::optional<Spectrum> absorption;
  std::optional<Spectrum> emission;

  /// Throws DomainError when an invariant does not hold.
  void validate() const;
};

/// sigma_max = epsilon_max * 3.82e-21 cm^2.
double sigma_max_from_epsilon(double epsilon_max);

/// Frequency at which the peak-normalised absorption and emission profiles
/// cross. When several crossings lie between the two peaks, the longest
/// wavelength one wins.
double find_nu_max(const Spectrum& absorption, const Spectrum& emission);

/// A(2 nu_max - nu) / A(nu_max), with A interpolated from the absorption spectrum.
double fc_ratio(double nu_hz, const Spectrum& absorption, double nu_max_hz);

/// exp(-h (nu_max - nu) / kT).
double boltzmann_factor(double nu_hz, double nu_max_hz, double temperature_k);

/// sigma_max * exp(-h (nu_max - nu) / kT) * fc, for red-detuned nu <= nu_max.
double hba_cross_section(double nu_hz, double temperature_k, double sigma_max_cm2, double nu_max_hz,
                         double fc);

/// Same, with sigma_max and FC taken from the fluorophore record.
double hba_cross_section(double nu_hz, double temperature_k, const Fluorophore& f);

}  // namespace hbatk
