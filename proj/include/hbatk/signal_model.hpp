#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "hbatk/photophysics.hpp"
#include "hbatk/power_series.hpp"
#include "hbatk/spectrum.hpp"

namespace hbatk {

/// sqrt(2) * (ln 2 / pi)^(3/2): spatial-overlap factor for a Gaussian beam
/// in the C2PEF signal expression.
extern const double kGaussianBeamPrefactor;

struct BeamGeometry {
  double fwhm_x_um = 0.0;
  double fwhm_y_um = 0.0;
  std::optional<double> rayleigh_range_um;  // metadata only; beam is uniform along the cell
};

struct CollectionChain {
  double kappa = 0.042;
  std::vector<Spectrum> filters;
  std::optional<Spectrum> pmt_qe;
  /// Fixed optical efficiency; when absent it is computed with gamma_overlap.
  std::optional<double> gamma;
};

struct Monochromatic {
  double lambda_nm = 1060.0;
  /// Gaussian line width used by the HBA integral; 0 means an ideal line.
  double linewidth_fwhm_nm = 1.0;
};

struct Broadband {
  Spectrum density;  // spectral_power_density, W/nm, integrates to total power
};

class ExcitationSource {
 public:
  static ExcitationSource monochromatic(double lambda_nm, double power_w, double linewidth_fwhm_nm = 1.0);
  /// Rescales `shape` so its wavelength integral equals `power_w`.
  static ExcitationSource broadband(const Spectrum& shape, double power_w, double effective_wavelength_nm = 1064.0);

  ExcitationSource with_power(double power_w) const;
  ExcitationSource with_blue_cutoff(std::optional<double> cutoff_nm) const;

  double total_power() const { return power_w_; }
  bool is_broadband() const { return std::holds_alternative<Broadband>(line_); }
  const Monochromatic& line() const;
  const Broadband& band() const;
  /// Line centre, or the configured effective wavelength of a broadband source.
  double effective_wavelength_nm() const;
  std::optional<double> blue_cutoff_nm() const { return blue_cutoff_nm_; }

 private:
  ExcitationSource(std::variant<Monochromatic, Broadband> line, double power_w, double effective_nm);

  std::variant<Monochromatic, Broadband> line_;
  double power_w_ = 0.0;
  double effective_wavelength_nm_ = 1064.0;
  std::optional<double> blue_cutoff_nm_;
};

struct ExperimentConfig {
  Fluorophore fluorophore;
  double concentration_molar = 0.0;
  double path_length_cm = 1.0;
  BeamGeometry beam;
  CollectionChain collection;
  double temperature_k = 298.15;

  void validate() const;
};

double beam_area_cm2(const BeamGeometry& beam);

/// (P / h nu) / S in photons cm^-2 s^-1.
double photon_flux(double power_w, double lambda_nm, double area_cm2);

/// Emission-weighted mean of the product of filter transmissions and QE.
double gamma_overlap(const Spectrum& emission, const CollectionChain& chain);

/// Optical efficiency for the config: the fixed value or gamma_overlap.
double effective_gamma(const ExperimentConfig& cfg);

/// K = gamma * kappa * eta.
double collection_efficiency(const ExperimentConfig& cfg);

/// Number density in cm^-3.
double molecule_density(const ExperimentConfig& cfg);

/// N = n * L * S: molecules in the illuminated column.
double molecules_in_beam(const ExperimentConfig& cfg);

double c2pef_signal(const ExperimentConfig& cfg, const ExcitationSource& src);

double hba_signal(const ExperimentConfig& cfg, const ExcitationSource& src);

/// F = N K sigma_hba phi + 1/2 N K sigma_c2pa phi^2.
double total_signal(const ExperimentConfig& cfg, double phi, double sigma_hba_cm2);

/// K N sigma_e2pa (pair_rate t^2) / S; pairs survive attenuation with t^2.
double e2pa_signal_toy(const ExperimentConfig& cfg, double pair_rate, double sigma_e2pa_cm2,
                       double post_source_transmission);

enum class Mechanism { hba, c2pa, mixed, e2pa };

std::string_view to_string(Mechanism m);
Mechanism mechanism_from_string(std::string_view name);

struct E2paParams {
  double sigma_e2pa_cm2 = 0.0;
  /// Per-photon transmission between the source and the sample.
  double photon_transmission = 0.176;
};

struct SimulationRequest {
  Mechanism mechanism = Mechanism::c2pa;
  SweepKind sweep = SweepKind::pump_power;
  std::vector<double> powers_w;  // power delivered to the sample
  double dwell_s = 100.0;
  double background_cps = 4.0;
  std::optional<std::uint64_t> seed;
  E2paParams e2pa;
};

/// Name of the pseudo-random generator recorded in simulation reports.
inline constexpr std::string_view kGeneratorName = "std::mt19937_64 + std::poisson_distribution, per-point seed_seq{seed_lo, seed_hi, index}";

/// Noise-free expected signal (background excluded) at one sweep point.
double expected_rate(const ExperimentConfig& cfg, const ExcitationSource& src, const SimulationRequest& req,
                     double power_w);

PowerSeries simulate_power_series(const ExperimentConfig& cfg, const ExcitationSource& src,
                                  const SimulationRequest& req);

}  // namespace hbatk
