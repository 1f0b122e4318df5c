#include "hbatk/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "hbatk/constants.hpp"
#include "hbatk/errors.hpp"

namespace hbatk {

const double kGaussianBeamPrefactor = std::sqrt(2.0) * std::pow(std::numbers::ln2 / std::numbers::pi, 1.5);

// ---------------------------------------------------------------------------
// ExcitationSource

ExcitationSource::ExcitationSource(std::variant<Monochromatic, Broadband> line, double power_w, double effective_nm)
    : line_(std::move(line)), power_w_(power_w), effective_wavelength_nm_(effective_nm) {
  if (!(power_w_ >= 0.0) || !std::isfinite(power_w_)) throw DomainError("excitation power must be >= 0");
  if (!(effective_wavelength_nm_ > 0.0)) throw DomainError("effective wavelength must be > 0");
}

ExcitationSource ExcitationSource::monochromatic(double lambda_nm, double power_w, double linewidth_fwhm_nm) {
  if (!(lambda_nm > 0.0)) throw DomainError("laser wavelength must be > 0");
  if (!(linewidth_fwhm_nm >= 0.0)) throw DomainError("laser linewidth must be >= 0");
  return ExcitationSource(Monochromatic{lambda_nm, linewidth_fwhm_nm}, power_w, lambda_nm);
}

ExcitationSource ExcitationSource::broadband(const Spectrum& shape, double power_w, double effective_wavelength_nm) {
  if (shape.kind() != SpectrumKind::spectral_power_density) {
    throw DomainError("broadband source needs a spectral_power_density spectrum");
  }
  const double area = integrate(shape);
  if (!(area > 0.0)) throw DomainError("broadband source spectrum integrates to zero");
  if (!(power_w >= 0.0)) throw DomainError("excitation power must be >= 0");
  return ExcitationSource(Broadband{scaled(shape, power_w / area)}, power_w, effective_wavelength_nm);
}

ExcitationSource ExcitationSource::with_power(double power_w) const {
  if (!(power_w >= 0.0) || !std::isfinite(power_w)) throw DomainError("excitation power must be >= 0");
  ExcitationSource out = *this;
  if (auto* b = std::get_if<Broadband>(&out.line_)) {
    if (power_w_ > 0.0) {
      b->density = scaled(b->density, power_w / power_w_);
    } else {
      throw DomainError("cannot rescale a zero-power broadband source");
    }
  }
  out.power_w_ = power_w;
  return out;
}

ExcitationSource ExcitationSource::with_blue_cutoff(std::optional<double> cutoff_nm) const {
  if (cutoff_nm && !(*cutoff_nm > 0.0)) throw DomainError("blue cutoff must be > 0 nm");
  ExcitationSource out = *this;
  out.blue_cutoff_nm_ = cutoff_nm;
  return out;
}

const Monochromatic& ExcitationSource::line() const {
  if (const auto* m = std::get_if<Monochromatic>(&line_)) return *m;
  throw DomainError("source is broadband, not a monochromatic line");
}

const Broadband& ExcitationSource::band() const {
  if (const auto* b = std::get_if<Broadband>(&line_)) return *b;
  throw DomainError("source is a monochromatic line, not broadband");
}

double ExcitationSource::effective_wavelength_nm() const {
  if (const auto* m = std::get_if<Monochromatic>(&line_)) return m->lambda_nm;
  return effective_wavelength_nm_;
}

// ---------------------------------------------------------------------------
// Geometry and collection

void ExperimentConfig::validate() const {
  fluorophore.validate();
  if (!(concentration_molar > 0.0)) throw DomainError("concentration must be > 0");
  if (!(path_length_cm > 0.0)) throw DomainError("path length must be > 0");
  if (!(temperature_k > 0.0)) throw DomainError("temperature must be > 0 K");
  if (!(beam.fwhm_x_um > 0.0) || !(beam.fwhm_y_um > 0.0)) throw DomainError("beam FWHM must be > 0");
  if (!(collection.kappa > 0.0 && collection.kappa <= 1.0)) throw DomainError("kappa must lie in (0, 1]");
  if (collection.gamma && !(*collection.gamma > 0.0 && *collection.gamma <= 1.0)) {
    throw DomainError("gamma must lie in (0, 1]");
  }
}

double beam_area_cm2(const BeamGeometry& beam) {
  if (!(beam.fwhm_x_um > 0.0) || !(beam.fwhm_y_um > 0.0)) throw DomainError("beam FWHM must be > 0");
  // um -> cm
  return std::numbers::pi * (0.5 * beam.fwhm_x_um * 1e-4) * (0.5 * beam.fwhm_y_um * 1e-4);
}

double photon_flux(double power_w, double lambda_nm, double area_cm2) {
  if (!(power_w > 0.0)) throw DomainError("photon_flux: power must be > 0");
  if (!(area_cm2 > 0.0)) throw DomainError("photon_flux: area must be > 0");
  return power_w / photon_energy(wavelength_to_frequency(lambda_nm)) / area_cm2;
}

double gamma_overlap(const Spectrum& emission, const CollectionChain& chain) {
  double lo = emission.min_wavelength();
  double hi = emission.max_wavelength();
  std::set<double> nodes(emission.wavelengths().begin(), emission.wavelengths().end());
  auto restrict_to = [&](const Spectrum& s) {
    lo = std::max(lo, s.min_wavelength());
    hi = std::min(hi, s.max_wavelength());
    nodes.insert(s.wavelengths().begin(), s.wavelengths().end());
  };
  for (const auto& f : chain.filters) restrict_to(f);
  if (chain.pmt_qe) restrict_to(*chain.pmt_qe);
  if (!(hi > lo)) throw DomainError("gamma_overlap: emission, filters and QE share no wavelength window");

  const double total = integrate(emission);
  if (!(total > 0.0)) throw DomainError("gamma_overlap: emission spectrum integrates to zero");

  std::vector<double> grid;
  for (double w : nodes) {
    if (w >= lo && w <= hi) grid.push_back(w);
  }
  if (grid.front() > lo) grid.insert(grid.begin(), lo);
  if (grid.back() < hi) grid.push_back(hi);

  std::vector<double> product(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double v = emission.at(grid[i]);
    for (const auto& f : chain.filters) v *= f.at(grid[i]);
    if (chain.pmt_qe) v *= chain.pmt_qe->at(grid[i]);
    product[i] = v;
  }
  double detected = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    detected += 0.5 * (product[i] + product[i - 1]) * (grid[i] - grid[i - 1]);
  }
  return detected / total;
}

double effective_gamma(const ExperimentConfig& cfg) {
  if (cfg.collection.gamma) return *cfg.collection.gamma;
  if (!cfg.fluorophore.emission) {
    throw DomainError("optical efficiency gamma is neither given nor computable (no emission spectrum)");
  }
  return gamma_overlap(*cfg.fluorophore.emission, cfg.collection);
}

double collection_efficiency(const ExperimentConfig& cfg) {
  return effective_gamma(cfg) * cfg.collection.kappa * cfg.fluorophore.eta;
}

double molecule_density(const ExperimentConfig& cfg) {
  // mol/L -> molecules/cm^3
  return constants::avogadro * cfg.concentration_molar * 1e-3;
}

double molecules_in_beam(const ExperimentConfig& cfg) {
  return molecule_density(cfg) * cfg.path_length_cm * beam_area_cm2(cfg.beam);
}

// ---------------------------------------------------------------------------
// Forward models

double c2pef_signal(const ExperimentConfig& cfg, const ExcitationSource& src) {
  if (src.is_broadband()) throw DomainError("c2pef_signal: broadband sources are not supported for C2PA");
  cfg.validate();
  const double power = src.total_power();
  if (power == 0.0 || cfg.fluorophore.sigma_c2pa_cm4s == 0.0) return 0.0;
  const double photons = power / photon_energy(wavelength_to_frequency(src.line().lambda_nm));
  return kGaussianBeamPrefactor * collection_efficiency(cfg) * molecule_density(cfg) * cfg.path_length_cm *
         cfg.fluorophore.sigma_c2pa_cm4s / beam_area_cm2(cfg.beam) * photons * photons;
}

namespace {

// Gaussian line sampled over +-5 FWHM, normalised so its trapezoid integral is the power.
Spectrum line_density(const Monochromatic& line, double power_w) {
  constexpr int samples = 401;
  const double half_span = 5.0 * line.linewidth_fwhm_nm;
  if (line.lambda_nm - half_span <= 0.0) throw DomainError("laser linewidth too large for its wavelength");
  std::vector<double> w(samples);
  std::vector<double> v(samples);
  for (int i = 0; i < samples; ++i) {
    w[i] = line.lambda_nm - half_span + 2.0 * half_span * i / (samples - 1);
    v[i] = gaussian_profile(w[i], line.lambda_nm, line.linewidth_fwhm_nm, 1.0);
  }
  const Spectrum shape(std::move(w), std::move(v), SpectrumKind::spectral_power_density);
  return scaled(shape, power_w / integrate(shape));
}

// Integral of sigma_1(nu) * P(nu) / (h nu) over frequency, with the W/nm density
// mapped to W/Hz through |d lambda / d nu| = lambda^2 / c.
double hba_rate_integral(const Spectrum& density, double temperature_k, const Fluorophore& f) {
  const auto w = density.wavelengths();
  const auto p = density.values();
  const std::size_t n = w.size();
  std::vector<double> nu(n);
  std::vector<double> g(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i = n - 1 - j;  // ascending frequency
    nu[j] = wavelength_to_frequency(w[i]);
    const double per_hz = p[i] * w[i] * w[i] * 1e-9 / constants::speed_of_light;
    g[j] = per_hz == 0.0 ? 0.0 : hba_cross_section(nu[j], temperature_k, f) * per_hz / photon_energy(nu[j]);
  }
  double sum = 0.0;
  for (std::size_t j = 1; j < n; ++j) sum += 0.5 * (g[j] + g[j - 1]) * (nu[j] - nu[j - 1]);
  return sum;
}

}  // namespace

double hba_signal(const ExperimentConfig& cfg, const ExcitationSource& src) {
  cfg.validate();
  const Fluorophore& f = cfg.fluorophore;
  if (!f.absorption) throw DomainError("hba_signal: fluorophore '" + f.name + "' has no absorption spectrum");
  if (src.total_power() == 0.0) return 0.0;

  double integral = 0.0;
  if (!src.is_broadband() && src.line().linewidth_fwhm_nm == 0.0) {
    const double nu = wavelength_to_frequency(src.line().lambda_nm);
    integral = hba_cross_section(nu, cfg.temperature_k, f) * src.total_power() / photon_energy(nu);
  } else {
    Spectrum density = src.is_broadband() ? src.band().density : line_density(src.line(), src.total_power());
    if (const auto cutoff = src.blue_cutoff_nm()) {
      if (*cutoff >= density.max_wavelength()) {
        throw DomainError("hba_signal: nothing of the source spectrum survives the blue cutoff");
      }
      density = truncate(density, *cutoff, density.max_wavelength());
    }
    integral = hba_rate_integral(density, cfg.temperature_k, f);
  }
  return collection_efficiency(cfg) * molecule_density(cfg) * cfg.path_length_cm * integral;
}

double total_signal(const ExperimentConfig& cfg, double phi, double sigma_hba_cm2) {
  if (!(phi >= 0.0)) throw DomainError("total_signal: flux must be >= 0");
  if (!(sigma_hba_cm2 >= 0.0)) throw DomainError("total_signal: sigma_hba must be >= 0");
  const double nk = molecules_in_beam(cfg) * collection_efficiency(cfg);
  return nk * sigma_hba_cm2 * phi + 0.5 * nk * cfg.fluorophore.sigma_c2pa_cm4s * phi * phi;
}

double e2pa_signal_toy(const ExperimentConfig& cfg, double pair_rate, double sigma_e2pa_cm2,
                       double post_source_transmission) {
  const double t = post_source_transmission;
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("e2pa_signal_toy: transmission must lie in [0, 1]");
  if (!(pair_rate >= 0.0)) throw DomainError("e2pa_signal_toy: pair rate must be >= 0");
  if (!(sigma_e2pa_cm2 >= 0.0)) throw DomainError("e2pa_signal_toy: sigma_e2pa must be >= 0");
  return collection_efficiency(cfg) * molecules_in_beam(cfg) * sigma_e2pa_cm2 * pair_rate * t * t /
         beam_area_cm2(cfg.beam);
}

}  // namespace hbatk
