#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hbatk/power_series.hpp"
#include "hbatk/signal_model.hpp"

namespace hbatk {

struct FitParam {
  std::string name;
  double value = 0.0;
  double sigma = 0.0;  // 1 sigma
};

struct FitReport {
  std::string model;
  std::vector<FitParam> params;
  double residual_rms = 0.0;
  int dof = 0;
  bool converged = true;
  int excluded_points = 0;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> notes;

  const FitParam& param(std::string_view name) const;
  double value(std::string_view name) const { return param(name).value; }
  double sigma(std::string_view name) const { return param(name).sigma; }
};

struct SlopeOptions {
  /// Weight log-rates by 1/sigma^2 from the per-point count uncertainties.
  bool weighted = false;
};

/// Least squares of log10(rate) on log10(x). Zero-rate points are excluded and
/// counted in `excluded_points`.
FitReport fit_loglog_slope(const PowerSeries& s, SlopeOptions opts = {});

/// F = a x + b x^2 with a, b >= 0 (active-set). Weighted by 1/rate_err^2 when
/// every point carries an uncertainty; otherwise unweighted with
/// residual-scaled covariance. Diagnostics carry `cov_ab`.
FitReport fit_linear_quadratic(const PowerSeries& s);

enum class RegimePolicy { warn, abort };

struct CrossSectionEstimate {
  double value = 0.0;  // cm^4 s
  double sigma = 0.0;  // statistical, from the quadratic-coefficient fit
  FitReport slope;
  FitReport quadratic;
  std::vector<double> per_point;  // point-by-point inversion, for diagnostics
  std::vector<std::string> warnings;

  double value_gm() const;
  double sigma_gm() const;
};

/// Inverts the C2PEF model on a power-axis series measured at lambda_nm.
/// The series must look quadratic (log-log slope in [1.8, 2.2]); otherwise a
/// warning is recorded or RegimeError thrown, per `policy`.
CrossSectionEstimate derive_sigma_c2pa(const PowerSeries& s, const ExperimentConfig& cfg, double lambda_nm,
                                       RegimePolicy policy = RegimePolicy::warn);

/// sigma_hba = (a / b) * sigma_c2pa / 2.
double derive_sigma_hba(double a, double b, double sigma_c2pa_cm4s);

struct ValueWithSigma {
  double value = 0.0;
  double sigma = 0.0;
};

/// derive_sigma_hba with first-order propagation of the (a, b) covariance.
ValueWithSigma derive_sigma_hba(const FitReport& linear_quadratic, double sigma_c2pa_cm4s);

/// F = A exp(-E / kT) + C with E fixed; linear least squares in A and C.
FitReport fit_boltzmann(std::span<const double> temperatures_k, std::span<const double> rates_cps, double energy_j);

/// Sensitivity variant with E free, searched on [energy_lo_j, energy_hi_j].
FitReport fit_boltzmann_free_energy(std::span<const double> temperatures_k, std::span<const double> rates_cps,
                                    double energy_lo_j, double energy_hi_j);

struct CrossSectionPoint {
  double lambda_nm = 0.0;
  double sigma_cm2 = 0.0;
};

/// Straight-line fit of log10(sigma) against wavenumber (cm^-1). Diagnostics:
/// `expected_slope` = log10(e) h c / kT and `ratio` = fitted / expected.
FitReport check_boltzmann_slope(std::span<const CrossSectionPoint> points, double temperature_k);

enum class Verdict { one_photon, c2pa, e2pa_consistent, inconclusive };

std::string_view to_string(Verdict v);

struct MechanismVerdict {
  Verdict verdict = Verdict::inconclusive;
  ValueWithSigma pump_slope;
  ValueWithSigma attenuation_slope;
  double threshold = 0.15;
  std::string rule_trace;
};

/// Pump-vs-attenuation test: one-photon processes are linear in both sweeps,
/// C2PA quadratic in both, E2PA linear in the pump and quadratic in attenuation.
MechanismVerdict discriminate_mechanism(const PowerSeries& pump, const PowerSeries& attenuation,
                                        double threshold = 0.15, SlopeOptions opts = {});

}  // namespace hbatk
