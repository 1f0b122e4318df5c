#include "hbatk/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "hbatk/constants.hpp"
#include "hbatk/errors.hpp"
#include "least_squares.hpp"

namespace hbatk {

const FitParam& FitReport::param(std::string_view name) const {
  for (const auto& p : params) {
    if (p.name == name) return p;
  }
  throw DomainError("fit report '" + model + "' has no parameter '" + std::string(name) + "'");
}

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_sigma = 0.0;
  double intercept_sigma = 0.0;
  double rms = 0.0;
  int dof = 0;
};

// y = intercept + slope x; absolute weights when `weights` is given.
LineFit fit_line(std::span<const double> x, std::span<const double> y, std::optional<std::vector<double>> weights) {
  const std::vector<double> ones(x.size(), 1.0);
  const std::vector<double> w = weights ? *weights : ones;
  // Centre x so the two columns are well conditioned.
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  std::vector<double> xc(x.begin(), x.end());
  for (double& v : xc) v -= mean;
  bool constant = std::all_of(xc.begin(), xc.end(), [](double v) { return v == 0.0; });
  if (constant) throw NumericalError("line fit: all abscissae are equal");
  const auto sol = detail::solve_linear({ones, xc}, y, w, !weights.has_value());
  LineFit out;
  out.slope = sol.beta[1];
  out.intercept = sol.beta[0] - sol.beta[1] * mean;
  const double var_c = sol.covariance[0];
  const double var_s = sol.covariance[3];
  const double cov = sol.covariance[1];
  out.slope_sigma = std::sqrt(std::max(var_s, 0.0));
  out.intercept_sigma = std::sqrt(std::max(var_c + mean * mean * var_s - 2.0 * mean * cov, 0.0));
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (out.intercept + out.slope * x[i]);
    rss += r * r;
  }
  out.rms = std::sqrt(rss / static_cast<double>(x.size()));
  out.dof = sol.dof;
  return out;
}

bool all_uncertainties_positive(const PowerSeries& s) {
  return std::all_of(s.points().begin(), s.points().end(), [](const SeriesPoint& p) { return p.rate_err_cps > 0.0; });
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

}  // namespace

FitReport fit_loglog_slope(const PowerSeries& s, SlopeOptions opts) {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> w;
  int excluded = 0;
  for (const auto& p : s.points()) {
    if (!(p.rate_cps > 0.0)) {
      ++excluded;
      continue;
    }
    x.push_back(std::log10(p.x));
    y.push_back(std::log10(p.rate_cps));
    if (opts.weighted) {
      if (!(p.rate_err_cps > 0.0)) throw NumericalError("weighted slope fit: point without an uncertainty");
      const double sigma_log = p.rate_err_cps / (p.rate_cps * std::numbers::ln10);
      w.push_back(1.0 / (sigma_log * sigma_log));
    }
  }
  if (x.size() < 3) {
    throw NumericalError("log-log slope fit: " + std::to_string(x.size()) + " usable points (need 3; " +
                         std::to_string(excluded) + " zero-rate points excluded)");
  }
  const auto line = fit_line(x, y, opts.weighted ? std::optional(w) : std::nullopt);
  FitReport r;
  r.model = opts.weighted ? "loglog_slope_weighted" : "loglog_slope";
  r.params = {{"slope", line.slope, line.slope_sigma}, {"intercept", line.intercept, line.intercept_sigma}};
  r.residual_rms = line.rms;
  r.dof = line.dof;
  r.excluded_points = excluded;
  if (excluded > 0) r.notes.push_back(std::to_string(excluded) + " zero-rate point(s) excluded from the log fit");
  return r;
}

FitReport fit_linear_quadratic(const PowerSeries& s) {
  const auto& pts = s.points();
  const std::size_t n = pts.size();
  const bool weighted = all_uncertainties_positive(s);
  const double xmax = pts.back().x;
  std::vector<double> x(n), x2(n), y(n), w(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = pts[i].x / xmax;
    x2[i] = x[i] * x[i];
    y[i] = pts[i].rate_cps;
    if (weighted) w[i] = 1.0 / (pts[i].rate_err_cps * pts[i].rate_err_cps);
  }

  struct Candidate {
    double a = 0, b = 0, va = 0, vb = 0, cov = 0, rss = 0;
    int free = 0;
    bool a_bound = false, b_bound = false;
  };
  auto rss_of = [&](double a, double b) {
    double r = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = y[i] - a * x[i] - b * x2[i];
      r += w[i] * d * d;
    }
    return r;
  };

  std::vector<Candidate> feasible;
  {
    const auto sol = detail::solve_linear({x, x2}, y, w, !weighted);
    // A coefficient whose whole contribution is at rounding level counts as sitting on its bound.
    double ymax = 0.0;
    for (double v : y) ymax = std::max(ymax, std::abs(v));
    const double tol = 1e-12 * ymax;
    if (sol.beta[0] > tol && sol.beta[1] > tol) {
      Candidate c{sol.beta[0], sol.beta[1], sol.covariance[0], sol.covariance[3], sol.covariance[1], 0, 2};
      c.rss = rss_of(c.a, c.b);
      feasible.push_back(c);
    }
  }
  if (feasible.empty()) {
    // Active set: one coefficient pinned at zero.
    const auto only_b = detail::solve_linear({x2}, y, w, !weighted);
    if (only_b.beta[0] >= 0.0) {
      Candidate c{0.0, only_b.beta[0], 0.0, only_b.covariance[0], 0.0, 0, 1, true, false};
      c.rss = rss_of(c.a, c.b);
      feasible.push_back(c);
    }
    const auto only_a = detail::solve_linear({x}, y, w, !weighted);
    if (only_a.beta[0] >= 0.0) {
      Candidate c{only_a.beta[0], 0.0, only_a.covariance[0], 0.0, 0.0, 0, 1, false, true};
      c.rss = rss_of(c.a, c.b);
      feasible.push_back(c);
    }
    Candidate zero{0, 0, 0, 0, 0, rss_of(0, 0), 0, true, true};
    feasible.push_back(zero);
  }
  const auto best = *std::min_element(feasible.begin(), feasible.end(),
                                      [](const Candidate& l, const Candidate& r) { return l.rss < r.rss; });

  FitReport r;
  r.model = "linear_quadratic";
  const double a = best.a / xmax;
  const double b = best.b / (xmax * xmax);
  r.params = {{"a", a, std::sqrt(std::max(best.va, 0.0)) / xmax},
              {"b", b, std::sqrt(std::max(best.vb, 0.0)) / (xmax * xmax)}};
  r.diagnostics["cov_ab"] = best.cov / (xmax * xmax * xmax);
  r.diagnostics["weighted"] = weighted ? 1.0 : 0.0;
  r.diagnostics["chi2"] = best.rss;
  r.dof = static_cast<int>(n) - best.free;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = y[i] - best.a * x[i] - best.b * x2[i];
    rss += d * d;
  }
  r.residual_rms = std::sqrt(rss / static_cast<double>(n));
  if (best.a_bound) r.notes.push_back("a held at its lower bound 0");
  if (best.b_bound) r.notes.push_back("b held at its lower bound 0");
  return r;
}

double CrossSectionEstimate::value_gm() const { return value / constants::goeppert_mayer; }
double CrossSectionEstimate::sigma_gm() const { return sigma / constants::goeppert_mayer; }

CrossSectionEstimate derive_sigma_c2pa(const PowerSeries& s, const ExperimentConfig& cfg, double lambda_nm,
                                       RegimePolicy policy) {
  if (s.axis() != Axis::power) throw DomainError("derive_sigma_c2pa: series must be on the power axis");
  cfg.validate();
  CrossSectionEstimate out;
  out.slope = fit_loglog_slope(s);
  const double slope = out.slope.value("slope");
  if (slope < 1.8 || slope > 2.2) {
    const std::string msg = "log-log slope " + fmt(slope) + " outside the quadratic regime [1.8, 2.2]";
    if (policy == RegimePolicy::abort) throw RegimeError(msg);
    out.warnings.push_back(msg);
  }

  // F = q P^2, one-parameter least squares.
  const auto& pts = s.points();
  const bool weighted = all_uncertainties_positive(s);
  const double pmax = pts.back().x;
  std::vector<double> p2(pts.size()), y(pts.size()), w(pts.size(), 1.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double p = pts[i].x / pmax;
    p2[i] = p * p;
    y[i] = pts[i].rate_cps;
    if (weighted) w[i] = 1.0 / (pts[i].rate_err_cps * pts[i].rate_err_cps);
  }
  const auto sol = detail::solve_linear({p2}, y, w, !weighted);
  const double q = sol.beta[0] / (pmax * pmax);
  const double q_sigma = std::sqrt(std::max(sol.covariance[0], 0.0)) / (pmax * pmax);

  const double photon = photon_energy(wavelength_to_frequency(lambda_nm));
  const double factor = kGaussianBeamPrefactor * collection_efficiency(cfg) * molecule_density(cfg) *
                        cfg.path_length_cm / beam_area_cm2(cfg.beam) / (photon * photon);
  out.value = q / factor;
  out.sigma = q_sigma / factor;
  for (const auto& p : pts) out.per_point.push_back(p.rate_cps / (factor * p.x * p.x));

  out.quadratic.model = "quadratic";
  out.quadratic.params = {{"q", q, q_sigma}};
  out.quadratic.dof = sol.dof;
  double rss = 0.0;
  for (const auto& p : pts) {
    const double d = p.rate_cps - q * p.x * p.x;
    rss += d * d;
  }
  out.quadratic.residual_rms = std::sqrt(rss / static_cast<double>(pts.size()));
  out.quadratic.diagnostics["weighted"] = weighted ? 1.0 : 0.0;
  return out;
}

double derive_sigma_hba(double a, double b, double sigma_c2pa_cm4s) {
  if (!(b > 0.0)) throw DomainError("derive_sigma_hba: quadratic coefficient must be > 0");
  if (!(a >= 0.0)) throw DomainError("derive_sigma_hba: linear coefficient must be >= 0");
  if (!(sigma_c2pa_cm4s > 0.0)) throw DomainError("derive_sigma_hba: sigma_c2pa must be > 0");
  return a / b * sigma_c2pa_cm4s / 2.0;
}

ValueWithSigma derive_sigma_hba(const FitReport& lq, double sigma_c2pa_cm4s) {
  const double a = lq.value("a");
  const double b = lq.value("b");
  const double sa = lq.sigma("a");
  const double sb = lq.sigma("b");
  const auto it = lq.diagnostics.find("cov_ab");
  const double cov = it == lq.diagnostics.end() ? 0.0 : it->second;
  ValueWithSigma out;
  out.value = derive_sigma_hba(a, b, sigma_c2pa_cm4s);
  const double k = sigma_c2pa_cm4s / 2.0;
  // gradient of k a / b
  const double da = k / b;
  const double db = -k * a / (b * b);
  out.sigma = std::sqrt(std::max(da * da * sa * sa + db * db * sb * sb + 2.0 * da * db * cov, 0.0));
  return out;
}

namespace {

void check_temperature_series(std::span<const double> t, std::span<const double> rates) {
  if (t.size() != rates.size()) throw DomainError("Boltzmann fit: temperature and rate counts differ");
  if (t.size() < 3) throw DomainError("Boltzmann fit: need at least 3 temperature points");
  for (double v : t) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("Boltzmann fit: temperatures must be > 0 K");
  }
  for (double v : rates) {
    if (!std::isfinite(v)) throw DomainError("Boltzmann fit: rates must be finite");
  }
}

struct BoltzmannSolution {
  double a = 0, c = 0, sa = 0, sc = 0, rss = 0;
  int dof = 0;
};

BoltzmannSolution solve_boltzmann(std::span<const double> t, std::span<const double> rates, double energy_j) {
  const std::size_t n = t.size();
  std::vector<double> g(n);
  double gmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::exp(-energy_j / (constants::boltzmann * t[i]));
    gmax = std::max(gmax, g[i]);
  }
  if (!(gmax > 0.0)) throw NumericalError("Boltzmann fit: exp(-E/kT) underflows for every temperature");
  for (double& v : g) v /= gmax;
  const std::vector<double> ones(n, 1.0);
  const std::vector<double> w(n, 1.0);
  const auto sol = detail::solve_linear({g, ones}, rates, w, true);
  BoltzmannSolution out;
  out.a = sol.beta[0] / gmax;
  out.c = sol.beta[1];
  out.sa = std::sqrt(std::max(sol.covariance[0], 0.0)) / gmax;
  out.sc = std::sqrt(std::max(sol.covariance[3], 0.0));
  out.rss = sol.weighted_rss;
  out.dof = sol.dof;
  return out;
}

}  // namespace

FitReport fit_boltzmann(std::span<const double> temperatures_k, std::span<const double> rates_cps, double energy_j) {
  check_temperature_series(temperatures_k, rates_cps);
  if (!(energy_j > 0.0)) throw DomainError("Boltzmann fit: activation energy must be > 0");
  const auto sol = solve_boltzmann(temperatures_k, rates_cps, energy_j);
  FitReport r;
  r.model = "boltzmann_fixed_energy";
  r.params = {{"A", sol.a, sol.sa}, {"C", sol.c, sol.sc}};
  r.diagnostics["energy_j"] = energy_j;
  r.dof = sol.dof;
  r.residual_rms = std::sqrt(sol.rss / static_cast<double>(temperatures_k.size()));
  return r;
}

FitReport fit_boltzmann_free_energy(std::span<const double> temperatures_k, std::span<const double> rates_cps,
                                    double energy_lo_j, double energy_hi_j) {
  check_temperature_series(temperatures_k, rates_cps);
  if (!(energy_lo_j > 0.0 && energy_hi_j > energy_lo_j)) {
    throw DomainError("Boltzmann fit: energy search interval must satisfy 0 < lo < hi");
  }
  // Golden-section search on the profiled residual over log E.
  auto rss = [&](double log_e) { return solve_boltzmann(temperatures_k, rates_cps, std::exp(log_e)).rss; };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = std::log(energy_lo_j);
  double hi = std::log(energy_hi_j);
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = rss(x1);
  double f2 = rss(x2);
  bool converged = false;
  for (int iter = 0; iter < 300; ++iter) {
    if (hi - lo < 1e-12) {
      converged = true;
      break;
    }
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = rss(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = rss(x2);
    }
  }
  if (!converged) throw NumericalError("Boltzmann free-energy fit: no convergence");
  const double energy = std::exp(0.5 * (lo + hi));
  const auto sol = solve_boltzmann(temperatures_k, rates_cps, energy);

  // Energy uncertainty from the curvature of the profiled residual.
  const double h = 1e-4 * energy;
  const double curv = (solve_boltzmann(temperatures_k, rates_cps, energy + h).rss - 2.0 * sol.rss +
                       solve_boltzmann(temperatures_k, rates_cps, energy - h).rss) /
                      (h * h);
  const int dof = static_cast<int>(temperatures_k.size()) - 3;
  const double s2 = dof > 0 ? sol.rss / dof : 0.0;
  FitReport r;
  r.model = "boltzmann_free_energy";
  r.params = {{"A", sol.a, sol.sa},
              {"C", sol.c, sol.sc},
              {"E", energy, curv > 0.0 ? std::sqrt(2.0 * s2 / curv) : 0.0}};
  r.dof = std::max(dof, 0);
  r.residual_rms = std::sqrt(sol.rss / static_cast<double>(temperatures_k.size()));
  if (energy <= energy_lo_j * (1 + 1e-9) || energy >= energy_hi_j * (1 - 1e-9)) {
    r.notes.push_back("energy estimate sits on the search boundary");
  }
  return r;
}

FitReport check_boltzmann_slope(std::span<const CrossSectionPoint> points, double temperature_k) {
  if (points.size() < 3) throw DomainError("check_boltzmann_slope: need at least 3 points");
  if (!(temperature_k > 0.0)) throw DomainError("check_boltzmann_slope: temperature must be > 0 K");
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& p : points) {
    if (!(p.lambda_nm > 0.0) || !(p.sigma_cm2 > 0.0)) {
      throw DomainError("check_boltzmann_slope: wavelengths and cross sections must be > 0");
    }
    x.push_back(1e7 / p.lambda_nm);  // cm^-1
    y.push_back(std::log10(p.sigma_cm2));
  }
  const auto line = fit_line(x, y, std::nullopt);
  const double expected = std::numbers::log10e * constants::planck * constants::speed_of_light_cm /
                          (constants::boltzmann * temperature_k);
  FitReport r;
  r.model = "boltzmann_wavenumber_slope";
  r.params = {{"slope", line.slope, line.slope_sigma}, {"intercept", line.intercept, line.intercept_sigma}};
  r.diagnostics["expected_slope"] = expected;
  r.diagnostics["ratio"] = line.slope / expected;
  r.diagnostics["temperature_k"] = temperature_k;
  r.residual_rms = line.rms;
  r.dof = line.dof;
  return r;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::one_photon: return "OnePhoton";
    case Verdict::c2pa: return "C2PA";
    case Verdict::e2pa_consistent: return "E2PAConsistent";
    case Verdict::inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

MechanismVerdict discriminate_mechanism(const PowerSeries& pump, const PowerSeries& attenuation, double threshold,
                                        SlopeOptions opts) {
  if (pump.sweep_kind() != SweepKind::pump_power) {
    throw DomainError("discriminate_mechanism: first series is not tagged sweep_kind=pump_power");
  }
  if (attenuation.sweep_kind() != SweepKind::post_attenuation) {
    throw DomainError("discriminate_mechanism: second series is not tagged sweep_kind=post_attenuation");
  }
  if (!(threshold > 0.0)) throw DomainError("discriminate_mechanism: threshold must be > 0");
  const auto fp = fit_loglog_slope(pump, opts);
  const auto fa = fit_loglog_slope(attenuation, opts);
  MechanismVerdict v;
  v.threshold = threshold;
  v.pump_slope = {fp.value("slope"), fp.sigma("slope")};
  v.attenuation_slope = {fa.value("slope"), fa.sigma("slope")};
  const double sp = v.pump_slope.value;
  const double sa = v.attenuation_slope.value;
  auto near = [threshold](double s, double target) { return std::abs(s - target) <= threshold; };
  std::string rule;
  if (near(sp, 1.0) && near(sa, 1.0)) {
    v.verdict = Verdict::one_photon;
    rule = "|s_p-1|<=d and |s_a-1|<=d";
  } else if (near(sp, 2.0) && near(sa, 2.0)) {
    v.verdict = Verdict::c2pa;
    rule = "|s_p-2|<=d and |s_a-2|<=d";
  } else if (near(sp, 1.0) && near(sa, 2.0)) {
    v.verdict = Verdict::e2pa_consistent;
    rule = "|s_p-1|<=d and |s_a-2|<=d";
  } else {
    v.verdict = Verdict::inconclusive;
    rule = "no rule matched";
  }
  std::ostringstream trace;
  trace.precision(6);
  trace << "pump slope s_p = " << sp << " +- " << v.pump_slope.sigma << "; attenuation slope s_a = " << sa << " +- "
        << v.attenuation_slope.sigma << "; threshold d = " << threshold << "; " << rule << " -> " << to_string(v.verdict);
  v.rule_trace = trace.str();
  return v;
}

}  // namespace hbatk
