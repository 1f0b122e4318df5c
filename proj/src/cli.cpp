#include "hbatk/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hbatk/config.hpp"
#include "hbatk/constants.hpp"
#include "hbatk/errors.hpp"
#include "hbatk/inference.hpp"
#include "hbatk/io_util.hpp"
#include "hbatk/report.hpp"

namespace hbatk {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kFitCurvePoints = 201;

struct Context {
  std::vector<std::string> command_line;
  std::string started;
  std::ostream* out = nullptr;
};

fs::path resolve_output_dir(const std::string& flag, const std::optional<std::string>& from_config) {
  fs::path dir;
  if (!flag.empty()) {
    dir = flag;
  } else if (from_config) {
    dir = *from_config;
  } else if (const char* env = std::getenv("HBATK_OUTPUT_DIR"); env && *env) {
    dir = env;
  } else {
    dir = ".";
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

void emit(const Context& ctx, const fs::path& dir, std::string_view command, const json& echo, const json& results,
          std::optional<std::uint64_t> seed = std::nullopt, std::optional<std::string> generator = std::nullopt) {
  Provenance p;
  p.command_line = ctx.command_line;
  p.seed = seed;
  p.generator = std::move(generator);
  p.started_utc = ctx.started;
  p.finished_utc = utc_timestamp();
  const json report = make_report(command, echo, results, p);
  const auto problems = validate_report(report);
  if (!problems.empty()) throw std::logic_error("report schema violation: " + problems.front());
  write_file_atomic(dir / "report.json", dump_report(report));
  *ctx.out << "wrote " << (dir / "report.json").string() << "\n";
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (auto f : split_fields(text)) out.push_back(parse_double(trim(f), what));
  return out;
}

// "a,b,c", "log:lo:hi:n" or "lin:lo:hi:n".
std::vector<double> parse_powers(const std::string& text) {
  if (text.rfind("log:", 0) == 0 || text.rfind("lin:", 0) == 0) {
    const auto f = split_fields(std::string_view(text).substr(4), ':');
    if (f.size() != 3) throw ConfigError("--powers: expected log:lo:hi:n or lin:lo:hi:n");
    const double lo = parse_double(f[0], "--powers");
    const double hi = parse_double(f[1], "--powers");
    const double nd = parse_double(f[2], "--powers");
    if (!(nd >= 2.0) || nd != std::floor(nd)) throw ConfigError("--powers: n must be an integer >= 2");
    if (!(lo > 0.0 && hi > lo)) throw ConfigError("--powers: need 0 < lo < hi");
    const auto n = static_cast<std::size_t>(nd);
    std::vector<double> out(n);
    const bool log = text[1] == 'o';
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(n - 1);
      out[i] = log ? std::pow(10.0, std::log10(lo) + t * (std::log10(hi) - std::log10(lo))) : lo + t * (hi - lo);
    }
    out.front() = lo;
    out.back() = hi;
    return out;
  }
  return parse_number_list(text, "--powers");
}

std::string x_column(Axis axis) { return axis == Axis::power ? "power_w" : "flux_photons_cm2_s"; }

std::vector<double> sample_axis(double lo, double hi, bool logarithmic) {
  std::vector<double> x(kFitCurvePoints);
  for (int i = 0; i < kFitCurvePoints; ++i) {
    const double t = static_cast<double>(i) / (kFitCurvePoints - 1);
    x[i] = logarithmic ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
  }
  x.back() = hi;
  return x;
}

template <class F>
std::string curve_csv(const std::string& xname, const std::string& yname, const std::vector<double>& x, F&& f) {
  std::string s = xname + "," + yname + "\n";
  for (double v : x) s += format_double(v) + "," + format_double(f(v)) + "\n";
  return s;
}

struct TemperatureSeries {
  std::vector<double> t, rate;
};

TemperatureSeries read_temperature_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  bool header = false;
  TemperatureSeries s;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!header) {
      if (t != "temperature_k,rate_cps") throw ConfigError(path + ": expected header 'temperature_k,rate_cps'");
      header = true;
      continue;
    }
    const auto f = split_fields(t);
    if (f.size() != 2) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 2 fields");
    s.t.push_back(parse_double(trim(f[0]), "temperature_k"));
    s.rate.push_back(parse_double(trim(f[1]), "rate_cps"));
  }
  if (!header) throw ConfigError(path + ": missing header");
  return s;
}

json spectrum_summary(const Spectrum& s) {
  return {{"kind", std::string(to_string(s.kind()))},
          {"points", s.size()},
          {"min_wavelength_nm", s.min_wavelength()},
          {"max_wavelength_nm", s.max_wavelength()}};
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string config, from_report, mechanism, sweep, powers, out;
  std::optional<std::uint64_t> seed;
  std::optional<double> dwell;
};

int cmd_simulate(const SimulateArgs& a, const Context& ctx) {
  if (a.config.empty() == a.from_report.empty()) throw ConfigError("simulate: give exactly one of --config or --from-report");
  RunConfig cfg;
  if (!a.config.empty()) {
    cfg = load_run_config(a.config);
  } else {
    const auto doc = json::parse(read_text_file(a.from_report), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw ConfigError(a.from_report + ": not a JSON report");
    if (!validate_report(doc).empty()) throw ConfigError(a.from_report + ": " + validate_report(doc).front());
    if (!doc["config_echo"].is_object()) throw ConfigError(a.from_report + ": report carries no config echo");
    cfg = parse_run_config(doc["config_echo"], fs::path("/"));
  }
  if (!cfg.source) throw ConfigError("simulate: config has no source section");

  if (!a.mechanism.empty()) cfg.run.mechanism = mechanism_from_string(a.mechanism);
  if (!a.sweep.empty()) cfg.run.sweep = sweep_kind_from_string(a.sweep);
  if (!a.powers.empty()) cfg.run.powers_w = parse_powers(a.powers);
  if (a.seed) cfg.run.seed = a.seed;
  if (a.dwell) {
    if (!(*a.dwell > 0.0)) throw ConfigError("--dwell must be > 0");
    cfg.run.dwell_s = *a.dwell;
  }
  if (!cfg.run.mechanism) cfg.run.mechanism = Mechanism::c2pa;
  if (!cfg.run.sweep) cfg.run.sweep = SweepKind::pump_power;
  if (cfg.run.powers_w.empty()) throw ConfigError("simulate: no powers (use --powers or run.powers_w)");

  json& er = cfg.echo["run"];
  er["mechanism"] = std::string(to_string(*cfg.run.mechanism));
  er["sweep"] = std::string(to_string(*cfg.run.sweep));
  er["powers_w"] = cfg.run.powers_w;
  er["seed"] = cfg.run.seed ? json(*cfg.run.seed) : json();
  er["dwell_s"] = cfg.run.dwell_s;

  SimulationRequest req;
  req.mechanism = *cfg.run.mechanism;
  req.sweep = *cfg.run.sweep;
  req.powers_w = cfg.run.powers_w;
  req.dwell_s = cfg.run.dwell_s;
  req.background_cps = cfg.background_cps;
  req.seed = cfg.run.seed;
  req.e2pa = cfg.e2pa;

  const auto series = simulate_power_series(cfg.experiment, *cfg.source, req);
  std::vector<double> expected;
  for (double p : req.powers_w) expected.push_back(expected_rate(cfg.experiment, *cfg.source, req, p));

  const auto dir = resolve_output_dir(a.out, cfg.run.output_dir);
  write_file_atomic(dir / "power_series.csv", format_power_series_csv(series));
  json results = {{"mechanism", std::string(to_string(req.mechanism))},
                  {"sweep_kind", std::string(to_string(req.sweep))},
                  {"noise", req.seed ? "poisson" : "none"},
                  {"points", series.size()},
                  {"clamped_points", series.clamped_count()},
                  {"expected_rate_cps", expected},
                  {"beam_area_cm2", beam_area_cm2(cfg.experiment.beam)},
                  {"collection_efficiency", collection_efficiency(cfg.experiment)},
                  {"molecules_in_beam", molecules_in_beam(cfg.experiment)},
                  {"power_series_csv", (dir / "power_series.csv").string()}};
  if (cfg.experiment.fluorophore.nu_max_hz) {
    results["nu_max_hz"] = *cfg.experiment.fluorophore.nu_max_hz;
  }
  emit(ctx, dir, "simulate", cfg.echo, results, req.seed,
       req.seed ? std::optional<std::string>(std::string(kGeneratorName)) : std::nullopt);
  return 0;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string input, model = "slope", out;
  bool weighted = false;
  std::optional<double> energy_j, energy_cm1;
  std::string energy_range;
};

int cmd_fit(const FitArgs& a, const Context& ctx) {
  const auto dir = resolve_output_dir(a.out, std::nullopt);
  json results;
  std::string curve;
  FitReport rep;
  if (a.model == "slope" || a.model == "linquad") {
    const auto s = read_power_series_csv(a.input);
    const double lo = s.points().front().x;
    const double hi = s.points().back().x;
    if (a.model == "slope") {
      rep = fit_loglog_slope(s, {a.weighted});
      const double k = std::pow(10.0, rep.value("intercept"));
      const double m = rep.value("slope");
      curve = curve_csv(x_column(s.axis()), "rate_cps", sample_axis(lo, hi, true),
                        [&](double x) { return k * std::pow(x, m); });
    } else {
      rep = fit_linear_quadratic(s);
      const double ca = rep.value("a");
      const double cb = rep.value("b");
      curve = curve_csv(x_column(s.axis()), "rate_cps", sample_axis(lo, hi, true),
                        [&](double x) { return ca * x + cb * x * x; });
    }
    results["sweep_kind"] = std::string(to_string(s.sweep_kind()));
    results["axis"] = std::string(to_string(s.axis()));
  } else if (a.model == "boltzmann") {
    const auto ts = read_temperature_csv(a.input);
    if (!a.energy_range.empty()) {
      const auto r = parse_number_list(a.energy_range, "--energy-range");
      if (r.size() != 2) throw ConfigError("--energy-range: expected lo,hi in J");
      rep = fit_boltzmann_free_energy(ts.t, ts.rate, r[0], r[1]);
    } else {
      double e = 0.0;
      if (a.energy_j && a.energy_cm1) throw ConfigError("fit: give --energy-j or --energy-cm1, not both");
      if (a.energy_j) {
        e = *a.energy_j;
      } else if (a.energy_cm1) {
        e = *a.energy_cm1 * constants::planck * constants::speed_of_light_cm;
      } else {
        throw ConfigError("fit: boltzmann needs --energy-j, --energy-cm1 or --energy-range");
      }
      rep = fit_boltzmann(ts.t, ts.rate, e);
    }
    const double e = rep.model == "boltzmann_free_energy" ? rep.value("E") : rep.diagnostics.at("energy_j");
    const double ca = rep.value("A");
    const double cc = rep.value("C");
    double lo = ts.t.front(), hi = ts.t.front();
    for (double t : ts.t) {
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    curve = curve_csv("temperature_k", "rate_cps", sample_axis(lo, hi, false),
                      [&](double t) { return ca * std::exp(-e / (constants::boltzmann * t)) + cc; });
  } else {
    throw ConfigError("fit: --model must be slope, linquad or boltzmann");
  }
  write_file_atomic(dir / "fit_curve.csv", curve);
  results["input"] = fs::absolute(a.input).string();
  results["fit"] = to_json(rep);
  results["fit_curve_csv"] = (dir / "fit_curve.csv").string();
  emit(ctx, dir, "fit", nullptr, results);
  return rep.converged ? 0 : 2;
}

// ---------------------------------------------------------------- derive

struct DeriveArgs {
  std::string input, config, quantity = "c2pa", policy = "warn", out;
  std::optional<double> lambda_nm, sigma_c2pa_gm;
  double kappa_rel = 0.23;
  double concentration_rel = 0.10;
  std::optional<double> sigma_c2pa_rel;
};

double source_wavelength(const RunConfig& cfg, const std::optional<double>& flag) {
  if (flag) return *flag;
  if (cfg.source) return cfg.source->effective_wavelength_nm();
  throw ConfigError("derive: no excitation wavelength (set source in the config or pass --lambda-nm)");
}

int cmd_derive(const DeriveArgs& a, const Context& ctx) {
  const auto cfg = load_run_config(a.config);
  const auto series = read_power_series_csv(a.input);
  const auto dir = resolve_output_dir(a.out, cfg.run.output_dir);
  for (double u : {a.kappa_rel, a.concentration_rel}) {
    if (!(u >= 0.0)) throw ConfigError("derive: relative uncertainties must be >= 0");
  }
  const double systematic_c2pa = std::hypot(a.kappa_rel, a.concentration_rel);
  json results = {{"input", fs::absolute(a.input).string()}, {"quantity", a.quantity}};
  const double lambda = source_wavelength(cfg, a.lambda_nm);
  results["lambda_nm"] = lambda;

  if (a.quantity == "c2pa") {
    RegimePolicy policy;
    if (a.policy == "warn") {
      policy = RegimePolicy::warn;
    } else if (a.policy == "abort") {
      policy = RegimePolicy::abort;
    } else {
      throw ConfigError("derive: --policy must be warn or abort");
    }
    const auto est = derive_sigma_c2pa(series, cfg.experiment, lambda, policy);
    const double sys = est.value * systematic_c2pa;
    const double total = std::hypot(est.sigma, sys);
    results["sigma_c2pa_cm4s"] = est.value;
    results["sigma_c2pa_gm"] = est.value_gm();
    results["statistical_sigma_cm4s"] = est.sigma;
    results["systematic_sigma_cm4s"] = sys;
    results["total_sigma_cm4s"] = total;
    results["total_sigma_gm"] = total / constants::goeppert_mayer;
    results["uncertainty_budget"] = {{"kappa_relative", a.kappa_rel},
                                     {"concentration_relative", a.concentration_rel},
                                     {"combined_relative", systematic_c2pa}};
    results["slope_fit"] = to_json(est.slope);
    results["quadratic_fit"] = to_json(est.quadratic);
    results["per_point_cm4s"] = est.per_point;
    results["warnings"] = est.warnings;
  } else if (a.quantity == "hba") {
    const double sc = a.sigma_c2pa_gm ? *a.sigma_c2pa_gm * constants::goeppert_mayer
                                      : cfg.experiment.fluorophore.sigma_c2pa_cm4s;
    if (!(sc > 0.0)) throw ConfigError("derive: hba needs sigma_c2pa (fluorophore.sigma_c2pa_gm or --sigma-c2pa-gm)");
    const double rel = a.sigma_c2pa_rel.value_or(systematic_c2pa);
    if (!(rel >= 0.0)) throw ConfigError("derive: relative uncertainties must be >= 0");
    const auto flux = series.axis() == Axis::flux ? series
                                                  : to_flux_axis(series, lambda, beam_area_cm2(cfg.experiment.beam));
    const auto lq = fit_linear_quadratic(flux);
    const auto v = derive_sigma_hba(lq, sc);
    const double sys = v.value * rel;
    results["sigma_c2pa_cm4s"] = sc;
    results["sigma_hba_cm2"] = v.value;
    results["statistical_sigma_cm2"] = v.sigma;
    results["systematic_sigma_cm2"] = sys;
    results["total_sigma_cm2"] = std::hypot(v.sigma, sys);
    results["uncertainty_budget"] = {{"sigma_c2pa_relative", rel}};
    results["linear_quadratic_fit"] = to_json(lq);
  } else {
    throw ConfigError("derive: --quantity must be c2pa or hba");
  }
  emit(ctx, dir, "derive", cfg.echo, results);
  return 0;
}

// ---------------------------------------------------------------- discriminate

struct DiscriminateArgs {
  std::string pump, attenuation, out;
  double threshold = 0.15;
  bool weighted = false;
};

int cmd_discriminate(const DiscriminateArgs& a, const Context& ctx) {
  const auto pump = read_power_series_csv(a.pump);
  const auto att = read_power_series_csv(a.attenuation);
  const auto v = discriminate_mechanism(pump, att, a.threshold, {a.weighted});
  const auto dir = resolve_output_dir(a.out, std::nullopt);
  json results = to_json(v);
  results["pump_csv"] = fs::absolute(a.pump).string();
  results["attenuation_csv"] = fs::absolute(a.attenuation).string();
  emit(ctx, dir, "discriminate", nullptr, results);
  *ctx.out << "verdict " << to_string(v.verdict) << "\n";
  return 0;
}

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs {
  std::string op, input, kind, absorption, emission, qe, config, out;
  std::vector<std::string> filters;
  std::optional<double> center_nm, nu_max_nm;
  std::vector<double> lambdas;
};

int cmd_spectrum(const SpectrumArgs& a, const Context& ctx) {
  const auto dir = resolve_output_dir(a.out, std::nullopt);
  auto need = [&](const std::string& v, const char* flag) {
    if (v.empty()) throw ConfigError("spectrum " + a.op + ": " + flag + " is required");
    return v;
  };
  json results = {{"op", a.op}};
  json echo = nullptr;
  if (a.op == "mirror") {
    const auto kind = spectrum_kind_from_string(a.kind.empty() ? "emission" : a.kind);
    const auto s = read_spectrum_csv(need(a.input, "--input"), kind);
    if (!a.center_nm) throw ConfigError("spectrum mirror: --center-nm is required");
    const auto m = mirror_about_center(s, *a.center_nm);
    write_file_atomic(dir / "spectrum.csv", format_spectrum_csv(m));
    results["center_nm"] = *a.center_nm;
    results["input"] = spectrum_summary(s);
    results["output"] = spectrum_summary(m);
    results["spectrum_csv"] = (dir / "spectrum.csv").string();
  } else if (a.op == "gaussfit") {
    const auto kind = spectrum_kind_from_string(a.kind.empty() ? "spectral_power_density" : a.kind);
    const auto s = read_spectrum_csv(need(a.input, "--input"), kind);
    const auto g = fit_gaussian(s);
    write_file_atomic(dir / "fit_curve.csv",
                      curve_csv("wavelength_nm", "value", sample_axis(s.min_wavelength(), s.max_wavelength(), false),
                                [&](double w) { return gaussian_profile(w, g.center_nm, g.fwhm_nm, g.amplitude); }));
    results["center_nm"] = g.center_nm;
    results["fwhm_nm"] = g.fwhm_nm;
    results["amplitude"] = g.amplitude;
    results["residual_rms"] = g.residual_rms;
    results["iterations"] = g.iterations;
    results["fit_curve_csv"] = (dir / "fit_curve.csv").string();
  } else if (a.op == "gamma") {
    if (!a.config.empty()) {
      const auto cfg = load_run_config(a.config);
      if (!cfg.experiment.fluorophore.emission) throw ConfigError("spectrum gamma: config has no emission_csv");
      results["gamma"] = gamma_overlap(*cfg.experiment.fluorophore.emission, cfg.experiment.collection);
      echo = cfg.echo;
    } else {
      const auto em = read_spectrum_csv(need(a.emission, "--emission or --config"), SpectrumKind::emission);
      CollectionChain chain;
      for (const auto& f : a.filters) chain.filters.push_back(read_spectrum_csv(f, SpectrumKind::transmission));
      if (!a.qe.empty()) chain.pmt_qe = read_spectrum_csv(a.qe, SpectrumKind::quantum_efficiency);
      results["gamma"] = gamma_overlap(em, chain);
    }
  } else if (a.op == "numax") {
    const auto ab = read_spectrum_csv(need(a.absorption, "--absorption"), SpectrumKind::absorption);
    const auto em = read_spectrum_csv(need(a.emission, "--emission"), SpectrumKind::emission);
    const double nu = find_nu_max(ab, em);
    results["nu_max_hz"] = nu;
    results["nu_max_nm"] = frequency_to_wavelength(nu);
  } else if (a.op == "fc") {
    const auto ab = read_spectrum_csv(need(a.absorption, "--absorption"), SpectrumKind::absorption);
    double nu_max = 0.0;
    if (a.nu_max_nm) {
      nu_max = wavelength_to_frequency(*a.nu_max_nm);
    } else {
      const auto em = read_spectrum_csv(need(a.emission, "--nu-max-nm or --emission"), SpectrumKind::emission);
      nu_max = find_nu_max(ab, em);
    }
    if (a.lambdas.empty()) throw ConfigError("spectrum fc: --lambda-nm is required");
    json rows = json::array();
    for (double l : a.lambdas) {
      rows.push_back({{"lambda_nm", l}, {"fc", fc_ratio(wavelength_to_frequency(l), ab, nu_max)}});
    }
    results["nu_max_hz"] = nu_max;
    results["values"] = rows;
  } else {
    throw ConfigError("spectrum: op must be mirror, gaussfit, gamma, numax or fc");
  }
  emit(ctx, dir, "spectrum", echo, results);
  return 0;
}

std::string error_record(std::string_view type, std::string_view message, int code) {
  return json{{"error", std::string(type)}, {"message", std::string(message)}, {"exit_code", code}}.dump();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hbatk: hot-band absorption / two-photon fluorescence toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolkitVersion));

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "simulate a power series from a config");
  s->add_option("--config", sim.config, "configuration file (JSON)");
  s->add_option("--from-report", sim.from_report, "re-run from the config echo of a report.json");
  s->add_option("--mechanism", sim.mechanism, "hba|c2pa|mixed|e2pa");
  s->add_option("--sweep", sim.sweep, "pump_power|post_attenuation");
  s->add_option("--powers", sim.powers, "comma list in W, or log:lo:hi:n / lin:lo:hi:n");
  s->add_option("--seed", sim.seed, "Poisson noise seed; noise-free when absent");
  s->add_option("--dwell", sim.dwell, "dwell time per point, s");
  s->add_option("--out", sim.out, "output directory");

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "fit a power or temperature series");
  f->add_option("input", fit.input, "series CSV")->required();
  f->add_option("--model", fit.model, "slope|linquad|boltzmann")->capture_default_str();
  f->add_flag("--weighted", fit.weighted, "weighted log-log slope");
  f->add_option("--energy-j", fit.energy_j, "Boltzmann activation energy, J");
  f->add_option("--energy-cm1", fit.energy_cm1, "Boltzmann activation energy, cm^-1");
  f->add_option("--energy-range", fit.energy_range, "lo,hi in J: fit the energy as well");
  f->add_option("--out", fit.out, "output directory");

  DeriveArgs der;
  auto* d = app.add_subcommand("derive", "derive a cross section from a power series");
  d->add_option("input", der.input, "power series CSV")->required();
  d->add_option("--config", der.config, "configuration file (JSON)")->required();
  d->add_option("--quantity", der.quantity, "c2pa|hba")->capture_default_str();
  d->add_option("--lambda-nm", der.lambda_nm, "excitation wavelength; defaults to the config source");
  d->add_option("--policy", der.policy, "warn|abort on a non-quadratic slope")->capture_default_str();
  d->add_option("--sigma-c2pa-gm", der.sigma_c2pa_gm, "C2PA cross section for hba, GM");
  d->add_option("--kappa-rel-unc", der.kappa_rel, "relative uncertainty of kappa")->capture_default_str();
  d->add_option("--concentration-rel-unc", der.concentration_rel, "relative uncertainty of the concentration")
      ->capture_default_str();
  d->add_option("--sigma-c2pa-rel-unc", der.sigma_c2pa_rel, "relative uncertainty of sigma_c2pa for hba");
  d->add_option("--out", der.out, "output directory");

  DiscriminateArgs dis;
  auto* m = app.add_subcommand("discriminate", "pump vs. attenuation mechanism test");
  m->add_option("pump", dis.pump, "pump_power series CSV")->required();
  m->add_option("attenuation", dis.attenuation, "post_attenuation series CSV")->required();
  m->add_option("--threshold", dis.threshold, "slope tolerance")->capture_default_str();
  m->add_flag("--weighted", dis.weighted, "weighted log-log slopes");
  m->add_option("--out", dis.out, "output directory");

  SpectrumArgs sp;
  auto* p = app.add_subcommand("spectrum", "spectrum utilities");
  p->add_option("op", sp.op, "mirror|gaussfit|gamma|numax|fc")->required();
  p->add_option("--input", sp.input, "spectrum CSV");
  p->add_option("--kind", sp.kind, "spectrum kind of --input");
  p->add_option("--center-nm", sp.center_nm, "mirror centre");
  p->add_option("--absorption", sp.absorption, "absorption CSV");
  p->add_option("--emission", sp.emission, "emission CSV");
  p->add_option("--filter", sp.filters, "filter transmission CSV (repeatable)");
  p->add_option("--qe", sp.qe, "detector quantum efficiency CSV");
  p->add_option("--config", sp.config, "configuration file for gamma");
  p->add_option("--nu-max-nm", sp.nu_max_nm, "0-0 wavelength for fc");
  p->add_option("--lambda-nm", sp.lambdas, "wavelengths for fc (repeatable)");
  p->add_option("--out", sp.out, "output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolkitVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << error_record("UsageError", e.what(), 1) << "\n";
    return 1;
  }

  Context ctx;
  ctx.command_line.push_back("hbatk");
  ctx.command_line.insert(ctx.command_line.end(), args.begin(), args.end());
  ctx.started = utc_timestamp();
  ctx.out = &out;
  try {
    if (s->parsed()) return cmd_simulate(sim, ctx);
    if (f->parsed()) return cmd_fit(fit, ctx);
    if (d->parsed()) return cmd_derive(der, ctx);
    if (m->parsed()) return cmd_discriminate(dis, ctx);
    if (p->parsed()) return cmd_spectrum(sp, ctx);
  } catch (const RegimeError& e) {
    err << error_record("RegimeError", e.what(), 2) << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << error_record("NumericalError", e.what(), 2) << "\n";
    return 2;
  } catch (const ConfigError& e) {
    err << error_record("ConfigError", e.what(), 1) << "\n";
    return 1;
  } catch (const DomainError& e) {
    err << error_record("DomainError", e.what(), 1) << "\n";
    return 1;
  } catch (const OutOfRangeError& e) {
    err << error_record("OutOfRangeError", e.what(), 1) << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << error_record("Error", e.what(), 1) << "\n";
    return 1;
  }
  return 1;
}

}  // namespace hbatk
