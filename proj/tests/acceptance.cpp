// Acceptance checks, one line per criterion. Usage: hbatk_acceptance [N ...]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hbatk/cli.hpp"
#include "hbatk/constants.hpp"
#include "hbatk/inference.hpp"
#include "hbatk/io_util.hpp"
#include "hbatk/signal_model.hpp"
#include "support.hpp"

using namespace hbatk;
using namespace hbatk::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

// 1 -----------------------------------------------------------------------
Outcome round_trip(const ExperimentConfig& cfg, double lo, double hi, double sigma_gm, double budget_s,
                   const std::string& label) {
  const auto t0 = std::chrono::steady_clock::now();
  SimulationRequest req;
  req.mechanism = Mechanism::c2pa;
  req.powers_w = logspace(lo, hi, 12);
  const auto src = ExcitationSource::monochromatic(1060.0, hi);
  const auto series = simulate_power_series(cfg, src, req);
  const auto est = derive_sigma_c2pa(series, cfg, 1060.0, RegimePolicy::abort);
  const double slope = est.slope.value("slope");
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double err = rel_err(est.value_gm(), sigma_gm);
  Outcome o;
  o.pass = err <= 1e-6 && std::abs(slope - 2.0) <= 0.005 && dt < budget_s;
  o.detail = label + " " + num(est.value_gm()) + " GM (rel err " + num(err) + "), slope " + num(slope) + ", " +
             num(dt) + " s";
  return o;
}

Outcome criterion1() {
  const auto a = round_trip(rh6g_config(), 1e-4, 2e-3, 9.9, 1.0, "Rh6G");
  const auto b = round_trip(lds798_config(), 0.05, 0.5, 220.0, 1.0, "LDS798");
  return {a.pass && b.pass, a.detail + "; " + b.detail};
}

// 2 -----------------------------------------------------------------------
Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  auto cfg = lds798_config();
  const double area = beam_area_cm2(cfg.beam);
  const double phi_c = photon_flux(0.01, 1060.0, area);
  const double s_hba = 0.5 * cfg.fluorophore.sigma_c2pa_cm4s * phi_c;
  auto window = [&](double lo, double hi) {
    std::vector<double> p = logspace(lo, hi, 10), y;
    for (double x : p) y.push_back(total_signal(cfg, photon_flux(x, 1060.0, area), s_hba));
    return fit_loglog_slope(series_from(p, y, SweepKind::pump_power, Axis::power)).value("slope");
  };
  const double low = window(5e-5, 1e-3);
  const double high = window(0.05, 0.5);
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outcome o;
  o.pass = low >= 1.0 && low <= 1.2 && high >= 1.8 && high <= 2.0 && dt < 1.0;
  o.detail = "phi_c " + num(phi_c) + ", slope 0.05-1 mW " + num(low) + ", 50-500 mW " + num(high) + ", " + num(dt) +
             " s";
  return o;
}

// 3 -----------------------------------------------------------------------
Outcome criterion3() {
  // Closed form evaluated independently at 40 digits.
  const double oracle = 0.1465643614984573;
  const double closed = std::sqrt(2.0) * std::pow(std::log(2.0) / M_PI, 1.5);
  Outcome o;
  o.pass = std::abs(kGaussianBeamPrefactor - oracle) <= 1e-6 && kGaussianBeamPrefactor == closed;
  o.detail = "prefactor " + num(kGaussianBeamPrefactor) + " vs closed form " + num(oracle) +
             " (the quoted 0.146578 differs from the closed form by " + num(0.146578 - oracle) + ")";
  return o;
}

// 4 -----------------------------------------------------------------------
Outcome criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  const double nu_max = wavelength_to_frequency(672.0);
  const double smax = sigma_max_from_epsilon(1.54e4);
  double worst = 0.0;
  for (double t : {283.0, 290.0, 298.15, 323.0}) {
    const double nu = wavelength_to_frequency(1060.0);
    const double h = 1e9;
    const double d = (std::log(hba_cross_section(nu + h, t, smax, nu_max, 1.0)) -
                      std::log(hba_cross_section(nu - h, t, smax, nu_max, 1.0))) /
                     (2 * h);
    worst = std::max(worst, rel_err(d, constants::planck / (constants::boltzmann * t)));
  }
  std::vector<CrossSectionPoint> pts;
  for (double l = 770.0; l <= 900.0; l += 10.0) {
    pts.push_back({l, hba_cross_section(wavelength_to_frequency(l), 290.0, smax, nu_max, 1.0)});
  }
  const double ratio = check_boltzmann_slope(pts, 290.0).diagnostics.at("ratio");
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outcome o;
  o.pass = worst <= 1e-6 && std::abs(ratio - 1.0) <= 1e-6 && dt < 1.0;
  o.detail = "max rel dev of d ln sigma/d nu from h/kT " + num(worst) + ", slope ratio at 290 K " + num(ratio) + ", " +
             num(dt) + " s";
  return o;
}

// 5 -----------------------------------------------------------------------
Outcome criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = lds798_config();
  const auto spdc = ExcitationSource::broadband(spdc_density(1077.4, 128.9, 0.25), 40e-9);
  const double f850 = hba_signal(cfg, spdc.with_blue_cutoff(850.0));
  const double f835 = hba_signal(cfg, spdc.with_blue_cutoff(835.0));
  const double target = 40.0 / 24.0;
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outcome o;
  const bool magnitude = f850 >= target / 10.0 && f850 <= target * 10.0;
  const bool sensitivity = f835 / f850 >= 5.0;
  o.pass = magnitude && sensitivity && dt < 5.0;
  o.detail = "F(40 nW, 850 nm cutoff) " + num(f850) + " cps vs target " + num(target) + " cps (" +
             (magnitude ? "within" : "outside") + " 10x); F(835)/F(850) " + num(f835 / f850) + " (need >= 5), " +
             num(dt) + " s";
  return o;
}

// 6 -----------------------------------------------------------------------
Outcome criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Case {
    std::string name;
    ExperimentConfig cfg;
    ExcitationSource src;
    SimulationRequest req;
    Verdict expected;
  };
  std::vector<Case> cases;
  {
    Case c{"HBA", lds798_config(), ExcitationSource::monochromatic(1060.0, 0.01), {}, Verdict::one_photon};
    c.req.mechanism = Mechanism::hba;
    c.req.powers_w = logspace(1e-3, 1e-2, 8);
    cases.push_back(c);
  }
  {
    Case c{"C2PA", rh6g_config(), ExcitationSource::monochromatic(1060.0, 2e-3), {}, Verdict::c2pa};
    c.req.mechanism = Mechanism::c2pa;
    c.req.powers_w = logspace(5e-4, 2e-3, 8);
    cases.push_back(c);
  }
  {
    const auto spdc = ExcitationSource::broadband(spdc_density(1077.4, 128.9, 1.0), 1e-6).with_blue_cutoff(850.0);
    Case c{"E2PA", lds798_config(), spdc, {}, Verdict::e2pa_consistent};
    c.req.mechanism = Mechanism::e2pa;
    c.req.powers_w = logspace(1e-7, 1e-6, 8);
    c.req.e2pa.sigma_e2pa_cm2 = 1e-20;
    // Scale the toy cross section to a 300 counts/s peak.
    c.req.e2pa.sigma_e2pa_cm2 *= 300.0 / expected_rate(c.cfg, c.src, c.req, 1e-6);
    cases.push_back(c);
  }
  Outcome o;
  o.pass = true;
  for (auto& c : cases) {
    int correct = 0;
    double peak = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      c.req.seed = seed;
      c.req.sweep = SweepKind::pump_power;
      const auto pump = simulate_power_series(c.cfg, c.src, c.req);
      c.req.sweep = SweepKind::post_attenuation;
      const auto att = simulate_power_series(c.cfg, c.src, c.req);
      peak = expected_rate(c.cfg, c.src, c.req, c.req.powers_w.back());
      if (discriminate_mechanism(pump, att).verdict == c.expected) ++correct;
    }
    o.pass = o.pass && correct == 100 && peak >= 100.0;
    o.detail += c.name + " " + std::to_string(correct) + "/100 (peak " + num(peak) + " cps); ";
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.pass = o.pass && dt < 30.0;
  o.detail += num(dt) + " s";
  return o;
}

// 7 -----------------------------------------------------------------------
Outcome criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double a = std::pow(10.0, -20.0 + 4.0 * u(rng));
    const double b = std::pow(10.0, -41.0 + 4.0 * u(rng));
    const double phi_c = a / b;
    const auto x = logspace(phi_c / 100.0, phi_c * 100.0, 16);
    std::vector<double> y;
    for (double p : x) y.push_back(a * p + b * p * p);
    const auto r = fit_linear_quadratic(series_from(x, y, SweepKind::pump_power, Axis::flux));
    worst = std::max({worst, rel_err(r.value("a"), a), rel_err(r.value("b"), b)});
  }

  // Poisson coverage: peak 1000 counts/s, 10 s dwell, 4 counts/s background.
  const double a = 1e-18, b = 1e-39, dwell = 10.0, bg = 4.0;
  const double phi_c = a / b;
  const auto x = logspace(phi_c / 30.0, phi_c * 3.0, 12);
  const double scale = 1000.0 / (a * x.back() + b * x.back() * x.back());
  const double at = a * scale, bt = b * scale;
  int covered = 0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 g(static_cast<std::uint64_t>(t) + 1);
    std::vector<SeriesPoint> pts;
    for (double p : x) {
      const double mu = (at * p + bt * p * p) * dwell;
      const double n_tot = static_cast<double>(std::poisson_distribution<long long>(mu + bg * dwell)(g));
      const double n_bg = static_cast<double>(std::poisson_distribution<long long>(bg * dwell)(g));
      const double rate = std::max(0.0, (n_tot - n_bg) / dwell);
      pts.push_back({p, rate, std::sqrt(std::max(n_tot + n_bg, 1.0)) / dwell, dwell, false});
    }
    const auto r = fit_linear_quadratic(PowerSeries(pts, SweepKind::pump_power, Axis::flux));
    if (std::abs(r.value("a") - at) <= 3 * r.sigma("a") && std::abs(r.value("b") - bt) <= 3 * r.sigma("b")) ++covered;
  }
  const double coverage = static_cast<double>(covered) / trials;
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outcome o;
  o.pass = worst <= 1e-10 && coverage >= 0.95 && dt < 60.0;
  o.detail = "noise-free max rel err " + num(worst) + " over 20 pairs; 3-sigma coverage " + num(coverage) +
             " over 500 trials; " + num(dt) + " s";
  return o;
}

// 8 -----------------------------------------------------------------------
Outcome criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = lds798_config();
  double worst = 0.0;
  std::string detail;
  for (double step : {1.0, 0.5}) {
    const double coarse =
        hba_signal(cfg, ExcitationSource::broadband(spdc_density(1077.4, 128.9, step), 40e-9).with_blue_cutoff(850.0));
    const double fine = hba_signal(
        cfg, ExcitationSource::broadband(spdc_density(1077.4, 128.9, step / 2), 40e-9).with_blue_cutoff(850.0));
    const double change = rel_err(fine, coarse);
    worst = std::max(worst, change);
    detail += "step " + num(step) + "->" + num(step / 2) + " nm: " + num(change) + "; ";
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst < 1e-3 && dt < 1.0, detail + num(dt) + " s"};
}

// 9 -----------------------------------------------------------------------
Outcome criterion9() {
  const auto root = fs::temp_directory_path() / "hbatk_acceptance_9";
  fs::remove_all(root);
  struct Run {
    std::string config;
    std::vector<std::string> extra;
  };
  const std::vector<Run> runs{
      {fixture("rh6g_c2pa.json"), {"--seed", "2024"}},
      {fixture("lds798_spdc.json"), {}},
      {fixture("lds798_spdc.json"), {"--mechanism", "e2pa", "--sweep", "post_attenuation", "--seed", "5"}},
      {fixture("lds798_laser.json"), {"--powers", "log:5e-5:0.5:12", "--seed", "77"}},
  };
  Outcome o;
  o.pass = true;
  int identical = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto first = root / ("run" + std::to_string(i));
    const auto second = root / ("rerun" + std::to_string(i));
    std::vector<std::string> args{"simulate", "--config", runs[i].config, "--out", first.string()};
    args.insert(args.end(), runs[i].extra.begin(), runs[i].extra.end());
    std::ostringstream out, err;
    if (run_cli(args, out, err) != 0) {
      o.pass = false;
      o.detail += "run " + std::to_string(i) + " failed: " + err.str();
      continue;
    }
    if (run_cli({"simulate", "--from-report", (first / "report.json").string(), "--out", second.string()}, out, err) !=
        0) {
      o.pass = false;
      o.detail += "rerun " + std::to_string(i) + " failed: " + err.str();
      continue;
    }
    if (read_text_file(first / "power_series.csv") == read_text_file(second / "power_series.csv")) {
      ++identical;
    } else {
      o.pass = false;
    }
  }
  o.detail += std::to_string(identical) + "/" + std::to_string(runs.size()) +
              " seeded runs byte-identical when re-executed from the echoed config";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"cross-section round trip", criterion1},     {"mixture slope transition", criterion2},
      {"geometric prefactor", criterion3},          {"Boltzmann identity", criterion4},
      {"SPDC HBA magnitude and cutoff sensitivity", criterion5},
      {"discriminator truth table", criterion6},    {"inverse-fit exactness and coverage", criterion7},
      {"quadrature convergence", criterion8},       {"CLI reproducibility", criterion9},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));
  if (selected.empty()) {
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);
  }
  int failures = 0;
  for (int n : selected) {
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::printf("FAIL %d: no such criterion\n", n);
      ++failures;
      continue;
    }
    Outcome o;
    try {
      o = criteria[n - 1].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", n, criteria[n - 1].first.c_str(), o.detail.c_str());
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
