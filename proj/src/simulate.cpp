#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hbatk/errors.hpp"
#include "hbatk/signal_model.hpp"

namespace hbatk {

std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::hba: return "hba";
    case Mechanism::c2pa: return "c2pa";
    case Mechanism::mixed: return "mixed";
    case Mechanism::e2pa: return "e2pa";
  }
  return "unknown";
}

Mechanism mechanism_from_string(std::string_view name) {
  for (auto m : {Mechanism::hba, Mechanism::c2pa, Mechanism::mixed, Mechanism::e2pa}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown mechanism '" + std::string(name) + "' (expected hba|c2pa|mixed|e2pa)");
}

double expected_rate(const ExperimentConfig& cfg, const ExcitationSource& src, const SimulationRequest& req,
                     double power_w) {
  switch (req.mechanism) {
    case Mechanism::hba:
      return hba_signal(cfg, src.with_power(power_w));
    case Mechanism::c2pa:
      return c2pef_signal(cfg, src.with_power(power_w));
    case Mechanism::mixed: {
      const auto s = src.with_power(power_w);
      return hba_signal(cfg, s) + c2pef_signal(cfg, s);
    }
    case Mechanism::e2pa: {
      const double t0 = req.e2pa.photon_transmission;
      if (!(t0 > 0.0 && t0 <= 1.0)) throw DomainError("E2PA photon transmission must lie in (0, 1]");
      if (!(req.e2pa.sigma_e2pa_cm2 > 0.0)) throw DomainError("E2PA mechanism needs sigma_e2pa > 0");
      if (req.powers_w.empty()) throw DomainError("E2PA sweep needs its power list");
      const double pair_energy = 2.0 * photon_energy(wavelength_to_frequency(src.effective_wavelength_nm()));
      if (req.sweep == SweepKind::pump_power) {
        // Pump sweep: pair rate follows the sample power, loss after the crystal is fixed.
        return e2pa_signal_toy(cfg, power_w / (pair_energy * t0), req.e2pa.sigma_e2pa_cm2, t0);
      }
      // Attenuation sweep: the source runs at the unattenuated (largest) power.
      const double reference = *std::max_element(req.powers_w.begin(), req.powers_w.end());
      return e2pa_signal_toy(cfg, reference / (pair_energy * t0), req.e2pa.sigma_e2pa_cm2,
                             t0 * power_w / reference);
    }
  }
  throw DomainError("unknown mechanism");
}

PowerSeries simulate_power_series(const ExperimentConfig& cfg, const ExcitationSource& src,
                                  const SimulationRequest& req) {
  if (req.powers_w.empty()) throw DomainError("simulate_power_series: empty power list");
  for (std::size_t i = 0; i < req.powers_w.size(); ++i) {
    if (!(req.powers_w[i] > 0.0)) throw DomainError("simulate_power_series: powers must be > 0");
    if (i > 0 && !(req.powers_w[i] > req.powers_w[i - 1])) {
      throw DomainError("simulate_power_series: powers must be strictly ascending");
    }
  }
  if (!(req.dwell_s > 0.0)) throw DomainError("simulate_power_series: dwell must be > 0");
  if (!(req.background_cps >= 0.0)) throw DomainError("simulate_power_series: background must be >= 0");

  std::vector<SeriesPoint> points;
  points.reserve(req.powers_w.size());
  for (std::size_t i = 0; i < req.powers_w.size(); ++i) {
    SeriesPoint p;
    p.x = req.powers_w[i];
    p.dwell_s = req.dwell_s;
    const double signal = expected_rate(cfg, src, req, p.x);
    if (!req.seed) {
      p.rate_cps = signal;
      p.rate_err_cps = std::sqrt((signal + 2.0 * req.background_cps) * req.dwell_s) / req.dwell_s;
    } else {
      // Each point owns its generator, so points are independent of evaluation order.
      const auto seed = *req.seed;
      std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(i)};
      std::mt19937_64 engine(seq);
      auto draw = [&engine](double mean) -> double {
        if (!(mean > 0.0)) return 0.0;
        std::poisson_distribution<long long> dist(mean);
        return static_cast<double>(dist(engine));
      };
      const double total_counts = draw((signal + req.background_cps) * req.dwell_s);
      const double background_counts = draw(req.background_cps * req.dwell_s);
      p.rate_cps = (total_counts - background_counts) / req.dwell_s;
      p.rate_err_cps = std::sqrt(std::max(total_counts + background_counts, 1.0)) / req.dwell_s;
      if (p.rate_cps < 0.0) {
        p.rate_cps = 0.0;
        p.clamped = true;
      }
    }
    points.push_back(p);
  }
  return PowerSeries(std::move(points), req.sweep, Axis::power);
}

}  // namespace hbatk
