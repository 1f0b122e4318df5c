#include "hbatk/power_series.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "hbatk/errors.hpp"
#include "hbatk/io_util.hpp"
#include "hbatk/spectrum.hpp"

namespace hbatk {

namespace {
constexpr std::string_view kSeriesHeader = "power_w,rate_cps,rate_err_cps,dwell_s";
}

std::string_view to_string(SweepKind k) {
  return k == SweepKind::pump_power ? "pump_power" : "post_attenuation";
}

std::string_view to_string(Axis a) { return a == Axis::power ? "power" : "flux"; }

SweepKind sweep_kind_from_string(std::string_view s) {
  if (s == "pump_power") return SweepKind::pump_power;
  if (s == "post_attenuation") return SweepKind::post_attenuation;
  throw ConfigError("unknown sweep kind '" + std::string(s) + "'");
}

Axis axis_from_string(std::string_view s) {
  if (s == "power") return Axis::power;
  if (s == "flux") return Axis::flux;
  throw ConfigError("unknown axis '" + std::string(s) + "'");
}

PowerSeries::PowerSeries(std::vector<SeriesPoint> points, SweepKind sweep, Axis axis)
    : points_(std::move(points)), sweep_(sweep), axis_(axis) {
  if (points_.size() < 3) throw DomainError("power series: need at least 3 points");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!(p.x > 0.0) || !std::isfinite(p.x)) throw DomainError("power series: excitation values must be > 0");
    if (i > 0 && !(p.x > points_[i - 1].x)) {
      throw DomainError("power series: excitation values must be strictly ascending");
    }
    if (!(p.rate_cps >= 0.0) || !std::isfinite(p.rate_cps)) {
      throw DomainError("power series: rates must be >= 0 (clamp and flag negative points)");
    }
    if (!(p.rate_err_cps >= 0.0) || !(p.dwell_s >= 0.0)) {
      throw DomainError("power series: uncertainties and dwell must be >= 0");
    }
  }
}

std::size_t PowerSeries::clamped_count() const {
  return static_cast<std::size_t>(std::count_if(points_.begin(), points_.end(),
                                                [](const SeriesPoint& p) { return p.clamped; }));
}

PowerSeries PowerSeries::with_rates_scaled(double factor) const {
  if (!(factor > 0.0)) throw DomainError("with_rates_scaled: factor must be > 0");
  auto pts = points_;
  for (auto& p : pts) {
    p.rate_cps *= factor;
    p.rate_err_cps *= factor;
  }
  return PowerSeries(std::move(pts), sweep_, axis_);
}

std::string format_power_series_csv(const PowerSeries& s) {
  std::string out;
  out += "# sweep_kind=";
  out += to_string(s.sweep_kind());
  out += "\n# axis=";
  out += to_string(s.axis());
  out += '\n';
  out += kSeriesHeader;
  out += '\n';
  for (const auto& p : s.points()) {
    out += format_double(p.x) + ',' + format_double(p.rate_cps) + ',' + format_double(p.rate_err_cps) + ',' +
           format_double(p.dwell_s) + '\n';
  }
  return out;
}

PowerSeries parse_power_series_csv(std::string_view text) {
  std::optional<SweepKind> sweep;
  std::optional<Axis> axis;
  std::vector<SeriesPoint> points;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = trim(line.substr(1));
      const auto eq = body.find_first_of("=:");
      if (eq == std::string_view::npos) continue;
      const auto key = trim(body.substr(0, eq));
      const auto value = trim(body.substr(eq + 1));
      if (key == "sweep_kind") sweep = sweep_kind_from_string(value);
      if (key == "axis") axis = axis_from_string(value);
      continue;
    }
    if (!header_seen) {
      if (line != kSeriesHeader) {
        throw ConfigError("power series CSV: expected header '" + std::string(kSeriesHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto f = split_fields(line);
    if (f.size() != 4) throw ConfigError("power series CSV line " + std::to_string(line_no) + ": expected 4 fields");
    SeriesPoint p;
    p.x = parse_double(f[0], "power_w");
    p.rate_cps = parse_double(f[1], "rate_cps");
    p.rate_err_cps = parse_double(f[2], "rate_err_cps");
    p.dwell_s = parse_double(f[3], "dwell_s");
    points.push_back(p);
  }
  if (!sweep) throw ConfigError("power series CSV: missing '# sweep_kind=' metadata");
  if (!axis) throw ConfigError("power series CSV: missing '# axis=' metadata");
  try {
    return PowerSeries(std::move(points), *sweep, *axis);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

PowerSeries read_power_series_csv(const std::string& path) {
  try {
    return parse_power_series_csv(read_text_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

PowerSeries to_flux_axis(const PowerSeries& s, double lambda_nm, double area_cm2) {
  if (s.axis() == Axis::flux) return s;
  if (!(area_cm2 > 0.0)) throw DomainError("to_flux_axis: area must be > 0");
  const double e = photon_energy(wavelength_to_frequency(lambda_nm));
  auto pts = s.points();
  for (auto& p : pts) p.x = p.x / e / area_cm2;
  return PowerSeries(std::move(pts), s.sweep_kind(), Axis::flux);
}

}  // namespace hbatk
