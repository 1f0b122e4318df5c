#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hbatk {

enum class SweepKind { pump_power, post_attenuation };
enum class Axis { power, flux };

std::string_view to_string(SweepKind k);
std::string_view to_string(Axis a);
SweepKind sweep_kind_from_string(std::string_view s);
Axis axis_from_string(std::string_view s);

struct SeriesPoint {
  double x = 0.0;  // W on the power axis, photons cm^-2 s^-1 on the flux axis
  double rate_cps = 0.0;
  double rate_err_cps = 0.0;
  double dwell_s = 0.0;
  bool clamped = false;  // background subtraction went negative and was clamped to 0
};

/// Background-subtracted count rates against excitation power or flux.
/// At least 3 points, x strictly ascending and positive, rates >= 0.
class PowerSeries {
 public:
  PowerSeries(std::vector<SeriesPoint> points, SweepKind sweep, Axis axis);

  const std::vector<SeriesPoint>& points() const { return points_; }
  SweepKind sweep_kind() const { return sweep_; }
  Axis axis() const { return axis_; }
  std::size_t size() const { return points_.size(); }
  std::size_t clamped_count() const;

  PowerSeries with_rates_scaled(double factor) const;

 private:
  std::vector<SeriesPoint> points_;
  SweepKind sweep_;
  Axis axis_;
};

/// Header `power_w,rate_cps,rate_err_cps,dwell_s` preceded by `# sweep_kind=...`
/// and `# axis=...` metadata lines.
std::string format_power_series_csv(const PowerSeries& s);
PowerSeries parse_power_series_csv(std::string_view text);
PowerSeries read_power_series_csv(const std::string& path);

/// Converts a power-axis series to flux with a photon energy at lambda_nm.
PowerSeries to_flux_axis(const PowerSeries& s, double lambda_nm, double area_cm2);

}  // namespace hbatk
