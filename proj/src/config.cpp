#include "hbatk/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "hbatk/constants.hpp"
#include "hbatk/errors.hpp"
#include "hbatk/io_util.hpp"

namespace hbatk {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Read access to one JSON object that rejects keys outside `allowed`.
class Section {
 public:
  Section(const json& doc, std::string name, std::set<std::string> allowed) : name_(std::move(name)) {
    if (doc.is_null()) {
      obj_ = json::object();
    } else if (!doc.is_object()) {
      throw ConfigError("config: section '" + name_ + "' must be an object");
    } else {
      obj_ = doc;
    }
    for (const auto& [key, _] : obj_.items()) {
      if (!allowed.count(key)) throw ConfigError("config: unknown key '" + name_ + "." + key + "'");
    }
  }

  bool has(const std::string& key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }

  double number(const std::string& key) const {
    if (!has(key)) throw ConfigError("config: missing required key '" + path(key) + "'");
    const auto& v = obj_.at(key);
    if (!v.is_number()) throw ConfigError("config: '" + path(key) + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("config: '" + path(key) + "' must be finite");
    return d;
  }

  double number_or(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  std::optional<double> maybe_number(const std::string& key) const {
    return has(key) ? std::optional(number(key)) : std::nullopt;
  }

  std::string string(const std::string& key) const {
    if (!has(key)) throw ConfigError("config: missing required key '" + path(key) + "'");
    const auto& v = obj_.at(key);
    if (!v.is_string()) throw ConfigError("config: '" + path(key) + "' must be a string");
    return v.get<std::string>();
  }

  std::optional<std::string> maybe_string(const std::string& key) const {
    return has(key) ? std::optional(string(key)) : std::nullopt;
  }

  const json& raw(const std::string& key) const { return obj_.at(key); }

  std::string path(const std::string& key) const { return name_ + "." + key; }

 private:
  std::string name_;
  json obj_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError("config: " + message);
}

std::string resolve_path(const std::string& p, const fs::path& base) {
  fs::path path(p);
  if (path.is_relative()) path = base / path;
  path = fs::weakly_canonical(path);
  if (!fs::exists(path)) throw ConfigError("config: file not found: " + path.string());
  return path.string();
}

Spectrum load_spectrum(const std::string& path, SpectrumKind kind) { return read_spectrum_csv(path, kind); }

// Gaussian SPDC-style shape sampled over +-5 FWHM.
Spectrum gaussian_shape(double center_nm, double fwhm_nm, double step_nm) {
  const double lo = std::max(center_nm - 5.0 * fwhm_nm, step_nm);
  const double hi = center_nm + 5.0 * fwhm_nm;
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step_nm)) + 1;
  std::vector<double> w(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    v[i] = gaussian_profile(w[i], center_nm, fwhm_nm, 1.0);
  }
  return Spectrum(std::move(w), std::move(v), SpectrumKind::spectral_power_density);
}

}  // namespace

RunConfig parse_run_config(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& [key, _] : doc.items()) {
    static const std::set<std::string> sections{"fluorophore", "experiment", "source", "collection", "run"};
    if (!sections.count(key)) throw ConfigError("config: unknown section '" + key + "'");
  }
  auto section = [&](const char* name) { return doc.contains(name) ? doc.at(name) : json(); };

  RunConfig cfg;
  json echo = json::object();
  try {
    // fluorophore ---------------------------------------------------------
    const Section fl(section("fluorophore"), "fluorophore",
                     {"name", "eta", "epsilon_max", "nu_max_nm", "sigma_c2pa_gm", "absorption_csv", "emission_csv",
                      "sigma_e2pa_cm2"});
    Fluorophore& f = cfg.experiment.fluorophore;
    json& ef = echo["fluorophore"];
    f.name = fl.string("name");
    f.eta = fl.number("eta");
    f.sigma_c2pa_cm4s = fl.number_or("sigma_c2pa_gm", 0.0) * constants::goeppert_mayer;
    f.epsilon_max = fl.maybe_number("epsilon_max");
    ef["name"] = f.name;
    ef["eta"] = f.eta;
    ef["sigma_c2pa_gm"] = fl.number_or("sigma_c2pa_gm", 0.0);
    ef["epsilon_max"] = f.epsilon_max ? json(*f.epsilon_max) : json();
    if (auto p = fl.maybe_string("absorption_csv")) {
      const auto path = resolve_path(*p, base_dir);
      f.absorption = load_spectrum(path, SpectrumKind::absorption);
      ef["absorption_csv"] = path;
    } else {
      ef["absorption_csv"] = nullptr;
    }
    if (auto p = fl.maybe_string("emission_csv")) {
      const auto path = resolve_path(*p, base_dir);
      f.emission = load_spectrum(path, SpectrumKind::emission);
      ef["emission_csv"] = path;
    } else {
      ef["emission_csv"] = nullptr;
    }
    if (fl.has("nu_max_nm")) {
      const auto& raw = fl.raw("nu_max_nm");
      if (raw.is_string()) {
        require(raw.get<std::string>() == "auto", "fluorophore.nu_max_nm must be a number or \"auto\"");
        cfg.nu_max_mode = "auto";
      } else {
        f.nu_max_hz = wavelength_to_frequency(fl.number("nu_max_nm"));
        cfg.nu_max_mode = "given";
        ef["nu_max_nm"] = fl.number("nu_max_nm");
      }
    } else {
      cfg.nu_max_mode = f.absorption && f.emission ? "auto" : "given";
      if (cfg.nu_max_mode == "given") ef["nu_max_nm"] = nullptr;
    }
    if (cfg.nu_max_mode == "auto") {
      require(f.absorption && f.emission, "nu_max_nm \"auto\" needs absorption_csv and emission_csv");
      f.nu_max_hz = find_nu_max(*f.absorption, *f.emission);
      ef["nu_max_nm"] = "auto";
    }
    if (fl.has("sigma_e2pa_cm2")) cfg.e2pa.sigma_e2pa_cm2 = fl.number("sigma_e2pa_cm2");
    ef["sigma_e2pa_cm2"] = fl.has("sigma_e2pa_cm2") ? json(cfg.e2pa.sigma_e2pa_cm2) : json();

    // experiment ----------------------------------------------------------
    const Section ex(section("experiment"), "experiment",
                     {"concentration_mM", "path_length_cm", "beam_fwhm_x_um", "beam_fwhm_y_um", "rayleigh_range_um",
                      "kappa", "temperature_K", "background_cps"});
    json& ee = echo["experiment"];
    auto& e = cfg.experiment;
    e.concentration_molar = ex.number("concentration_mM") * 1e-3;
    e.path_length_cm = ex.number_or("path_length_cm", 1.0);
    e.beam.fwhm_x_um = ex.number("beam_fwhm_x_um");
    e.beam.fwhm_y_um = ex.number_or("beam_fwhm_y_um", e.beam.fwhm_x_um);
    e.beam.rayleigh_range_um = ex.maybe_number("rayleigh_range_um");
    e.collection.kappa = ex.number_or("kappa", 0.042);
    e.temperature_k = ex.number_or("temperature_K", constants::default_temperature_k);
    cfg.background_cps = ex.number_or("background_cps", 4.0);
    require(cfg.background_cps >= 0.0, "experiment.background_cps must be >= 0");
    ee["concentration_mM"] = ex.number("concentration_mM");
    ee["path_length_cm"] = e.path_length_cm;
    ee["beam_fwhm_x_um"] = e.beam.fwhm_x_um;
    ee["beam_fwhm_y_um"] = e.beam.fwhm_y_um;
    ee["rayleigh_range_um"] = e.beam.rayleigh_range_um ? json(*e.beam.rayleigh_range_um) : json();
    ee["kappa"] = e.collection.kappa;
    ee["temperature_K"] = e.temperature_k;
    ee["background_cps"] = cfg.background_cps;

    // collection ----------------------------------------------------------
    const Section co(section("collection"), "collection", {"gamma", "filter_csv", "pmt_qe_csv"});
    json& ec = echo["collection"];
    e.collection.gamma = co.maybe_number("gamma");
    ec["gamma"] = e.collection.gamma ? json(*e.collection.gamma) : json();
    ec["filter_csv"] = json::array();
    if (co.has("filter_csv")) {
      const auto& list = co.raw("filter_csv");
      require(list.is_array(), "collection.filter_csv must be a list of paths");
      for (const auto& item : list) {
        require(item.is_string(), "collection.filter_csv entries must be strings");
        const auto path = resolve_path(item.get<std::string>(), base_dir);
        e.collection.filters.push_back(load_spectrum(path, SpectrumKind::transmission));
        ec["filter_csv"].push_back(path);
      }
    }
    if (auto p = co.maybe_string("pmt_qe_csv")) {
      const auto path = resolve_path(*p, base_dir);
      e.collection.pmt_qe = load_spectrum(path, SpectrumKind::quantum_efficiency);
      ec["pmt_qe_csv"] = path;
    } else {
      ec["pmt_qe_csv"] = nullptr;
    }

    // source --------------------------------------------------------------
    const Section so(section("source"), "source",
                     {"type", "lambda_nm", "spectrum_csv", "gaussian_center_nm", "gaussian_fwhm_nm",
                      "gaussian_step_nm", "mirror_center_nm", "linewidth_fwhm_nm", "power_w", "blue_cutoff_nm",
                      "effective_wavelength_nm", "photon_transmission"});
    json& es = echo["source"];
    if (so.has("type")) {
      const auto type = so.string("type");
      const double power = so.number_or("power_w", 1e-3);
      require(power >= 0.0, "source.power_w must be >= 0");
      es["type"] = type;
      es["power_w"] = power;
      const auto cutoff = so.maybe_number("blue_cutoff_nm");
      es["blue_cutoff_nm"] = cutoff ? json(*cutoff) : json();
      cfg.e2pa.photon_transmission = so.number_or("photon_transmission", 0.176);
      es["photon_transmission"] = cfg.e2pa.photon_transmission;
      if (type == "laser") {
        const double lambda = so.number("lambda_nm");
        const double width = so.number_or("linewidth_fwhm_nm", 1.0);
        cfg.source = ExcitationSource::monochromatic(lambda, power, width).with_blue_cutoff(cutoff);
        es["lambda_nm"] = lambda;
        es["linewidth_fwhm_nm"] = width;
      } else if (type == "spdc") {
        const double effective = so.number_or("effective_wavelength_nm", 1064.0);
        es["effective_wavelength_nm"] = effective;
        std::optional<Spectrum> shape;
        if (auto p = so.maybe_string("spectrum_csv")) {
          require(!so.has("gaussian_center_nm"), "source: give either spectrum_csv or gaussian_center_nm");
          const auto path = resolve_path(*p, base_dir);
          shape = load_spectrum(path, SpectrumKind::spectral_power_density);
          es["spectrum_csv"] = path;
        } else {
          const double center = so.number("gaussian_center_nm");
          const double fwhm = so.number("gaussian_fwhm_nm");
          const double step = so.number_or("gaussian_step_nm", 0.5);
          require(fwhm > 0.0 && step > 0.0, "source: gaussian_fwhm_nm and gaussian_step_nm must be > 0");
          shape = gaussian_shape(center, fwhm, step);
          es["gaussian_center_nm"] = center;
          es["gaussian_fwhm_nm"] = fwhm;
          es["gaussian_step_nm"] = step;
        }
        if (auto m = so.maybe_number("mirror_center_nm")) {
          shape = mirror_about_center(*shape, *m);
          es["mirror_center_nm"] = *m;
        }
        cfg.source = ExcitationSource::broadband(*shape, power, effective).with_blue_cutoff(cutoff);
      } else {
        throw ConfigError("config: source.type must be \"laser\" or \"spdc\"");
      }
    } else {
      require(!section("source").is_object() || section("source").empty(), "source.type is required");
      echo["source"] = nullptr;
    }

    // run -----------------------------------------------------------------
    const Section ru(section("run"), "run", {"seed", "dwell_s", "output_dir", "mechanism", "sweep", "powers_w"});
    json& er = echo["run"];
    if (ru.has("seed")) {
      const auto& s = ru.raw("seed");
      require(s.is_number_integer() && s.get<long long>() >= 0, "run.seed must be a non-negative integer");
      cfg.run.seed = s.get<std::uint64_t>();
    }
    er["seed"] = cfg.run.seed ? json(*cfg.run.seed) : json();
    cfg.run.dwell_s = ru.number_or("dwell_s", 100.0);
    require(cfg.run.dwell_s > 0.0, "run.dwell_s must be > 0");
    er["dwell_s"] = cfg.run.dwell_s;
    cfg.run.output_dir = ru.maybe_string("output_dir");
    er["output_dir"] = cfg.run.output_dir ? json(*cfg.run.output_dir) : json();
    if (auto m = ru.maybe_string("mechanism")) cfg.run.mechanism = mechanism_from_string(*m);
    er["mechanism"] = cfg.run.mechanism ? json(std::string(to_string(*cfg.run.mechanism))) : json();
    if (auto s = ru.maybe_string("sweep")) cfg.run.sweep = sweep_kind_from_string(*s);
    er["sweep"] = cfg.run.sweep ? json(std::string(to_string(*cfg.run.sweep))) : json();
    if (ru.has("powers_w")) {
      const auto& list = ru.raw("powers_w");
      require(list.is_array(), "run.powers_w must be a list of numbers");
      for (const auto& v : list) {
        require(v.is_number(), "run.powers_w entries must be numbers");
        cfg.run.powers_w.push_back(v.get<double>());
      }
    }
    er["powers_w"] = cfg.run.powers_w;

    cfg.experiment.validate();
  } catch (const DomainError& ex) {
    throw ConfigError(std::string("config: ") + ex.what());
  } catch (const OutOfRangeError& ex) {
    throw ConfigError(std::string("config: ") + ex.what());
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config: ") + ex.what());
  }
  cfg.echo = std::move(echo);
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  }
  const auto base = fs::absolute(path).parent_path();
  return parse_run_config(doc, base);
}

}  // namespace hbatk
