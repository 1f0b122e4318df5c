#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hbatk/cli.hpp"
#include "hbatk/config.hpp"
#include "hbatk/errors.hpp"
#include "hbatk/io_util.hpp"
#include "hbatk/report.hpp"
#include "support.hpp"

using namespace hbatk;
using hbatk::testing::fixture;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("hbatk_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

json read_json(const fs::path& p) { return json::parse(read_text_file(p)); }

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = load_run_config(fixture("lds798_spdc.json"));
  CHECK(cfg.nu_max_mode == "auto");
  CHECK(cfg.experiment.concentration_molar == doctest::Approx(0.3e-3));
  CHECK(cfg.experiment.path_length_cm == 1.0);
  CHECK(cfg.experiment.collection.kappa == 0.042);
  CHECK(cfg.experiment.temperature_k == 298.15);
  REQUIRE(cfg.source);
  CHECK(cfg.source->is_broadband());
  CHECK(cfg.source->blue_cutoff_nm() == 850.0);
  CHECK(cfg.echo["experiment"]["kappa"] == 0.042);
  CHECK(fs::path(cfg.echo["fluorophore"]["absorption_csv"].get<std::string>()).is_absolute());

  SUBCASE("echo round trip is a fixed point") {
    const auto again = parse_run_config(cfg.echo, "/");
    CHECK(again.echo == cfg.echo);
  }
  SUBCASE("unknown keys are hard errors") {
    json doc = json::parse(read_text_file(fixture("rh6g_c2pa.json")));
    doc["experiment"]["kapa"] = 0.04;
    CHECK_THROWS_AS(parse_run_config(doc, HBATK_FIXTURE_DIR), ConfigError);
    doc = json::parse(read_text_file(fixture("rh6g_c2pa.json")));
    doc["extras"] = json::object();
    CHECK_THROWS_AS(parse_run_config(doc, HBATK_FIXTURE_DIR), ConfigError);
  }
  SUBCASE("invalid values and missing files") {
    json doc = json::parse(read_text_file(fixture("rh6g_c2pa.json")));
    doc["fluorophore"]["eta"] = 1.5;
    CHECK_THROWS_AS(parse_run_config(doc, HBATK_FIXTURE_DIR), ConfigError);
    doc = json::parse(read_text_file(fixture("rh6g_c2pa.json")));
    doc["fluorophore"]["emission_csv"] = "nope.csv";
    CHECK_THROWS_AS(parse_run_config(doc, HBATK_FIXTURE_DIR), ConfigError);
    doc = json::parse(read_text_file(fixture("rh6g_c2pa.json")));
    doc["source"]["type"] = "lamp";
    CHECK_THROWS_AS(parse_run_config(doc, HBATK_FIXTURE_DIR), ConfigError);
    doc = json::parse(read_text_file(fixture("rh6g_c2pa.json")));
    doc["experiment"]["beam_fwhm_x_um"] = "55";
    CHECK_THROWS_AS(parse_run_config(doc, HBATK_FIXTURE_DIR), ConfigError);
    doc = json::parse(read_text_file(fixture("rh6g_c2pa.json")));
    doc["fluorophore"]["nu_max_nm"] = "auto";
    CHECK_THROWS_AS(parse_run_config(doc, HBATK_FIXTURE_DIR), ConfigError);
  }
}

TEST_CASE("report schema") {
  Provenance p;
  p.command_line = {"hbatk", "fit"};
  p.started_utc = p.finished_utc = utc_timestamp();
  auto r = make_report("fit", nullptr, json::object(), p);
  CHECK(validate_report(r).empty());
  r["extra"] = 1;
  CHECK_FALSE(validate_report(r).empty());
  r.erase("extra");
  r["schema_version"] = "hbatk.report/0";
  CHECK_FALSE(validate_report(r).empty());
  r["schema_version"] = std::string(kReportSchemaVersion);
  r["provenance"].erase("seed");
  CHECK_FALSE(validate_report(r).empty());
}

TEST_CASE("simulate then fit slope") {
  const auto dir = scratch("sim_fit");
  auto r = cli({"simulate", "--config", fixture("rh6g_c2pa.json"), "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto report = read_json(dir / "report.json");
  CHECK(validate_report(report).empty());
  CHECK(report["command"] == "simulate");
  CHECK(report["provenance"]["seed"].is_null());

  const auto fitdir = dir / "fit";
  r = cli({"fit", (dir / "power_series.csv").string(), "--model", "slope", "--out", fitdir.string()});
  REQUIRE(r.code == 0);
  const auto fit = read_json(fitdir / "report.json");
  CHECK(validate_report(fit).empty());
  double slope = 0.0;
  for (const auto& p : fit["results"]["fit"]["params"]) {
    if (p["name"] == "slope") slope = p["value"].get<double>();
  }
  CHECK(slope == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(fs::exists(fitdir / "fit_curve.csv"));
  CHECK(read_text_file(fitdir / "fit_curve.csv").rfind("power_w,rate_cps\n", 0) == 0);
}

TEST_CASE("seeded simulation is byte-identical and reproducible from the report") {
  const auto dir = scratch("repro");
  const std::vector<std::string> base{"simulate", "--config", fixture("lds798_laser.json"), "--powers",
                                      "log:5e-5:0.5:12", "--seed", "99"};
  auto a = base;
  a.insert(a.end(), {"--out", (dir / "a").string()});
  auto b = base;
  b.insert(b.end(), {"--out", (dir / "b").string()});
  REQUIRE(cli(a).code == 0);
  REQUIRE(cli(b).code == 0);
  CHECK(read_text_file(dir / "a/power_series.csv") == read_text_file(dir / "b/power_series.csv"));

  REQUIRE(cli({"simulate", "--from-report", (dir / "a/report.json").string(), "--out", (dir / "c").string()}).code == 0);
  CHECK(read_text_file(dir / "a/power_series.csv") == read_text_file(dir / "c/power_series.csv"));
  const auto ra = read_json(dir / "a/report.json");
  const auto rc = read_json(dir / "c/report.json");
  CHECK(ra["config_echo"] == rc["config_echo"]);
  auto res_a = ra["results"];
  auto res_c = rc["results"];
  res_a.erase("power_series_csv");
  res_c.erase("power_series_csv");
  CHECK(res_a == res_c);
  CHECK(rc["provenance"]["seed"] == 99);
  CHECK(rc["provenance"]["generator"].is_string());
}

TEST_CASE("mixture slopes over the low and high windows") {
  const auto dir = scratch("mixture");
  // Laser mixture fixture: HBA from the LDS798 absorption model plus C2PA at 220 GM.
  REQUIRE(cli({"simulate", "--config", fixture("lds798_laser.json"), "--powers", "log:5e-5:5e-4:8", "--out",
               (dir / "low").string()})
              .code == 0);
  REQUIRE(cli({"simulate", "--config", fixture("lds798_laser.json"), "--powers", "log:0.05:0.5:8", "--out",
               (dir / "high").string()})
              .code == 0);
  const auto low = fit_loglog_slope(read_power_series_csv((dir / "low/power_series.csv").string()));
  const auto high = fit_loglog_slope(read_power_series_csv((dir / "high/power_series.csv").string()));
  CHECK(low.value("slope") >= 1.0);
  CHECK(low.value("slope") <= 1.2);
  CHECK(high.value("slope") > low.value("slope"));
}

TEST_CASE("fit linquad and boltzmann") {
  const auto dir = scratch("fits");
  std::string csv = "# sweep_kind=pump_power\n# axis=flux\npower_w,rate_cps,rate_err_cps,dwell_s\n";
  for (double x : hbatk::testing::logspace(1e19, 1e22, 8)) {
    csv += format_double(x) + "," + format_double(3e-19 * x + 2.5e-40 * x * x) + ",0,100\n";
  }
  write(dir / "lq.csv", csv);
  REQUIRE(cli({"fit", (dir / "lq.csv").string(), "--model", "linquad", "--out", (dir / "lq").string()}).code == 0);
  const auto lq = read_json(dir / "lq/report.json");
  CHECK(lq["results"]["fit"]["params"][0]["value"].get<double>() == doctest::Approx(3e-19).epsilon(1e-10));
  CHECK(lq["results"]["fit"]["params"][1]["value"].get<double>() == doctest::Approx(2.5e-40).epsilon(1e-10));

  const double e = 6.62607015e-34 * 299792458.0 / 1064e-9;
  std::string t = "temperature_k,rate_cps\n";
  for (double k = 283; k <= 323; k += 10) {
    t += format_double(k) + "," + format_double(1e21 * std::exp(-e / (1.380649e-23 * k)) + 2.0) + "\n";
  }
  write(dir / "t.csv", t);
  REQUIRE(cli({"fit", (dir / "t.csv").string(), "--model", "boltzmann", "--energy-j", format_double(e), "--out",
               (dir / "b").string()})
              .code == 0);
  const auto b = read_json(dir / "b/report.json");
  CHECK(b["results"]["fit"]["params"][0]["value"].get<double>() == doctest::Approx(1e21).epsilon(1e-8));
  CHECK(read_text_file(dir / "b/fit_curve.csv").rfind("temperature_k,rate_cps\n", 0) == 0);

  const auto missing = cli({"fit", (dir / "t.csv").string(), "--model", "boltzmann", "--out", (dir / "x").string()});
  CHECK(missing.code == 1);
}

TEST_CASE("derive c2pa and hba") {
  const auto dir = scratch("derive");
  REQUIRE(cli({"simulate", "--config", fixture("rh6g_c2pa.json"), "--out", (dir / "s").string()}).code == 0);
  REQUIRE(cli({"derive", (dir / "s/power_series.csv").string(), "--config", fixture("rh6g_c2pa.json"), "--quantity",
               "c2pa", "--out", (dir / "d").string()})
              .code == 0);
  const auto d = read_json(dir / "d/report.json");
  CHECK(d["results"]["sigma_c2pa_gm"].get<double>() == doctest::Approx(9.9).epsilon(1e-9));
  CHECK(d["results"]["systematic_sigma_cm4s"].get<double>() ==
        doctest::Approx(9.9e-50 * std::hypot(0.23, 0.10)).epsilon(1e-6));
  CHECK(d["results"]["total_sigma_cm4s"].get<double>() >= d["results"]["systematic_sigma_cm4s"].get<double>());

  std::string csv = "# sweep_kind=pump_power\n# axis=flux\npower_w,rate_cps,rate_err_cps,dwell_s\n";
  for (double x : hbatk::testing::logspace(1e19, 1e22, 8)) {
    csv += format_double(x) + "," + format_double(2.5e-40 * x * x) + ",0,100\n";
  }
  write(dir / "q.csv", csv);
  REQUIRE(cli({"derive", (dir / "q.csv").string(), "--config", fixture("lds798_laser.json"), "--quantity", "hba",
               "--out", (dir / "h").string()})
              .code == 0);
  CHECK(read_json(dir / "h/report.json")["results"]["sigma_hba_cm2"] == 0.0);

  // Linear data under --policy abort is a numerical (regime) failure.
  std::string lin = "# sweep_kind=pump_power\n# axis=power\npower_w,rate_cps,rate_err_cps,dwell_s\n";
  for (double x : {1e-4, 2e-4, 4e-4, 8e-4}) lin += format_double(x) + "," + format_double(1e4 * x) + ",0,100\n";
  write(dir / "lin.csv", lin);
  const auto r = cli({"derive", (dir / "lin.csv").string(), "--config", fixture("rh6g_c2pa.json"), "--policy",
                      "abort", "--out", (dir / "x").string()});
  CHECK(r.code == 2);
  CHECK(json::parse(r.err)["error"] == "RegimeError");
}

TEST_CASE("discriminate writes a verdict and exits 0") {
  const auto dir = scratch("disc");
  for (const char* sweep : {"pump_power", "post_attenuation"}) {
    REQUIRE(cli({"simulate", "--config", fixture("lds798_spdc.json"), "--mechanism", "e2pa", "--sweep", sweep,
                 "--powers", "log:1e-7:1e-6:6", "--out", (dir / sweep).string()})
                .code == 0);
  }
  const auto r = cli({"discriminate", (dir / "pump_power/power_series.csv").string(),
                      (dir / "post_attenuation/power_series.csv").string(), "--out", (dir / "v").string()});
  REQUIRE(r.code == 0);
  const auto v = read_json(dir / "v/report.json");
  CHECK(v["results"]["verdict"] == "E2PAConsistent");
  CHECK(v["results"]["rule_trace"].is_string());

  const auto swapped = cli({"discriminate", (dir / "post_attenuation/power_series.csv").string(),
                            (dir / "pump_power/power_series.csv").string(), "--out", (dir / "w").string()});
  CHECK(swapped.code == 1);
}

TEST_CASE("spectrum subcommands") {
  const auto dir = scratch("spectrum");
  auto r = cli({"spectrum", "numax", "--absorption", fixture("lds798_absorption.csv"), "--emission",
                fixture("lds798_emission.csv"), "--out", (dir / "n").string()});
  REQUIRE(r.code == 0);
  CHECK(read_json(dir / "n/report.json")["results"]["nu_max_nm"].get<double>() == doctest::Approx(672.0).epsilon(1e-4));

  r = cli({"spectrum", "fc", "--absorption", fixture("lds798_absorption.csv"), "--nu-max-nm", "672", "--lambda-nm",
           "672", "--lambda-nm", "1060", "--out", (dir / "f").string()});
  REQUIRE(r.code == 0);
  CHECK(read_json(dir / "f/report.json")["results"]["values"][0]["fc"] == 1.0);

  std::string g = "wavelength_nm,value\n";
  for (double w = 700.0; w <= 1500.0; w += 2.0) g += format_double(w) + "," + format_double(gaussian_profile(w, 1077.4, 128.9, 1e-9)) + "\n";
  write(dir / "g.csv", g);
  r = cli({"spectrum", "gaussfit", "--input", (dir / "g.csv").string(), "--out", (dir / "gf").string()});
  REQUIRE(r.code == 0);
  const auto gf = read_json(dir / "gf/report.json");
  CHECK(gf["results"]["center_nm"].get<double>() == doctest::Approx(1077.4).epsilon(1e-6));
  CHECK(gf["results"]["fwhm_nm"].get<double>() == doctest::Approx(128.9).epsilon(1e-6));

  std::string sym = "wavelength_nm,value\n";
  for (double w = 900.0; w <= 1100.0; w += 5.0) sym += format_double(w) + "," + format_double(gaussian_profile(w, 1000.0, 60.0, 1.0)) + "\n";
  write(dir / "sym.csv", sym);
  r = cli({"spectrum", "mirror", "--input", (dir / "sym.csv").string(), "--center-nm", "1000", "--out",
           (dir / "m").string()});
  REQUIRE(r.code == 0);
  const auto m = parse_spectrum_csv(read_text_file(dir / "m/spectrum.csv"), SpectrumKind::emission);
  const auto s = parse_spectrum_csv(sym, SpectrumKind::emission);
  for (double w = 900.0; w <= 1100.0; w += 5.0) CHECK(m.at(w) == doctest::Approx(s.at(w)).epsilon(1e-12));

  std::string flat = "wavelength_nm,value\n500,1\n700,1\n";
  std::string filt = "wavelength_nm,value\n400,0.5\n800,0.5\n";
  std::string qe = "wavelength_nm,value\n400,0.2\n800,0.2\n";
  write(dir / "em.csv", flat);
  write(dir / "filt.csv", filt);
  write(dir / "qe.csv", qe);
  r = cli({"spectrum", "gamma", "--emission", (dir / "em.csv").string(), "--filter", (dir / "filt.csv").string(),
           "--qe", (dir / "qe.csv").string(), "--out", (dir / "gm").string()});
  REQUIRE(r.code == 0);
  CHECK(read_json(dir / "gm/report.json")["results"]["gamma"].get<double>() == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("errors are single-line JSON records with the exit-code contract") {
  const auto dir = scratch("errors");
  auto r = cli({"simulate", "--config", (dir / "missing.json").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find('\n') == r.err.size() - 1);
  const auto e = json::parse(r.err);
  CHECK(e["exit_code"] == 1);
  CHECK(e["error"] == "ConfigError");

  r = cli({"frobnicate"});
  CHECK(r.code == 1);
  CHECK(json::parse(r.err)["error"] == "UsageError");

  r = cli({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("simulate") != std::string::npos);

  write(dir / "bad.json", "{\"fluorophore\": {\"name\": \"x\", \"eta\": 0.5, \"colour\": 1}}");
  r = cli({"simulate", "--config", (dir / "bad.json").string()});
  CHECK(r.code == 1);
  CHECK(json::parse(r.err)["message"].get<std::string>().find("colour") != std::string::npos);
}

TEST_CASE("output directory precedence") {
  const auto dir = scratch("outdir");
  json doc = json::parse(read_text_file(fixture("rh6g_c2pa.json")));
  doc["run"]["output_dir"] = (dir / "from_config").string();
  write(dir / "cfg.json", doc.dump());
  REQUIRE(cli({"simulate", "--config", (dir / "cfg.json").string()}).code == 0);
  CHECK(fs::exists(dir / "from_config/report.json"));
  REQUIRE(cli({"simulate", "--config", (dir / "cfg.json").string(), "--out", (dir / "flag").string()}).code == 0);
  CHECK(fs::exists(dir / "flag/report.json"));

  setenv("HBATK_OUTPUT_DIR", (dir / "env").string().c_str(), 1);
  REQUIRE(cli({"simulate", "--config", fixture("rh6g_c2pa.json")}).code == 0);
  unsetenv("HBATK_OUTPUT_DIR");
  CHECK(fs::exists(dir / "env/power_series.csv"));
}
