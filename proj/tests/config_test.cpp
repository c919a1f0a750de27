// Config parsing, unit resolution, CSV determinism.
#include <cmath>

#include "doctest.h"
#include "qecho/config.hpp"
#include "qecho/io.hpp"

using namespace qecho;

namespace {
const char* kEchoConfig = R"({
  "units": "dimensionless",
  "model": {"mass": 1.0, "omega": 1.0, "force": 3.0, "kinetic_enabled": false},
  "pulse": {"area": 1.5707963267948966},
  "delay": 2.0,
  "grid": {"n": 2048}
})";
}  // namespace

TEST_CASE("config: defaults materialize and resolve") {
  const RunConfig c = load_config_text(kEchoConfig);
  CHECK(c.params.force == 3.0);
  CHECK(c.params.kinetic_enabled == false);
  CHECK(c.tau_internal == 2.0);
  CHECK(c.grid_n == 2048);
  CHECK(c.record_stride == 1);
  CHECK(c.engine == "full");
  CHECK_FALSE(c.t_end.has_value());

  const Json echo = config_echo(c);
  CHECK(echo.at("schedule").at("t_end") == "auto");
  CHECK(echo.at("internal").at("tau") == 2.0);
}

TEST_CASE("config: unknown keys are rejected, not warned") {
  CHECK_THROWS_AS(load_config_text(R"({"modle": {}})"), ConfigError);
  CHECK_THROWS_AS(load_config_text(R"({"model": {"omga": 1.0}})"), ConfigError);
  CHECK_THROWS_AS(load_config_text(R"({"pulse": {"fwhm": 0.1, "extra": 1}})"), ConfigError);
}

TEST_CASE("config: malformed values fail with precise messages") {
  CHECK_THROWS_AS(load_config_text("not json at all"), ConfigError);
  CHECK_THROWS_AS(load_config_text(R"({"delay": "soon"})"), ConfigError);
  CHECK_THROWS_AS(load_config_text(R"({"model": {"mass": -1.0}})"), ConfigError);
  CHECK_THROWS_AS(load_config_text(R"({"grid": {"n": 1000}})"), ConfigError);
  CHECK_THROWS_AS(load_config_text(R"({"units": "planck"})"), ConfigError);
  CHECK_THROWS_AS(load_config_text(R"({"pulse": {"area": 7.0}})"), ConfigError);
}

TEST_CASE("config: femtosecond preset converts to internal units") {
  const RunConfig c = load_config_text(R"({
    "units": "femtosecond",
    "model": {"mass": 1.0, "omega": 0.02, "force": 0.3},
    "delay": 20.0
  })");
  CHECK(c.tau_internal == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(c.params.mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.params.omega == doctest::Approx(0.2).epsilon(1e-12));
  // 0.3 eV/A over the preset's force scale
  CHECK(c.params.force == doctest::Approx(1.1486).epsilon(1e-3));
  // the chosen illustration sits inside the validity window
  CHECK(c.params.omega * c.tau_internal == doctest::Approx(0.4).epsilon(1e-10));
}

TEST_CASE("csv writers: exact headers and deterministic bytes") {
  TimeSeries s;
  s.times = {0.0, 0.1};
  s.polarization = {Complex{0.25, -0.1}, Complex{0.0, 0.0}};
  s.pop_g = {0.5, 0.5};
  s.pop_e = {0.5, 0.5};
  s.x_g = {0.0, 0.1};
  s.p_g = {0.0, 0.2};
  s.x_e = {std::numeric_limits<double>::quiet_NaN(), 0.3};
  s.p_e = {std::numeric_limits<double>::quiet_NaN(), 0.4};
  s.norm = {1.0, 1.0};
  const std::string a = timeseries_csv(s);
  const std::string b = timeseries_csv(s);
  CHECK(a == b);
  CHECK(a.substr(0, a.find('\n')) == "t,re_P,im_P,abs_P2,pop_g,pop_e,x_g,p_g,x_e,p_e,norm");
  CHECK(a.find("nan") != std::string::npos);  // undefined marker, not 0
  CHECK(a.find("\r") == std::string::npos);   // LF endings

  SweepResult sw;
  sw.rows.push_back({0.5, 0.06, 0.5, false, false, true});
  const std::string c = sweep_csv(sw);
  CHECK(c.substr(0, c.find('\n')) == "tau,intensity,t_peak,flag");
  CHECK(c.find(",4\n") != std::string::npos);

  ModelParams p;
  p.force = 1.0;
  const std::string d = predict_csv({0.0, 1.0}, p);
  CHECK(d.substr(0, d.find('\n')) == "tau,intensity_ratio");
  CHECK(d.find("0,1\n") != std::string::npos);  // tau = 0 row is exactly 1
}

TEST_CASE("atomic write leaves no temp file behind") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "qecho_io_test";
  fs::create_directories(dir);
  const fs::path target = dir / "out.csv";
  write_file_atomic(target, "a,b\n1,2\n");
  CHECK(fs::exists(target));
  CHECK_FALSE(fs::exists(dir / "out.csv.tmp"));
  std::ifstream in(target);
  std::string line;
  std::getline(in, line);
  CHECK(line == "a,b");
  fs::remove_all(dir);
}
