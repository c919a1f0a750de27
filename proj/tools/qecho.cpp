// Command-line front end: run | sweep | predict | validate.
// Exit codes: 0 success, 1 validation/check failure, 2 config error.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qecho/analysis.hpp"
#include "qecho/config.hpp"
#include "qecho/experiment.hpp"
#include "qecho/io.hpp"
#include "qecho/observables.hpp"

namespace fs = std::filesystem;
using qecho::Json;

namespace {

qecho::RunConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qecho::ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return qecho::load_config_text(ss.str());
}

std::vector<double> parse_tau_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw qecho::ConfigError("config: bad --tau entry '" + item + "'");
    }
  }
  if (out.empty()) throw qecho::ConfigError("config: --tau list is empty");
  return out;
}

qecho::EchoExperiment experiment_from_config(const qecho::RunConfig& cfg) {
  double t_end = cfg.t_end_internal.value_or(0.0);
  double dt = cfg.dt_internal.value_or(0.0);
  qecho::EchoExperiment ex = qecho::make_echo_experiment(
      cfg.params, cfg.phi_internal, cfg.theta_internal, cfg.tau_internal, cfg.grid_n,
      t_end, dt, cfg.record_stride);
  if (cfg.grid_extent) ex.grid = qecho::make_grid(cfg.grid_n, *cfg.grid_extent);
  if (cfg.shape == "gaussian") {
    for (auto& p : ex.schedule.pulses) {
      p.shape = qecho::PulseShape::gaussian;
      p.fwhm = cfg.fwhm_internal;
    }
  }
  return ex;
}

int cmd_run(const qecho::RunConfig& cfg, const fs::path& out_dir) {
  const qecho::EchoExperiment ex = experiment_from_config(cfg);
  const qecho::TimeSeries series = qecho::run_schedule(cfg.params, ex.schedule, ex.grid);
  const qecho::EchoMeasurement m =
      qecho::detect_echo(series, 0.0, cfg.tau_internal, cfg.params);

  qecho::write_file_atomic(out_dir / "timeseries.csv", qecho::timeseries_csv(series));
  Json report;
  report["tau"] = m.tau;
  report["t0"] = 0.0;
  report["t_peak"] = m.t_peak;
  report["intensity"] = m.intensity;
  report["intensity_at_echo"] = m.intensity_at_echo;
  report["background"] = m.background;
  report["no_echo"] = m.no_echo;
  report["config"] = qecho::config_echo(cfg);
  qecho::write_file_atomic(out_dir / "echo.json", report.dump(2) + "\n");
  std::cout << "run: wrote timeseries.csv, echo.json (t_peak=" << qecho::fmt_full(m.t_peak)
            << ", intensity=" << qecho::fmt_full(m.intensity)
            << (m.no_echo ? ", no echo" : "") << ")\n";
  return 0;
}

int cmd_sweep(const qecho::RunConfig& cfg, const fs::path& out_dir,
              const std::string& tau_override, const std::string& engine_override) {
  std::string engine_name = engine_override.empty() ? cfg.engine : engine_override;
  const qecho::Engine engine =
      engine_name == "impulsive" ? qecho::Engine::impulsive : qecho::Engine::full;

  std::vector<double> taus;
  if (!tau_override.empty()) {
    taus = parse_tau_list(tau_override);
  } else if (!cfg.tau_values_internal.empty()) {
    taus = cfg.tau_values_internal;
  } else {
    taus = qecho::auto_tau_window(cfg.params, cfg.sweep_points);
  }
  if (taus.size() < 6) {
    throw qecho::ConfigError("config: sweep needs at least 6 tau values");
  }

  const qecho::SweepResult sweep =
      qecho::sweep_tau(cfg.params, cfg.phi_internal, taus, engine, cfg.grid_n,
                       cfg.theta_internal);
  qecho::write_file_atomic(out_dir / "sweep.csv", qecho::sweep_csv(sweep));

  Json fit_json;
  fit_json["engine"] = engine_name;
  const double predicted_c =
      qecho::predicted_echo_intensity(0.0, cfg.params).coefficient;
  fit_json["predicted_c"] = predicted_c;
  try {
    const qecho::DecayFit fit = qecho::fit_decay(sweep);
    fit_json["flagged_flat"] = fit.flagged_flat;
    if (fit.flagged_flat) {
      fit_json["q"] = nullptr;
      fit_json["c"] = 0.0;
    } else {
      fit_json["q"] = fit.q;
      fit_json["c"] = fit.c;
    }
    fit_json["i0"] = fit.i0;
    fit_json["rms_residual"] = fit.rms_residual;
    fit_json["c_fixed_q4"] = fit.c_fixed_q4;
    fit_json["i0_fixed_q4"] = fit.i0_fixed_q4;
    fit_json["rms_fixed_q4"] = fit.rms_fixed_q4;
    fit_json["c_ratio_fixed_q4_to_predicted"] =
        predicted_c > 0.0 ? fit.c_fixed_q4 / predicted_c : 0.0;
    const qecho::ModelComparison sel = qecho::compare_models(sweep);
    Json table = Json::array();
    for (const auto& cand : sel.candidates) {
      table.push_back(
          {{"q", cand.q}, {"i0", cand.i0}, {"c", cand.c}, {"rms", cand.rms}});
    }
    fit_json["model_selection"] = table;
    if (sel.indeterminate) {
      fit_json["winner_q"] = nullptr;
    } else {
      fit_json["winner_q"] = sel.winner_q;
      fit_json["selection_margin"] = sel.margin;
    }
  } catch (const std::invalid_argument& e) {
    fit_json["fit_error"] = e.what();
  }
  fit_json["config"] = qecho::config_echo(cfg);
  qecho::write_file_atomic(out_dir / "fit.json", fit_json.dump(2) + "\n");
  std::cout << "sweep: wrote sweep.csv, fit.json (" << sweep.rows.size() << " rows)\n";
  return 0;
}

int cmd_predict(const qecho::RunConfig& cfg, const fs::path& out_dir,
                const std::string& tau_override) {
  std::vector<double> taus;
  if (!tau_override.empty()) {
    taus = parse_tau_list(tau_override);
  } else if (!cfg.tau_values_internal.empty()) {
    taus = cfg.tau_values_internal;
  } else {
    taus = qecho::auto_tau_window(cfg.params, cfg.sweep_points);
  }
  for (double t : taus) {
    if (t < 0.0) throw qecho::ConfigError("config: predict requires tau >= 0");
  }
  qecho::write_file_atomic(out_dir / "predict.csv", qecho::predict_csv(taus, cfg.params));
  std::cout << "predict: wrote predict.csv (" << taus.size() << " rows)\n";
  return 0;
}

int cmd_validate(const qecho::RunConfig& cfg) {
  const qecho::ValidationReport report = qecho::validate_pipeline(
      cfg.params, cfg.phi_internal, std::min(cfg.grid_n, 1024),
      cfg.dt_internal.value_or(0.0), cfg.grid_extent.value_or(0.0));
  for (const auto& item : report.items) {
    std::cout << (item.pass ? "[PASS] " : "[FAIL] ") << item.name
              << "  measured=" << qecho::fmt_full(item.measured)
              << "  limit=" << qecho::fmt_full(item.limit) << "\n";
  }
  return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-surface wavepacket echo simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", tau_list, engine_override;

  auto add_common = [&](CLI::App* cmd, bool with_out) {
    cmd->add_option("--config", config_path, "JSON config file")->required();
    if (with_out) cmd->add_option("--out-dir", out_dir, "output directory");
  };

  CLI::App* run = app.add_subcommand("run", "single two-pulse experiment");
  add_common(run, true);
  CLI::App* sweep = app.add_subcommand("sweep", "delay sweep + decay fit");
  add_common(sweep, true);
  sweep->add_option("--tau", tau_list, "comma-separated delay list");
  sweep->add_option("--engine", engine_override, "impulsive|full")
      ->check(CLI::IsMember({"impulsive", "full"}));
  CLI::App* predict = app.add_subcommand("predict", "closed-form decay curve");
  add_common(predict, true);
  predict->add_option("--tau", tau_list, "comma-separated delay list");
  CLI::App* validate = app.add_subcommand("validate", "self-checks");
  add_common(validate, false);

  CLI11_PARSE(app, argc, argv);

  try {
    const qecho::RunConfig cfg = load(config_path);
    fs::path out(out_dir);
    if (!out_dir.empty()) fs::create_directories(out);
    if (run->parsed()) return cmd_run(cfg, out);
    if (sweep->parsed()) return cmd_sweep(cfg, out, tau_list, engine_override);
    if (predict->parsed()) return cmd_predict(cfg, out, tau_list);
    if (validate->parsed()) return cmd_validate(cfg);
  } catch (const qecho::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
