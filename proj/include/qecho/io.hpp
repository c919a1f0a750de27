// Deterministic CSV/report emission. Floats are printed with %.17g, '.'
// decimal point, LF line endings; files are written atomically (temp +
// rename) so a failed run leaves no partial output.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "qecho/analysis.hpp"
#include "qecho/propagator.hpp"

namespace qecho {

inline std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string timeseries_csv(const TimeSeries& s) {
  std::string out = "t,re_P,im_P,abs_P2,pop_g,pop_e,x_g,p_g,x_e,p_e,norm\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += fmt_full(s.times[i]);
    out += ',';
    out += fmt_full(s.polarization[i].real());
    out += ',';
    out += fmt_full(s.polarization[i].imag());
    out += ',';
    out += fmt_full(std::norm(s.polarization[i]));
    out += ',';
    out += fmt_full(s.pop_g[i]);
    out += ',';
    out += fmt_full(s.pop_e[i]);
    out += ',';
    out += fmt_full(s.x_g[i]);
    out += ',';
    out += fmt_full(s.p_g[i]);
    out += ',';
    out += fmt_full(s.x_e[i]);
    out += ',';
    out += fmt_full(s.p_e[i]);
    out += ',';
    out += fmt_full(s.norm[i]);
    out += '\n';
  }
  return out;
}

// flag column: bit 0 = no echo, bit 1 = outside the Omega*tau <= 1 regime,
// bit 2 = packets closer than 6 sigma_p in momentum (warning only).
inline std::string sweep_csv(const SweepResult& s) {
  std::string out = "tau,intensity,t_peak,flag\n";
  for (const auto& r : s.rows) {
    int flag = 0;
    if (r.no_echo) flag |= 1;
    if (r.regime_flag) flag |= 2;
    if (r.separation_warning) flag |= 4;
    out += fmt_full(r.tau);
    out += ',';
    out += fmt_full(r.intensity);
    out += ',';
    out += fmt_full(r.t_peak);
    out += ',';
    out += std::to_string(flag);
    out += '\n';
  }
  return out;
}

inline std::string predict_csv(const std::vector<double>& taus, const ModelParams& params) {
  std::string out = "tau,intensity_ratio\n";
  for (double tau : taus) {
    out += fmt_full(tau);
    out += ',';
    out += fmt_full(predicted_echo_intensity(tau, params).intensity_ratio);
    out += '\n';
  }
  return out;
}

}  // namespace qecho
