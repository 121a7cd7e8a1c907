#pragma once

// File emission: CSV tables, JSON summaries, SVG line plots and the run
// manifest.  All content is deterministic for a fixed config and seed; wall
// clock and timings live only in the manifest.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "loglap/asymptotics.hpp"
#include "loglap/config.hpp"
#include "loglap/spectral.hpp"
#include "loglap/verify.hpp"
#include "loglap/version.hpp"

namespace loglap {

using json = nlohmann::json;

inline void write_text_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw io_error("cannot open " + tmp + " for writing");
    f << content;
    if (!f) throw io_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

inline std::string format_full(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// compact label for s values in file names (cache keys round to 12 decimals)
inline std::string format_s(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// ---- JSON views ----

inline json to_json(const InequalityVerdict& v) {
  return json{{"name", v.name},
              {"samples", v.samples},
              {"worst_slack", v.worst_slack},
              {"tolerance", v.tolerance},
              {"holds", v.holds}};
}

inline json to_json(const SolveReport& r) {
  json j{{"energy", r.energy},
         {"gradient_norm", r.gradient_norm},
         {"nehari_residual", r.nehari_residual},
         {"iterations", r.iterations},
         {"sign_pattern", to_string(r.sign_pattern)},
         {"converged", r.converged},
         {"norms",
          {{"L2", r.norm_l2}, {"Hs", r.norm_hs}, {"Linf", r.norm_linf}}}};
  if (r.fibering_multiple_roots) j["fibering_multiple_roots"] = true;
  if (std::isfinite(r.m_lower)) j["m_lower"] = r.m_lower;
  return j;
}

// ---- CSV views ----

inline std::string derivative_study_csv(const DerivativeStudy& st) {
  std::ostringstream os;
  os.precision(17);
  os << "s,lambda_1s,quotient\n";
  for (size_t i = 0; i < st.s_values.size(); ++i)
    os << st.s_values[i] << "," << st.lambdas[i] << "," << st.quotients[i]
       << "\n";
  return os.str();
}

inline std::string super_sweep_csv(const SuperAsymptoticsReport& rep) {
  std::ostringstream os;
  os.precision(17);
  os << "s,l2_gap,energy_gap,norm_gap,r_gap\n";
  for (const auto& r : rep.rows)
    os << r.s << "," << r.l2_gap << "," << r.energy_gap << "," << r.norm_gap
       << "," << r.r_gap << "\n";
  return os.str();
}

inline std::string sub_sweep_csv(const SubAsymptoticsReport& rep) {
  std::ostringstream os;
  os.precision(17);
  os << "s,l1_gap,l2_gap,l4_gap,h_norm_sq,us_norm_s_sq,linf,t_s,c_s,"
        "sandwich_lower,sandwich_upper\n";
  for (const auto& r : rep.rows)
    os << r.s << "," << r.l1_gap << "," << r.l2_gap << "," << r.l4_gap << ","
       << r.h_norm_sq << "," << r.us_norm_s_sq << "," << r.linf << ","
       << r.t_s << "," << r.c_s << "," << r.sandwich_lower << ","
       << r.sandwich_upper << "\n";
  return os.str();
}

inline std::string noncompact_csv(const NoncompactReport& rep) {
  std::ostringstream os;
  os.precision(17);
  os << "k,energy,l2_sq,modular_phi,modular_gamma\n";
  for (const auto& r : rep.rows)
    os << r.k << "," << r.energy << "," << r.l2_sq << "," << r.modular_phi
       << "," << r.modular_gamma << "\n";
  return os.str();
}

// ---- SVG line plots ----

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

// minimal polyline plot; set log_x/log_y for log-log error curves
inline std::string svg_line_plot(const std::string& title,
                                 const std::vector<PlotSeries>& series,
                                 bool log_x = false, bool log_y = false) {
  const int W = 640, H = 420, ml = 70, mr = 20, mt = 40, mb = 50;
  // log axes clamp nonpositive values to one decade below the smallest
  // positive entry
  auto floor_of = [&](bool on_x) {
    double m = 1e300;
    for (const auto& s : series)
      for (double v : (on_x ? s.x : s.y))
        if (v > 0.0) m = std::min(m, v);
    return m == 1e300 ? 1e-300 : 0.1 * m;
  };
  const double fx = log_x ? floor_of(true) : 0.0;
  const double fy = log_y ? floor_of(false) : 0.0;
  auto tx = [&](double v) { return log_x ? std::log10(std::max(v, fx)) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(std::max(v, fy)) : v; };
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, tx(s.x[i]));
      xmax = std::max(xmax, tx(s.x[i]));
      ymin = std::min(ymin, ty(s.y[i]));
      ymax = std::max(ymax, ty(s.y[i]));
    }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  auto px = [&](double v) {
    return ml + (tx(v) - xmin) / (xmax - xmin) * (W - ml - mr);
  };
  auto py = [&](double v) {
    return H - mb - (ty(v) - ymin) / (ymax - ymin) * (H - mt - mb);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b"};
  std::ostringstream os;
  os.precision(8);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='"
     << H << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << W / 2 << "' y='20' text-anchor='middle' "
     << "font-family='sans-serif' font-size='14'>" << title << "</text>\n";
  os << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr
     << "' y2='" << H - mb << "' stroke='black'/>\n";
  os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
     << H - mb << "' stroke='black'/>\n";
  int ci = 0;
  for (const auto& s : series) {
    os << "<polyline fill='none' stroke='" << colors[ci % 6]
       << "' stroke-width='1.5' points='";
    for (size_t i = 0; i < s.x.size(); ++i)
      os << px(s.x[i]) << "," << py(s.y[i]) << " ";
    os << "'/>\n";
    os << "<text x='" << W - mr - 120 << "' y='" << mt + 16 * (ci + 1)
       << "' font-family='sans-serif' font-size='12' fill='" << colors[ci % 6]
       << "'>" << s.label << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
  return os.str();
}

// ---- run manifest ----

class RunManifest {
 public:
  explicit RunManifest(const RunConfig& cfg) : start_(clock_t::now()) {
    doc_["config"] = emit_config(cfg);
    doc_["artifact_version"] = artifact_version;
    doc_["status"] = "incomplete";
  }

  void stage_done(const std::string& name) {
    const auto now = clock_t::now();
    stages_.push_back(
        {name, std::chrono::duration<double, std::milli>(now - last_).count()});
    last_ = now;
  }
  void set_verdict_summary(json j) { doc_["verdict_summary"] = std::move(j); }
  void fail(const std::string& stage, const std::string& what) {
    doc_["status"] = "failed";
    doc_["failure_stage"] = stage;
    doc_["error"] = what;
  }
  void succeed() { doc_["status"] = "ok"; }

  // atomic write, also called for failed runs
  void write(const std::filesystem::path& dir) {
    json st = json::array();
    for (const auto& [name, ms] : stages_)
      st.push_back(json{{"stage", name}, {"ms", ms}});
    doc_["stage_timings"] = st;
    doc_["wall_ms"] = std::chrono::duration<double, std::milli>(
                          clock_t::now() - start_).count();
    write_text_atomic(dir / "manifest.json", doc_.dump(2) + "\n");
  }

 private:
  using clock_t = std::chrono::steady_clock;
  clock_t::time_point start_{clock_t::now()};
  clock_t::time_point last_{clock_t::now()};
  std::vector<std::pair<std::string, double>> stages_;
  json doc_;
};

// run directory `{subcommand}_{timestamp}` under the configured output dir
inline std::filesystem::path make_run_dir(const RunConfig& cfg,
                                          const std::string& subcommand) {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y%m%dT%H%M%S", std::gmtime(&t));
  std::filesystem::path dir =
      std::filesystem::path(cfg.dir) / (subcommand + "_" + stamp);
  // suffix on collision so rapid successive runs keep distinct directories
  std::filesystem::path candidate = dir;
  for (int k = 1; std::filesystem::exists(candidate); ++k)
    candidate = dir.string() + "_" + std::to_string(k);
  std::filesystem::create_directories(candidate);
  return candidate;
}

}  // namespace loglap
