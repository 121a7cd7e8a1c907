#pragma once

// Run configuration: flat sectioned `section.key = value` text, one pair per
// line, `#` comments.  Unknown keys are rejected so manifests stay exact.

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "loglap/errors.hpp"

namespace loglap {

struct RunConfig {
  // domain
  double left = -0.5;
  double right = 0.5;
  int n_cells = 256;
  // dimension
  int dimension = 1;
  // operator
  std::vector<double> s_list{0.05, 0.1, 0.2};
  // nonlinearity
  std::string family = "linear_weight";  // linear_weight | log_power | log_log
  double theta = 0.5;
  double mu = 2.0;
  double sigma = 1.0;
  std::string omega = "0";  // constant or profile `bump|cosine|const[:amp]`
  // solver
  double tol = 1e-8;
  int max_iters = 20000;
  std::uint64_t seed = 1;
  // sweep
  std::vector<double> s_schedule{0.1, 0.05, 0.025, 0.0125};
  double sweep_sigma = 1.0;
  std::string omega_profile = "0";
  // output
  std::string dir = "out";
  bool emit_svg = false;

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<double> parse_list(const std::string& text) {
  std::string cleaned = text;
  for (auto& c : cleaned)
    if (c == ',') c = ' ';
  std::istringstream in(cleaned);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  return out;
}

inline std::string emit_list(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw config_error("config: boolean expected for " + key + ", got " + v);
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineno) +
                         ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    try {
      if (key == "domain.left") c.left = std::stod(val);
      else if (key == "domain.right") c.right = std::stod(val);
      else if (key == "domain.n_cells") c.n_cells = std::stoi(val);
      else if (key == "dimension") c.dimension = std::stoi(val);
      else if (key == "operator.s_list") c.s_list = detail::parse_list(val);
      else if (key == "nonlinearity.family") c.family = val;
      else if (key == "nonlinearity.theta") c.theta = std::stod(val);
      else if (key == "nonlinearity.mu") c.mu = std::stod(val);
      else if (key == "nonlinearity.sigma") c.sigma = std::stod(val);
      else if (key == "nonlinearity.omega") c.omega = val;
      else if (key == "solver.tol") c.tol = std::stod(val);
      else if (key == "solver.max_iters") c.max_iters = std::stoi(val);
      else if (key == "solver.seed") c.seed = std::stoull(val);
      else if (key == "sweep.s_schedule") c.s_schedule = detail::parse_list(val);
      else if (key == "sweep.sigma") c.sweep_sigma = std::stod(val);
      else if (key == "sweep.omega_profile") c.omega_profile = val;
      else if (key == "output.dir") c.dir = val;
      else if (key == "output.emit_svg") c.emit_svg = detail::parse_bool(val, key);
      else
        throw config_error("config line " + std::to_string(lineno) +
                           ": unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw config_error("config line " + std::to_string(lineno) +
                         ": cannot parse value '" + val + "' for " + key);
    } catch (const std::out_of_range&) {
      throw config_error("config line " + std::to_string(lineno) +
                         ": value out of range for " + key);
    }
  }
  return c;
}

inline std::string emit_config(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "domain.left = " << c.left << "\n"
     << "domain.right = " << c.right << "\n"
     << "domain.n_cells = " << c.n_cells << "\n"
     << "dimension = " << c.dimension << "\n"
     << "operator.s_list = " << detail::emit_list(c.s_list) << "\n"
     << "nonlinearity.family = " << c.family << "\n"
     << "nonlinearity.theta = " << c.theta << "\n"
     << "nonlinearity.mu = " << c.mu << "\n"
     << "nonlinearity.sigma = " << c.sigma << "\n"
     << "nonlinearity.omega = " << c.omega << "\n"
     << "solver.tol = " << c.tol << "\n"
     << "solver.max_iters = " << c.max_iters << "\n"
     << "solver.seed = " << c.seed << "\n"
     << "sweep.s_schedule = " << detail::emit_list(c.s_schedule) << "\n"
     << "sweep.sigma = " << c.sweep_sigma << "\n"
     << "sweep.omega_profile = " << c.omega_profile << "\n"
     << "output.dir = " << c.dir << "\n"
     << "output.emit_svg = " << (c.emit_svg ? "true" : "false") << "\n";
  return os.str();
}

// range validation against the module preconditions; runs before any
// computation starts
inline void validate(const RunConfig& c) {
  if (!(c.left < c.right))
    throw config_error("config: domain.left must be below domain.right");
  if (c.n_cells < 2) throw config_error("config: domain.n_cells >= 2 required");
  if (c.dimension != 1)
    throw config_error("config: the discretization supports dimension = 1 "
                       "(constants alone admit general N)");
  for (double s : c.s_list)
    if (!(s > 0.0 && s < 0.25))
      throw config_error("config: operator.s_list entries must lie in (0,1/4)");
  if (c.family != "linear_weight" && c.family != "log_power" &&
      c.family != "log_log")
    throw config_error("config: unknown nonlinearity.family '" + c.family +
                       "'");
  if (!(c.theta >= 0.0 && c.theta < 1.0))
    throw config_error("config: nonlinearity.theta must lie in [0,1)");
  if (!(c.mu > 0.0)) throw config_error("config: nonlinearity.mu must be > 0");
  if (!(c.tol > 0.0)) throw config_error("config: solver.tol must be > 0");
  if (c.max_iters < 1)
    throw config_error("config: solver.max_iters must be >= 1");
  for (size_t i = 0; i < c.s_schedule.size(); ++i) {
    if (!(c.s_schedule[i] > 0.0 && c.s_schedule[i] < 0.25))
      throw config_error("config: sweep.s_schedule entries must lie in (0,1/4)");
    if (i > 0 && !(c.s_schedule[i] < c.s_schedule[i - 1]))
      throw config_error("config: sweep.s_schedule must decrease strictly");
  }
}

}  // namespace loglap
