#include "config.hpp"

#include "fem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace gmsfem {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

double to_double(const std::string& s, const std::string& key) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number '" + s + "' for key '" + key + "'");
  }
}

int to_int(const std::string& s, const std::string& key) {
  const double v = to_double(s, key);
  if (v != std::floor(v))
    throw ConfigError("expected integer for key '" + key + "'");
  return static_cast<int>(v);
}

} // namespace

int StudyConfig::levels_for(double H) const {
  if (h <= 0.0) return refine;
  const double ratio = H / h;
  const int lev = static_cast<int>(std::lround(std::log2(ratio)));
  if (lev < 1 || std::abs((1 << lev) - ratio) > 1e-9 * ratio)
    throw ConfigError("fine spacing h must equal H / 2^k with k >= 1");
  return lev;
}

StudyConfig parse_config_text(const std::string& text) {
  StudyConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  bool have_H = false, have_kinds = false;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::vector<std::string> val = tokens(line.substr(eq + 1));
    if (val.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty value for '" +
                        key + "'");

    if (key == "domain") {
      if (val.size() != 4)
        throw ConfigError("domain expects: x0 y0 x1 y1");
      const double x0 = to_double(val[0], key), y0 = to_double(val[1], key);
      const double x1 = to_double(val[2], key), y1 = to_double(val[3], key);
      cfg.domain = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
    } else if (key == "H") {
      cfg.H_list.clear();
      for (const auto& v : val) cfg.H_list.push_back(to_double(v, key));
      have_H = true;
    } else if (key == "h") {
      cfg.h = to_double(val[0], key);
    } else if (key == "refine") {
      cfg.refine = to_int(val[0], key);
    } else if (key == "kinds") {
      cfg.kinds.assign(val.begin(), val.end());
      have_kinds = true;
    } else if (key == "f") {
      cfg.f_name = val[0];
      cfg.f_params.clear();
      for (size_t i = 1; i < val.size(); ++i)
        cfg.f_params.push_back(to_double(val[i], key));
    } else if (key == "inclusion") {
      Inclusion inc;
      if (val[0] == "disk") {
        if (val.size() != 4 && val.size() != 5)
          throw ConfigError("inclusion disk expects: cx cy r [value]");
        inc.shape = Inclusion::Shape::Disk;
        inc.center = {to_double(val[1], key), to_double(val[2], key)};
        const double r = to_double(val[3], key);
        inc.radii = {r, r};
        inc.value = val.size() == 5 ? to_double(val[4], key) : 0.0;
      } else if (val[0] == "ellipse") {
        if (val.size() != 5 && val.size() != 6)
          throw ConfigError("inclusion ellipse expects: cx cy rx ry [value]");
        inc.shape = Inclusion::Shape::Ellipse;
        inc.center = {to_double(val[1], key), to_double(val[2], key)};
        inc.radii = {to_double(val[3], key), to_double(val[4], key)};
        inc.value = val.size() == 6 ? to_double(val[5], key) : 0.0;
      } else {
        throw ConfigError("inclusion shape must be disk or ellipse");
      }
      cfg.inclusions.push_back(inc);
    } else if (key == "contrast") {
      cfg.contrast = to_double(val[0], key);
    } else if (key == "contrasts") {
      cfg.contrasts.clear();
      for (const auto& v : val) cfg.contrasts.push_back(to_double(v, key));
    } else if (key == "budget_spectral") {
      cfg.budget_spectral = to_int(val[0], key);
    } else if (key == "budget_steklov") {
      cfg.budget_steklov = to_int(val[0], key);
    } else if (key == "budget_pod") {
      cfg.budget_pod = to_int(val[0], key);
    } else if (key == "spectral_threshold") {
      cfg.spectral_threshold = to_double(val[0], key);
    } else if (key == "pod_threshold") {
      cfg.pod_threshold = to_double(val[0], key);
    } else if (key == "max_local_basis") {
      cfg.max_local_basis = to_int(val[0], key);
    } else if (key == "seed") {
      cfg.seed = static_cast<unsigned>(to_int(val[0], key));
    } else if (key == "out") {
      cfg.out_dir = val[0];
    } else if (key == "dense_threshold") {
      cfg.dense_threshold = to_int(val[0], key);
    } else if (key == "num_random") {
      cfg.num_random = to_int(val[0], key);
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" +
                        key + "'");
    }
  }

  if (have_H) {
    if (cfg.H_list.empty()) throw ConfigError("H list is empty");
    for (double H : cfg.H_list)
      if (H <= 0) throw ConfigError("H values must be positive");
    if (!std::is_sorted(cfg.H_list.rbegin(), cfg.H_list.rend()))
      throw ConfigError("H list must be sorted decreasing");
  }
  if (have_kinds)
    for (const auto& k : cfg.kinds)
      if (k != "S" && k != "SNAP" && k != "H")
        throw ConfigError("kinds must be among S, SNAP, H");
  if (cfg.budget_spectral < 0 || cfg.budget_steklov < 0 || cfg.budget_pod < 0)
    throw ConfigError("budgets must be nonnegative");
  if (cfg.max_local_basis < 2)
    throw ConfigError("max_local_basis must be at least 2");
  for (auto& inc : cfg.inclusions)
    if (inc.value <= 0.0) {
      if (cfg.contrast <= 0.0)
        throw ConfigError("inclusion without value requires the contrast key");
      inc.value = cfg.contrast;
    }
  if (cfg.f_name != "constant" && cfg.f_name != "product_sine" &&
      cfg.f_name != "piecewise")
    throw ConfigError("f must be one of: constant, product_sine, piecewise");
  return cfg;
}

StudyConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

VectorXd make_rhs(const MeshHierarchy& mesh, const StudyConfig& cfg) {
  const MeshRef mr(mesh);
  const auto& p = cfg.f_params;
  if (cfg.f_name == "constant") {
    const double c = p.empty() ? 1.0 : p[0];
    return VectorXd::Constant(mr.num_tris(), c);
  }
  if (cfg.f_name == "product_sine") {
    const double amp = p.empty() ? 1.0 : p[0];
    const Vector2d lo = mesh.lo, span = mesh.hi - mesh.lo;
    return p0_from_function(mr, [&](double x, double y) {
      return amp * std::sin(M_PI * (x - lo.x()) / span.x()) *
             std::sin(M_PI * (y - lo.y()) / span.y());
    });
  }
  // piecewise: [x_split v_left v_right]
  const double xs = p.size() > 0 ? p[0] : 0.5 * (mesh.lo.x() + mesh.hi.x());
  const double vl = p.size() > 1 ? p[1] : 1.0;
  const double vr = p.size() > 2 ? p[2] : -1.0;
  return p0_from_function(
      mr, [&](double x, double) { return x < xs ? vl : vr; });
}

} // namespace gmsfem
