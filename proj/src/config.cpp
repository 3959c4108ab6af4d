#include "ptwg/config.hpp"

#include <cmath>

#include "ptwg/errors.hpp"
#include "ptwg/transverse.hpp"

namespace ptwg {

void WaveguideConfig::validate() const {
  if (n != 1 && n != 2) throw ConfigError("problem.n must be 1 or 2");
  if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError("problem.d must be positive");
  if (!std::isfinite(alpha0)) throw ConfigError("problem.alpha0 must be finite");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw ConfigError("problem.epsilon must be nonnegative");
  if (beta.dimension() != n)
    throw ConfigError("beta profile dimension differs from problem.n");
  check_simple_spectrum(alpha0, d);
}

}  // namespace ptwg

#include <fstream>
#include <sstream>

namespace ptwg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError(key + ": expected an integer");
  return static_cast<int>(x);
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& v) {
  auto& nm = numerics;
  if (key == "problem.n") problem.n = to_int(key, v);
  else if (key == "problem.d") problem.d = to_double(key, v);
  else if (key == "problem.alpha0") problem.alpha0 = to_double(key, v);
  else if (key == "problem.epsilon") problem.epsilon = to_double(key, v);
  else if (key == "beta.kind") beta.kind = v;
  else if (key == "beta.amplitude") { beta.amplitude = to_double(key, v); beta.has_amplitude = true; }
  else if (key == "beta.mean") beta.mean = to_double(key, v);
  else if (key == "beta.width") beta.width = to_double(key, v);
  else if (key == "beta.center") {
    std::stringstream ss(v);
    std::string part;
    int i = 0;
    while (std::getline(ss, part, ',')) {
      if (i > 1) throw ConfigError(key + ": at most two coordinates");
      beta.center[i++] = to_double(key, trim(part));
    }
  }
  else if (key == "numerics.L") nm.L = to_double(key, v);
  else if (key == "numerics.h_x") nm.h_x = to_double(key, v);
  else if (key == "numerics.h_u") nm.h_u = to_double(key, v);
  else if (key == "numerics.j_max") nm.j_max = to_int(key, v);
  else if (key == "numerics.quad_order") nm.quad_order = to_int(key, v);
  else if (key == "numerics.newton_tol") nm.newton_tol = to_double(key, v);
  else if (key == "numerics.bs_h") nm.bs_h = to_double(key, v);
  else if (key == "numerics.bs_modes") nm.bs_modes = to_int(key, v);
  else if (key == "numerics.bs_degree") nm.bs_degree = to_int(key, v);
  else if (key == "output.csv_path") output.csv_path = v;
  else if (key == "output.precision") output.precision = to_int(key, v);
  else throw ConfigError("unknown key '" + key + "'");
}

void RunConfig::finalize() {
  const auto& nm = numerics;
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(nm.L >= 0.0 && std::isfinite(nm.L), "numerics.L must be >= 0");
  require(nm.h_x >= 0.0 && std::isfinite(nm.h_x), "numerics.h_x must be >= 0");
  require(nm.h_u >= 0.0 && std::isfinite(nm.h_u), "numerics.h_u must be >= 0");
  require(nm.j_max >= 0 && nm.j_max <= 10000, "numerics.j_max must lie in 0..10000");
  require(nm.quad_order >= 0, "numerics.quad_order must be >= 0");
  require(nm.newton_tol > 0.0 && nm.newton_tol < 1.0, "numerics.newton_tol must lie in (0, 1)");
  require(nm.bs_h >= 0.0, "numerics.bs_h must be >= 0");
  require(nm.bs_modes >= 0, "numerics.bs_modes must be >= 0");
  require(nm.bs_degree == 0 || nm.bs_degree == 1 || nm.bs_degree == 3 || nm.bs_degree == 5,
          "numerics.bs_degree must be 1, 3 or 5");
  require(output.precision >= 1 && output.precision <= 17, "output.precision must lie in 1..17");
  require(beta.width > 0.0 && std::isfinite(beta.width), "beta.width must be positive");
  const int n = problem.n;
  require(n == 1 || n == 2, "problem.n must be 1 or 2");
  const Point c = n == 1 ? Point{beta.center[0], 0.0} : beta.center;
  if (beta.kind == "gaussian") {
    if (beta.has_amplitude)
      problem.beta = PerturbationProfile::gaussian(n, beta.amplitude, beta.width, c);
    else if (c == Point{0.0, 0.0})
      problem.beta = PerturbationProfile::gaussian_with_mean(n, beta.mean, beta.width);
    else
      throw ConfigError("beta.center requires beta.amplitude");
  } else if (beta.kind == "bump") {
    require(beta.has_amplitude, "beta.kind = bump requires beta.amplitude");
    problem.beta = PerturbationProfile::bump(n, beta.amplitude, beta.width, c);
  } else {
    throw ConfigError("beta.kind must be gaussian or bump");
  }
  require(problem.beta.satisfies_decay(), "beta profile fails the decay check");
  problem.validate();
}

RunConfig RunConfig::parse(std::istream& in) {
  RunConfig rc;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
    rc.set(key, trim(line.substr(eq + 1)));
  }
  rc.finalize();
  return rc;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  return parse(f);
}

}  // namespace ptwg
