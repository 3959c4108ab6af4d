#pragma once

#include "ptwg/profile.hpp"

namespace ptwg {

// Physical problem: H_alpha on R^n x (0, d) with alpha = alpha0 + eps beta.
struct WaveguideConfig {
  int n = 1;
  double d = 3.141592653589793;
  double alpha0 = 0.5;
  double epsilon = 0.1;
  PerturbationProfile beta = PerturbationProfile::gaussian_with_mean(1, -1.0, 1.0);

  // Throws ConfigError or SimpleSpectrumViolation.
  void validate() const;
  double alpha(const Point& x) const { return alpha0 + epsilon * beta.eval(x); }
  // alpha0 <beta>
  double coupling_sign_product() const { return alpha0 * beta.mean(); }
};

}  // namespace ptwg

#include <istream>
#include <map>
#include <string>

namespace ptwg {

// Run description loaded from "key = value" text with dotted sections
// (problem.*, beta.*, numerics.*, output.*).  A "[section]" line prefixes
// the keys that follow it.  Zero in L, h_x, h_u, bs_h, bs_modes, quad_order
// selects the solver default.
struct RunConfig {
  WaveguideConfig problem;
  struct BetaSpec {
    std::string kind = "gaussian";  // gaussian | bump
    double amplitude = 0.0;
    double mean = -1.0;  // used when amplitude is not given (gaussian only)
    bool has_amplitude = false;
    double width = 1.0;
    Point center{0.0, 0.0};
  } beta;
  struct Numerics {
    double L = 0.0;
    double h_x = 0.0;
    double h_u = 0.0;
    int j_max = 20;
    int quad_order = 0;
    double newton_tol = 1e-12;
    double bs_h = 0.0;
    int bs_modes = 0;
    int bs_degree = 0;
  } numerics;
  struct Output {
    std::string csv_path;
    int precision = 17;
  } output;

  static RunConfig parse(std::istream& in);
  static RunConfig load(const std::string& path);
  // Applies one key; throws ConfigError naming the key.
  void set(const std::string& key, const std::string& value);
  // Builds problem.beta from the spec and validates every field.
  void finalize();
};

}  // namespace ptwg
