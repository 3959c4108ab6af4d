// ptwg: batch front end for the PT-symmetric waveguide solvers.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "ptwg/commands.hpp"
#include "ptwg/errors.hpp"

using namespace ptwg;

int main(int argc, char** argv) {
  CLI::App app{"Bound states of PT-symmetric waveguides"};
  app.require_subcommand(1);

  std::string config_path, csv_path, eps_list;
  unsigned seed = 1;
  int jobs = 1;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--csv", csv_path, "write CSV output here instead of stdout");
  app.add_option("--epsilons", eps_list, "comma list of coupling strengths (sweep)");
  app.add_option("--seed", seed, "seed for random test fields (verify)");
  app.add_option("--jobs", jobs, "parallel sweep points")->check(CLI::PositiveNumber);

  auto* modes = app.add_subcommand("modes", "transversal eigensystem table");
  auto* bound = app.add_subcommand("boundstate", "eigenvalue by every method");
  auto* sweep = app.add_subcommand("sweep", "epsilon sweep with gap and fitted order");
  auto* verify = app.add_subcommand("verify", "run the invariant suites");
  auto* keval = app.add_subcommand("kernel-eval", "pointwise kernel or Bessel value");
  std::string kind = "k0";
  int n = 1;
  double z_re = 1.0, z_im = 0.0, r = 1.0;
  keval->add_option("--kind", kind, "k0, k1, free or green")->check(CLI::IsMember({"k0", "k1", "free", "green"}));
  keval->add_option("--n", n, "dimension for free/green");
  keval->add_option("--z", z_re, "argument (real part)");
  keval->add_option("--z-im", z_im, "argument (imaginary part)");
  keval->add_option("--r", r, "distance for free/green");
  for (auto* sub : {modes, bound, sweep, verify, keval}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorClass::config);
  }

  try {
    RunConfig rc;
    if (!config_path.empty()) {
      rc = RunConfig::load(config_path);
    } else {
      rc.finalize();
    }
    if (!csv_path.empty()) rc.output.csv_path = csv_path;

    std::ofstream file;
    if (!rc.output.csv_path.empty()) {
      file.open(rc.output.csv_path);
      if (!file) throw ConfigError("cannot write '" + rc.output.csv_path + "'");
    }
    std::ostream& out = file.is_open() ? static_cast<std::ostream&>(file) : std::cout;

    if (*modes) return cmd_modes(rc, out);
    if (*bound) return cmd_boundstate(rc, out);
    if (*sweep) return cmd_sweep(rc, parse_epsilons(eps_list), jobs, out);
    if (*verify) return cmd_verify(rc, seed, std::cout, std::cerr);
    if (*keval) return cmd_kernel_eval(kind, n, {z_re, z_im}, r, rc.output.precision, out);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return static_cast<int>(e.error_class());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorClass::numeric);
  }
  return 0;
}
