#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "ptwg/bs.hpp"
#include "ptwg/config.hpp"
#include "ptwg/direct.hpp"

namespace ptwg {

// Solver settings derived from a run configuration.
BsDiscretization bs_discretization(const RunConfig& rc);
DirectNumerics direct_numerics(const RunConfig& rc);
WeakCouplingOptions weak_coupling_options(const RunConfig& rc);

// Each command writes CSV (or a report) to `out` and returns the exit code.
// Configuration and unexpected numerical errors propagate as exceptions.
int cmd_modes(const RunConfig& rc, std::ostream& out);
int cmd_boundstate(const RunConfig& rc, std::ostream& out);
int cmd_sweep(const RunConfig& rc, const std::vector<double>& epsilons,
              int jobs, std::ostream& out);
// Prints one "PASS|FAIL|SKIP name: detail" line per check.  Returns 0 when
// every check passes, 3 otherwise (first failing check named on `err`).
int cmd_verify(const RunConfig& rc, unsigned seed, std::ostream& out,
               std::ostream& err);

// kind: k0 | k1 (Bessel at z), free (free resolvent kernel of dimension n at
// energy z, distance r), green (free kernel at z = -kappa^2 with kappa = z).
int cmd_kernel_eval(const std::string& kind, int n, cplx z, double r,
                    int precision, std::ostream& out);

// Parses "0.2,0.1,0.05"; empty string gives an empty list.
std::vector<double> parse_epsilons(const std::string& list);

// Fixed-width scientific formatting with `precision` significant digits.
std::string format_number(double x, int precision);

}  // namespace ptwg
