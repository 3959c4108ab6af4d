#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "ptwg/quadrature.hpp"

namespace ptwg {

using cplx = std::complex<double>;

enum class ModeKind { alpha_mode, cosine_mode };

// One eigenpair of the transversal Robin operator on (0, d).
struct TransversalMode {
  int index = 0;
  double mu = 0.0;
  double mu_sq = 0.0;
  cplx a_norm;
  ModeKind kind = ModeKind::cosine_mode;
};

// Below this |alpha0| (relative to pi/d) the alpha mode switches to its
// alpha0 -> 0 limit expressions.
inline constexpr double kAlphaLimitRel = 1e-8;

// Throws SimpleSpectrumViolation when alpha0 d / pi is a nonzero integer.
void check_simple_spectrum(double alpha0, double d);

std::vector<TransversalMode> transversal_eigenvalues(double alpha0, double d,
                                                     int j_max);

double threshold(double alpha0, double d);

cplx eval_psi(const TransversalMode& mode, double alpha0, double u);
cplx eval_dpsi(const TransversalMode& mode, double alpha0, double u);
cplx eval_phi(const TransversalMode& mode, double alpha0, double d, double u);

// Entry (j, k) approximates (phi_j, psi_k) by Gauss-Legendre.
// quad_order <= 0 selects the default 4 (j_max + 1).
Eigen::MatrixXcd biorthonormality_matrix(double alpha0, double d, int j_max,
                                         int quad_order = 0);

// Field sampled as field(ix, iu) on x-nodes times the Gauss-Legendre u-nodes
// of the given order; throws GridMismatch otherwise.
Eigen::VectorXcd project_mode(const Eigen::MatrixXcd& field,
                              const std::vector<double>& u_nodes,
                              const TransversalMode& mode, double alpha0,
                              double d, int quad_order);

}  // namespace ptwg

namespace ptwg {

// Transversal eigensystem bundled with the parameters that generated it.
struct ModeSet {
  double alpha0 = 0.0;
  double d = 1.0;
  std::vector<TransversalMode> modes;

  static ModeSet make(double alpha0, double d, int j_max) {
    return {alpha0, d, transversal_eigenvalues(alpha0, d, j_max)};
  }
  const TransversalMode& operator[](int j) const { return modes[j]; }
  int size() const { return static_cast<int>(modes.size()); }
  double mu0_sq() const { return modes.front().mu_sq; }
  cplx psi(int j, double u) const { return eval_psi(modes[j], alpha0, u); }
  cplx dpsi(int j, double u) const { return eval_dpsi(modes[j], alpha0, u); }
  cplx phi(int j, double u) const { return eval_phi(modes[j], alpha0, d, u); }
};

}  // namespace ptwg
