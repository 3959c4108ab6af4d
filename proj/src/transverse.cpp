#include "ptwg/transverse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ptwg/errors.hpp"

namespace ptwg {

namespace {
constexpr double pi = std::numbers::pi;
constexpr cplx I(0.0, 1.0);

bool near_zero_alpha(double alpha0, double d) {
  return std::abs(alpha0) < kAlphaLimitRel * (pi / d);
}
}  // namespace

void check_simple_spectrum(double alpha0, double d) {
  if (!(d > 0.0)) throw ConfigError("width d must be positive");
  const double r = alpha0 * d / pi;
  const double n = std::round(r);
  if (n != 0.0 && std::abs(r - n) < 1e-9) {
    std::ostringstream os;
    os << "alpha0 d / pi = " << r << " is a nonzero integer";
    throw SimpleSpectrumViolation(os.str());
  }
}

std::vector<TransversalMode> transversal_eigenvalues(double alpha0, double d,
                                                     int j_max) {
  check_simple_spectrum(alpha0, d);
  if (j_max < 0) throw ConfigError("j_max must be nonnegative");

  std::vector<TransversalMode> modes;
  modes.reserve(j_max + 1);
  TransversalMode am;
  am.kind = ModeKind::alpha_mode;
  am.mu = alpha0;
  am.mu_sq = alpha0 * alpha0;
  if (near_zero_alpha(alpha0, d)) {
    const cplx z = 2.0 * I * alpha0 * d;
    am.a_norm = (1.0 + z / 2.0 + z * z / 12.0) / d;
  } else {
    am.a_norm = alpha0 * std::exp(I * alpha0 * d) / std::sin(alpha0 * d);
  }

  bool alpha_placed = false;
  int m = 1;
  while (static_cast<int>(modes.size()) <= j_max) {
    const double mu = m * pi / d;
    if (!alpha_placed && am.mu_sq <= mu * mu) {
      am.index = static_cast<int>(modes.size());
      modes.push_back(am);
      alpha_placed = true;
      continue;
    }
    TransversalMode cm;
    cm.index = static_cast<int>(modes.size());
    cm.kind = ModeKind::cosine_mode;
    cm.mu = mu;
    cm.mu_sq = mu * mu;
    cm.a_norm = 2.0 * cm.mu_sq / ((cm.mu_sq - alpha0 * alpha0) * d);
    modes.push_back(cm);
    ++m;
  }
  return modes;
}

double threshold(double alpha0, double d) {
  return std::min(alpha0 * alpha0, (pi / d) * (pi / d));
}

cplx eval_psi(const TransversalMode& mode, double alpha0, double u) {
  if (mode.kind == ModeKind::alpha_mode) return std::exp(-I * alpha0 * u);
  return std::cos(mode.mu * u) - I * (alpha0 / mode.mu) * std::sin(mode.mu * u);
}

cplx eval_dpsi(const TransversalMode& mode, double alpha0, double u) {
  if (mode.kind == ModeKind::alpha_mode)
    return -I * alpha0 * std::exp(-I * alpha0 * u);
  return -mode.mu * std::sin(mode.mu * u) - I * alpha0 * std::cos(mode.mu * u);
}

cplx eval_phi(const TransversalMode& mode, double alpha0, double /*d*/,
              double u) {
  return std::conj(mode.a_norm * eval_psi(mode, alpha0, u));
}

Eigen::MatrixXcd biorthonormality_matrix(double alpha0, double d, int j_max,
                                         int quad_order) {
  if (quad_order <= 0) quad_order = 4 * (j_max + 1);
  const auto modes = transversal_eigenvalues(alpha0, d, j_max);
  const auto q = gauss_legendre(quad_order, 0.0, d);
  const int n = j_max + 1;
  Eigen::MatrixXcd psi(q.size(), n), phi(q.size(), n);
  for (int a = 0; a < q.size(); ++a)
    for (int j = 0; j < n; ++j) {
      psi(a, j) = eval_psi(modes[j], alpha0, q.nodes[a]);
      phi(a, j) = eval_phi(modes[j], alpha0, d, q.nodes[a]) * q.weights[a];
    }
  return phi.adjoint() * psi;
}

Eigen::VectorXcd project_mode(const Eigen::MatrixXcd& field,
                              const std::vector<double>& u_nodes,
                              const TransversalMode& mode, double alpha0,
                              double d, int quad_order) {
  const auto q = gauss_legendre(quad_order, 0.0, d);
  if (static_cast<int>(u_nodes.size()) != q.size() ||
      field.cols() != q.size())
    throw GridMismatch("u-grid size does not match the quadrature order");
  for (int a = 0; a < q.size(); ++a)
    if (std::abs(u_nodes[a] - q.nodes[a]) > 1e-12 * d)
      throw GridMismatch("u-grid nodes are not the Gauss-Legendre nodes");
  Eigen::VectorXcd w(q.size());
  for (int a = 0; a < q.size(); ++a)
    w(a) = std::conj(eval_phi(mode, alpha0, d, q.nodes[a])) * q.weights[a];
  return field * w;
}

}  // namespace ptwg
