#pragma once

#include <Eigen/Dense>
#include <functional>

namespace ptwg {

struct GmresResult {
  Eigen::VectorXcd x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

// Restarted GMRES for a matrix-free complex operator, zero initial guess.
GmresResult gmres(
    const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& op,
    const Eigen::VectorXcd& rhs, double tol, int restart, int max_iter);

}  // namespace ptwg
