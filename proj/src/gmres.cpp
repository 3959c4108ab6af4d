#include "ptwg/gmres.hpp"

#include <cmath>
#include <vector>

namespace ptwg {

GmresResult gmres(
    const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& op,
    const Eigen::VectorXcd& rhs, double tol, int restart, int max_iter) {
  using cplx = std::complex<double>;
  GmresResult res;
  const Eigen::Index n = rhs.size();
  res.x = Eigen::VectorXcd::Zero(n);
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  Eigen::VectorXcd r = rhs;
  double rnorm = bnorm;
  while (res.iterations < max_iter) {
    const int m = restart;
    std::vector<Eigen::VectorXcd> V;
    V.reserve(m + 1);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
    std::vector<cplx> cs(m), sn(m);
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(m + 1);
    g(0) = rnorm;
    V.push_back(r / rnorm);
    int k = 0;
    for (; k < m && res.iterations < max_iter; ++k) {
      ++res.iterations;
      Eigen::VectorXcd w = op(V[k]);
      for (int i = 0; i <= k; ++i) {
        H(i, k) = V[i].dot(w);
        w -= H(i, k) * V[i];
      }
      H(k + 1, k) = w.norm();
      // apply previous rotations
      for (int i = 0; i < k; ++i) {
        const cplx t = std::conj(cs[i]) * H(i, k) + std::conj(sn[i]) * H(i + 1, k);
        H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
        H(i, k) = t;
      }
      const double a = std::abs(H(k, k)), b = std::abs(H(k + 1, k));
      const double nrm = std::hypot(a, b);
      if (nrm == 0.0) {
        cs[k] = 1.0;
        sn[k] = 0.0;
      } else {
        cs[k] = H(k, k) / nrm;
        sn[k] = H(k + 1, k) / nrm;
      }
      H(k, k) = nrm;
      H(k + 1, k) = 0.0;
      g(k + 1) = -sn[k] * g(k);
      g(k) = std::conj(cs[k]) * g(k);
      const double hk = w.norm();
      if (std::abs(g(k + 1)) <= tol * bnorm || hk == 0.0) {
        ++k;
        break;
      }
      V.push_back(w / hk);
    }
    // back substitution
    Eigen::VectorXcd y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(
        g.head(k));
    for (int i = 0; i < k; ++i) res.x += y(i) * V[i];
    r = rhs - op(res.x);
    rnorm = r.norm();
    res.relative_residual = rnorm / bnorm;
    if (res.relative_residual <= 10.0 * tol) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

}  // namespace ptwg
