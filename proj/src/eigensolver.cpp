#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <random>

#include "ptwg/direct.hpp"
#include "ptwg/errors.hpp"

namespace ptwg {

namespace {

using SpMat = Eigen::SparseMatrix<cplx>;
using Lu = Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>;

std::vector<EigenPair> dense_window(const SpMat& A, cplx center, int count) {
  const Eigen::MatrixXcd D(A);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(D);
  if (es.info() != Eigen::Success)
    throw ConvergenceFailure("dense eigensolver failed");
  std::vector<int> idx(D.rows());
  for (int i = 0; i < D.rows(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(es.eigenvalues()(a) - center) < std::abs(es.eigenvalues()(b) - center);
  });
  std::vector<EigenPair> out;
  for (int i = 0; i < std::min<int>(count, D.rows()); ++i) {
    EigenPair p;
    p.value = es.eigenvalues()(idx[i]);
    p.vector = es.eigenvectors().col(idx[i]);
    p.residual = (A * p.vector - p.value * p.vector).norm() / p.vector.norm();
    out.push_back(std::move(p));
  }
  return out;
}

// Factorizes A - shift; retries with a perturbed shift when the factor is
// numerically singular.
cplx factorize(const SpMat& A, cplx shift, Lu& lu) {
  const int n = static_cast<int>(A.rows());
  SpMat I(n, n);
  I.setIdentity();
  Eigen::VectorXcd probe(n);
  for (int i = 0; i < n; ++i) probe(i) = cplx(std::cos(0.3 * i), std::sin(0.7 * i + 0.1));
  const double scale = std::max(1.0, std::abs(shift));
  for (int attempt = 0; attempt < 3; ++attempt) {
    SpMat B = A - shift * I;
    B.makeCompressed();
    lu.analyzePattern(B);
    lu.factorize(B);
    if (lu.info() == Eigen::Success) {
      const Eigen::VectorXcd x = lu.solve(probe);
      if (x.allFinite() && x.norm() < 1e10 * probe.norm()) return shift;
    }
    shift += 1e-6 * scale * cplx(1.0, 1.0) * double(attempt + 1);
  }
  throw ConvergenceFailure("shifted matrix singular at the requested center");
}

}  // namespace

std::vector<EigenPair> spectrum_window(const DiscretizedHamiltonian& H,
                                       cplx center, int count,
                                       const WindowOptions& opts) {
  const SpMat& A = H.matrix;
  const int n = static_cast<int>(A.rows());
  if (count < 1) throw ConfigError("window count must be positive");
  if (n <= opts.dense_limit) return dense_window(A, center, count);

  double a_norm = 1.0;
  {
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < A.outerSize(); ++j)
      for (SpMat::InnerIterator it(A, j); it; ++it) rows(it.row()) += std::abs(it.value());
    a_norm = std::max(a_norm, rows.maxCoeff());
  }
  const double tol = opts.residual_tol * a_norm;

  Lu lu;
  const cplx shift = factorize(A, center, lu);
  int m = std::min(n - 1, std::max(3 * count, 24));

  std::mt19937 rng(12345);
  std::normal_distribution<double> nd;
  Eigen::VectorXcd v0(n);
  for (int i = 0; i < n; ++i) v0(i) = cplx(nd(rng), nd(rng));
  v0.normalize();

  std::vector<EigenPair> best;
  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    Eigen::MatrixXcd V(n, m + 1);
    Eigen::MatrixXcd Hm = Eigen::MatrixXcd::Zero(m + 1, m);
    V.col(0) = v0;
    int k = 0;
    for (; k < m; ++k) {
      Eigen::VectorXcd w = lu.solve(V.col(k));
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= k; ++i) {
          const cplx c = V.col(i).dot(w);
          Hm(i, k) += c;
          w -= c * V.col(i);
        }
      Hm(k + 1, k) = w.norm();
      if (std::abs(Hm(k + 1, k)) < 1e-300) {
        ++k;
        break;
      }
      V.col(k + 1) = w / Hm(k + 1, k).real();
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Hm.topLeftCorner(k, k));
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b));
    });
    best.clear();
    bool all_ok = true;
    Eigen::VectorXcd next = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < std::min(count + 2, k); ++i) {
      const cplx theta = es.eigenvalues()(idx[i]);
      EigenPair p;
      p.value = shift + 1.0 / theta;
      p.vector = V.leftCols(k) * es.eigenvectors().col(idx[i]);
      p.vector.normalize();
      p.residual = (A * p.vector - p.value * p.vector).norm();
      next += p.vector;
      if (i >= count) continue;
      if (p.residual > tol) all_ok = false;
      best.push_back(std::move(p));
    }
    if (all_ok) break;
    if (restart == opts.max_restarts) {
      double worst = 0.0;
      for (const auto& p : best) worst = std::max(worst, p.residual);
      throw ConvergenceFailure("shift-invert Arnoldi: worst residual " +
                               std::to_string(worst) + " after " +
                               std::to_string(restart) + " restarts");
    }
    v0 = next.normalized();
    m = std::min({n - 1, m + m / 2, 240});
  }
  std::sort(best.begin(), best.end(), [&](const EigenPair& a, const EigenPair& b) {
    return std::abs(a.value - center) < std::abs(b.value - center);
  });
  return best;
}

}  // namespace ptwg
