#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "ptwg/config.hpp"
#include "ptwg/factorization.hpp"
#include "ptwg/kernels.hpp"
#include "ptwg/transverse.hpp"

namespace ptwg {

// Discretization of the Birman-Schwinger operator.  Unknowns are the
// coefficients y(i, j, x_b): factor component i, transversal mode j < modes,
// longitudinal node x_b.  Convolutions use product integration of the exact
// kernels against a piecewise polynomial interpolant of degree `degree`
// (1, 3 or 5 for n = 1; 1 for n = 2).
struct BsDiscretization {
  double h = 0.05;
  double half_length = 0.0;  // 0 selects the profile support at 1e-10
  int modes = 16;
  int u_order = 0;           // 0 selects 8 modes + 32
  int degree = 5;
  double gmres_tol = 1e-13;
  int gmres_restart = 60;
  int gmres_max_iter = 2000;

  static BsDiscretization default_for(int n);
};

// Discretized K = L + M at one spectral point.
class BsOperator {
 public:
  BsOperator(const WaveguideConfig& config, const BsDiscretization& disc,
             const SpectralVariable& sv);
  ~BsOperator();
  BsOperator(BsOperator&&) noexcept;
  BsOperator& operator=(BsOperator&&) noexcept;

  int dimension() const;
  int components() const;
  int modes() const;
  int nodes() const;
  const SpectralVariable& spectral_variable() const;

  // y -> M y, the regular part (N + projected resolvent).
  Eigen::VectorXcd apply_regular(const Eigen::VectorXcd& y) const;
  // y -> (K) y; throws ThresholdSingularity at k = 0.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& y) const;
  // Rank-one part L y = coupling() * rank_one_vector() * functional(y).
  cplx coupling() const;
  const Eigen::VectorXcd& rank_one_vector() const;
  cplx functional(const Eigen::VectorXcd& y) const;

  // Dense matrix of K (with_singular) or M; intended for small grids.
  Eigen::MatrixXcd dense(bool with_singular = true) const;

  // Solves (I + M) z = rhs; throws ConvergenceFailure.
  Eigen::VectorXcd solve_shifted(const Eigen::VectorXcd& rhs, cplx shift,
                                 int* iterations = nullptr) const;

  // Spectral radius estimate of M by power iteration.
  double regular_norm_estimate(int iterations = 30) const;

  // Eigenvalue of K closest to `target` via the rank-one secular equation.
  cplx eigenvalue_near(cplx target, double tol = 1e-12) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Eigen::MatrixXcd assemble_bs_operator(const SpectralVariable& sv,
                                      const WaveguideConfig& config,
                                      const BsDiscretization& disc);

// The implicit function: n = 1 returns -(eps/2) q((I+M)^{-1} p),
// n = 2 returns (eps/(2 pi)) q((I+M)^{-1} p).
// Throws NeumannSeriesDivergence when the spectral radius estimate of M is
// at least 1 (if check_norm).
cplx G(cplx k, double epsilon, const WaveguideConfig& config,
       const BsDiscretization& disc, bool check_norm = true);

enum class Method { bs_root, direct, asymptotic };
std::string to_string(Method m);

struct SpectralResult {
  bool found = false;        // false: no eigenvalue below the threshold
  std::string verdict;       // "eigenvalue", "no-eigenvalue", ...
  cplx lambda;
  cplx k;
  double epsilon = 0.0;
  Method method = Method::bs_root;
  double residual = 0.0;
  int iterations = 0;
};

struct WeakCouplingOptions {
  double newton_tol = 1e-12;
  int max_iter = 50;
  double max_norm = 0.5;     // adaptive bound on the estimate of |M|
  double borderline_tol = 1e-8;
};

SpectralResult solve_weak_coupling(const WaveguideConfig& config,
                                   const BsDiscretization& disc,
                                   const WeakCouplingOptions& opts = {});

// Number of zeros of k - G(k, eps) inside |k - center| = radius.
int count_roots(const WaveguideConfig& config, const BsDiscretization& disc,
                cplx center, double radius, int samples = 64);

// Leading-order prediction of the eigenvalue.
cplx asymptotic_lambda(double epsilon, const WaveguideConfig& config);
// Leading-order root k0 of the implicit equation.
double asymptotic_k(double epsilon, const WaveguideConfig& config);

}  // namespace ptwg
