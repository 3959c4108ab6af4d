#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <ostream>
#include <vector>

#include "ptwg/bs.hpp"
#include "ptwg/config.hpp"

namespace ptwg {

enum class EndBc { dirichlet, neumann };

// Tensor grid: longitudinal nodes (per axis) times u-nodes m h_u, m = 0..M.
struct DirectGrid {
  int n = 1;
  double L = 0.0, hx = 0.0, hu = 0.0;
  EndBc end_bc = EndBc::dirichlet;
  std::vector<double> x;    // longitudinal nodes along one axis
  std::vector<double> wx;   // trapezoid factors along one axis (1 or 1/2)
  int M = 0;                // u cells
  int nx() const { return static_cast<int>(x.size()); }
  int nu() const { return M + 1; }
  int size() const;
  // flat index of (ix1[, ix2], m); u index fastest
  int index(int ix, int m) const { return ix * nu() + m; }
  int index(int ix1, int ix2, int m) const { return (ix1 * nx() + ix2) * nu() + m; }
  double weight(int flat) const;  // quadrature weight of a node
};

// Symmetrized finite-difference H_alpha: the unknowns are W^{1/2} Psi with W
// the trapezoid weights, so the matrix is complex symmetric.
struct DiscretizedHamiltonian {
  Eigen::SparseMatrix<cplx> matrix;
  DirectGrid grid;
  WaveguideConfig config;

  // Natural grid values Psi from symmetrized unknowns, and back.
  Eigen::VectorXcd to_natural(const Eigen::VectorXcd& v) const;
  Eigen::VectorXcd to_symmetric(const Eigen::VectorXcd& psi) const;
  double alpha_sup() const;
};

DiscretizedHamiltonian assemble_hamiltonian(const WaveguideConfig& config,
                                            double L, double hx, double hu,
                                            EndBc end_bc = EndBc::dirichlet);

// Same problem with alpha replaced by -alpha.
WaveguideConfig negated_coupling(const WaveguideConfig& config);

// Reflection u -> d - u on the grid (permutation of unknowns).
Eigen::VectorXi pt_permutation(const DirectGrid& grid);

struct EigenPair {
  cplx value;
  Eigen::VectorXcd vector;  // symmetrized unknowns
  double residual = 0.0;    // |(H - value) v| / |v|
};

struct WindowOptions {
  double residual_tol = 1e-10;  // relative to the max row sum of H
  int dense_limit = 800;  // dense eigensolver below this many unknowns
  int max_restarts = 40;
};

// `count` eigenpairs nearest `center`, sorted by distance.
std::vector<EigenPair> spectrum_window(const DiscretizedHamiltonian& H,
                                       cplx center, int count,
                                       const WindowOptions& opts = {});

// Lowest eigenvalue of the discrete transversal operator (exact) and the
// bottom of the truncated band above it.
double discrete_threshold(double alpha0, double d, int M);
double band_edge(const DirectGrid& grid, double alpha0, double d);

struct DirectNumerics {
  double L = 0.0;       // 0 selects max(12 width, 8 / k_pred, 12)
  double hx = 0.1;
  int M = 20;           // u cells on the coarse level
  int levels = 2;       // 2: Richardson extrapolation over M and 2M
  EndBc end_bc = EndBc::dirichlet;
  int count = 4;
  double localization = 0.99;
};

double default_truncation(const WaveguideConfig& config);
// Smallest gap the grid can resolve.
double resolution_floor(const DiscretizedHamiltonian& H);

// One grid level: gap measured from the discrete threshold.
struct LevelResult {
  bool found = false;
  cplx lambda;      // eigenvalue of the discrete operator
  double gap = 0.0; // discrete threshold - Re lambda
  double residual = 0.0;
  double floor = 0.0;
  double participation = 0.0;
};
LevelResult bound_state_on_grid(const WaveguideConfig& config, double L,
                                double hx, int M, EndBc end_bc, int count,
                                double localization);

std::optional<SpectralResult> discrete_eigenvalue_below_threshold(
    const WaveguideConfig& config, const DirectNumerics& numerics = {});

enum class ModeSumKind { lattice, continuum };

// (H_alpha0 - lambda)^{-1} rhs by the transversal mode sum with J modes.
// rhs and result are symmetrized unknowns of H's grid.
Eigen::VectorXcd apply_resolvent_modesum(const DiscretizedHamiltonian& H,
                                         const Eigen::VectorXcd& rhs,
                                         cplx lambda, int J,
                                         ModeSumKind kind = ModeSumKind::lattice);

// Direct sparse solve of (H - lambda) x = rhs.
Eigen::VectorXcd solve_shifted_system(const DiscretizedHamiltonian& H,
                                      const Eigen::VectorXcd& rhs, cplx lambda);

// Quadratic forms of a natural grid field: h1 (Dirichlet form), h2
// (boundary term) and the squared norm.
struct FormValues {
  double h1 = 0.0, h2 = 0.0, norm_sq = 0.0;
};
FormValues quadratic_forms(const DiscretizedHamiltonian& H,
                           const Eigen::VectorXcd& psi_natural);

struct OperatorFacts {
  double pt_defect = 0.0;         // max |P conj(H) P - H|
  double adjoint_defect = 0.0;    // max |H^* - H(-alpha)|
  double transpose_defect = 0.0;  // max |H^T - H|
  double parabola_excess = 0.0;   // max over eigenvalues of |Im z| - bound
  double parabola_slack = 0.0;
  double form_ratio_max = 0.0;    // max |h2| / (2 |alpha| |Psi| sqrt(h1))
  int eigenvalues_checked = 0;
  int fields_checked = 0;
  bool all_pass() const;
};

OperatorFacts verify_operator_facts(const DiscretizedHamiltonian& H,
                                    unsigned seed = 1, int random_fields = 100,
                                    int window = 12);

// Coordinate text dump: "row col re im" per nonzero.
void write_coo(const DiscretizedHamiltonian& H, std::ostream& os);

}  // namespace ptwg
