#include "ptwg/direct.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>

#include "ptwg/errors.hpp"
#include "ptwg/kernels.hpp"

namespace ptwg {

namespace {
constexpr double pi = std::numbers::pi;
using SpMat = Eigen::SparseMatrix<cplx>;
using Triplet = Eigen::Triplet<cplx>;

double wu_factor(const DirectGrid& g, int m) { return (m == 0 || m == g.M) ? 0.5 : 1.0; }

double node_rel_weight(const DirectGrid& g, int flat) {
  const int m = flat % g.nu();
  const int ix = flat / g.nu();
  double w = wu_factor(g, m);
  if (g.n == 1) return w * g.wx[ix];
  return w * g.wx[ix / g.nx()] * g.wx[ix % g.nx()];
}

Point node_point(const DirectGrid& g, int ix) {
  if (g.n == 1) return {g.x[ix], 0.0};
  return {g.x[ix / g.nx()], g.x[ix % g.nx()]};
}

// Symmetrized second-difference matrix along one axis.
Eigen::MatrixXd axis_operator(int size, double h, bool half_ends) {
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(size, size);
  for (int i = 0; i < size; ++i) {
    T(i, i) = 2.0 / (h * h);
    if (i + 1 < size) T(i, i + 1) = T(i + 1, i) = -1.0 / (h * h);
  }
  if (half_ends && size > 1) {
    T(0, 1) = T(1, 0) = T(size - 1, size - 2) = T(size - 2, size - 1) =
        -std::sqrt(2.0) / (h * h);
  }
  return T;
}

// Transversal block with coupling a at both faces.
Eigen::MatrixXcd transversal_block(int M, double hu, double a) {
  Eigen::MatrixXcd T = axis_operator(M + 1, hu, true).cast<cplx>();
  T(0, 0) += cplx(0.0, -2.0 * a / hu);
  T(M, M) += cplx(0.0, 2.0 * a / hu);
  return T;
}
}  // namespace

int DirectGrid::size() const {
  return (n == 1 ? nx() : nx() * nx()) * nu();
}

double DirectGrid::weight(int flat) const {
  return node_rel_weight(*this, flat) * hu * std::pow(hx, n);
}

Eigen::VectorXcd DiscretizedHamiltonian::to_natural(const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd psi(v.size());
  for (int i = 0; i < v.size(); ++i) psi(i) = v(i) / std::sqrt(node_rel_weight(grid, i));
  return psi;
}

Eigen::VectorXcd DiscretizedHamiltonian::to_symmetric(const Eigen::VectorXcd& psi) const {
  Eigen::VectorXcd v(psi.size());
  for (int i = 0; i < psi.size(); ++i) v(i) = psi(i) * std::sqrt(node_rel_weight(grid, i));
  return v;
}

double DiscretizedHamiltonian::alpha_sup() const {
  const int nxn = grid.n == 1 ? grid.nx() : grid.nx() * grid.nx();
  double s = 0.0;
  for (int ix = 0; ix < nxn; ++ix)
    s = std::max(s, std::abs(config.alpha(node_point(grid, ix))));
  return s;
}

WaveguideConfig negated_coupling(const WaveguideConfig& config) {
  WaveguideConfig c = config;
  c.alpha0 = -config.alpha0;
  c.beta = config.beta.negated();
  return c;
}

DiscretizedHamiltonian assemble_hamiltonian(const WaveguideConfig& config, double L,
                                            double hx, double hu, EndBc end_bc) {
  config.validate();
  if (!(L > 0.0) || !(hx > 0.0) || !(hu > 0.0))
    throw GridError("L, h_x and h_u must be positive");
  const double cells_x = 2.0 * L / hx;
  const double cells_u = config.d / hu;
  if (std::abs(cells_x - std::round(cells_x)) > 1e-8 * cells_x)
    throw GridError("h_x must divide 2L");
  if (std::abs(cells_u - std::round(cells_u)) > 1e-8 * cells_u)
    throw GridError("h_u must divide d");
  DirectGrid g;
  g.n = config.n;
  g.L = L;
  g.end_bc = end_bc;
  const int Nx = static_cast<int>(std::lround(cells_x));
  g.M = static_cast<int>(std::lround(cells_u));
  g.hx = 2.0 * L / Nx;
  g.hu = config.d / g.M;
  if (Nx < 2 || g.M < 2) throw GridError("grid needs at least two cells per axis");
  const bool dir = end_bc == EndBc::dirichlet;
  for (int i = dir ? 1 : 0; i <= (dir ? Nx - 1 : Nx); ++i) {
    g.x.push_back(-L + i * g.hx);
    g.wx.push_back((!dir && (i == 0 || i == Nx)) ? 0.5 : 1.0);
  }
  const Eigen::MatrixXd Tx = axis_operator(g.nx(), g.hx, !dir);
  const int nu = g.nu();
  const int nxn = g.n == 1 ? g.nx() : g.nx() * g.nx();

  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(g.size()) * (3 + 2 * g.n));
  auto add_axis = [&](auto flat_of) {
    // flat_of(line, pos) maps a node along an x line to its x-node index
    const int lines = g.n == 1 ? 1 : g.nx();
    for (int line = 0; line < lines; ++line)
      for (int i = 0; i < g.nx(); ++i)
        for (int j = std::max(0, i - 1); j <= std::min(g.nx() - 1, i + 1); ++j)
          for (int m = 0; m < nu; ++m)
            trip.emplace_back(flat_of(line, i) * nu + m, flat_of(line, j) * nu + m, Tx(i, j));
  };
  if (g.n == 1) {
    add_axis([](int, int i) { return i; });
  } else {
    const int nx = g.nx();
    add_axis([nx](int line, int i) { return i * nx + line; });  // along x1
    add_axis([nx](int line, int i) { return line * nx + i; });  // along x2
  }
  for (int ix = 0; ix < nxn; ++ix) {
    const Eigen::MatrixXcd Tu = transversal_block(g.M, g.hu, config.alpha(node_point(g, ix)));
    for (int m = 0; m < nu; ++m)
      for (int q = std::max(0, m - 1); q <= std::min(nu - 1, m + 1); ++q)
        trip.emplace_back(ix * nu + m, ix * nu + q, Tu(m, q));
  }
  DiscretizedHamiltonian H;
  H.grid = g;
  H.config = config;
  H.matrix.resize(g.size(), g.size());
  H.matrix.setFromTriplets(trip.begin(), trip.end());
  H.matrix.makeCompressed();
  return H;
}

Eigen::VectorXi pt_permutation(const DirectGrid& grid) {
  Eigen::VectorXi p(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const int m = i % grid.nu();
    p(i) = i - m + (grid.M - m);
  }
  return p;
}

double discrete_threshold(double alpha0, double d, int M) {
  const double hu = d / M;
  const Eigen::MatrixXcd T = transversal_block(M, hu, alpha0);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(T, false);
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < T.rows(); ++i) lo = std::min(lo, es.eigenvalues()(i).real());
  return lo;
}

double band_edge(const DirectGrid& grid, double alpha0, double d) {
  double lx = 0.0;
  if (grid.end_bc == EndBc::dirichlet) {
    const int Nx = grid.nx() + 1;
    const double s = std::sin(pi / (2.0 * Nx));
    lx = 4.0 * s * s / (grid.hx * grid.hx);
  }
  return discrete_threshold(alpha0, d, grid.M) + grid.n * lx;
}

double default_truncation(const WaveguideConfig& config) {
  const double reach = config.beta.support_radius(1e-10);
  double L = std::max(12.0, 2.5 * reach);
  const double kp = std::abs(asymptotic_k(config.epsilon, config));
  if (config.n == 1 && kp > 0.0) L = std::max(L, 8.0 / kp);
  return std::ceil(L);
}

double resolution_floor(const DiscretizedHamiltonian& H) {
  double hnorm = 0.0;
  for (int c = 0; c < H.matrix.outerSize(); ++c)
    for (SpMat::InnerIterator it(H.matrix, c); it; ++it) hnorm = std::max(hnorm, std::abs(it.value()));
  const double L = H.grid.L;
  return std::max(16.0 / (L * L), 1e-12 * 4.0 * hnorm);
}

LevelResult bound_state_on_grid(const WaveguideConfig& config, double L, double hx,
                                int M, EndBc end_bc, int count, double localization) {
  const auto H = assemble_hamiltonian(config, L, hx, config.d / M, end_bc);
  LevelResult out;
  const double thr = discrete_threshold(config.alpha0, config.d, M);
  out.floor = resolution_floor(H);
  const double predicted =
      std::max(0.0, threshold(config.alpha0, config.d) - asymptotic_lambda(config.epsilon, config).real());
  if (predicted > 0.0 && predicted < out.floor)
    throw ResolutionLimit("predicted gap " + std::to_string(predicted) +
                          " below grid floor " + std::to_string(out.floor));
  const double lo = thr - 4.0 * std::max(predicted, out.floor);
  const double hi = thr - out.floor;
  const cplx center = predicted > 0.0 ? thr - predicted : thr - 2.0 * out.floor;
  const auto pairs = spectrum_window(H, center, count);
  for (const auto& p : pairs) {
    if (!(p.value.real() > lo && p.value.real() < hi)) continue;
    const Eigen::VectorXcd psi = H.to_natural(p.vector);
    double inner = 0.0, total = 0.0;
    for (int i = 0; i < psi.size(); ++i) {
      const int ix = i / H.grid.nu();
      const Point x = node_point(H.grid, ix);
      const double w = H.grid.weight(i) * std::norm(psi(i));
      total += w;
      if (std::hypot(x[0], x[1]) <= L / 2.0) inner += w;
    }
    const double part = inner / total;
    if (part < localization) continue;
    if (!out.found || part > out.participation) {
      out.found = true;
      out.lambda = p.value;
      out.gap = thr - p.value.real();
      out.residual = p.residual;
      out.participation = part;
    }
  }
  return out;
}

std::optional<SpectralResult> discrete_eigenvalue_below_threshold(
    const WaveguideConfig& config, const DirectNumerics& nm) {
  config.validate();
  if (std::abs(config.alpha0) >= pi / config.d)
    throw BorderlineCase("|alpha0| >= pi/d is outside the bound-state theory");
  if (nm.levels < 1 || nm.M < 2) throw ConfigError("direct numerics: levels >= 1, M >= 2");
  const double L = nm.L > 0.0 ? nm.L : default_truncation(config);
  std::vector<LevelResult> lev;
  for (int l = 0; l < nm.levels; ++l) {
    lev.push_back(bound_state_on_grid(config, L, nm.hx, nm.M << l, nm.end_bc, nm.count,
                                      nm.localization));
    if (!lev.back().found) return std::nullopt;
  }
  double gap = lev.back().gap;
  if (nm.levels >= 2) {
    const double g1 = lev[lev.size() - 2].gap, g2 = lev.back().gap;
    gap = (4.0 * g2 - g1) / 3.0;
  }
  SpectralResult r;
  r.found = true;
  r.verdict = "eigenvalue";
  r.method = Method::direct;
  r.epsilon = config.epsilon;
  const double mu0 = threshold(config.alpha0, config.d);
  r.lambda = cplx(mu0 - gap, lev.back().lambda.imag());
  r.k = std::sqrt(mu0 - r.lambda);
  for (const auto& x : lev) r.residual = std::max(r.residual, x.residual);
  r.iterations = nm.levels;
  return r;
}

Eigen::VectorXcd solve_shifted_system(const DiscretizedHamiltonian& H,
                                      const Eigen::VectorXcd& rhs, cplx lambda) {
  SpMat I(H.matrix.rows(), H.matrix.cols());
  I.setIdentity();
  SpMat B = H.matrix - lambda * I;
  B.makeCompressed();
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu(B);
  if (lu.info() != Eigen::Success) throw OnSpectrum("shifted matrix is singular");
  return lu.solve(rhs);
}

Eigen::VectorXcd apply_resolvent_modesum(const DiscretizedHamiltonian& H,
                                         const Eigen::VectorXcd& rhs, cplx lambda,
                                         int J, ModeSumKind kind) {
  const auto& g = H.grid;
  const auto& c = H.config;
  if (g.n != 1) throw ConfigError("mode-sum resolvent implemented for n = 1");
  if (g.end_bc != EndBc::dirichlet) throw ConfigError("mode-sum resolvent needs Dirichlet ends");
  if (c.epsilon != 0.0) throw ConfigError("mode-sum resolvent requires constant alpha");
  const int nu = g.nu(), nx = g.nx();
  if (J < 1 || J > nu) throw ConfigError("mode count must lie in 1..M+1");
  if (std::abs(lambda.imag()) < 1e-14 &&
      lambda.real() >= threshold(c.alpha0, c.d) - 1e-12)
    throw OnSpectrum("lambda lies on the essential spectrum");

  // transversal modes v_j (columns) and eigenvalues m_j, bilinear-normalized
  Eigen::MatrixXcd V(nu, J);
  Eigen::VectorXcd msq(J);
  if (kind == ModeSumKind::lattice) {
    const Eigen::MatrixXcd T = transversal_block(g.M, g.hu, c.alpha0);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(T);
    std::vector<int> idx(nu);
    for (int i = 0; i < nu; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return es.eigenvalues()(a).real() < es.eigenvalues()(b).real();
    });
    for (int j = 0; j < J; ++j) {
      Eigen::VectorXcd v = es.eigenvectors().col(idx[j]);
      v /= std::sqrt(cplx((v.transpose() * v).value()));
      V.col(j) = v;
      msq(j) = es.eigenvalues()(idx[j]);
    }
  } else {
    const auto modes = ModeSet::make(c.alpha0, c.d, J - 1);
    for (int j = 0; j < J; ++j) {
      cplx nrm = 0.0;
      for (int m = 0; m < nu; ++m) {
        const double u = m * g.hu;
        V(m, j) = modes.psi(j, u) * std::sqrt(wu_factor(g, m));
      }
      // bilinear normalization with the trapezoid weights equals A_j to O(h^2)
      nrm = modes[j].a_norm * g.hu;
      V.col(j) *= std::sqrt(nrm);
      msq(j) = modes[j].mu_sq;
    }
  }

  Eigen::Map<const Eigen::MatrixXcd> R(rhs.data(), nu, nx);  // column = x node
  const Eigen::MatrixXcd coef = V.transpose() * R;            // J x nx
  Eigen::MatrixXcd sol = Eigen::MatrixXcd::Zero(J, nx);
  const int Nx = nx + 1;
  for (int j = 0; j < J; ++j) {
    const cplx mass = msq(j) - lambda;
    Eigen::MatrixXcd K(nx, nx);
    for (int i = 0; i < nx; ++i)
      for (int l = 0; l < nx; ++l)
        K(i, l) = kind == ModeSumKind::lattice
                      ? lattice_green_dirichlet(mass, g.hx, Nx, i + 1, l + 1)
                      : green_1d(std::sqrt(mass), std::abs(g.x[i] - g.x[l]));
    sol.row(j) = (K * coef.row(j).transpose()).transpose() * g.hx;
  }
  Eigen::MatrixXcd out = V * sol;
  return Eigen::Map<Eigen::VectorXcd>(out.data(), out.size());
}

FormValues quadratic_forms(const DiscretizedHamiltonian& H, const Eigen::VectorXcd& psi) {
  const auto& g = H.grid;
  const int nu = g.nu(), nx = g.nx();
  const bool dir = g.end_bc == EndBc::dirichlet;
  const int nxn = g.n == 1 ? nx : nx * nx;
  FormValues f;
  auto xw = [&](int ix) { return g.n == 1 ? g.wx[ix] * g.hx : g.wx[ix / nx] * g.wx[ix % nx] * g.hx * g.hx; };
  for (int ix = 0; ix < nxn; ++ix) {
    const double a = H.config.alpha(node_point(g, ix));
    const double w = xw(ix);
    for (int m = 0; m < nu; ++m) f.norm_sq += w * g.hu * wu_factor(g, m) * std::norm(psi(ix * nu + m));
    for (int m = 0; m < g.M; ++m)
      f.h1 += w * std::norm(psi(ix * nu + m + 1) - psi(ix * nu + m)) / g.hu;
    f.h2 += w * a * (std::norm(psi(ix * nu + g.M)) - std::norm(psi(ix * nu)));
  }
  // longitudinal differences, including edges to Dirichlet end values
  auto line_energy = [&](auto node_of, double cross_w) {
    for (int m = 0; m < nu; ++m) {
      const double wm = g.hu * wu_factor(g, m) * cross_w;
      for (int i = 0; i + 1 < nx; ++i)
        f.h1 += wm * std::norm(psi(node_of(i + 1) * nu + m) - psi(node_of(i) * nu + m)) / g.hx;
      if (dir)
        f.h1 += wm * (std::norm(psi(node_of(0) * nu + m)) + std::norm(psi(node_of(nx - 1) * nu + m))) / g.hx;
    }
  };
  if (g.n == 1) {
    line_energy([](int i) { return i; }, 1.0);
  } else {
    for (int line = 0; line < nx; ++line) {
      const double cw = g.wx[line] * g.hx;
      line_energy([&](int i) { return i * nx + line; }, cw);
      line_energy([&](int i) { return line * nx + i; }, cw);
    }
  }
  return f;
}

bool OperatorFacts::all_pass() const {
  return pt_defect <= 1e-14 && adjoint_defect <= 1e-14 && transpose_defect <= 1e-14 &&
         parabola_excess <= parabola_slack && form_ratio_max <= 1.0;
}

OperatorFacts verify_operator_facts(const DiscretizedHamiltonian& H, unsigned seed,
                                    int random_fields, int window) {
  OperatorFacts r;
  const SpMat& A = H.matrix;
  auto max_abs = [](const SpMat& S) {
    double m = 0.0;
    for (int c = 0; c < S.outerSize(); ++c)
      for (SpMat::InnerIterator it(S, c); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
  };
  const Eigen::VectorXi p = pt_permutation(H.grid);
  std::vector<Triplet> trip;
  for (int c = 0; c < A.outerSize(); ++c)
    for (SpMat::InnerIterator it(A, c); it; ++it)
      trip.emplace_back(p(it.row()), p(it.col()), std::conj(it.value()));
  SpMat PAP(A.rows(), A.cols());
  PAP.setFromTriplets(trip.begin(), trip.end());
  r.pt_defect = max_abs(SpMat(PAP - A));
  const auto Hneg = assemble_hamiltonian(negated_coupling(H.config), H.grid.L, H.grid.hx,
                                         H.grid.hu, H.grid.end_bc);
  r.adjoint_defect = max_abs(SpMat(SpMat(A.adjoint()) - Hneg.matrix));
  r.transpose_defect = max_abs(SpMat(SpMat(A.transpose()) - A));

  const double amax = H.alpha_sup();
  const double h = std::max(H.grid.hx, H.grid.hu);
  r.parabola_slack = 2.0 * h * h;
  if (window > 0) {
    const double thr = threshold(H.config.alpha0, H.config.d);
    const auto pairs = spectrum_window(H, thr, window);
    r.parabola_excess = -std::numeric_limits<double>::infinity();
    for (const auto& e : pairs) {
      const double bound = 2.0 * amax * std::sqrt(std::max(e.value.real(), 0.0));
      r.parabola_excess = std::max(r.parabola_excess, std::abs(e.value.imag()) - bound);
      ++r.eigenvalues_checked;
    }
    if (r.eigenvalues_checked == 0) r.parabola_excess = 0.0;
  }
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  for (int t = 0; t < random_fields; ++t) {
    Eigen::VectorXcd psi(H.grid.size());
    for (int i = 0; i < psi.size(); ++i) psi(i) = cplx(nd(rng), nd(rng));
    const auto f = quadratic_forms(H, psi);
    const double denom = 2.0 * amax * std::sqrt(f.norm_sq) * std::sqrt(f.h1);
    const double ratio = denom > 0.0 ? std::abs(f.h2) / denom : 0.0;
    r.form_ratio_max = std::max(r.form_ratio_max, ratio);
    ++r.fields_checked;
  }
  return r;
}

void write_coo(const DiscretizedHamiltonian& H, std::ostream& os) {
  os << std::setprecision(17) << std::scientific;
  for (int c = 0; c < H.matrix.outerSize(); ++c)
    for (SpMat::InnerIterator it(H.matrix, c); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' '
         << it.value().imag() << '\n';
}

}  // namespace ptwg
