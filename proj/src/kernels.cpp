#include "ptwg/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "ptwg/bessel.hpp"
#include "ptwg/errors.hpp"

namespace ptwg {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

// Principal square root of -z with positive real part.
cplx sqrt_minus(cplx z) {
  if (z.imag() == 0.0 && z.real() >= 0.0)
    throw OnCutError("energy lies on the cut [0, inf)");
  return std::sqrt(-z);
}

// Decaying branch of sqrt(mu^2 - lambda) for a nonzero mode.
cplx mode_kappa(double mu_sq, cplx lambda) { return std::sqrt(mu_sq - lambda); }

cplx mode_green(int n, cplx kappa, double r) {
  return n == 1 ? green_1d(kappa, r) : green_2d(kappa, r);
}
}  // namespace

SpectralVariable SpectralVariable::from_k(int n, double mu0_sq, cplx k) {
  SpectralVariable sv;
  sv.n = n;
  sv.k = k;
  sv.mu0_sq = mu0_sq;
  if (n == 1) {
    sv.lambda = mu0_sq - k * k;
  } else if (n == 2) {
    if (k == 0.0) throw ThresholdSingularity("k = 0 has no energy for n = 2");
    sv.lambda = mu0_sq - std::exp(2.0 / k);
  } else {
    throw DomainError("spectral variable defined for n = 1, 2");
  }
  return sv;
}

SpectralVariable SpectralVariable::from_lambda(int n, double mu0_sq,
                                               cplx lambda) {
  SpectralVariable sv;
  sv.n = n;
  sv.lambda = lambda;
  sv.mu0_sq = mu0_sq;
  const cplx s = std::sqrt(mu0_sq - lambda);
  if (n == 1) {
    sv.k = s;
  } else if (n == 2) {
    if (s == 0.0) throw ThresholdSingularity("lambda at threshold");
    sv.k = 1.0 / std::log(s);
  } else {
    throw DomainError("spectral variable defined for n = 1, 2");
  }
  return sv;
}

cplx SpectralVariable::kappa0() const {
  if (n == 1) return k;
  return k == 0.0 ? cplx(0.0) : std::exp(1.0 / k);
}

bool SpectralVariable::physical() const {
  return n == 1 ? k.real() >= 0.0 : k.real() <= 0.0;
}

cplx free_resolvent_kernel(int n, cplx z, double r) {
  if (r < 0.0) throw DomainError("distance must be nonnegative");
  const cplx s = sqrt_minus(z);
  switch (n) {
    case 1:
      return std::exp(-s * r) / (2.0 * s);
    case 2:
      if (r == 0.0) throw SingularPoint("n = 2 kernel is singular at r = 0");
      return bessel_k(0, s * r) / (2.0 * pi);
    case 3:
      if (r == 0.0) throw SingularPoint("n = 3 kernel is singular at r = 0");
      return std::exp(-s * r) / (4.0 * pi * r);
    default:
      throw DomainError("free resolvent kernel defined for n = 1, 2, 3");
  }
}

cplx green_1d(cplx kappa, double r) {
  return std::exp(-kappa * r) / (2.0 * kappa);
}

cplx green_1d_dx(cplx kappa, double s) {
  if (s == 0.0) return 0.0;
  const double sg = s > 0.0 ? 1.0 : -1.0;
  return -sg * std::exp(-kappa * std::abs(s)) / 2.0;
}

cplx lattice_green_dirichlet(cplx mass, double h, int N, int i, int l) {
  const cplx c = 1.0 + mass * h * h / 2.0;
  cplx theta = std::log(c + std::sqrt(c - 1.0) * std::sqrt(c + 1.0));
  if (theta.real() < 0.0) theta = -theta;
  if (theta.real() < 1e-14) throw OnSpectrum("mass lies on the lattice spectrum");
  const int a = std::min(i, l), b = N - std::max(i, l);
  const cplx num = std::exp(theta * double(a + b - N - 1)) *
                   (1.0 - std::exp(-2.0 * theta * double(a))) *
                   (1.0 - std::exp(-2.0 * theta * double(b)));
  const cplx den = (1.0 - std::exp(-2.0 * theta)) * (1.0 - std::exp(-2.0 * theta * double(N)));
  return h * num / den;
}

cplx regular_1d(cplx k, double r) {
  const cplx z = k * r;
  if (std::abs(z) < 1e-4) {
    // -(r/2) (1 - z/2 + z^2/6 - z^3/24 + z^4/120)
    return -r / 2.0 *
           (1.0 + z * (-1.0 / 2 + z * (1.0 / 6 + z * (-1.0 / 24 + z / 120.0))));
  }
  return (std::exp(-z) - 1.0) / (2.0 * k);
}

cplx green_2d(cplx kappa, double r) {
  if (r == 0.0) throw SingularPoint("n = 2 kernel is singular at r = 0");
  if (kappa.imag() == 0.0) return bessel_k(0, kappa.real() * r) / (2.0 * pi);
  return bessel_k(0, kappa * r) / (2.0 * pi);
}

cplx green_2d_radial(cplx kappa, double r) {
  if (r == 0.0) throw SingularPoint("n = 2 kernel is singular at r = 0");
  const cplx z = kappa * r;
  if (std::abs(z) < 1e-8) return -1.0 / (2.0 * pi * r * r);
  const cplx k1 = kappa.imag() == 0.0 ? cplx(bessel_k(1, z.real()))
                                      : bessel_k(1, z);
  return -kappa * k1 / (2.0 * pi * r);
}

cplx regular_2d(cplx kappa, double r) {
  if (r == 0.0) throw SingularPoint("n = 2 kernel is singular at r = 0");
  if (kappa == 0.0) {
    constexpr double g = 0.57721566490153286061;
    return -(std::log(r / 2.0) + g) / (2.0 * pi);
  }
  return bessel_k0_plus_log(kappa, r) / (2.0 * pi);
}

cplx singular_kernel_L(const SpectralVariable& sv, double u, double u_prime,
                       const ModeSet& modes) {
  if (sv.k == 0.0) throw ThresholdSingularity("L diverges at k = 0");
  const cplx f = modes.psi(0, u) * std::conj(modes.phi(0, u_prime));
  if (sv.n == 1) return f / (2.0 * sv.k);
  return -f / (2.0 * pi * sv.k);
}

cplx regular_kernel_N(const SpectralVariable& sv, double r, double u,
                      double u_prime, const ModeSet& modes) {
  const cplx f = modes.psi(0, u) * std::conj(modes.phi(0, u_prime));
  if (sv.n == 1) return regular_1d(sv.k, r) * f;
  return regular_2d(sv.kappa0(), r) * f;
}

namespace {

// Bound on |psi_j(u) conj(phi_j(u'))| valid for every cosine mode with
// mu >= mu_min.
double mode_factor_bound(double alpha0, double d, double mu_min) {
  const double a2 = alpha0 * alpha0, m2 = mu_min * mu_min;
  return 2.0 * (m2 + a2) / ((m2 - a2) * d);
}

// Majorant of |sum over cosine modes m >= m_next| of the longitudinal kernel.
double cosine_tail(int n, double alpha0, double d, cplx lambda, double r,
                   int m_next) {
  if (r <= 0.0) return inf;
  const double step = pi / d;
  const double s = std::sqrt(std::max(lambda.real(), 0.0));
  const double mu_next = m_next * step;
  if (mu_next * mu_next <= std::abs(alpha0) * std::abs(alpha0) ||
      mu_next <= s)
    return inf;
  const double c = mode_factor_bound(alpha0, d, mu_next);
  const double a = mu_next - s;  // lower bound on Re kappa for the tail
  const double geo = std::exp(-a * r) / (1.0 - std::exp(-step * r));
  if (n == 1) return c * geo / (2.0 * a);
  // K0(x) <= sqrt(pi / (2x)) exp(-x)
  return c * std::sqrt(pi / (2.0 * a * r)) * geo / (2.0 * pi);
}

double tail_bound_after(const SpectralVariable& sv, const ModeSet& modes,
                        int J, double r) {
  int m_last = 0;
  bool alpha_in = false;
  for (int j = 0; j <= J; ++j) {
    if (modes[j].kind == ModeKind::alpha_mode)
      alpha_in = true;
    else
      m_last = static_cast<int>(std::lround(modes[j].mu * modes.d / pi));
  }
  double t = cosine_tail(sv.n, modes.alpha0, modes.d, sv.lambda, r, m_last + 1);
  if (!alpha_in) {
    if (r <= 0.0) return inf;
    const double a0 = modes.alpha0;
    const cplx kap = mode_kappa(a0 * a0, sv.lambda);
    // the alpha mode is bounded by |A| exp(-Re kappa r) / (2 Re kappa)
    const auto all = transversal_eigenvalues(a0, modes.d, J + 1);
    TransversalMode am = all.back();
    for (const auto& m : all)
      if (m.kind == ModeKind::alpha_mode) am = m;
    const double rk = kap.real();
    if (rk <= 0.0) return inf;
    const double g = sv.n == 1 ? std::exp(-rk * r) / (2.0 * rk)
                               : bessel_k(0, rk * r) / (2.0 * pi);
    t += std::abs(am.a_norm) * g;
  }
  return t;
}

cplx mode_term(const SpectralVariable& sv, const ModeSet& modes, int j,
               double r, double u, double u_prime) {
  const cplx kap = mode_kappa(modes[j].mu_sq, sv.lambda);
  return modes.psi(j, u) * mode_green(sv.n, kap, r) *
         std::conj(modes.phi(j, u_prime));
}

}  // namespace

KernelEval projected_resolvent_kernel(const SpectralVariable& sv, double r,
                                      double u, double u_prime,
                                      const ModeSet& modes, int J) {
  if (J < 1 || J >= modes.size())
    throw DomainError("projected kernel needs 1 <= J < number of modes");
  if (sv.n == 2 && r == 0.0)
    throw SingularPoint("n = 2 kernel is singular at r = 0");
  KernelEval out;
  out.value = 0.0;
  for (int j = 1; j <= J; ++j) out.value += mode_term(sv, modes, j, r, u, u_prime);
  out.tail_bound = tail_bound_after(sv, modes, J, r);
  return out;
}

KernelEval projected_resolvent_kernel_auto(const SpectralVariable& sv,
                                           double r, double u, double u_prime,
                                           double alpha0, double d,
                                           double rel_tol) {
  constexpr int j_cap = 10000;
  int J = 8;
  while (true) {
    const auto modes = ModeSet::make(alpha0, d, J + 1);
    auto ev = projected_resolvent_kernel(sv, r, u, u_prime, modes, J);
    if (ev.tail_bound <= rel_tol * std::abs(ev.value)) return ev;
    if (J >= j_cap)
      throw TailBoundFailure("tail bound above tolerance at J = 10^4");
    J = std::min(2 * J, j_cap);
  }
}

KernelEval mode_sum_resolvent_kernel(const SpectralVariable& sv, double r,
                                     double u, double u_prime,
                                     const ModeSet& modes, int J) {
  KernelEval out = projected_resolvent_kernel(sv, r, u, u_prime, modes, J);
  const cplx kap0 = sv.kappa0();
  const cplx f = modes.psi(0, u) * std::conj(modes.phi(0, u_prime));
  out.value += mode_green(sv.n, kap0, r) * f;
  return out;
}

double schur_holmgren_norm(const Eigen::MatrixXcd& kernel,
                           const std::vector<double>& row_weights,
                           const std::vector<double>& col_weights) {
  const Eigen::MatrixXd a = kernel.cwiseAbs();
  const Eigen::Map<const Eigen::VectorXd> wr(row_weights.data(),
                                             row_weights.size());
  const Eigen::Map<const Eigen::VectorXd> wc(col_weights.data(),
                                             col_weights.size());
  const double row_sup = (a * wc).maxCoeff();
  const double col_sup = (a.transpose() * wr).maxCoeff();
  return std::sqrt(row_sup * col_sup);
}

namespace {
double bessel_c1(double z) { return std::abs((bessel_k(0, z) + std::log(z)) * std::exp(-z)); }
double bessel_c2(double z) { return std::abs(bessel_k(1, z) - 1.0 / z); }
// K1 - z (K0 + K2) / 2 with K2 = K0 + 2 K1 / z
double bessel_c3(double z) {
  const auto [k0, k1] = bessel_k01(z);
  return std::abs(k1 - z * (2.0 * k0 + 2.0 * k1 / z) / 2.0);
}
}  // namespace

bool KernelBoundReport::pass() const {
  return regularized_ratio_max <= 1.0 && derivative_ratio_max <= 1.0 && zk1_max <= 1.0 &&
         c1_excess <= 1.0 + 1e-6 && c2_excess <= 1.0 + 1e-6 && c3_excess <= 1.0 + 1e-6;
}

KernelBoundReport kernel_bound_suite(int samples, unsigned seed) {
  KernelBoundReport r;
  for (int i = 0; i <= 40000; ++i) {
    const double z = 1e-6 * std::pow(6e7, i / 40000.0);
    r.c1 = std::max(r.c1, bessel_c1(z));
    r.c2 = std::max(r.c2, bessel_c2(z));
    r.c3 = std::max(r.c3, bessel_c3(z));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < samples; ++i) {
    // Re k >= 0 with modulus spread over several decades, r in (0, 50]
    const double mod = std::pow(10.0, -3.0 + 5.0 * unit(rng));
    const double arg = (unit(rng) - 0.5) * pi;
    const cplx k = std::polar(mod, arg);
    const double rr = 50.0 * unit(rng) + 1e-12;
    const cplx kr = k * rr;
    const cplx e = std::exp(-kr);
    const double reg = std::abs(kr) < 1e-8 ? 1.0 - std::abs(kr) / 2.0 : std::abs(e - 1.0) / std::abs(kr);
    r.regularized_ratio_max = std::max(r.regularized_ratio_max, reg);
    // (1 - e^{-w}(1 + w)) / (2 k^2) with w = kr; series for small w
    cplx num = std::abs(kr) < 1e-3 ? kr * kr / 2.0 - kr * kr * kr / 3.0 + kr * kr * kr * kr / 8.0
                                   : 1.0 - e * (1.0 + kr);
    r.derivative_ratio_max =
        std::max(r.derivative_ratio_max, std::abs(num / (2.0 * k * k)) / (rr * rr));
    const double z = std::pow(10.0, -6.0 + std::log10(60.0e6) * unit(rng));
    r.zk1_max = std::max(r.zk1_max, z * bessel_k(1, z));
    r.c1_excess = std::max(r.c1_excess, bessel_c1(z) / r.c1);
    r.c2_excess = std::max(r.c2_excess, bessel_c2(z) / r.c2);
    r.c3_excess = std::max(r.c3_excess, bessel_c3(z) / r.c3);
    ++r.samples;
  }
  return r;
}

}  // namespace ptwg
