#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ptwg/bessel.hpp"
#include "ptwg/errors.hpp"
#include "ptwg/kernels.hpp"

using namespace ptwg;
using std::numbers::pi;

namespace {

// K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt, trapezoid in long double.
// The integrand is entire and decays doubly exponentially, so the rule is
// spectrally accurate.
std::complex<long double> bessel_oracle(int nu, std::complex<long double> z) {
  const long double h = 0.005L;
  std::complex<long double> s = 0.5L * std::exp(-z);
  for (int i = 1;; ++i) {
    const long double t = i * h;
    const long double c = std::cosh(t);
    if (z.real() * c > 800.0L) break;
    s += std::exp(-z * c) * std::cosh(nu * t);
  }
  return s * h;
}

}  // namespace

TEST_CASE("bessel K0 and K1 against the integral oracle") {
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double z = 1e-3 * std::pow(5e4, i / 49.0);
    for (int nu : {0, 1}) {
      const double ref = static_cast<double>(bessel_oracle(nu, z).real());
      worst = std::max(worst, std::abs(bessel_k(nu, z) - ref) / std::abs(ref));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("complex bessel against the integral oracle") {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> ur(0.01, 30.0), ua(-1.3, 1.3);
  for (int t = 0; t < 200; ++t) {
    const cplx z = std::polar(ur(rng), ua(rng));
    for (int nu : {0, 1}) {
      const auto ref = bessel_oracle(nu, {z.real(), z.imag()});
      const cplx r(static_cast<double>(ref.real()), static_cast<double>(ref.imag()));
      CHECK(std::abs(bessel_k(nu, z) - r) <= 1e-11 * std::abs(r));
    }
  }
  // real axis agreement
  CHECK(std::abs(bessel_k(0, cplx(1.5, 0.0)) - bessel_k(0, 1.5)) < 1e-15);
}

TEST_CASE("bessel identities and domain") {
  for (double z : {1e-3, 0.1, 1.0, 1.9, 2.1, 7.0, 30.0}) {
    const double h = 1e-6;
    const double dk0 = (bessel_k(0, z + h) - bessel_k(0, z - h)) / (2 * h);
    CHECK(std::abs(dk0 + bessel_k(1, z)) <= 1e-5 * std::max(1.0, bessel_k(1, z)));
    const auto kk = bessel_k01(z);
    CHECK(kk.k0 == doctest::Approx(bessel_k(0, z)).epsilon(1e-14));
    CHECK(kk.k1 == doctest::Approx(bessel_k(1, z)).epsilon(1e-14));
  }
  // K1(z) - 1/z stays bounded near 0
  for (double z : {1e-2, 1e-4, 1e-6}) CHECK(std::abs(bessel_k(1, z) - 1.0 / z) < 0.5);
  CHECK_THROWS_AS(bessel_k(0, 0.0), DomainError);
  CHECK_THROWS_AS(bessel_k(1, -1.0), DomainError);
  // K0(s r) + log s without cancellation
  const cplx s(1e-9, 2e-10);
  const cplx direct = bessel_k(0, s * 3.0) + std::log(s);
  CHECK(std::abs(bessel_k0_plus_log(s, 3.0) - direct) < 1e-6);
  CHECK(std::abs(bessel_k0_plus_log(cplx(0.7, 0.1), 2.0) -
                 (bessel_k(0, cplx(1.4, 0.2)) + std::log(cplx(0.7, 0.1)))) < 1e-13);
}

TEST_CASE("free resolvent kernel values and branch") {
  CHECK(free_resolvent_kernel(1, -1.0, 0.0).real() == doctest::Approx(0.5));
  CHECK(free_resolvent_kernel(1, -1.0, 1.0).real() == doctest::Approx(0.1839397205857212));
  CHECK(free_resolvent_kernel(2, -1.0, 1.0).real() == doctest::Approx(0.0670086).epsilon(1e-6));
  CHECK(free_resolvent_kernel(3, -1.0, 2.0).real() ==
        doctest::Approx(std::exp(-2.0) / (8.0 * pi)));
  CHECK_THROWS_AS(free_resolvent_kernel(2, -1.0, 0.0), SingularPoint);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-5.0, 5.0), ur(0.0, 4.0);
  for (int t = 0; t < 200; ++t) {
    const cplx z(u(rng), u(rng) == 0.0 ? 0.5 : u(rng));
    const double r = ur(rng) + 0.01;
    const cplx s = std::sqrt(-z);
    CHECK(std::abs(free_resolvent_kernel(1, z, r) - 0.5 * std::exp(-s * r) / s) < 1e-13);
    CHECK(std::abs(free_resolvent_kernel(1, std::conj(z), r) -
                   std::conj(free_resolvent_kernel(1, z, r))) < 1e-13);
    CHECK(std::abs(free_resolvent_kernel(2, std::conj(z), r) -
                   std::conj(free_resolvent_kernel(2, z, r))) < 1e-12);
  }
}

TEST_CASE("regularized kernels") {
  const auto ms = ModeSet::make(0.5, pi, 4);
  const auto sv = SpectralVariable::from_k(1, 0.25, 1.0);
  const cplx f = ms.psi(0, 0.3) * std::conj(ms.phi(0, 1.2));
  CHECK(std::abs(regular_kernel_N(sv, 0.0, 0.3, 1.2, ms)) == 0.0);
  CHECK(std::abs(regular_kernel_N(sv, 1.0, 0.3, 1.2, ms) - (std::exp(-1.0) - 1.0) / 2.0 * f) < 1e-14);
  CHECK(std::abs(singular_kernel_L(sv, 0.0, 0.0, ms) - std::conj(ms.phi(0, 0.0)) / 2.0) < 1e-14);
  const auto sv_half = SpectralVariable::from_k(1, 0.25, 0.5);
  CHECK(std::abs(singular_kernel_L(sv_half, 0.3, 1.2, ms) - 2.0 * singular_kernel_L(sv, 0.3, 1.2, ms)) < 1e-14);
  CHECK_THROWS_AS(singular_kernel_L(SpectralVariable::from_k(1, 0.25, 0.0), 0.0, 0.0, ms),
                  ThresholdSingularity);
  // n = 2: log sqrt(mu0^2 - lambda) = 1/k
  const auto sv2 = SpectralVariable::from_k(2, 0.25, -0.1);
  CHECK(std::abs(singular_kernel_L(sv2, 0.0, 0.0, ms) - 10.0 / (2 * pi) * std::conj(ms.phi(0, 0.0))) < 1e-12);

  // k -> 0 limits
  CHECK(std::abs(regular_1d(0.0, 2.0) + 1.0) < 1e-15);
  const double r = 0.7, euler = 0.5772156649015329;
  CHECK(std::abs(regular_2d(0.0, r) + (std::log(r) + euler - std::log(2.0)) / (2 * pi)) < 1e-12);

  // |value| <= r/2 for Re k >= 0 on random samples
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10000; ++t) {
    const cplx k = std::polar(std::pow(10.0, -3.0 + 5.0 * u(rng)), (u(rng) - 0.5) * pi);
    const double rr = 50.0 * u(rng);
    CHECK(std::abs(regular_1d(k, rr)) <= rr / 2.0 * (1.0 + 1e-12));
  }
}

TEST_CASE("kernel bound suite") {
  const auto rep = kernel_bound_suite(10000, 3);
  CHECK(rep.samples == 10000);
  CHECK(rep.pass());
  CHECK(rep.regularized_ratio_max <= 1.0);
  CHECK(rep.derivative_ratio_max <= 1.0);
  CHECK(rep.zk1_max <= 1.0);
  CHECK(rep.c2 > 0.3);
  CHECK(rep.c2 < 0.5);
}

TEST_CASE("projected kernel: tail bound and brute force") {
  const double a = 0.5, d = pi;
  const auto big = ModeSet::make(a, d, 10000);
  const auto sv = SpectralVariable::from_lambda(1, 0.25, -1.0);
  for (double r : {1.0, 2.5}) {
    const auto full = projected_resolvent_kernel(sv, r, 0.4, 2.0, big, 10000);
    double prev = std::numeric_limits<double>::infinity();
    for (int J : {2, 4, 8, 16}) {
      const auto part = projected_resolvent_kernel(sv, r, 0.4, 2.0, big, J);
      CHECK(std::abs(part.value - full.value) <= part.tail_bound + 1e-14);
      CHECK(part.tail_bound <= prev / 2.0);
      prev = part.tail_bound;
    }
  }
  // r = 0 has no rigorous pointwise bound
  CHECK(std::isinf(projected_resolvent_kernel(sv, 0.0, 0.4, 2.0, big, 8).tail_bound));
  const auto aut = projected_resolvent_kernel_auto(sv, 1.0, 0.4, 2.0, a, d);
  CHECK(aut.tail_bound <= 1e-10 * std::abs(aut.value));
  // finite at the threshold
  const auto thr = projected_resolvent_kernel(SpectralVariable::from_k(1, 0.25, 0.0), 1.0, 0.4, 2.0, big, 8);
  CHECK(std::isfinite(std::abs(thr.value)));
}

TEST_CASE("singular plus regular plus projected reproduces the mode sum") {
  const auto ms = ModeSet::make(0.5, pi, 12);
  for (int n : {1, 2}) {
    const auto sv = n == 1 ? SpectralVariable::from_k(1, 0.25, cplx(0.3, 0.05))
                           : SpectralVariable::from_k(2, 0.25, cplx(-0.4, 0.02));
    const double r = 0.8, u = 0.3, up = 2.2;
    const cplx split = singular_kernel_L(sv, u, up, ms) + regular_kernel_N(sv, r, u, up, ms) +
                       projected_resolvent_kernel(sv, r, u, up, ms, 12).value;
    const auto sum = mode_sum_resolvent_kernel(sv, r, u, up, ms, 12);
    CHECK(std::abs(split - sum.value) < 1e-10 * std::abs(sum.value));
    // independent sum psi_j R_j conj(phi_j)
    cplx brute = 0.0;
    for (int j = 0; j <= 12; ++j)
      brute += ms.psi(j, u) * free_resolvent_kernel(n, sv.lambda - ms[j].mu_sq, r) * std::conj(ms.phi(j, up));
    CHECK(std::abs(brute - sum.value) < 1e-10 * std::abs(brute));
  }
}

TEST_CASE("schur-holmgren bound") {
  const int N = 2001;
  const double X = 30.0, h = 2 * X / (N - 1);
  Eigen::MatrixXcd K(N, N);
  std::vector<double> w(N, h);
  w.front() = w.back() = h / 2;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) K(i, j) = std::exp(-std::abs(i - j) * h);
  CHECK(schur_holmgren_norm(K, w, w) == doctest::Approx(2.0).epsilon(1e-3));

  // bound dominates the largest singular value of a weighted discretization
  const int n = 200;
  const double hh = 16.0 / n;
  Eigen::MatrixXcd A(n, n);
  std::vector<double> ws(n, hh);
  const auto sv = SpectralVariable::from_k(1, 0.25, 0.3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = -8 + (i + 0.5) * hh, y = -8 + (j + 0.5) * hh;
      A(i, j) = std::exp(-x * x / 2) * regular_1d(sv.k, std::abs(x - y)) * std::exp(-y * y / 2);
    }
  const double smax = Eigen::JacobiSVD<Eigen::MatrixXcd>(A * hh).singularValues()(0);
  CHECK(schur_holmgren_norm(A, ws, ws) >= smax);
}

TEST_CASE("lattice green function inverts the Dirichlet difference operator") {
  const int N = 40;
  const double h = 0.1;
  for (cplx mass : {cplx(1.3, 0.0), cplx(0.2, 0.4), cplx(-0.5, 0.01)}) {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(N - 1, N - 1);
    for (int i = 0; i < N - 1; ++i) {
      A(i, i) = 2.0 / (h * h) + mass;
      if (i + 1 < N - 1) A(i, i + 1) = A(i + 1, i) = -1.0 / (h * h);
    }
    const Eigen::MatrixXcd inv = A.inverse();
    double err = 0.0;
    for (int i = 1; i < N; ++i)
      for (int l = 1; l < N; ++l)
        err = std::max(err, std::abs(h * lattice_green_dirichlet(mass, h, N, i, l) - inv(i - 1, l - 1)));
    CHECK(err < 1e-10 * inv.cwiseAbs().maxCoeff());
  }
  CHECK_THROWS_AS(lattice_green_dirichlet(-1.0, 0.1, 40, 3, 5), OnSpectrum);
}
