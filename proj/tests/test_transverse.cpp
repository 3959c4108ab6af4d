#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ptwg/errors.hpp"
#include "ptwg/quadrature.hpp"
#include "ptwg/transverse.hpp"

using namespace ptwg;
using std::numbers::pi;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const auto q = gauss_legendre(7, -1.0, 2.0);
  for (int p = 0; p <= 13; ++p) {
    double s = 0.0;
    for (int i = 0; i < q.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], p);
    const double exact = (std::pow(2.0, p + 1) - std::pow(-1.0, p + 1)) / (p + 1);
    CHECK(s == doctest::Approx(exact).epsilon(1e-13));
  }
  const auto t = trapezoid(10, 0.0, 1.0);
  CHECK(t.size() == 11);
  CHECK(t.weights.front() == doctest::Approx(0.05));
}

TEST_CASE("eigenvalues below and above pi/d") {
  const auto m = transversal_eigenvalues(0.5, pi, 5);
  REQUIRE(m.size() == 6);
  CHECK(m[0].kind == ModeKind::alpha_mode);
  CHECK(m[0].mu_sq == 0.25);
  for (int j = 1; j <= 5; ++j) CHECK(m[j].mu_sq == doctest::Approx(j * j).epsilon(1e-15));
  CHECK(threshold(0.5, pi) == 0.25);

  // alpha mode moves between the cosine modes
  const auto m2 = transversal_eigenvalues(1.5, pi, 3);
  CHECK(m2[0].kind == ModeKind::cosine_mode);
  CHECK(m2[0].mu_sq == doctest::Approx(1.0));
  CHECK(m2[1].kind == ModeKind::alpha_mode);
  CHECK(m2[1].mu_sq == doctest::Approx(2.25));
  CHECK(m2[2].mu_sq == doctest::Approx(4.0));
  CHECK(threshold(1.5, pi) == doctest::Approx(1.0));
}

TEST_CASE("simple spectrum violation") {
  CHECK_THROWS_AS(check_simple_spectrum(2.0, pi), SimpleSpectrumViolation);
  CHECK_THROWS_AS(transversal_eigenvalues(1.0, pi, 4), SimpleSpectrumViolation);
  CHECK_NOTHROW(check_simple_spectrum(0.5, pi));
  CHECK_NOTHROW(check_simple_spectrum(0.0, pi));
}

TEST_CASE("modes solve the Robin problem") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ua(0.05, 2.9);
  for (int trial = 0; trial < 20; ++trial) {
    double a = ua(rng);
    if (std::abs(a - std::round(a)) < 0.05) a += 0.1;
    const double d = pi;
    const auto ms = ModeSet::make(a, d, 6);
    for (int j = 0; j < ms.size(); ++j) {
      const cplx i(0.0, 1.0);
      CHECK(std::abs(ms.dpsi(j, 0.0) + i * a * ms.psi(j, 0.0)) < 1e-12 * (1 + ms[j].mu));
      CHECK(std::abs(ms.dpsi(j, d) + i * a * ms.psi(j, d)) < 1e-12 * (1 + ms[j].mu));
      // -psi'' = mu^2 psi by a centred difference
      const double u = 1.1, h = 1e-4;
      const cplx second = (ms.psi(j, u + h) - 2.0 * ms.psi(j, u) + ms.psi(j, u - h)) / (h * h);
      CHECK(std::abs(-second - ms[j].mu_sq * ms.psi(j, u)) < 1e-5 * (1 + ms[j].mu_sq));
    }
  }
}

TEST_CASE("biorthonormality against an independent trapezoid oracle") {
  const double a = 0.5, d = pi;
  const auto ms = ModeSet::make(a, d, 20);
  const auto B = biorthonormality_matrix(a, d, 20);
  const double dev = (B - Eigen::MatrixXcd::Identity(21, 21)).cwiseAbs().maxCoeff();
  CHECK(dev < 1e-10);

  // (phi_j, psi_k) = A_j int psi_j psi_k du by the composite trapezoid rule
  const int cells = 20000;
  const double h = d / cells;
  for (int j : {0, 3, 20})
    for (int k : {0, 1, 20}) {
      cplx s = 0.0;
      for (int c = 0; c <= cells; ++c) {
        const double w = (c == 0 || c == cells) ? 0.5 : 1.0;
        s += w * std::conj(ms.phi(j, c * h)) * ms.psi(k, c * h);
      }
      s *= h;
      CHECK(std::abs(s - (j == k ? 1.0 : 0.0)) < 1e-7);
      CHECK(std::abs(s - B(j, k)) < 1e-7);
    }
}

TEST_CASE("alpha mode normalization near alpha0 = 0") {
  const double d = pi;
  const auto m0 = transversal_eigenvalues(0.0, d, 2);
  CHECK(m0[0].mu_sq == 0.0);
  CHECK(std::abs(m0[0].a_norm - 1.0 / d) < 1e-15);
  // the series branch and the closed form agree across the switch
  const double below = 0.5 * kAlphaLimitRel * pi / d, above = 2.0 * kAlphaLimitRel * pi / d;
  const auto mb = transversal_eigenvalues(below, d, 1), ma = transversal_eigenvalues(above, d, 1);
  const cplx slope = (ma[0].a_norm - mb[0].a_norm) / (above - below);
  CHECK(std::abs(slope - cplx(0.0, 1.0)) < 1e-3);  // dA/dalpha0 = i at 0
  const auto B = biorthonormality_matrix(0.0, d, 10);
  CHECK((B - Eigen::MatrixXcd::Identity(11, 11)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("projection requires the Gauss-Legendre grid") {
  const auto ms = ModeSet::make(0.5, pi, 3);
  const int order = 24;
  const auto q = gauss_legendre(order, 0.0, pi);
  Eigen::MatrixXcd field(2, order);
  for (int c = 0; c < order; ++c) {
    field(0, c) = ms.psi(2, q.nodes[c]);
    field(1, c) = 3.0 * ms.psi(0, q.nodes[c]);
  }
  const auto p2 = project_mode(field, q.nodes, ms[2], 0.5, pi, order);
  CHECK(std::abs(p2(0) - 1.0) < 1e-12);
  CHECK(std::abs(p2(1)) < 1e-12);
  const auto p0 = project_mode(field, q.nodes, ms[0], 0.5, pi, order);
  CHECK(std::abs(p0(1) - 3.0) < 1e-12);

  std::vector<double> shifted = q.nodes;
  shifted[3] += 1e-3;
  CHECK_THROWS_AS(project_mode(field, shifted, ms[2], 0.5, pi, order), GridMismatch);
}
