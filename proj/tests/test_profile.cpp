#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ptwg/config.hpp"
#include "ptwg/errors.hpp"
#include "ptwg/factorization.hpp"
#include "ptwg/profile.hpp"

using namespace ptwg;
using std::numbers::pi;

namespace {

std::vector<PerturbationProfile> battery() {
  return {PerturbationProfile::gaussian(1, 0.7, 1.3, {0.4, 0.0}),
          PerturbationProfile::gaussian_with_mean(1, -1.0, 1.0),
          PerturbationProfile::bump(1, -0.8, 2.0, {-0.3, 0.0}),
          PerturbationProfile::gaussian(2, 1.1, 0.9, {0.2, -0.5}),
          PerturbationProfile::gaussian_with_mean(2, -1.0, 1.0),
          PerturbationProfile::bump(2, 0.5, 1.5)};
}

}  // namespace

TEST_CASE("closed-form means agree with quadrature") {
  for (const auto& b : battery())
    CHECK(b.mean() == doctest::Approx(b.mean_by_quadrature()).epsilon(1e-9));
  CHECK(PerturbationProfile::gaussian_with_mean(1, -1.0, 1.0).mean() == doctest::Approx(-1.0));
  CHECK(PerturbationProfile::bump(1, 1.0, 1.0).mean() == doctest::Approx(32.0 / 35.0));
  CHECK(PerturbationProfile::bump(2, 1.0, 2.0).mean() == doctest::Approx(pi));
}

TEST_CASE("gradient and laplacian match finite differences") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double h = 1e-4;
  for (const auto& b : battery()) {
    for (int t = 0; t < 50; ++t) {
      Point x{u(rng), b.dimension() == 2 ? u(rng) : 0.0};
      const Point g = b.grad(x);
      double lap = 0.0;
      for (int a = 0; a < b.dimension(); ++a) {
        Point p = x, m = x;
        p[a] += h;
        m[a] -= h;
        CHECK(std::abs((b.eval(p) - b.eval(m)) / (2 * h) - g[a]) < 1e-6);
        lap += (b.eval(p) - 2 * b.eval(x) + b.eval(m)) / (h * h);
      }
      CHECK(std::abs(lap - b.hess_trace(x)) < 1e-4);
    }
  }
}

TEST_CASE("support radius, decay and negation") {
  const auto g = PerturbationProfile::gaussian(1, 1.0, 1.0);
  const double R = g.support_radius(1e-10);
  CHECK(std::abs(g.eval({R, 0})) < 1e-10);
  CHECK(std::abs(g.grad({R, 0})[0]) < 1e-10);
  CHECK(R < 6.0);
  const auto b = PerturbationProfile::bump(1, 1.0, 2.0);
  CHECK(b.support_radius() <= 2.0 + 1e-12);
  CHECK(b.eval({2.5, 0.0}) == 0.0);
  for (const auto& p : battery()) CHECK(p.satisfies_decay());
  const auto slow = PerturbationProfile::custom(
      1, [](const Point& x) { return 1.0 / (1.0 + x[0] * x[0]); },
      [](const Point& x) { return Point{-2 * x[0] / std::pow(1 + x[0] * x[0], 2), 0.0}; },
      [](const Point&) { return 0.0; }, pi, 1.0);
  CHECK_FALSE(slow.satisfies_decay());
  const auto n = g.negated();
  CHECK(n.eval({0.3, 0}) == -g.eval({0.3, 0}));
  CHECK(n.mean() == -g.mean());
  CHECK(g.decay_exponent() == 5.0);
  CHECK(PerturbationProfile::gaussian(2, 1, 1).decay_exponent() == 4.0);
}

TEST_CASE("config validation") {
  WaveguideConfig c;
  CHECK_NOTHROW(c.validate());
  c.n = 3;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.n = 2;  // profile still one-dimensional
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = WaveguideConfig{};
  c.alpha0 = 2.0;
  CHECK_THROWS_AS(c.validate(), SimpleSpectrumViolation);
  c = WaveguideConfig{};
  c.epsilon = -0.1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = WaveguideConfig{};
  CHECK(c.alpha({0.0, 0.0}) == doctest::Approx(0.5 - 0.1 / std::sqrt(pi)));
  CHECK(c.coupling_sign_product() == doctest::Approx(-0.5));
}

TEST_CASE("factorized perturbation reproduces Z") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-1.5, 1.5), uu(0.0, pi);
  for (const auto& b : battery()) {
    const int n = b.dimension();
    for (double eps : {0.0, 0.1, 0.37}) {
      const auto fac = factorize_perturbation(b, n, eps);
      CHECK(fac.size() == (n == 1 ? 5 : 7));
      for (int t = 0; t < 40; ++t) {
        const Point x{u(rng), n == 2 ? u(rng) : 0.0};
        const double uv = uu(rng);
        FieldJet jet{{u(rng), u(rng)}, {u(rng), u(rng)}, {n == 2 ? u(rng) : 0.0, 0.0}, {u(rng), u(rng)}};
        const cplx direct = apply_gauge_perturbation(b, n, eps, x, uv, jet);
        CHECK(std::abs(fac.apply(x, uv, jet) - direct) < 1e-12 * (1 + std::abs(direct)));
      }
    }
  }
  CHECK(signed_sqrt(-4.0) == -2.0);
  CHECK(signed_sqrt(9.0) == 3.0);
}

TEST_CASE("gauge transform identity converges at second order") {
  WaveguideConfig c;
  c.epsilon = 0.3;
  auto field = [](double x, double u) { return cplx(std::exp(-x * x) * std::cos(u), std::sin(x) * u * 0.1); };
  const double r1 = gauge_transform_check(c, field, 4.0, 0.1);
  const double r2 = gauge_transform_check(c, field, 4.0, 0.05);
  CHECK(r1 < 5e-2);
  CHECK(std::log2(r1 / r2) > 1.8);
  WaveguideConfig c2;
  c2.n = 2;
  c2.beta = PerturbationProfile::gaussian(2, 1, 1);
  CHECK_THROWS_AS(gauge_transform_check(c2, field, 4.0, 0.1), ConfigError);
}
