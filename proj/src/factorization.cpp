#include "ptwg/factorization.hpp"

#include <cmath>
#include <vector>

#include "ptwg/errors.hpp"

namespace ptwg {

namespace {
constexpr cplx I(0.0, 1.0);
}

double signed_sqrt(double f) {
  return f > 0.0 ? std::sqrt(f) : (f < 0.0 ? -std::sqrt(-f) : 0.0);
}

FactorizedPerturbation factorize_perturbation(const PerturbationProfile& beta,
                                              int n, double epsilon) {
  if (n != 1 && n != 2) throw ConfigError("factorization defined for n = 1, 2");
  if (beta.dimension() != n)
    throw ConfigError("profile dimension differs from n");
  FactorizedPerturbation fp;
  fp.n = n;
  fp.epsilon = epsilon;
  auto b = beta;  // shared copy captured by the factor closures

  for (int l = 0; l < n; ++l) {
    FactorPair p;
    p.label = "dx" + std::to_string(l + 1);
    p.coeff = 2.0 * I;
    p.u_power = 1;
    p.derivative = l == 0 ? FactorDerivative::x1 : FactorDerivative::x2;
    p.left = [b, l](const Point& x) { return signed_sqrt(b.grad(x)[l]); };
    p.right = [b, l](const Point& x) { return std::sqrt(std::abs(b.grad(x)[l])); };
    fp.pairs.push_back(p);
  }
  {
    FactorPair p;
    p.label = "du";
    p.coeff = 2.0 * I;
    p.derivative = FactorDerivative::u;
    p.left = [b](const Point& x) { return signed_sqrt(b.eval(x)); };
    p.right = [b](const Point& x) { return std::sqrt(std::abs(b.eval(x))); };
    fp.pairs.push_back(p);
  }
  {
    FactorPair p;
    p.label = "lap";
    p.coeff = I;
    p.u_power = 1;
    p.left = [b](const Point& x) { return signed_sqrt(b.hess_trace(x)); };
    p.right = [b](const Point& x) { return std::sqrt(std::abs(b.hess_trace(x))); };
    fp.pairs.push_back(p);
  }
  {
    FactorPair p;
    p.label = "beta";
    p.coeff = epsilon;
    p.second_order = true;
    p.left = [b](const Point& x) { return b.eval(x); };
    p.right = p.left;
    fp.pairs.push_back(p);
  }
  for (int l = 0; l < n; ++l) {
    FactorPair p;
    p.label = "grad" + std::to_string(l + 1);
    p.coeff = epsilon;
    p.u_power = 2;
    p.second_order = true;
    p.left = [b, l](const Point& x) { return b.grad(x)[l]; };
    p.right = p.left;
    fp.pairs.push_back(p);
  }
  return fp;
}

cplx FactorizedPerturbation::apply(const Point& x, double u,
                                   const FieldJet& jet) const {
  cplx total = 0.0;
  for (const auto& p : pairs) {
    cplx bpsi;
    switch (p.derivative) {
      case FactorDerivative::none: bpsi = jet.value; break;
      case FactorDerivative::x1: bpsi = jet.dx1; break;
      case FactorDerivative::x2: bpsi = jet.dx2; break;
      case FactorDerivative::u: bpsi = jet.du; break;
    }
    total += p.a(x) * std::pow(u, p.u_power) * p.b(x) * bpsi;
  }
  return total;
}

cplx apply_gauge_perturbation(const PerturbationProfile& beta, int n,
                              double epsilon, const Point& x, double u,
                              const FieldJet& jet) {
  const double bv = beta.eval(x);
  const Point g = beta.grad(x);
  double g2 = g[0] * g[0];
  cplx grad_dot = g[0] * jet.dx1;
  if (n == 2) {
    g2 += g[1] * g[1];
    grad_dot += g[1] * jet.dx2;
  }
  return 2.0 * I * u * grad_dot + 2.0 * I * bv * jet.du +
         I * u * beta.hess_trace(x) * jet.value +
         epsilon * (bv * bv + u * u * g2) * jet.value;
}

double gauge_transform_check(const WaveguideConfig& config,
                             const std::function<cplx(double, double)>& field,
                             double half_length, double h) {
  if (config.n != 1)
    throw ConfigError("gauge_transform_check is implemented for n = 1");
  const int nx = static_cast<int>(std::lround(2.0 * half_length / h));
  const int nu = static_cast<int>(std::lround(config.d / h));
  const double hu = config.d / nu;
  const double eps = config.epsilon;
  const auto& beta = config.beta;

  std::vector<cplx> psi((nx + 1) * (nu + 1)), vfield(psi.size());
  auto at = [&](int i, int m) { return i * (nu + 1) + m; };
  for (int i = 0; i <= nx; ++i) {
    const double x = -half_length + i * h;
    const double bx = beta.eval({x, 0.0});
    for (int m = 0; m <= nu; ++m) {
      const double u = m * hu;
      psi[at(i, m)] = field(x, u);
      vfield[at(i, m)] = std::exp(-I * eps * bx * u) * psi[at(i, m)];
    }
  }
  auto neg_lap = [&](const std::vector<cplx>& f, int i, int m) {
    return (2.0 * f[at(i, m)] - f[at(i - 1, m)] - f[at(i + 1, m)]) / (h * h) +
           (2.0 * f[at(i, m)] - f[at(i, m - 1)] - f[at(i, m + 1)]) / (hu * hu);
  };
  double sum = 0.0;
  for (int i = 1; i < nx; ++i) {
    const double x = -half_length + i * h;
    const double bx = beta.eval({x, 0.0});
    for (int m = 1; m < nu; ++m) {
      const double u = m * hu;
      const cplx lhs = std::exp(I * eps * bx * u) * neg_lap(vfield, i, m);
      FieldJet jet;
      jet.value = psi[at(i, m)];
      jet.dx1 = (psi[at(i + 1, m)] - psi[at(i - 1, m)]) / (2.0 * h);
      jet.dx2 = 0.0;
      jet.du = (psi[at(i, m + 1)] - psi[at(i, m - 1)]) / (2.0 * hu);
      const cplx rhs = neg_lap(psi, i, m) +
                       eps * apply_gauge_perturbation(beta, 1, eps, {x, 0.0}, u, jet);
      sum += std::norm(lhs - rhs) * h * hu;
    }
  }
  return std::sqrt(sum);
}

}  // namespace ptwg
