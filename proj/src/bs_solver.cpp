#include <cmath>
#include <numbers>

#include "ptwg/bs.hpp"
#include "ptwg/errors.hpp"

namespace ptwg {

namespace {
constexpr double pi = std::numbers::pi;

WaveguideConfig with_epsilon(const WaveguideConfig& c, double eps) {
  WaveguideConfig out = c;
  out.epsilon = eps;
  return out;
}

cplx lambda_of(const WaveguideConfig& c, cplx k) {
  return SpectralVariable::from_k(c.n, threshold(c.alpha0, c.d), k).lambda;
}

cplx g_value(const BsOperator& op, double eps, int n) {
  const Eigen::VectorXcd z = op.solve_shifted(op.rank_one_vector(), -1.0);
  const cplx q = op.functional(z);
  return n == 1 ? -(eps / 2.0) * q : (eps / (2.0 * pi)) * q;
}
}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::bs_root: return "bs-root";
    case Method::direct: return "direct";
    case Method::asymptotic: return "asymptotic";
  }
  return "?";
}

cplx G(cplx k, double epsilon, const WaveguideConfig& config,
       const BsDiscretization& disc, bool check_norm) {
  const WaveguideConfig c = with_epsilon(config, epsilon);
  const auto sv = SpectralVariable::from_k(c.n, threshold(c.alpha0, c.d), k);
  BsOperator op(c, disc, sv);
  if (check_norm) {
    const double rho = op.regular_norm_estimate();
    if (rho >= 1.0)
      throw NeumannSeriesDivergence("spectral radius estimate of M is " +
                                    std::to_string(rho));
  }
  return g_value(op, epsilon, c.n);
}

double asymptotic_k(double epsilon, const WaveguideConfig& config) {
  const double s = config.alpha0 * config.beta.mean();
  return config.n == 1 ? -epsilon * s : epsilon / pi * s;
}

cplx asymptotic_lambda(double epsilon, const WaveguideConfig& config) {
  const double mu0 = threshold(config.alpha0, config.d);
  const double s = config.alpha0 * config.beta.mean();
  if (config.n == 1) return mu0 - epsilon * epsilon * s * s;
  const double w = epsilon / pi * s;
  // only w < 0 predicts an eigenvalue; the gap underflows for small |w|
  if (!(w < 0.0)) return mu0;
  return mu0 - std::exp(2.0 / w);
}

SpectralResult solve_weak_coupling(const WaveguideConfig& config,
                                   const BsDiscretization& disc,
                                   const WeakCouplingOptions& opts) {
  config.validate();
  const double eps = config.epsilon;
  const double mu0 = threshold(config.alpha0, config.d);
  SpectralResult res;
  res.epsilon = eps;
  res.method = Method::bs_root;
  if (std::abs(config.alpha0) >= pi / config.d)
    throw BorderlineCase("|alpha0| >= pi/d: leading coefficient undetermined");
  if (eps == 0.0) {
    res.verdict = "no-eigenvalue";
    res.lambda = mu0;
    return res;
  }
  const double s = config.coupling_sign_product();
  if (std::abs(s) < opts.borderline_tol)
    throw BorderlineCase("alpha0 <beta> vanishes to tolerance");
  const bool expect_bound = s < 0.0;
  const int n = config.n;
  auto physical = [&](cplx k) { return n == 1 ? k.real() > 0.0 : k.real() < 0.0; };

  cplx k = asymptotic_k(eps, config);
  {
    const auto sv = SpectralVariable::from_k(n, mu0, k);
    BsOperator op(config, disc, sv);
    const double rho = op.regular_norm_estimate();
    if (rho >= opts.max_norm)
      throw NeumannSeriesDivergence("spectral radius estimate of M is " +
                                    std::to_string(rho) + " at the seed");
  }
  auto F = [&](cplx kk) {
    const auto sv = SpectralVariable::from_k(n, mu0, kk);
    BsOperator op(config, disc, sv);
    return kk - g_value(op, eps, n);
  };

  bool converged = false;
  cplx f = F(k);
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    if (std::abs(f) < opts.newton_tol) {
      converged = true;
      break;
    }
    const double step = 1e-6 * std::abs(k);
    const cplx fp = (F(k + step) - f) / step;
    const cplx knew = k - f / fp;
    if (expect_bound && !physical(knew))
      throw NoRoot("Newton iterate left the physical half-plane");
    k = knew;
    f = F(k);
  }
  if (!converged) {
    // damped fixed-point fallback k <- (k + G(k)) / 2
    for (int j = 0; j < opts.max_iter; ++j, ++it) {
      k = k - 0.5 * f;
      if (expect_bound && !physical(k))
        throw NoRoot("fixed-point iterate left the physical half-plane");
      f = F(k);
      if (std::abs(f) < opts.newton_tol) {
        converged = true;
        break;
      }
    }
  }
  if (!converged) throw NoRoot("implicit equation did not converge");

  res.k = k;
  res.residual = std::abs(f);
  res.iterations = it;
  res.lambda = lambda_of(config, k);
  if (physical(k)) {
    res.found = true;
    res.verdict = "eigenvalue";
  } else {
    res.verdict = "no-eigenvalue";
  }
  return res;
}

int count_roots(const WaveguideConfig& config, const BsDiscretization& disc,
                cplx center, double radius, int samples) {
  config.validate();
  const double mu0 = threshold(config.alpha0, config.d);
  auto F = [&](cplx kk) {
    const auto sv = SpectralVariable::from_k(config.n, mu0, kk);
    BsOperator op(config, disc, sv);
    return kk - g_value(op, config.epsilon, config.n);
  };
  double total = 0.0;
  cplx prev = F(center + radius);
  for (int m = 1; m <= samples; ++m) {
    const double th = 2.0 * pi * m / samples;
    const cplx cur = F(center + radius * std::polar(1.0, th));
    total += std::arg(cur / prev);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2.0 * pi)));
}

}  // namespace ptwg
