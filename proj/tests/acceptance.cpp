// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ptwg/bessel.hpp"
#include "ptwg/bs.hpp"
#include "ptwg/direct.hpp"
#include "ptwg/errors.hpp"
#include "ptwg/kernels.hpp"
#include "ptwg/transverse.hpp"

using namespace ptwg;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = dt < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s criterion %d (%s): %s [%.2f s, limit %.0f s%s]\n", pass ? "PASS" : "FAIL", id,
              title, o.detail.c_str(), dt, limit_s, in_time ? "" : ", exceeded");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt in long double.
long double bessel_oracle(int nu, long double z) {
  const long double h = 0.0025L;
  long double s = 0.5L * std::exp(-z);
  for (int i = 1;; ++i) {
    const long double c = std::cosh(i * h);
    if (z * c > 800.0L) break;
    s += std::exp(-z * c) * std::cosh(nu * i * h);
  }
  return s * h;
}

WaveguideConfig demo(double eps) {
  WaveguideConfig c;
  c.epsilon = eps;
  return c;
}

}  // namespace

int main() {
  run(1, "transversal eigensystem", 1.0, [] {
    const auto m = transversal_eigenvalues(0.5, pi, 20);
    const Eigen::MatrixXcd B = biorthonormality_matrix(0.5, pi, 20);
    const double dev = (B - Eigen::MatrixXcd::Identity(21, 21)).cwiseAbs().maxCoeff();
    const bool ok = dev < 1e-10 && m[0].mu_sq == 0.25 && threshold(0.5, pi) == 0.25;
    return Outcome{ok, fmt("max |B - I| = %.2e", dev) + fmt(", mu0^2 = %.17g", m[0].mu_sq)};
  });

  run(2, "Bessel K0, K1", 1.0, [] {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double z = 1e-3 * std::pow(5e4, i / 49.0);
      for (int nu : {0, 1}) {
        const double ref = static_cast<double>(bessel_oracle(nu, z));
        worst = std::max(worst, std::abs(bessel_k(nu, z) - ref) / std::abs(ref));
      }
    }
    return Outcome{worst <= 1e-12, fmt("max relative error %.2e over 50 points in [1e-3, 50]", worst)};
  });

  run(3, "resolvent equivalence", 30.0, [] {
    WaveguideConfig c = demo(0.0);
    const auto H = assemble_hamiltonian(c, 20.0, 0.1, pi / 40);
    std::mt19937 rng(2024);
    std::normal_distribution<double> nd;
    Eigen::VectorXcd b(H.grid.size());
    for (auto& z : b) z = cplx(nd(rng), nd(rng));
    const Eigen::VectorXcd x = solve_shifted_system(H, b, -1.0);
    const Eigen::VectorXcd y = apply_resolvent_modesum(H, b, -1.0, H.grid.nu());
    const double rel = (x - y).norm() / x.norm();
    return Outcome{rel <= 1e-6, fmt("relative difference %.2e", rel) +
                                    " on grid " + std::to_string(H.grid.nx()) + "x" +
                                    std::to_string(H.grid.nu())};
  });

  cplx lambda_01;  // direct eigenvalue at eps = 0.1, reused by criterion 5
  run(4, "weak-coupling asymptotics", 300.0, [&] {
    const std::vector<double> eps{0.2, 0.1, 0.05};
    std::vector<double> ratio, corr;
    std::string detail = "gap/eps^2 =";
    for (double e : eps) {
      const auto r = discrete_eigenvalue_below_threshold(demo(e));
      if (!r) return Outcome{false, fmt("no eigenvalue at eps = %g", e)};
      if (e == 0.1) lambda_01 = r->lambda;
      const double gap = 0.25 - r->lambda.real();
      ratio.push_back(gap / (e * e));
      corr.push_back(std::abs(r->lambda.real() - asymptotic_lambda(e, demo(e)).real()));
      detail += fmt(" %.6f", ratio.back());
    }
    std::vector<double> dev;
    for (double q : ratio) dev.push_back(std::abs(q - 0.25) / 0.25);
    // least-squares slope of log corr against log eps
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < eps.size(); ++i) {
      const double lx = std::log(eps[i]), ly = std::log(corr[i]);
      sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    const double n = static_cast<double>(eps.size());
    const double order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const bool ok = dev[0] <= 0.25 && dev[1] < dev[0] && dev[2] < dev[1] && order >= 2.7;
    return Outcome{ok, detail + fmt(", deviation at 0.2 = %.1f%%", 100 * dev[0]) +
                           fmt(", fitted correction order %.2f", order)};
  });

  run(5, "Birman-Schwinger equivalence", 120.0, [&] {
    if (lambda_01 == cplx(0.0)) return Outcome{false, "criterion 4 produced no eigenvalue"};
    const WaveguideConfig c = demo(0.1);
    auto eig_dev = [&](double h, cplx lambda) {
      BsDiscretization d = BsDiscretization::default_for(1);
      d.h = h;
      const BsOperator K(c, d, SpectralVariable::from_lambda(1, 0.25, lambda));
      return K.eigenvalue_near(-1.0);
    };
    const double h_default = BsDiscretization::default_for(1).h;
    const std::vector<double> hs{0.2, 0.1, h_default};
    std::vector<double> dev;
    for (double h : hs) dev.push_back(std::abs(eig_dev(h, lambda_01) + 1.0));
    // oracle floor: sensitivity of the eigenvalue to lambda times the change
    // of the direct eigenvalue under x refinement
    DirectNumerics fine;
    fine.hx = 0.05;
    const auto rf = discrete_eigenvalue_below_threshold(c, fine);
    if (!rf) return Outcome{false, "refined direct solve found no eigenvalue"};
    const double dl = 1e-7;
    const cplx slope = (eig_dev(h_default, lambda_01 + dl) - eig_dev(h_default, lambda_01 - dl)) / (2 * dl);
    const double floor = std::abs(slope) * std::abs(rf->lambda - lambda_01);
    bool improving = true;
    for (size_t i = 1; i < dev.size(); ++i) improving = improving && (dev[i] < dev[i - 1] || dev[i] <= floor);
    const bool ok = dev.back() <= 1e-3 && improving;
    std::string detail = "|eig+1| at h = 0.2, 0.1, " + fmt("%g", h_default) + ":";
    for (double v : dev) detail += fmt(" %.2e", v);
    detail += fmt("; direct-oracle floor %.1e", floor);
    return Outcome{ok, detail};
  });

  run(6, "sign law and reality", 120.0, [] {
    std::string detail;
    bool ok = true;
    // reversed sign: no eigenvalue in either solver
    for (int variant = 0; variant < 2; ++variant) {
      WaveguideConfig c = demo(0.1);
      if (variant == 0) c.beta = c.beta.negated();
      else c.alpha0 = -c.alpha0;
      const auto bs = solve_weak_coupling(c, BsDiscretization::default_for(1));
      const auto fd = discrete_eigenvalue_below_threshold(c);
      ok = ok && !bs.found && !fd.has_value();
      detail += std::string(variant == 0 ? "beta -> -beta" : "alpha0 -> -alpha0") + ": bs " +
                bs.verdict + ", direct " + (fd ? "eigenvalue" : "none") + "; ";
    }
    // existing eigenvalue: imaginary part
    const WaveguideConfig c = demo(0.1);
    const auto bs = solve_weak_coupling(c, BsDiscretization::default_for(1));
    const auto fd = discrete_eigenvalue_below_threshold(c);
    const double im_bs = std::abs(bs.lambda.imag());
    const double im_fd = fd ? std::abs(fd->lambda.imag()) : 1.0;
    ok = ok && bs.found && fd && im_bs <= 1e-8 && im_fd <= 1e-8;
    detail += fmt("|Im lambda| bs %.1e", im_bs) + fmt(", direct %.1e", im_fd);
    return Outcome{ok, detail};
  });

  run(7, "operator identities", 60.0, [] {
    double pt = 0, adj = 0, excess = -1e300, slack = 0;
    int eigs = 0;
    for (int n : {1, 2}) {
      WaveguideConfig c = demo(0.1);
      c.n = n;
      c.beta = PerturbationProfile::gaussian_with_mean(n, -1.0, 1.0);
      const auto H = n == 1 ? assemble_hamiltonian(c, 10.0, 0.1, pi / 20)
                            : assemble_hamiltonian(c, 4.0, 0.25, pi / 8);
      const auto f = verify_operator_facts(H, 1, 0, 12);
      pt = std::max(pt, f.pt_defect);
      adj = std::max(adj, f.adjoint_defect);
      excess = std::max(excess, f.parabola_excess - f.parabola_slack);
      slack = std::max(slack, f.parabola_slack);
      eigs += f.eigenvalues_checked;
    }
    const bool ok = pt <= 1e-14 && adj <= 1e-14 && excess <= 0.0;
    return Outcome{ok, fmt("PT defect %.1e", pt) + fmt(", adjoint defect %.1e", adj) +
                           ", " + std::to_string(eigs) + fmt(" eigenvalues, max (excess - slack) %.2e", excess)};
  });

  run(8, "n = 2 layer", 300.0, [] {
    WaveguideConfig c = demo(0.1);
    c.n = 2;
    c.beta = PerturbationProfile::gaussian_with_mean(2, -1.0, 1.0);
    std::vector<double> rel;
    std::string detail = "rel. deviation of k from (eps/pi) alpha0 <beta>:";
    for (double e : {0.1, 0.05}) {
      c.epsilon = e;
      const auto r = solve_weak_coupling(c, BsDiscretization::default_for(2));
      const double k0 = asymptotic_k(e, c);
      rel.push_back(r.found ? std::abs(r.k - k0) / std::abs(k0) : 1.0);
      detail += fmt(" %.2e", rel.back());
    }
    const double ratio = rel[0] / rel[1];
    const auto kb = kernel_bound_suite(10000, 1);
    const bool ok = rel[0] <= 0.1 && rel[1] <= 0.05 && ratio >= 1.5 && ratio <= 2.7 && kb.pass();
    return Outcome{ok, detail + fmt(", ratio %.2f", ratio) + "; kernel bounds " +
                           std::to_string(kb.samples) + " samples " + (kb.pass() ? "pass" : "fail")};
  });

  run(9, "form bound", 30.0, [] {
    const auto H = assemble_hamiltonian(demo(0.1), 10.0, 0.1, pi / 20);
    const auto f = verify_operator_facts(H, 1, 100, 0);
    return Outcome{f.form_ratio_max <= 1.0 && f.fields_checked == 100,
                   std::to_string(f.fields_checked) + fmt(" fields, max ratio %.3e", f.form_ratio_max)};
  });

  return failures == 0 ? 0 : 1;
}
