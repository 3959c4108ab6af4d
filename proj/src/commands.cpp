#include "ptwg/commands.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "ptwg/bessel.hpp"
#include "ptwg/errors.hpp"
#include "ptwg/kernels.hpp"
#include "ptwg/transverse.hpp"

namespace ptwg {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// Outcome of one method at one epsilon.
struct MethodRow {
  std::string verdict;
  cplx lambda{nan, nan};
  cplx k{nan, nan};
  double residual = nan;
  bool found = false;
};

MethodRow from_result(const SpectralResult& r) {
  MethodRow m;
  m.verdict = r.verdict;
  m.found = r.found;
  if (r.found) {
    m.lambda = r.lambda;
    m.k = r.k;
    m.residual = r.residual;
  }
  return m;
}

bool labeled(const Error& e) {
  return dynamic_cast<const ResolutionLimit*>(&e) || dynamic_cast<const BorderlineCase*>(&e) ||
         dynamic_cast<const NoRoot*>(&e) || dynamic_cast<const NeumannSeriesDivergence*>(&e);
}

MethodRow run_bs(const RunConfig& rc, const WaveguideConfig& c) {
  try {
    return from_result(solve_weak_coupling(c, bs_discretization(rc), weak_coupling_options(rc)));
  } catch (const Error& e) {
    if (!labeled(e)) throw;
    return {e.name()};
  }
}

MethodRow run_direct(const RunConfig& rc, const WaveguideConfig& c) {
  try {
    if (c.epsilon == 0.0) return {"no-eigenvalue"};
    auto r = discrete_eigenvalue_below_threshold(c, direct_numerics(rc));
    if (!r) return {"no-eigenvalue"};
    return from_result(*r);
  } catch (const Error& e) {
    if (!labeled(e)) throw;
    return {e.name()};
  }
}

MethodRow run_asymptotic(const WaveguideConfig& c) {
  MethodRow m;
  const double w = asymptotic_k(c.epsilon, c);
  const bool exists = c.epsilon > 0.0 && c.coupling_sign_product() < 0.0 &&
                      std::abs(c.alpha0) < std::numbers::pi / c.d;
  m.verdict = exists ? "eigenvalue" : "no-eigenvalue";
  m.found = exists;
  if (exists) {
    m.lambda = asymptotic_lambda(c.epsilon, c);
    m.k = w;
    m.residual = 0.0;
  }
  return m;
}

double tolerance_for(const WaveguideConfig& c) {
  return std::max(std::pow(c.epsilon, 3), 1e-12);
}

std::string csv_join(const std::vector<std::string>& cols) {
  std::string s;
  for (size_t i = 0; i < cols.size(); ++i) s += (i ? "," : "") + cols[i];
  return s;
}

}  // namespace

std::string format_number(double x, int precision) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", precision - 1, x);
  return buf;
}

BsDiscretization bs_discretization(const RunConfig& rc) {
  auto d = BsDiscretization::default_for(rc.problem.n);
  const auto& nm = rc.numerics;
  if (nm.bs_h > 0.0) d.h = nm.bs_h;
  if (nm.bs_modes > 0) d.modes = nm.bs_modes;
  if (nm.bs_degree > 0) d.degree = nm.bs_degree;
  if (nm.quad_order > 0) d.u_order = nm.quad_order;
  return d;
}

DirectNumerics direct_numerics(const RunConfig& rc) {
  DirectNumerics d;
  const auto& nm = rc.numerics;
  if (rc.problem.n == 2) {
    d.hx = 0.25;
    d.M = 8;
    d.levels = 1;
  }
  if (nm.L > 0.0) d.L = nm.L;
  if (nm.h_x > 0.0) d.hx = nm.h_x;
  if (nm.h_u > 0.0) {
    const double cells = rc.problem.d / nm.h_u;
    if (std::abs(cells - std::round(cells)) > 1e-8 * cells)
      throw ConfigError("numerics.h_u must divide problem.d");
    d.M = static_cast<int>(std::lround(cells));
  }
  return d;
}

WeakCouplingOptions weak_coupling_options(const RunConfig& rc) {
  WeakCouplingOptions o;
  o.newton_tol = rc.numerics.newton_tol;
  return o;
}

std::vector<double> parse_epsilons(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      size_t pos = 0;
      const double e = std::stod(part, &pos);
      if (part.find_first_not_of(" \t", pos) != std::string::npos) throw std::invalid_argument(part);
      if (!(e >= 0.0) || !std::isfinite(e)) throw std::invalid_argument(part);
      out.push_back(e);
    } catch (const std::exception&) {
      throw ConfigError("--epsilons: invalid value '" + part + "'");
    }
  }
  return out;
}

int cmd_modes(const RunConfig& rc, std::ostream& out) {
  const auto& c = rc.problem;
  const int jm = rc.numerics.j_max;
  const auto modes = transversal_eigenvalues(c.alpha0, c.d, jm);
  const Eigen::MatrixXcd B =
      biorthonormality_matrix(c.alpha0, c.d, jm, rc.numerics.quad_order);
  const int p = rc.output.precision;
  out << "j,kind,mu_sq,a_norm_re,a_norm_im,biorth_residual\n";
  for (int j = 0; j <= jm; ++j) {
    double res = 0.0;
    for (int k = 0; k <= jm; ++k) res = std::max(res, std::abs(B(j, k) - (j == k ? 1.0 : 0.0)));
    const auto& m = modes[j];
    out << csv_join({std::to_string(j), m.kind == ModeKind::alpha_mode ? "alpha-mode" : "cosine-mode",
                     format_number(m.mu_sq, p), format_number(m.a_norm.real(), p),
                     format_number(m.a_norm.imag(), p), format_number(res, p)})
        << '\n';
  }
  return 0;
}

int cmd_boundstate(const RunConfig& rc, std::ostream& out) {
  const auto& c = rc.problem;
  const int p = rc.output.precision;
  struct Named {
    std::string method;
    MethodRow row;
  };
  std::vector<Named> rows{{to_string(Method::bs_root), run_bs(rc, c)},
                          {to_string(Method::direct), run_direct(rc, c)},
                          {to_string(Method::asymptotic), run_asymptotic(c)}};
  const double tol = tolerance_for(c);
  out << "method,verdict,lambda_re,lambda_im,k_re,k_im,residual,abs_im_lambda,max_abs_diff,"
         "tolerance,within_tolerance\n";
  for (const auto& r : rows) {
    double diff = r.row.found ? 0.0 : nan;
    if (r.row.found)
      for (const auto& o : rows)
        if (o.row.found) diff = std::max(diff, std::abs(o.row.lambda - r.row.lambda));
    const std::string within = r.row.found ? (diff <= tol ? "yes" : "no") : "n/a";
    out << csv_join({r.method, r.row.verdict, format_number(r.row.lambda.real(), p),
                     format_number(r.row.lambda.imag(), p), format_number(r.row.k.real(), p),
                     format_number(r.row.k.imag(), p), format_number(r.row.residual, p),
                     format_number(std::abs(r.row.lambda.imag()), p), format_number(diff, p),
                     format_number(tol, p), within})
        << '\n';
  }
  return 0;
}

int cmd_sweep(const RunConfig& rc, const std::vector<double>& epsilons, int jobs,
              std::ostream& out) {
  if (jobs < 1) throw ConfigError("--jobs must be >= 1");
  struct SweepPoint {
    MethodRow direct, bs, asym;
    std::string error;
  };
  std::vector<SweepPoint> pts(epsilons.size());
  auto work = [&](size_t i) {
    WaveguideConfig c = rc.problem;
    c.epsilon = epsilons[i];
    auto guarded = [&](auto&& fn) -> MethodRow {
      try {
        return fn();
      } catch (const Error& e) {
        return {e.name()};
      }
    };
    pts[i].bs = guarded([&] { return run_bs(rc, c); });
    pts[i].direct = guarded([&] { return run_direct(rc, c); });
    pts[i].asym = guarded([&] { return run_asymptotic(c); });
  };
  const int nthreads = std::min<int>(jobs, static_cast<int>(pts.size()));
  if (nthreads <= 1) {
    for (size_t i = 0; i < pts.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&, t] {
        for (size_t i = t; i < pts.size(); i += nthreads) work(i);
      });
    for (auto& th : pool) th.join();
  }

  const int p = rc.output.precision;
  const double mu0 = threshold(rc.problem.alpha0, rc.problem.d);
  out << "epsilon,lambda_direct_re,lambda_direct_im,lambda_bs_re,lambda_bs_im,lambda_asym,"
         "gap_over_eps2_direct,gap_over_eps2_bs,fitted_order,status\n";
  double prev_eps = nan, prev_dev = nan;
  for (size_t i = 0; i < pts.size(); ++i) {
    const double e = epsilons[i];
    const auto& pt = pts[i];
    auto gap2 = [&](const MethodRow& m) { return m.found && e > 0.0 ? (mu0 - m.lambda.real()) / (e * e) : nan; };
    // correction |lambda - lambda_asym| from the most accurate available method
    const MethodRow& best = pt.bs.found ? pt.bs : pt.direct;
    double dev = nan, order = nan;
    if (best.found && pt.asym.found) dev = std::abs(best.lambda.real() - pt.asym.lambda.real());
    if (std::isfinite(dev) && dev > 0.0 && std::isfinite(prev_dev) && prev_dev > 0.0 && e != prev_eps)
      order = std::log(dev / prev_dev) / std::log(e / prev_eps);
    if (std::isfinite(dev) && dev > 0.0) {
      prev_dev = dev;
      prev_eps = e;
    }
    std::string status = "ok";
    std::vector<std::string> labels;
    for (const auto* m : {&pt.direct, &pt.bs})
      if (!m->found && m->verdict != "no-eigenvalue") labels.push_back(m->verdict);
    if (!labels.empty()) {
      status.clear();
      for (size_t k = 0; k < labels.size(); ++k) status += (k ? ";" : "") + labels[k];
    } else if (!pt.bs.found && !pt.direct.found) {
      status = "no-eigenvalue";
    }
    out << csv_join({format_number(e, p), format_number(pt.direct.lambda.real(), p),
                     format_number(pt.direct.lambda.imag(), p), format_number(pt.bs.lambda.real(), p),
                     format_number(pt.bs.lambda.imag(), p), format_number(pt.asym.lambda.real(), p),
                     format_number(gap2(pt.direct), p), format_number(gap2(pt.bs), p),
                     format_number(order, p), status})
        << '\n';
  }
  return 0;
}

int cmd_verify(const RunConfig& rc, unsigned seed, std::ostream& out, std::ostream& err) {
  const auto& c = rc.problem;
  std::string first_failure;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    if (!ok && first_failure.empty()) first_failure = name;
  };
  auto num = [](double x) { return format_number(x, 3); };

  {
    const Eigen::MatrixXcd B = biorthonormality_matrix(c.alpha0, c.d, rc.numerics.j_max,
                                                       rc.numerics.quad_order);
    const double dev = (B - Eigen::MatrixXcd::Identity(B.rows(), B.cols())).cwiseAbs().maxCoeff();
    report("biorthonormality", dev < 1e-10, "max deviation " + num(dev));
  }

  // operator facts on a moderate grid around the profile
  const double L = std::min(10.0, std::max(4.0, std::ceil(2.0 * c.beta.support_radius(1e-6))));
  const double hx = c.n == 1 ? 0.1 : 0.5;
  const int M = c.n == 1 ? 16 : 6;
  const auto H = assemble_hamiltonian(c, L, hx, c.d / M);
  const auto facts = verify_operator_facts(H, seed, 100, 12);
  report("pt-commutation", facts.pt_defect <= 1e-14, "max defect " + num(facts.pt_defect));
  report("adjoint-law", facts.adjoint_defect <= 1e-14, "max defect " + num(facts.adjoint_defect));
  report("transpose-symmetry", facts.transpose_defect <= 1e-14,
         "max defect " + num(facts.transpose_defect));
  {
    std::string detail = std::to_string(facts.eigenvalues_checked) + " eigenvalues, max excess " +
                         num(facts.parabola_excess) + " vs slack " + num(facts.parabola_slack);
    if (H.alpha_sup() == 0.0) detail += " (alpha = 0: real spectrum)";
    report("parabola", facts.parabola_excess <= facts.parabola_slack, detail);
  }
  report("form-bound", facts.form_ratio_max <= 1.0,
         std::to_string(facts.fields_checked) + " fields, max ratio " + num(facts.form_ratio_max));

  {
    const auto kb = kernel_bound_suite(10000, seed);
    report("kernel-bounds", kb.pass(),
           std::to_string(kb.samples) + " samples, regularized " + num(kb.regularized_ratio_max) +
               ", derivative " + num(kb.derivative_ratio_max) + ", zK1 " + num(kb.zk1_max));
  }

  // BS equivalence at an eigenvalue, when one is expected and resolvable
  const bool expected = c.epsilon > 0.0 && c.coupling_sign_product() < 0.0 &&
                        std::abs(c.alpha0) < std::numbers::pi / c.d;
  if (!expected) {
    out << "SKIP bs-equivalence: no eigenvalue expected for this configuration\n";
  } else {
    try {
      const auto disc = bs_discretization(rc);
      const double mu0 = threshold(c.alpha0, c.d);
      cplx lambda;
      std::string source;
      if (c.n == 1) {
        const auto r = discrete_eigenvalue_below_threshold(c, direct_numerics(rc));
        if (!r) throw NoRoot("direct solver found no eigenvalue");
        lambda = r->lambda;
        source = "direct";
      } else {
        lambda = solve_weak_coupling(c, disc, weak_coupling_options(rc)).lambda;
        source = "bs root";
      }
      const BsOperator K(c, disc, SpectralVariable::from_lambda(c.n, mu0, lambda));
      const double dev = std::abs(K.eigenvalue_near(-1.0) + 1.0);
      report("bs-equivalence", dev <= 1e-3, "|eig + 1| = " + num(dev) + " at " + source + " lambda");
    } catch (const Error& e) {
      report("bs-equivalence", false, e.what());
    }
  }

  if (!first_failure.empty()) {
    err << "first failing invariant: " << first_failure << '\n';
    return static_cast<int>(ErrorClass::invariant);
  }
  return 0;
}

int cmd_kernel_eval(const std::string& kind, int n, cplx z, double r, int precision,
                    std::ostream& out) {
  cplx v;
  if (kind == "k0" || kind == "k1") {
    const int order = kind == "k0" ? 0 : 1;
    v = z.imag() == 0.0 ? cplx(bessel_k(order, z.real())) : bessel_k(order, z);
  } else if (kind == "free") {
    v = free_resolvent_kernel(n, z, r);
  } else if (kind == "green") {
    v = free_resolvent_kernel(n, -z * z, r);
  } else {
    throw ConfigError("kernel-eval: kind must be k0, k1, free or green");
  }
  out << "kind,n,z_re,z_im,r,value_re,value_im\n";
  out << csv_join({kind, std::to_string(n), format_number(z.real(), precision),
                   format_number(z.imag(), precision), format_number(r, precision),
                   format_number(v.real(), precision), format_number(v.imag(), precision)})
      << '\n';
  return 0;
}

}  // namespace ptwg
