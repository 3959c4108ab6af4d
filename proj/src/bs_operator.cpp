#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "ptwg/bessel.hpp"
#include "ptwg/bs.hpp"
#include "ptwg/errors.hpp"
#include "ptwg/gmres.hpp"
#include "ptwg/quadrature.hpp"

namespace ptwg {

namespace {

constexpr double pi = std::numbers::pi;
std::mutex fftw_plan_mutex;

// Lagrange basis on the equispaced nodes 0, 1, ..., p evaluated at t.
double lagrange(int p, int c, double t) {
  double v = 1.0;
  for (int e = 0; e <= p; ++e)
    if (e != c) v *= (t - e) / double(c - e);
  return v;
}

// Product-integration matrix W(a, b) ~ int kern(x_a - x') L_b(x') dx' for the
// piecewise degree-p interpolant on n1 equispaced nodes of step h.
template <class Kern>
Eigen::MatrixXcd product_weights_1d(const Kern& kern, int n1, double h, int p) {
  static const Quadrature gl = gauss_legendre(16, 0.0, 1.0);
  const int span = n1 - 1;
  // table(o + span, c) = int_0^{p h} kern(o h - t) L_c(t / h) dt
  Eigen::MatrixXcd table(2 * span + 1, p + 1);
  for (int o = -span; o <= span; ++o) {
    for (int c = 0; c <= p; ++c) table(o + span, c) = 0.0;
    for (int q = 0; q < p; ++q)
      for (int g = 0; g < gl.size(); ++g) {
        const double tl = q + gl.nodes[g];
        const cplx kv = kern((o - tl) * h) * (gl.weights[g] * h);
        for (int c = 0; c <= p; ++c) table(o + span, c) += kv * lagrange(p, c, tl);
      }
  }
  Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(n1, n1);
  for (int s = 0; s + p < n1; s += p)
    for (int a = 0; a < n1; ++a)
      for (int c = 0; c <= p; ++c) W(a, s + c) += table(a - s + span, c);
  return W;
}

std::vector<double> interpolant_weights_1d(int n1, double h, int p) {
  std::vector<double> w(n1, 0.0);
  const Quadrature gl = gauss_legendre(8, 0.0, double(p));
  for (int s = 0; s + p < n1; s += p)
    for (int c = 0; c <= p; ++c)
      for (int g = 0; g < gl.size(); ++g)
        w[s + c] += gl.weights[g] * h * lagrange(p, c, gl.nodes[g]);
  return w;
}

// Radial kernel pair for the two-dimensional convolution: value g(r) and
// radial factor rad(r) with grad g(v) = rad(|v|) v.
struct Radial2d {
  cplx kappa;
  bool regular;  // mode 0: K0 + log kappa
  void eval(double r, cplx& g, cplx& rad) const {
    if (regular) {
      g = regular_2d(kappa, r);
      rad = green_2d_radial(kappa, r);
    } else if (kappa.imag() == 0.0) {
      const auto b = bessel_k01(kappa.real() * r);
      g = b.k0 / (2.0 * pi);
      rad = -kappa.real() * b.k1 / (2.0 * pi * r);
    } else {
      g = green_2d(kappa, r);
      rad = green_2d_radial(kappa, r);
    }
  }
};

// Weights over the bilinear hat centred at the origin for offsets
// m1, m2 >= 0: value, and the x1-gradient weight.
void product_weights_2d(const Radial2d& ker, int n1, double h,
                        Eigen::MatrixXcd& wv, Eigen::MatrixXcd& wg) {
  static const Quadrature gl12 = gauss_legendre(12, 0.0, 1.0);
  static const Quadrature gl6 = gauss_legendre(6, 0.0, 1.0);
  static const Quadrature gl16 = gauss_legendre(16, 0.0, 1.0);
  wv.resize(n1, n1);
  wg.resize(n1, n1);
  for (int m1 = 0; m1 < n1; ++m1)
    for (int m2 = 0; m2 < n1; ++m2) {
      cplx sv = 0.0, sg = 0.0;
      const double v1 = m1 * h, v2 = m2 * h;
      auto accumulate = [&](double t1, double t2, double wt) {
        const double d1 = v1 - t1, d2 = v2 - t2;
        const double r = std::hypot(d1, d2);
        if (r == 0.0) return;
        const double hat = (1.0 - std::abs(t1) / h) * (1.0 - std::abs(t2) / h);
        cplx g, rad;
        ker.eval(r, g, rad);
        sv += g * hat * wt;
        sg += rad * d1 * hat * wt;
      };
      for (int c1 = -1; c1 <= 0; ++c1)
        for (int c2 = -1; c2 <= 0; ++c2) {
          const bool sing1 = (m1 == c1 || m1 == c1 + 1);
          const bool sing2 = (m2 == c2 || m2 == c2 + 1);
          const double lo1 = c1 * h, lo2 = c2 * h;
          if (sing1 && sing2) {
            // Duffy transform about the singular vertex
            const double vx = v1, vy = v2;
            const double ox = (vx == lo1) ? lo1 + h : lo1;
            const double oy = (vy == lo2) ? lo2 + h : lo2;
            const double ex = ox - vx, ey = oy - vy;
            const double jac = std::abs(ex * ey);
            for (int a = 0; a < gl16.size(); ++a)
              for (int b = 0; b < gl16.size(); ++b) {
                const double s = gl16.nodes[a], t = gl16.nodes[b];
                const double w = gl16.weights[a] * gl16.weights[b] * s * jac;
                accumulate(vx + s * ex, vy + s * t * ey, w);
                accumulate(vx + s * t * ex, vy + s * ey, w);
              }
          } else {
            const bool near = std::abs(m1) <= 2 && std::abs(m2) <= 2;
            const Quadrature& q = near ? gl12 : gl6;
            for (int a = 0; a < q.size(); ++a)
              for (int b = 0; b < q.size(); ++b)
                accumulate(lo1 + q.nodes[a] * h, lo2 + q.nodes[b] * h,
                           q.weights[a] * q.weights[b] * h * h);
          }
        }
      wv(m1, m2) = sv;
      wg(m1, m2) = sg;
    }
}

struct FftConv {
  int n1 = 0, P = 0;
  fftw_plan fwd = nullptr, bwd = nullptr;
  std::vector<cplx> buf;

  void init(int n) {
    n1 = n;
    P = 2 * n;
    buf.assign(P * P, 0.0);
    std::lock_guard<std::mutex> lk(fftw_plan_mutex);
    auto* b = reinterpret_cast<fftw_complex*>(buf.data());
    fwd = fftw_plan_dft_2d(P, P, b, b, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_2d(P, P, b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~FftConv() {
    std::lock_guard<std::mutex> lk(fftw_plan_mutex);
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
  void forward(std::vector<cplx>& a) const {
    auto* p = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(fwd, p, p);
  }
  void backward(std::vector<cplx>& a) const {
    auto* p = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(bwd, p, p);
  }
  // Spectrum of the circulant embedding of an offset kernel w(m1, m2).
  template <class F>
  std::vector<cplx> spectrum(const F& w) const {
    std::vector<cplx> a(P * P, 0.0);
    for (int m1 = -(n1 - 1); m1 <= n1 - 1; ++m1)
      for (int m2 = -(n1 - 1); m2 <= n1 - 1; ++m2)
        a[((m1 + P) % P) * P + (m2 + P) % P] = w(m1, m2);
    forward(a);
    return a;
  }
};

}  // namespace

BsDiscretization BsDiscretization::default_for(int n) {
  BsDiscretization d;
  if (n == 2) {
    d.h = 0.25;
    d.modes = 8;
    d.degree = 1;
  }
  return d;
}

struct BsOperator::Impl {
  WaveguideConfig config;
  BsDiscretization disc;
  SpectralVariable sv;
  ModeSet modeset;
  FactorizedPerturbation factors;
  int n = 1, comps = 0, J = 0, n1 = 0, nn = 0;
  double h = 0.0, X = 0.0;
  Eigen::MatrixXcd a;   // nn x comps
  Eigen::MatrixXd b;    // nn x comps
  std::vector<FactorDerivative> deriv;
  std::vector<Eigen::MatrixXcd> Q;  // per component, J x J
  Eigen::VectorXd qweights;
  Eigen::VectorXcd phat;
  cplx cL;
  // n = 1
  std::vector<Eigen::MatrixXcd> Wv, Wd;
  // n = 2
  FftConv fft;
  std::vector<std::vector<cplx>> Sv, S1, S2;

  void setup_grid();
  void setup_modes();
  void setup_kernels();
  void convolve(const Eigen::MatrixXcd& f, Eigen::MatrixXcd& hv,
                Eigen::MatrixXcd& h1, Eigen::MatrixXcd& h2) const;
  Eigen::MatrixXcd mode_fields(const Eigen::VectorXcd& y) const;
  Eigen::VectorXcd regular(const Eigen::VectorXcd& y) const;
  cplx functional(const Eigen::VectorXcd& y) const;
  cplx mode_kappa(int j) const;
};

void BsOperator::Impl::setup_grid() {
  n = config.n;
  h = disc.h;
  if (!(h > 0.0)) throw ConfigError("BS step h must be positive");
  const int p = disc.degree;
  if (p != 1 && p != 3 && p != 5)
    throw ConfigError("interpolation degree must be 1, 3 or 5");
  if (n == 2 && p != 1) throw ConfigError("n = 2 supports degree 1 only");
  double half = disc.half_length > 0.0 ? disc.half_length
                                       : config.beta.support_radius(1e-10);
  int cells = static_cast<int>(std::ceil(2.0 * half / h - 1e-9));
  cells = ((cells + p - 1) / p) * p;
  X = 0.5 * cells * h;
  n1 = cells + 1;
  nn = n == 1 ? n1 : n1 * n1;

  factors = factorize_perturbation(config.beta, n, config.epsilon);
  comps = factors.size();
  a.resize(nn, comps);
  b.resize(nn, comps);
  deriv.clear();
  for (const auto& fp : factors.pairs) deriv.push_back(fp.derivative);
  for (int node = 0; node < nn; ++node) {
    Point x{-X + (node % n1) * h, 0.0};
    if (n == 2) x = {-X + (node / n1) * h, -X + (node % n1) * h};
    for (int i = 0; i < comps; ++i) {
      a(node, i) = factors.pairs[i].a(x);
      b(node, i) = factors.pairs[i].b(x);
    }
  }
  const auto w1 = interpolant_weights_1d(n1, h, p);
  qweights.resize(nn);
  for (int node = 0; node < nn; ++node)
    qweights(node) = n == 1 ? w1[node] : w1[node / n1] * w1[node % n1];
}

void BsOperator::Impl::setup_modes() {
  J = disc.modes;
  if (J < 1) throw ConfigError("BS needs at least one mode");
  modeset = ModeSet::make(config.alpha0, config.d, J - 1);
  const int order = disc.u_order > 0 ? disc.u_order : 8 * J + 32;
  const auto q = gauss_legendre(order, 0.0, config.d);
  Eigen::MatrixXcd psi(order, J), dpsi(order, J);
  for (int g = 0; g < order; ++g)
    for (int j = 0; j < J; ++j) {
      psi(g, j) = modeset.psi(j, q.nodes[g]);
      dpsi(g, j) = modeset.dpsi(j, q.nodes[g]);
    }
  Q.clear();
  for (int i = 0; i < comps; ++i) {
    const auto& fp = factors.pairs[i];
    Eigen::VectorXcd wp(order);
    for (int g = 0; g < order; ++g)
      wp(g) = q.weights[g] * std::pow(q.nodes[g], fp.u_power);
    const Eigen::MatrixXcd& chi = fp.derivative == FactorDerivative::u ? dpsi : psi;
    Eigen::MatrixXcd Qi = psi.transpose() * wp.asDiagonal() * chi;
    for (int j = 0; j < J; ++j) Qi.row(j) *= modeset[j].a_norm;
    Q.push_back(Qi);
  }
  phat = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(comps) * J * nn);
  for (int i = 0; i < comps; ++i) {
    if (deriv[i] == FactorDerivative::x1 || deriv[i] == FactorDerivative::x2)
      continue;
    phat.segment(static_cast<Eigen::Index>(i) * J * nn, nn) = b.col(i).cast<cplx>();
  }
  const double eps = config.epsilon;
  if (sv.k == 0.0)
    cL = std::numeric_limits<double>::quiet_NaN();
  else
    cL = n == 1 ? eps / (2.0 * sv.k) : -eps / (2.0 * pi * sv.k);
}

cplx BsOperator::Impl::mode_kappa(int j) const {
  // sqrt(mu_j^2 - lambda) with lambda = mu0^2 - kappa0^2
  const cplx k0 = sv.kappa0();
  return std::sqrt((modeset[j].mu_sq - modeset.mu0_sq()) + k0 * k0);
}

void BsOperator::Impl::setup_kernels() {
  if (n == 1) {
    Wv.resize(J);
    Wd.resize(J);
    const int p = disc.degree;
    for (int j = 0; j < J; ++j) {
      const cplx kap = j == 0 ? sv.k : mode_kappa(j);
      if (j == 0)
        Wv[j] = product_weights_1d([&](double s) { return regular_1d(kap, std::abs(s)); },
                                   n1, h, p);
      else
        Wv[j] = product_weights_1d([&](double s) { return green_1d(kap, std::abs(s)); },
                                   n1, h, p);
      Wd[j] = product_weights_1d([&](double s) { return green_1d_dx(kap, s); }, n1, h, p);
    }
    return;
  }
  fft.init(n1);
  Sv.resize(J);
  S1.resize(J);
  S2.resize(J);
  for (int j = 0; j < J; ++j) {
    Radial2d ker;
    ker.regular = (j == 0);
    ker.kappa = j == 0 ? sv.kappa0() : mode_kappa(j);
    Eigen::MatrixXcd wv, wg;
    product_weights_2d(ker, n1, h, wv, wg);
    const double sc = 1.0 / (double(fft.P) * fft.P);
    Sv[j] = fft.spectrum([&](int m1, int m2) { return wv(std::abs(m1), std::abs(m2)) * sc; });
    S1[j] = fft.spectrum([&](int m1, int m2) {
      const double sg = m1 < 0 ? -1.0 : 1.0;
      return sg * wg(std::abs(m1), std::abs(m2)) * sc;
    });
    S2[j] = fft.spectrum([&](int m1, int m2) {
      const double sg = m2 < 0 ? -1.0 : 1.0;
      return sg * wg(std::abs(m2), std::abs(m1)) * sc;
    });
  }
}

// f(node, j) = sum_i a_i(node) sum_m Q_i(j, m) y(i, m, node)
Eigen::MatrixXcd BsOperator::Impl::mode_fields(const Eigen::VectorXcd& y) const {
  Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(nn, J);
  for (int i = 0; i < comps; ++i) {
    Eigen::Map<const Eigen::MatrixXcd> Yi(y.data() + static_cast<Eigen::Index>(i) * J * nn, nn, J);
    f.noalias() += a.col(i).asDiagonal() * (Yi * Q[i].transpose());
  }
  return f;
}

void BsOperator::Impl::convolve(const Eigen::MatrixXcd& f, Eigen::MatrixXcd& hv,
                                Eigen::MatrixXcd& h1, Eigen::MatrixXcd& h2) const {
  hv.resize(nn, J);
  h1.resize(nn, J);
  if (n == 1) {
    for (int j = 0; j < J; ++j) {
      hv.col(j).noalias() = Wv[j] * f.col(j);
      h1.col(j).noalias() = Wd[j] * f.col(j);
    }
    return;
  }
  h2.resize(nn, J);
  const int P = fft.P;
  std::vector<cplx> F(P * P), T(P * P);
  for (int j = 0; j < J; ++j) {
    std::fill(F.begin(), F.end(), cplx(0.0));
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i2 = 0; i2 < n1; ++i2) F[i1 * P + i2] = f(i1 * n1 + i2, j);
    fft.forward(F);
    const std::vector<cplx>* specs[3] = {&Sv[j], &S1[j], &S2[j]};
    Eigen::MatrixXcd* outs[3] = {&hv, &h1, &h2};
    for (int s = 0; s < 3; ++s) {
      const auto& S = *specs[s];
      for (int t = 0; t < P * P; ++t) T[t] = F[t] * S[t];
      fft.backward(T);
      for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n1; ++i2) (*outs[s])(i1 * n1 + i2, j) = T[i1 * P + i2];
    }
  }
}

Eigen::VectorXcd BsOperator::Impl::regular(const Eigen::VectorXcd& y) const {
  const Eigen::MatrixXcd f = mode_fields(y);
  Eigen::MatrixXcd hv, h1, h2;
  convolve(f, hv, h1, h2);
  Eigen::VectorXcd out(y.size());
  const double eps = config.epsilon;
  for (int i = 0; i < comps; ++i) {
    const Eigen::MatrixXcd* src = &hv;
    // in the n = 2 layout node = i1 * n1 + i2 with x1 along i1
    if (deriv[i] == FactorDerivative::x1) src = &h1;
    if (deriv[i] == FactorDerivative::x2) src = &h2;
    Eigen::Map<Eigen::MatrixXcd> Oi(out.data() + static_cast<Eigen::Index>(i) * J * nn, nn, J);
    Oi.noalias() = (eps * b.col(i)).asDiagonal() * (*src);
  }
  return out;
}

cplx BsOperator::Impl::functional(const Eigen::VectorXcd& y) const {
  cplx s = 0.0;
  for (int i = 0; i < comps; ++i) {
    Eigen::Map<const Eigen::MatrixXcd> Yi(y.data() + static_cast<Eigen::Index>(i) * J * nn, nn, J);
    const Eigen::VectorXcd col = Yi * Q[i].row(0).transpose();
    s += (qweights.cast<cplx>().cwiseProduct(a.col(i)).cwiseProduct(col)).sum();
  }
  return s;
}

BsOperator::BsOperator(const WaveguideConfig& config, const BsDiscretization& disc,
                       const SpectralVariable& sv)
    : impl_(std::make_unique<Impl>()) {
  config.validate();
  if (sv.n != config.n) throw ConfigError("spectral variable dimension differs");
  impl_->config = config;
  impl_->disc = disc;
  impl_->sv = sv;
  impl_->setup_grid();
  impl_->setup_modes();
  impl_->setup_kernels();
}

BsOperator::~BsOperator() = default;
BsOperator::BsOperator(BsOperator&&) noexcept = default;
BsOperator& BsOperator::operator=(BsOperator&&) noexcept = default;

int BsOperator::dimension() const { return impl_->comps * impl_->J * impl_->nn; }
int BsOperator::components() const { return impl_->comps; }
int BsOperator::modes() const { return impl_->J; }
int BsOperator::nodes() const { return impl_->nn; }
const SpectralVariable& BsOperator::spectral_variable() const { return impl_->sv; }

Eigen::VectorXcd BsOperator::apply_regular(const Eigen::VectorXcd& y) const {
  return impl_->regular(y);
}

cplx BsOperator::coupling() const {
  if (impl_->sv.k == 0.0) throw ThresholdSingularity("L diverges at k = 0");
  return impl_->cL;
}

const Eigen::VectorXcd& BsOperator::rank_one_vector() const { return impl_->phat; }

cplx BsOperator::functional(const Eigen::VectorXcd& y) const {
  return impl_->functional(y);
}

Eigen::VectorXcd BsOperator::apply(const Eigen::VectorXcd& y) const {
  return impl_->regular(y) + (coupling() * impl_->functional(y)) * impl_->phat;
}

Eigen::MatrixXcd BsOperator::dense(bool with_singular) const {
  const int dim = dimension();
  Eigen::MatrixXcd K(dim, dim);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
  for (int c = 0; c < dim; ++c) {
    e(c) = 1.0;
    K.col(c) = with_singular ? apply(e) : apply_regular(e);
    e(c) = 0.0;
  }
  return K;
}

Eigen::VectorXcd BsOperator::solve_shifted(const Eigen::VectorXcd& rhs, cplx shift,
                                           int* iterations) const {
  auto op = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
    return impl_->regular(v) - shift * v;
  };
  const auto r = gmres(op, rhs, impl_->disc.gmres_tol, impl_->disc.gmres_restart,
                       impl_->disc.gmres_max_iter);
  if (iterations) *iterations = r.iterations;
  if (!r.converged)
    throw ConvergenceFailure("GMRES stalled at relative residual " +
                             std::to_string(r.relative_residual));
  return r.x;
}

double BsOperator::regular_norm_estimate(int iterations) const {
  Eigen::VectorXcd v(dimension());
  for (int i = 0; i < v.size(); ++i)
    v(i) = cplx(std::sin(1.0 + 0.37 * i), std::cos(0.71 * i));
  v.normalize();
  double logsum = 0.0;
  int counted = 0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXcd w = impl_->regular(v);
    const double g = w.norm();
    if (g == 0.0) return 0.0;
    if (it >= iterations / 2) {
      logsum += std::log(g);
      ++counted;
    }
    v = w / g;
  }
  return std::exp(logsum / counted);
}

cplx BsOperator::eigenvalue_near(cplx target, double tol) const {
  const cplx cl = coupling();
  auto secular = [&](cplx kappa) {
    const Eigen::VectorXcd z = solve_shifted(impl_->phat, kappa);
    return 1.0 + cl * impl_->functional(z);
  };
  cplx k0 = target, k1 = target * (1.0 + 1e-3) + 1e-6;
  cplx f0 = secular(k0), f1 = secular(k1);
  for (int it = 0; it < 60; ++it) {
    if (f1 == f0) break;
    const cplx k2 = k1 - f1 * (k1 - k0) / (f1 - f0);
    k0 = k1;
    f0 = f1;
    k1 = k2;
    if (std::abs(k1 - k0) < tol * std::max(1.0, std::abs(k1))) return k1;
    f1 = secular(k1);
  }
  if (std::abs(k1 - k0) < 1e3 * tol * std::max(1.0, std::abs(k1))) return k1;
  throw ConvergenceFailure("secular equation for the eigenvalue of K did not converge");
}

Eigen::MatrixXcd assemble_bs_operator(const SpectralVariable& sv,
                                      const WaveguideConfig& config,
                                      const BsDiscretization& disc) {
  BsOperator op(config, disc, sv);
  if (op.dimension() > 6000)
    throw ConfigError("dense BS assembly limited to 6000 unknowns; use BsOperator");
  return op.dense(true);
}

}  // namespace ptwg
