#include "ptwg/profile.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ptwg/errors.hpp"
#include "ptwg/quadrature.hpp"

namespace ptwg {

namespace {
constexpr double pi = std::numbers::pi;

void check_dim(int n) {
  if (n != 1 && n != 2) throw ConfigError("profile dimension must be 1 or 2");
}

double dist2(int n, const Point& x, const Point& c) {
  double s = (x[0] - c[0]) * (x[0] - c[0]);
  if (n == 2) s += (x[1] - c[1]) * (x[1] - c[1]);
  return s;
}
}  // namespace

PerturbationProfile PerturbationProfile::gaussian(int n, double amplitude,
                                                  double width, Point center) {
  check_dim(n);
  if (!(width > 0.0)) throw ConfigError("gaussian width must be positive");
  PerturbationProfile p;
  p.n_ = n;
  p.decay_ = DecayClass::gaussian;
  p.center_ = center;
  p.reach_ = width;
  const double w2 = width * width;
  p.value_ = [=](const Point& x) {
    return amplitude * std::exp(-dist2(n, x, center) / w2);
  };
  p.grad_ = [=](const Point& x) {
    const double b = amplitude * std::exp(-dist2(n, x, center) / w2);
    Point g{-2.0 * (x[0] - center[0]) / w2 * b, 0.0};
    if (n == 2) g[1] = -2.0 * (x[1] - center[1]) / w2 * b;
    return g;
  };
  p.lap_ = [=](const Point& x) {
    const double r2 = dist2(n, x, center);
    const double b = amplitude * std::exp(-r2 / w2);
    return (4.0 * r2 / (w2 * w2) - 2.0 * n / w2) * b;
  };
  p.mean_ = amplitude * std::pow(width * std::sqrt(pi), n);
  std::ostringstream os;
  os << "gaussian(amplitude=" << amplitude << ", width=" << width << ")";
  p.desc_ = os.str();
  return p;
}

PerturbationProfile PerturbationProfile::gaussian_with_mean(int n, double mean,
                                                            double width) {
  check_dim(n);
  return gaussian(n, mean / std::pow(width * std::sqrt(pi), n), width);
}

PerturbationProfile PerturbationProfile::bump(int n, double amplitude,
                                              double width, Point center) {
  check_dim(n);
  if (!(width > 0.0)) throw ConfigError("bump width must be positive");
  PerturbationProfile p;
  p.n_ = n;
  p.decay_ = DecayClass::compact_bump;
  p.center_ = center;
  p.reach_ = width;
  const double w2 = width * width;
  p.value_ = [=](const Point& x) {
    const double s = dist2(n, x, center) / w2;
    return s < 1.0 ? amplitude * std::pow(1.0 - s, 3) : 0.0;
  };
  p.grad_ = [=](const Point& x) {
    const double s = dist2(n, x, center) / w2;
    if (s >= 1.0) return Point{0.0, 0.0};
    const double f1 = -3.0 * amplitude * (1.0 - s) * (1.0 - s);
    Point g{f1 * 2.0 * (x[0] - center[0]) / w2, 0.0};
    if (n == 2) g[1] = f1 * 2.0 * (x[1] - center[1]) / w2;
    return g;
  };
  p.lap_ = [=](const Point& x) {
    const double r2 = dist2(n, x, center);
    const double s = r2 / w2;
    if (s >= 1.0) return 0.0;
    const double f1 = -3.0 * amplitude * (1.0 - s) * (1.0 - s);
    const double f2 = 6.0 * amplitude * (1.0 - s);
    return f2 * 4.0 * r2 / (w2 * w2) + f1 * 2.0 * n / w2;
  };
  p.mean_ = n == 1 ? amplitude * width * 32.0 / 35.0
                   : amplitude * w2 * pi / 4.0;
  std::ostringstream os;
  os << "bump(amplitude=" << amplitude << ", width=" << width << ")";
  p.desc_ = os.str();
  return p;
}

PerturbationProfile PerturbationProfile::custom(int n, ScalarFn value,
                                                VectorFn grad,
                                                ScalarFn hess_trace,
                                                double mean,
                                                double support_radius) {
  check_dim(n);
  PerturbationProfile p;
  p.n_ = n;
  p.decay_ = DecayClass::custom;
  p.value_ = std::move(value);
  p.grad_ = std::move(grad);
  p.lap_ = std::move(hess_trace);
  p.mean_ = mean;
  p.reach_ = support_radius;
  p.desc_ = "custom";
  return p;
}

double PerturbationProfile::support_radius(double tol) const {
  auto big = [&](double r) {
    // probe along the axes and diagonals of the centred frame
    const int dirs = n_ == 1 ? 2 : 8;
    for (int k = 0; k < dirs; ++k) {
      const double th = n_ == 1 ? k * pi : k * pi / 4.0;
      Point x{center_[0] + r * std::cos(th),
              n_ == 2 ? center_[1] + r * std::sin(th) : 0.0};
      const Point g = grad(x);
      if (std::abs(eval(x)) >= tol || std::abs(g[0]) >= tol ||
          std::abs(g[1]) >= tol || std::abs(hess_trace(x)) >= tol)
        return true;
    }
    return false;
  };
  const double step = 0.01 * reach_;
  double r = 0.0, last_big = 0.0;
  // scan far enough that tails are certainly resolved
  for (; r <= 100.0 * reach_; r += step)
    if (big(r)) last_big = r;
  return last_big + step + std::hypot(center_[0], center_[1]);
}

bool PerturbationProfile::satisfies_decay(double delta) const {
  const double p = decay_exponent() + delta;
  double prev = std::numeric_limits<double>::infinity();
  double last = 0.0;
  for (double r : {10.0, 20.0, 40.0}) {
    Point x{center_[0] + r, center_[1]};
    const double v = std::pow(r, p) * std::abs(eval(x));
    if (v > prev) return false;
    prev = last = v;
  }
  return last < 1e-6;
}

double PerturbationProfile::mean_by_quadrature() const {
  const double R = support_radius(1e-17);
  const int panels = 64;
  double total = 0.0;
  const double hp = 2.0 * R / panels;
  std::vector<Quadrature> q;
  for (int p = 0; p < panels; ++p)
    q.push_back(gauss_legendre(12, -R + p * hp, -R + (p + 1) * hp));
  if (n_ == 1) {
    for (const auto& qq : q)
      for (int a = 0; a < qq.size(); ++a)
        total += qq.weights[a] * eval({center_[0] + qq.nodes[a], 0.0});
  } else {
    for (const auto& qa : q)
      for (int a = 0; a < qa.size(); ++a)
        for (const auto& qb : q)
          for (int b = 0; b < qb.size(); ++b)
            total += qa.weights[a] * qb.weights[b] *
                     eval({center_[0] + qa.nodes[a], center_[1] + qb.nodes[b]});
  }
  return total;
}

PerturbationProfile PerturbationProfile::negated() const {
  PerturbationProfile p = *this;
  auto v = value_;
  auto g = grad_;
  auto l = lap_;
  p.value_ = [v](const Point& x) { return -v(x); };
  p.grad_ = [g](const Point& x) {
    Point r = g(x);
    return Point{-r[0], -r[1]};
  };
  p.lap_ = [l](const Point& x) { return -l(x); };
  p.mean_ = -mean_;
  p.desc_ = "-" + desc_;
  return p;
}

}  // namespace ptwg
