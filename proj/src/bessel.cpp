#include "ptwg/bessel.hpp"

#include <cmath>
#include <numbers>

#include "ptwg/errors.hpp"

namespace ptwg {

namespace {

constexpr double euler_gamma = 0.57721566490153286061;

template <class T>
struct K01 {
  T k0, k1;
};

// Power series with logarithm, accurate for |z| <= 2.
template <class T>
K01<T> series(T z) {
  const T q = z * z / 4.0;
  const T lg = std::log(z / 2.0);
  T term0 = 1.0;         // (z^2/4)^m / (m!)^2
  T term1 = z / 2.0;     // (z/2)(z^2/4)^m / (m!(m+1)!)
  T i0 = 0.0, i1 = 0.0, s0 = 0.0, s1 = 0.0;
  double harm = 0.0;     // H_m
  for (int m = 0; m < 60; ++m) {
    if (m > 0) {
      harm += 1.0 / m;
      term0 *= q / (double(m) * m);
      term1 *= q / (double(m) * (m + 1));
    }
    i0 += term0;
    i1 += term1;
    s0 += term0 * harm;
    // psi(m+1) + psi(m+2) = 2 H_m + 1/(m+1) - 2 gamma
    s1 += term1 * (2.0 * harm + 1.0 / (m + 1) - 2.0 * euler_gamma);
    if (std::abs(term0) < 1e-18 * std::abs(i0) &&
        std::abs(term1) < 1e-18 * std::abs(i1))
      break;
  }
  K01<T> r;
  r.k0 = -(lg + euler_gamma) * i0 + s0;
  r.k1 = 1.0 / z + lg * i1 - s1 / 2.0;
  return r;
}

// Steed's continued fraction for K_0 and K_1, accurate for |z| >= 2.
template <class T>
K01<T> continued_fraction(T z) {
  T b = 2.0 * (1.0 + z);
  T d = 1.0 / b;
  T h = d, delh = d;
  T q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25;
  T q = a1, c = a1;
  double a = -a1;
  T s = 1.0 + q * delh;
  for (int i = 1; i < 100000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    T qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    T dels = q * delh;
    s += dels;
    if (std::abs(dels) < 1e-17 * std::abs(s)) break;
  }
  h = a1 * h;
  K01<T> r;
  r.k0 = std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z) / s;
  r.k1 = r.k0 * (z + 0.5 - h) / z;
  return r;
}

template <class T>
K01<T> k01(T z) {
  return std::abs(z) <= 2.0 ? series(z) : continued_fraction(z);
}

}  // namespace

double bessel_k(int order, double z) {
  if (!(z > 0.0)) throw DomainError("bessel_k requires z > 0");
  if (order != 0 && order != 1) throw DomainError("bessel_k order must be 0 or 1");
  if (z > 740.0) return 0.0;
  const auto r = k01(z);
  return order == 0 ? r.k0 : r.k1;
}

std::complex<double> bessel_k(int order, std::complex<double> z) {
  if (z.real() <= 0.0) throw DomainError("bessel_k requires Re z > 0");
  if (order != 0 && order != 1) throw DomainError("bessel_k order must be 0 or 1");
  if (z.real() > 740.0) return 0.0;
  const auto r = k01(z);
  return order == 0 ? r.k0 : r.k1;
}

std::complex<double> bessel_k0_plus_log(std::complex<double> s, double r) {
  const std::complex<double> z = s * r;
  if (std::abs(z) > 2.0) return bessel_k(0, z) + std::log(s);
  // K0(z) + log s = -(log(r/2) + gamma) I0(z) - log(s) (I0(z) - 1) + S0(z)
  const std::complex<double> q = z * z / 4.0;
  std::complex<double> term = 1.0, i0m1 = 0.0, s0 = 0.0;
  double harm = 0.0;
  for (int m = 1; m < 60; ++m) {
    harm += 1.0 / m;
    term *= q / (double(m) * m);
    i0m1 += term;
    s0 += term * harm;
    if (std::abs(term) < 1e-18) break;
  }
  const double c = std::log(r / 2.0) + euler_gamma;
  return -c * (1.0 + i0m1) - std::log(s) * i0m1 + s0;
}

}  // namespace ptwg

namespace ptwg {

BesselK01 bessel_k01(double z) {
  if (!(z > 0.0)) throw DomainError("bessel_k requires z > 0");
  if (z > 740.0) return {0.0, 0.0};
  const auto r = k01(z);
  return {r.k0, r.k1};
}

}  // namespace ptwg
