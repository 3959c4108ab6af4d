#pragma once

#include <complex>

namespace ptwg {

// Modified Bessel functions of the second kind, orders 0 and 1.
// Real arguments require z > 0 (DomainError otherwise); complex arguments
// require Re z > 0 or z on the positive real axis.
double bessel_k(int order, double z);
std::complex<double> bessel_k(int order, std::complex<double> z);

// K0(z) + log(s) for z = s * r, evaluated without the cancellation that a
// direct sum suffers when s -> 0 (s complex, r > 0).
std::complex<double> bessel_k0_plus_log(std::complex<double> s, double r);

}  // namespace ptwg

namespace ptwg {

// K0 and K1 at the same argument (real z > 0).
struct BesselK01 {
  double k0, k1;
};
BesselK01 bessel_k01(double z);

}  // namespace ptwg
