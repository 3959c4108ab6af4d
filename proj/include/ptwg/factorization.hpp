#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "ptwg/config.hpp"
#include "ptwg/profile.hpp"

namespace ptwg {

using cplx = std::complex<double>;

enum class FactorDerivative { none, x1, x2, u };

// One pair A_i^*, B_i of the factorization of the gauge-transformed
// perturbation.  A_i^* multiplies by coeff * left(x) * u^u_power;
// B_i applies the derivative and multiplies by right(x).
struct FactorPair {
  std::string label;
  cplx coeff;
  int u_power = 0;
  FactorDerivative derivative = FactorDerivative::none;
  std::function<double(const Point&)> left;
  std::function<double(const Point&)> right;
  bool second_order = false;  // belongs to the eps-scaled group

  cplx a(const Point& x) const { return coeff * left(x); }
  double b(const Point& x) const { return right(x); }
};

// Value and first derivatives of a field at one point.
struct FieldJet {
  cplx value;
  cplx dx1, dx2, du;
};

struct FactorizedPerturbation {
  int n = 1;
  double epsilon = 0.0;
  std::vector<FactorPair> pairs;

  int size() const { return static_cast<int>(pairs.size()); }
  // sum_i A_i^* B_i Psi + eps sum_i ... at (x, u), i.e. Z applied via factors.
  cplx apply(const Point& x, double u, const FieldJet& jet) const;
};

// sgn(f) |f|^(1/2)
double signed_sqrt(double f);

FactorizedPerturbation factorize_perturbation(const PerturbationProfile& beta,
                                              int n, double epsilon);

// Z applied directly from its definition.
cplx apply_gauge_perturbation(const PerturbationProfile& beta, int n,
                              double epsilon, const Point& x, double u,
                              const FieldJet& jet);

// Second-order finite-difference residual of the gauge identity
//   U^{-1} H_alpha U Psi = (H_alpha0 + eps Z) Psi
// at interior nodes of [-half_length, half_length]^n x [0, d] with step h
// (n = 1 only).  Returns the discrete L2 norm of the difference.
double gauge_transform_check(const WaveguideConfig& config,
                             const std::function<cplx(double, double)>& field,
                             double half_length, double h);

}  // namespace ptwg
