#pragma once

#include <array>
#include <functional>
#include <string>

namespace ptwg {

using Point = std::array<double, 2>;  // longitudinal point; n = 1 uses x[0]

enum class DecayClass { gaussian, compact_bump, custom };

// The perturbation beta of the boundary coupling alpha = alpha0 + eps beta.
class PerturbationProfile {
 public:
  using ScalarFn = std::function<double(const Point&)>;
  using VectorFn = std::function<Point(const Point&)>;

  // amplitude * exp(-|x - c|^2 / width^2)
  static PerturbationProfile gaussian(int n, double amplitude, double width,
                                      Point center = {0.0, 0.0});
  // Gaussian of the given width scaled to have the prescribed mean.
  static PerturbationProfile gaussian_with_mean(int n, double mean,
                                                double width);
  // amplitude * (1 - |x - c|^2 / width^2)^3 inside the ball, zero outside (C^2).
  static PerturbationProfile bump(int n, double amplitude, double width,
                                  Point center = {0.0, 0.0});
  static PerturbationProfile custom(int n, ScalarFn value, VectorFn grad,
                                    ScalarFn hess_trace, double mean,
                                    double support_radius);

  double eval(const Point& x) const { return value_(x); }
  Point grad(const Point& x) const { return grad_(x); }
  double hess_trace(const Point& x) const { return lap_(x); }
  double mean() const { return mean_; }
  int dimension() const { return n_; }
  DecayClass decay_class() const { return decay_; }
  // Exponent of the algebraic decay hypothesis (5 for n = 1, 4 for n = 2).
  double decay_exponent() const { return n_ == 1 ? 5.0 : 4.0; }
  const std::string& description() const { return desc_; }

  // Radius about the profile centre beyond which |beta|, |grad beta| and
  // |hess_trace beta| stay below tol.
  double support_radius(double tol = 1e-10) const;

  // |x|^(exponent + delta) |beta| sampled at |x| in {10, 20, 40} must decrease
  // monotonically and end below 1e-6.
  bool satisfies_decay(double delta = 0.5) const;

  // Mean by tensor Gauss-Legendre quadrature over the support box.
  double mean_by_quadrature() const;

  // Copy with beta replaced by -beta.
  PerturbationProfile negated() const;

 private:
  int n_ = 1;
  DecayClass decay_ = DecayClass::custom;
  ScalarFn value_, lap_;
  VectorFn grad_;
  double mean_ = 0.0;
  Point center_{0.0, 0.0};
  double reach_ = 0.0;  // scale used for the support search
  std::string desc_;
};

}  // namespace ptwg
