#include "ptwg/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ptwg {

Quadrature gauss_legendre(int order, double a, double b) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order < 1");
  Quadrature q;
  q.nodes.resize(order);
  q.weights.resize(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= order; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = order * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute the derivative at the converged node
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= order; ++k) {
      double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = order * (z * p0 - p1) / (z * z - 1.0);
    double w = 2.0 / ((1.0 - z * z) * dp * dp);
    q.nodes[i] = mid - half * z;
    q.nodes[order - 1 - i] = mid + half * z;
    q.weights[i] = q.weights[order - 1 - i] = half * w;
  }
  return q;
}

Quadrature trapezoid(int cells, double a, double b) {
  if (cells < 1) throw std::invalid_argument("trapezoid: cells < 1");
  Quadrature q;
  const double h = (b - a) / cells;
  for (int i = 0; i <= cells; ++i) {
    q.nodes.push_back(a + i * h);
    q.weights.push_back((i == 0 || i == cells) ? 0.5 * h : h);
  }
  return q;
}

}  // namespace ptwg
