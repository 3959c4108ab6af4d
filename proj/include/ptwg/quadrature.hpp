#pragma once

#include <vector>

namespace ptwg {

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

// Gauss-Legendre rule with `order` nodes mapped to [a, b].
Quadrature gauss_legendre(int order, double a, double b);

// Composite trapezoid rule on `cells` equal cells of [a, b].
Quadrature trapezoid(int cells, double a, double b);

}  // namespace ptwg
