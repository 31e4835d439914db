#pragma once

#include <cstddef>
#include <vector>

namespace lightam {

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    [[nodiscard]] std::size_t size() const { return nodes.size(); }
};

// n-point Gauss-Legendre rule on [a, b].
QuadRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Derivative matrix of the Lagrange interpolant through `nodes`:
// (D f)_i = sum_j D[i*n+j] f_j is exact for polynomials of degree < n.
std::vector<double> collocation_derivative(const std::vector<double>& nodes);

}  // namespace lightam
