#pragma once

#include <Eigen/Core>

#include <array>
#include <vector>

namespace plates {

// Integral of prod lambda_k^a_k over a simplex of measure `measure` in
// dimension `dim` (a.size() == dim + 1).
double simplex_monomial_integral(const std::vector<int>& a, double measure);

// Barycentric points and weights summing to one (weights may be negative).
struct SimplexRule {
    std::vector<Eigen::Vector4d> points;
    std::vector<double> weights;
};

// Grundmann-Moeller rule on a tetrahedron, exact for degree 2s + 1.
const SimplexRule& grundmann_moeller_tet(int s);

}  // namespace plates
