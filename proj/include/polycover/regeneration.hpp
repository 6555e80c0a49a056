#pragma once
// Equation-by-equation solving. Level s holds the solutions of the first s
// equations cut by generic linear slices; each level adds one equation through
// a slice-moving homotopy (stage one) and a product-of-slices homotopy (stage
// two). All tracking happens in projective space on a random patch.

#include "polycover/solver.hpp"

namespace polycover {

SolutionSet regenerate(const ComplexSystem& sys, const SolveOptions& opts);
SolutionSet regenerate(const PolynomialSystem& sys, const SolveOptions& opts);

/// Solutions of the square system formed by the equation prefix and one
/// affine linear slice a_0 + sum_j a_j x_j = 0 per remaining variable (each
/// slice row holds (a_0, a_1, ..., a_n)). Solved with the total-degree engine.
SolutionSet slice_solutions(const ComplexSystem& prefix, const std::vector<VectorXc>& slices,
                            const SolveOptions& opts);

} // namespace polycover
