#pragma once
// Total-degree solver: tracks every start point of x_i^{d_i} - 1 in projective
// space, refines finite endpoints, deduplicates and classifies them.

#include "polycover/homotopy.hpp"
#include "polycover/problem.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace polycover {

struct SolveOptions {
    TrackerOptions tracker;
    std::uint64_t seed = 0;
    int threads = 1;
    double dedup_tolerance = 1e-8;
    /// Newton stops when the update is below this (relative) size.
    double refine_tolerance = 1e-12;
    int refine_iters = 25;
    /// Endpoints whose affine coordinates exceed this are at infinity.
    double infinity_threshold = 1e8;
    /// Fresh gamma draws allowed when some path fails.
    int max_attempts = 4;
    /// Regeneration works on f_i + sum_{j > i} r_ij f_j with random r_ij.
    bool mix_equations = true;
};

struct Solution {
    VectorXc point;
    double residual = 0.0;
    bool singular = false;
    int multiplicity = 1; ///< paths that ended here
};

struct PathCounts {
    std::uint64_t converged = 0;
    std::uint64_t diverged = 0;
    std::uint64_t failed = 0;

    std::uint64_t total() const { return converged + diverged + failed; }
};

struct LevelStats {
    int level = 0;             ///< equations included after this level
    int degree = 0;            ///< degree of the equation added
    std::uint64_t start_points = 0;
    std::uint64_t stage_one_paths = 0;
    std::uint64_t stage_one_lost = 0;  ///< stage-one paths that did not arrive
    std::uint64_t stage_two_paths = 0;
    std::uint64_t at_infinity = 0;
    std::uint64_t singular_dropped = 0;
    std::uint64_t failed = 0;
    std::uint64_t solutions = 0;
};

struct SolutionSet {
    std::string method;
    std::vector<std::string> vars;
    std::vector<Solution> solutions; ///< sorted lexicographically
    double dedup_tolerance = 1e-8;
    PathCounts paths;
    double theta = 0.0;
    std::uint64_t seed = 0;
    int attempts = 1;
    std::vector<LevelStats> levels; ///< regeneration only
    /// Regeneration slice coefficients, one row per linear form, over (_h0, vars...).
    std::vector<VectorXc> slices;

    std::size_t size() const { return solutions.size(); }
};

/// Lexicographic order on (re, im) of each coordinate.
bool lex_less(const VectorXc& a, const VectorXc& b);

/// Sorts and merges points closer than `tol` in max-norm. Merged points add
/// their multiplicities; the representative with the smaller residual wins.
std::vector<Solution> deduplicate(std::vector<Solution> points, double tol);

/// Tracks every start point, in parallel when threads > 1. Results are in input order.
std::vector<PathResult> track_all(const Homotopy& h, const std::vector<VectorXc>& starts,
                                  const TrackerOptions& opts, int threads);

/// Random complex patch c with the projective point z normalized to c . z = 1.
struct ProjectivePatch {
    VectorXc c;

    static ProjectivePatch random(std::size_t dim, std::mt19937_64& rng);
    VectorXc lift(const VectorXc& affine) const;        ///< (1, x) scaled onto the patch
    double affine_magnitude(const VectorXc& z) const;    ///< max |z_j / z_0|
    VectorXc affine(const VectorXc& z) const;            ///< z_{1..} / z_0
    /// Row for StraightLineHomotopy (which applies the conjugated dot product).
    VectorXc row() const { return c.conjugate(); }
};

/// Homogenizes every equation with leading variable "_h0".
ComplexSystem homogenize_system(const ComplexSystem& sys);

/// Refines an affine endpoint: Newton first, singular Gauss-Newton if Newton
/// fails to converge quadratically.
Solution finish_endpoint(const CompiledSystem& sys, const VectorXc& affine, const SolveOptions& opts);

SolutionSet solve_total_degree(const PolynomialSystem& sys, const SolveOptions& opts);
SolutionSet solve_total_degree(const ComplexSystem& sys, const SolveOptions& opts);

bool is_real(const VectorXc& point, double real_tol);

/// Real, in-domain, strictly ordered configurations from an instance's solutions.
std::vector<Configuration> classify(const SolutionSet& solutions, double real_tol,
                                    const CoverageProblem& problem, const StationarityInstance& instance);

} // namespace polycover
