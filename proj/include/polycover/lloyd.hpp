#pragma once
// Lloyd-style descent: synchronous gradient steps on the stacked Voronoi
// gradient with Armijo backtracking, kept inside the ordered feasible set.

#include "polycover/problem.hpp"

#include <cstdint>
#include <vector>

namespace polycover {

struct LloydOptions {
    int max_iters = 10000;
    double grad_tol = 1e-9;
    double armijo_c = 1e-4;
    double shrink_rho = 0.5;
    double initial_step = 1.0;
    bool projection = true; ///< clamp positions to [A, B]
    double min_step = 1e-14;

    void validate() const;
};

struct LloydIterate {
    Configuration config;
    double objective = 0.0;
    double gradient_norm = 0.0;
    double step = 0.0; ///< step accepted to reach this iterate (0 for the start)
};

enum class LloydTermination { GradientTol, MaxIters, StepUnderflow };

const char* termination_name(LloydTermination t);

struct LloydTrace {
    std::vector<LloydIterate> iterates;
    LloydTermination terminated_by = LloydTermination::MaxIters;

    const LloydIterate& final() const { return iterates.back(); }
};

struct LloydStep {
    Configuration config;
    double step = 0.0;
    bool underflow = false; ///< no acceptable step above min_step; config unchanged
};

LloydStep lloyd_step(const CoverageModel& model, const Configuration& config, const LloydOptions& opts);

LloydTrace lloyd_run(const CoverageModel& model, const Configuration& initial, const LloydOptions& opts);

/// Ordered configuration drawn uniformly from [A, B]^m (sorted draws, redrawn
/// while two positions are within the coincidence tolerance).
Configuration random_configuration(const CoverageProblem& problem, std::uint64_t seed);

/// (-a, 0, a)-style start scaled to the interval: centre -/+ a * half-width,
/// with the remaining vehicles spread evenly in between.
Configuration symmetric_configuration(const CoverageProblem& problem, double a);

} // namespace polycover
