#pragma once
// Candidate enumeration over all boundary-pin instances, global minimum
// selection, and an exhaustive grid search used as an independent check.

#include "polycover/problem.hpp"
#include "polycover/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace polycover {

enum class Method { TotalDegree, Regeneration };

const char* method_name(Method m); // "total-degree", "regeneration"
std::optional<Method> parse_method(std::string_view text);

enum class CandidateSource { TotalDegree, Regeneration, EndpointEnumeration };

const char* source_name(CandidateSource s);

struct Candidate {
    Configuration config;
    double objective_value = 0.0;
    BoundaryPin pin;
    HessianClass hessian_class = HessianClass::NotApplicable;
    CandidateSource source = CandidateSource::TotalDegree;
    /// Max-norm of the gradient over the free coordinates.
    double gradient_norm = 0.0;
};

/// Distinct complex / real solutions over a set of instances, embedded in C^m.
struct Census {
    std::size_t complex_total = 0;
    std::size_t real_total = 0;
};

struct InstanceReport {
    BoundaryPin pin;
    SolutionSet solutions;
    std::size_t real = 0;
    std::size_t feasible = 0;
};

struct CandidateSearch {
    std::vector<Candidate> candidates; ///< sorted by objective, then lexicographically
    std::vector<InstanceReport> instances;
    Census interior_left_right; ///< instances without the both-pinned pattern
    Census all_patterns;
    std::size_t feasible_total = 0;
    std::vector<std::string> warnings;
};

struct OptimizerOptions {
    SolveOptions solve;
    double real_tolerance = 1e-8;
    double hessian_step = 1e-5; ///< relative to B - A
    /// Objectives within this relative distance of the lowest count as tied.
    double tie_tolerance = 1e-10;
};

/// Solves every instance with the chosen engine and collects the real,
/// ordered, in-domain solutions with objective and Hessian class.
CandidateSearch find_candidates(const CoverageModel& model, Method method, const OptimizerOptions& opts);

struct GlobalResult {
    Candidate winner;
    std::vector<Candidate> all_candidates;
    Census counts;               ///< over all enumerated instances
    std::size_t feasible_total = 0;
    CandidateSearch search;
};

/// Lowest objective among the candidates; ties (relative tie_tolerance) go to
/// the lexicographically smallest configuration.
GlobalResult global_minimum(const CoverageModel& model, Method method, const OptimizerOptions& opts);

/// Picks the winner from an existing candidate list.
const Candidate& select_winner(const std::vector<Candidate>& candidates, double tie_tolerance = 1e-10);

struct BruteForceResult {
    Configuration argmin;
    double objective = 0.0;
    std::uint64_t evaluated = 0;
    double grid_step = 0.0; ///< actual spacing (B - A) / round((B - A) / requested)
};

class GridTooLarge : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Minimizes the objective over all strictly ordered m-tuples of grid points
/// A + k * step, with the same tie rule as the winner selection. Throws GridTooLarge when the tuple count exceeds max_tuples.
BruteForceResult brute_force_check(const CoverageModel& model, double grid_step,
                                   std::uint64_t max_tuples = 2'000'000'000ULL, double tie_tolerance = 1e-10);

} // namespace polycover
