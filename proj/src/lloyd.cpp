#include "polycover/lloyd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace polycover {

void LloydOptions::validate() const
{
    if (max_iters < 0) throw std::invalid_argument("max_iters must be non-negative");
    if (!(grad_tol > 0)) throw std::invalid_argument("grad_tol must be positive");
    if (!(armijo_c > 0 && armijo_c < 1)) throw std::invalid_argument("armijo_c must lie in (0, 1)");
    if (!(shrink_rho > 0 && shrink_rho < 1)) throw std::invalid_argument("shrink_rho must lie in (0, 1)");
    if (!(initial_step > 0)) throw std::invalid_argument("initial_step must be positive");
    if (!(min_step > 0)) throw std::invalid_argument("min_step must be positive");
}

const char* termination_name(LloydTermination t)
{
    switch (t) {
    case LloydTermination::GradientTol: return "gradient_tol";
    case LloydTermination::MaxIters: return "max_iters";
    case LloydTermination::StepUnderflow: return "step_underflow";
    }
    return "unknown";
}

namespace {

double norm2(const std::vector<double>& g)
{
    double s = 0.0;
    for (double v : g) s += v * v;
    return std::sqrt(s);
}

bool feasible(const Configuration& c, const CoverageProblem& problem)
{
    try {
        validate_configuration(c, problem.a(), problem.b(), problem.coincidence_tol());
        return true;
    }
    catch (const DegeneracyError&) {
        return false;
    }
}

} // namespace

LloydStep lloyd_step(const CoverageModel& model, const Configuration& config, const LloydOptions& opts)
{
    const auto& problem = model.problem();
    const auto g = model.gradient(config);
    const double f0 = model.objective(config);
    LloydStep out{config, 0.0, false};
    if (norm2(g) == 0.0) return out;

    const double noise = 1e3 * std::numeric_limits<double>::epsilon() * std::abs(f0);
    double alpha = opts.initial_step;
    while (alpha >= opts.min_step) {
        Configuration trial = config;
        for (std::size_t i = 0; i < trial.size(); ++i) {
            double p = config[i] - alpha * g[i];
            if (opts.projection) p = std::clamp(p, problem.a(), problem.b());
            trial.positions[i] = p;
        }
        if (!feasible(trial, problem)) {
            alpha *= 0.5;
            continue;
        }
        if (trial == config) break;
        // Sufficient decrease along the actual (possibly clamped) move;
        // without clamping this is f0 - c * alpha * |g|^2.
        double decrease = 0.0;
        for (std::size_t i = 0; i < trial.size(); ++i) decrease += g[i] * (config[i] - trial[i]);
        const double f1 = model.objective(trial);
        bool accept = f1 <= f0 - opts.armijo_c * decrease;
        if (!accept && opts.armijo_c * decrease < noise) {
            // Objective differences are below rounding: require no increase
            // beyond the noise and a slope at the trial point that has not
            // turned too far (approximate Wolfe test).
            const auto g1 = model.gradient(trial);
            double slope = 0.0;
            for (std::size_t i = 0; i < trial.size(); ++i) slope += g1[i] * (config[i] - trial[i]);
            accept = f1 <= f0 + noise && slope >= -(1.0 - 2.0 * opts.armijo_c) * decrease;
        }
        if (accept) {
            out.config = std::move(trial);
            out.step = alpha;
            return out;
        }
        alpha *= opts.shrink_rho;
    }
    out.underflow = true;
    return out;
}

LloydTrace lloyd_run(const CoverageModel& model, const Configuration& initial, const LloydOptions& opts)
{
    opts.validate();
    const auto& problem = model.problem();
    if (static_cast<int>(initial.size()) != problem.m)
        throw DegeneracyError("initial configuration size differs from vehicle count");
    validate_configuration(initial, problem.a(), problem.b(), problem.coincidence_tol());

    LloydTrace trace;
    auto record = [&](const Configuration& c, double step) {
        trace.iterates.push_back({c, model.objective(c), norm2(model.gradient(c)), step});
    };
    record(initial, 0.0);
    for (int k = 0;; ++k) {
        const auto& cur = trace.iterates.back();
        if (cur.gradient_norm < opts.grad_tol) {
            trace.terminated_by = LloydTermination::GradientTol;
            break;
        }
        if (k >= opts.max_iters) {
            trace.terminated_by = LloydTermination::MaxIters;
            break;
        }
        const auto s = lloyd_step(model, cur.config, opts);
        if (s.underflow) {
            trace.terminated_by = LloydTermination::StepUnderflow;
            break;
        }
        record(s.config, s.step);
    }
    return trace;
}

Configuration random_configuration(const CoverageProblem& problem, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(problem.a(), problem.b());
    for (;;) {
        Configuration c;
        for (int i = 0; i < problem.m; ++i) c.positions.push_back(uni(rng));
        std::sort(c.positions.begin(), c.positions.end());
        if (feasible(c, problem)) return c;
    }
}

Configuration symmetric_configuration(const CoverageProblem& problem, double a)
{
    const double mid = 0.5 * (problem.a() + problem.b());
    const double half = 0.5 * problem.width();
    if (!(a > 0 && a < 1)) throw std::invalid_argument("symmetric start needs 0 < a < 1");
    Configuration c;
    const int m = problem.m;
    if (m == 1) {
        c.positions.push_back(mid);
        return c;
    }
    for (int i = 0; i < m; ++i) c.positions.push_back(mid + a * half * (-1.0 + 2.0 * i / (m - 1)));
    return c;
}

} // namespace polycover
