#include "polycover/optimizer.hpp"

#include "polycover/regeneration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polycover {

const char* method_name(Method m)
{
    return m == Method::TotalDegree ? "total-degree" : "regeneration";
}

std::optional<Method> parse_method(std::string_view text)
{
    if (text == "total-degree") return Method::TotalDegree;
    if (text == "regeneration") return Method::Regeneration;
    return std::nullopt;
}

const char* source_name(CandidateSource s)
{
    switch (s) {
    case CandidateSource::TotalDegree: return "total_degree";
    case CandidateSource::Regeneration: return "regeneration";
    case CandidateSource::EndpointEnumeration: return "endpoint_enumeration";
    }
    return "unknown";
}

namespace {

VectorXc embed_point(const StationarityInstance& inst, const VectorXc& free, const CoverageProblem& problem)
{
    const std::vector<Complex> values(free.data(), free.data() + free.size());
    auto full = inst.embed<Complex>(values, problem);
    return Eigen::Map<VectorXc>(full.data(), static_cast<Eigen::Index>(full.size()));
}

Census census_of(std::vector<Solution> points, double dedup_tol, double real_tol)
{
    const auto distinct = deduplicate(std::move(points), dedup_tol);
    Census c;
    c.complex_total = distinct.size();
    for (const auto& s : distinct) c.real_total += is_real(s.point, real_tol) ? 1 : 0;
    return c;
}

bool config_less(const Candidate& a, const Candidate& b)
{
    if (a.objective_value != b.objective_value) return a.objective_value < b.objective_value;
    return a.config.positions < b.config.positions;
}

double max_abs_diff(const Configuration& a, const Configuration& b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

} // namespace

CandidateSearch find_candidates(const CoverageModel& model, Method method, const OptimizerOptions& opts)
{
    const auto& problem = model.problem();
    CandidateSearch out;
    std::vector<Solution> embedded_all;
    std::vector<Solution> embedded_three;
    std::vector<Candidate> found;

    for (const auto& inst : model.enumerate_instances()) {
        InstanceReport report;
        report.pin = inst.pin;
        report.solutions = method == Method::TotalDegree ? solve_total_degree(inst.system, opts.solve)
                                                         : regenerate(inst.reduced_system, opts.solve);
        const auto& sols = report.solutions;
        if (sols.paths.failed > 0)
            out.warnings.push_back(pin_name(inst.pin) + ": " + std::to_string(sols.paths.failed) +
                                   " path(s) failed");
        for (const auto& lv : sols.levels)
            if (lv.failed + lv.stage_one_lost > 0)
                out.warnings.push_back(pin_name(inst.pin) + ": level " + std::to_string(lv.level) + " lost " +
                                       std::to_string(lv.failed + lv.stage_one_lost) + " path(s)");

        for (const auto& s : sols.solutions) {
            report.real += is_real(s.point, opts.real_tolerance) ? 1 : 0;
            Solution e = s;
            e.point = embed_point(inst, s.point, problem);
            embedded_all.push_back(e);
            if (!(inst.pin.left && inst.pin.right)) embedded_three.push_back(std::move(e));
        }

        const auto configs = classify(sols, opts.real_tolerance, problem, inst);
        report.feasible = configs.size();
        const CandidateSource source =
            inst.free_count() == 0 ? CandidateSource::EndpointEnumeration
            : method == Method::TotalDegree ? CandidateSource::TotalDegree
                                            : CandidateSource::Regeneration;
        for (const auto& config : configs) {
            Candidate c;
            c.config = config;
            c.pin = inst.pin;
            c.source = source;
            c.objective_value = model.objective(config);
            const auto g = model.gradient(config);
            for (int i : inst.free_indices) c.gradient_norm = std::max(c.gradient_norm, std::abs(g[static_cast<std::size_t>(i)]));
            if (inst.free_count() > 0) {
                try {
                    const auto H = model.hessian_fd(config, opts.hessian_step * problem.width(), inst.free_indices);
                    c.hessian_class = classify_hessian(H);
                }
                catch (const DegeneracyError&) {
                    c.hessian_class = HessianClass::NotApplicable;
                }
            }
            found.push_back(std::move(c));
        }
        out.instances.push_back(std::move(report));
    }

    out.all_patterns = census_of(embedded_all, opts.solve.dedup_tolerance, opts.real_tolerance);
    out.interior_left_right = census_of(embedded_three, opts.solve.dedup_tolerance, opts.real_tolerance);

    // A pinned solution can coincide with an interior one; keep the first seen.
    for (auto& c : found) {
        const bool dup = std::any_of(out.candidates.begin(), out.candidates.end(), [&](const Candidate& k) {
            return max_abs_diff(k.config, c.config) <= opts.solve.dedup_tolerance;
        });
        if (!dup) out.candidates.push_back(std::move(c));
    }
    std::sort(out.candidates.begin(), out.candidates.end(), config_less);
    out.feasible_total = out.candidates.size();
    return out;
}

const Candidate& select_winner(const std::vector<Candidate>& candidates, double tie_tolerance)
{
    if (candidates.empty()) throw StructuralError("no feasible candidate configurations");
    const auto lowest = std::min_element(candidates.begin(), candidates.end(), config_less);
    const double cutoff = lowest->objective_value + tie_tolerance * std::abs(lowest->objective_value);
    const Candidate* best = &*lowest;
    for (const auto& c : candidates)
        if (c.objective_value <= cutoff && c.config.positions < best->config.positions) best = &c;
    return *best;
}

GlobalResult global_minimum(const CoverageModel& model, Method method, const OptimizerOptions& opts)
{
    GlobalResult r;
    r.search = find_candidates(model, method, opts);
    r.winner = select_winner(r.search.candidates, opts.tie_tolerance);
    r.all_candidates = r.search.candidates;
    r.counts = r.search.all_patterns;
    r.feasible_total = r.search.feasible_total;
    return r;
}

// ---------------------------------------------------------------------------
// Grid search

namespace {

std::uint64_t choose(std::uint64_t n, std::uint64_t k)
{
    if (k > n) return 0;
    long double r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    return r > 1.8e19L ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(std::llround(r));
}

struct GridSearch {
    int m;
    int G;                     // grid points 0..G
    std::size_t stride;        // 2G + 1 half-grid columns
    const std::vector<double>* table;
    std::vector<int> idx;
    std::vector<int> best;
    double tie;
    double best_value = std::numeric_limits<double>::infinity();
    std::uint64_t evaluated = 0;

    double T(int i, int k) const { return (*table)[static_cast<std::size_t>(i) * stride + static_cast<std::size_t>(k)]; }

    // Vehicle `level` goes at grid index > prev; the previous vehicle's cell
    // started at half-grid column lo.
    void run(int level, int prev, int lo, double partial)
    {
        if (level == m) {
            const double total = partial + T(prev, 2 * G) - T(prev, lo);
            ++evaluated;
            // Enumeration is in lexicographic order, so the first of a set of
            // tied values is kept.
            if (best.empty() || total < best_value - tie * std::abs(best_value)) {
                best_value = total;
                best = idx;
            }
            return;
        }
        const int first = level == 0 ? 0 : prev + 1;
        for (int i = first; i <= G - (m - 1 - level); ++i) {
            idx[static_cast<std::size_t>(level)] = i;
            if (level == 0)
                run(1, i, 0, 0.0);
            else
                run(level + 1, i, prev + i, partial + T(prev, prev + i) - T(prev, lo));
        }
    }
};

} // namespace

BruteForceResult brute_force_check(const CoverageModel& model, double grid_step, std::uint64_t max_tuples,
                                   double tie_tolerance)
{
    if (!(grid_step > 0)) throw std::invalid_argument("grid step must be positive");
    const auto& problem = model.problem();
    const double A = problem.a();
    const double width = problem.width();
    const double cells = std::round(width / grid_step);
    if (cells < 1 || cells > 1e6) throw GridTooLarge("grid has an unreasonable number of cells");
    const int G = static_cast<int>(cells);
    const int m = problem.m;
    const std::uint64_t tuples = choose(static_cast<std::uint64_t>(G) + 1, static_cast<std::uint64_t>(m));
    if (tuples > max_tuples)
        throw GridTooLarge("grid search needs " + std::to_string(tuples) + " tuples (limit " +
                           std::to_string(max_tuples) + ")");
    if (tuples == 0) throw GridTooLarge("grid has fewer points than vehicles");

    const double h = width / G;
    const std::size_t stride = static_cast<std::size_t>(2 * G + 1);
    // table[i][k] = Psi(A + i h, A + k h / 2), Psi the antiderivative of the cell cost.
    std::vector<double> table(static_cast<std::size_t>(G + 1) * stride);
    std::vector<double> us(stride), vs(stride);
    for (std::size_t k = 0; k < stride; ++k) vs[k] = A + 0.5 * h * static_cast<double>(k);
    for (int i = 0; i <= G; ++i) {
        std::fill(us.begin(), us.end(), A + h * i);
        kernels::eval_batch(model.cost_antiderivative_dense(), us, vs,
                            std::span<double>(table.data() + static_cast<std::size_t>(i) * stride, stride));
    }

    GridSearch search{m, G, stride, &table, std::vector<int>(static_cast<std::size_t>(m)), {}, tie_tolerance};
    search.run(0, -1, 0, 0.0);

    BruteForceResult out;
    out.grid_step = h;
    out.evaluated = search.evaluated;
    for (int i : search.best) out.argmin.positions.push_back(A + h * i);
    out.objective = model.objective(out.argmin);
    return out;
}

} // namespace polycover
