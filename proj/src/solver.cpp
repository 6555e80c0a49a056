#include "polycover/solver.hpp"

#include "polycover/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace polycover {

bool lex_less(const VectorXc& a, const VectorXc& b)
{
    const auto n = std::min(a.size(), b.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
        if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
    }
    return a.size() < b.size();
}

std::vector<Solution> deduplicate(std::vector<Solution> points, double tol)
{
    std::sort(points.begin(), points.end(),
              [](const Solution& a, const Solution& b) { return lex_less(a.point, b.point); });
    std::vector<Solution> out;
    for (auto& p : points) {
        auto hit = std::find_if(out.begin(), out.end(), [&](const Solution& q) {
            return q.point.size() == p.point.size() &&
                   (q.point.size() == 0 || (q.point - p.point).cwiseAbs().maxCoeff() <= tol);
        });
        if (hit == out.end()) {
            out.push_back(std::move(p));
            continue;
        }
        hit->multiplicity += p.multiplicity;
        hit->singular = hit->singular || p.singular;
        if (p.residual < hit->residual) {
            hit->point = p.point;
            hit->residual = p.residual;
        }
    }
    // Representatives may have moved; restore the ordering.
    std::sort(out.begin(), out.end(),
              [](const Solution& a, const Solution& b) { return lex_less(a.point, b.point); });
    return out;
}

std::vector<PathResult> track_all(const Homotopy& h, const std::vector<VectorXc>& starts,
                                  const TrackerOptions& opts, int threads)
{
    std::vector<PathResult> out(starts.size());
    parallel_for(starts.size(), threads, [&](std::size_t i) { out[i] = track_path(h, starts[i], opts); });
    return out;
}

// ---------------------------------------------------------------------------

ProjectivePatch ProjectivePatch::random(std::size_t dim, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    ProjectivePatch p;
    p.c.resize(static_cast<Eigen::Index>(dim));
    for (auto& v : p.c) v = Complex(normal(rng), normal(rng));
    return p;
}

VectorXc ProjectivePatch::lift(const VectorXc& affine) const
{
    VectorXc z(affine.size() + 1);
    z[0] = 1.0;
    z.tail(affine.size()) = affine;
    const Complex s = c.transpose() * z;
    return z / s;
}

double ProjectivePatch::affine_magnitude(const VectorXc& z) const
{
    const double h = std::abs(z[0]);
    const double rest = z.size() > 1 ? z.tail(z.size() - 1).cwiseAbs().maxCoeff() : 0.0;
    if (h == 0.0) return rest > 0 ? INFINITY : 0.0;
    return rest / h;
}

VectorXc ProjectivePatch::affine(const VectorXc& z) const
{
    return z.tail(z.size() - 1) / z[0];
}

ComplexSystem homogenize_system(const ComplexSystem& sys)
{
    std::vector<ComplexPolynomial> eqs;
    for (std::size_t i = 0; i < sys.size(); ++i)
        eqs.push_back(homogenize(sys[i], "_h0", sys.degrees()[i]));
    std::vector<std::string> vars{"_h0"};
    vars.insert(vars.end(), sys.vars().begin(), sys.vars().end());
    return {std::move(eqs), vars};
}

Solution finish_endpoint(const CompiledSystem& sys, const VectorXc& affine, const SolveOptions& opts)
{
    Solution s;
    auto r = refine_newton(sys, affine, opts.refine_tolerance, opts.refine_iters);
    if (!r.converged) {
        r = refine_singular(sys, affine, opts.refine_iters);
        s.singular = true;
    }
    s.point = r.point;
    s.residual = sys.residual_extended({r.point.data(), static_cast<std::size_t>(r.point.size())});
    if (s.singular) return s;
    // Polish with the residual in extended precision.
    VectorXc values;
    MatrixXc jac;
    for (int k = 0; k < 3 && s.residual > 0; ++k) {
        const std::span<const Complex> xs(s.point.data(), static_cast<std::size_t>(s.point.size()));
        sys.evaluate(xs, values, jac);
        sys.evaluate_extended(xs, values);
        const VectorXc next = s.point - jac.partialPivLu().solve(values);
        const double res = sys.residual_extended({next.data(), static_cast<std::size_t>(next.size())});
        if (!(res < s.residual)) break;
        s.point = next;
        s.residual = res;
    }
    return s;
}

namespace {

SolutionSet solve_numeric(const ComplexSystem& F, const SolveOptions& opts)
{
    if (!F.is_square()) throw StructuralError("total-degree solver needs a square system");
    opts.tracker.validate();

    SolutionSet out;
    out.method = "total-degree";
    out.vars = F.vars();
    out.dedup_tolerance = opts.dedup_tolerance;
    out.seed = opts.seed;
    if (F.size() == 0) {
        out.solutions.push_back({VectorXc(0), 0.0, false, 1});
        return out;
    }

    const auto start = total_degree_start(F);
    const ComplexSystem Fh = homogenize_system(F);
    const ComplexSystem Gh = homogenize_system(start.system);
    const CompiledSystem affine_F(F);

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
    for (int attempt = 1;; ++attempt) {
        out.theta = angle(rng);
        out.attempts = attempt;
        const auto patch = ProjectivePatch::random(F.nvars() + 1, rng);
        const StraightLineHomotopy H(Fh, Gh, std::polar(1.0, out.theta), {patch.row()}, {1.0});

        std::vector<VectorXc> starts;
        starts.reserve(start.points.size());
        for (const auto& p : start.points) starts.push_back(patch.lift(p));
        const auto paths = track_all(H, starts, opts.tracker, opts.threads);

        out.paths = {};
        std::vector<Solution> finite;
        for (const auto& r : paths) {
            if (r.status == PathStatus::StepFailure) {
                ++out.paths.failed;
                continue;
            }
            if (r.status == PathStatus::Diverged ||
                patch.affine_magnitude(r.endpoint) > opts.infinity_threshold) {
                ++out.paths.diverged;
                continue;
            }
            ++out.paths.converged;
            finite.push_back(finish_endpoint(affine_F, patch.affine(r.endpoint), opts));
        }
        out.solutions = deduplicate(std::move(finite), opts.dedup_tolerance);
        if (out.paths.failed == 0 || attempt >= opts.max_attempts) break;
    }
    return out;
}

} // namespace

SolutionSet solve_total_degree(const ComplexSystem& sys, const SolveOptions& opts)
{
    return solve_numeric(sys, opts);
}

SolutionSet solve_total_degree(const PolynomialSystem& sys, const SolveOptions& opts)
{
    return solve_numeric(sys.to_numeric(), opts);
}

bool is_real(const VectorXc& point, double real_tol)
{
    return point.size() == 0 || point.imag().cwiseAbs().maxCoeff() < real_tol;
}

std::vector<Configuration> classify(const SolutionSet& solutions, double real_tol,
                                    const CoverageProblem& problem, const StationarityInstance& instance)
{
    std::vector<Configuration> out;
    for (const auto& s : solutions.solutions) {
        if (!is_real(s.point, real_tol)) continue;
        std::vector<double> free(static_cast<std::size_t>(s.point.size()));
        for (Eigen::Index i = 0; i < s.point.size(); ++i) free[static_cast<std::size_t>(i)] = s.point[i].real();
        Configuration c{instance.embed<double>(free, problem)};
        try {
            validate_configuration(c, problem.a(), problem.b(), problem.coincidence_tol(), true);
        }
        catch (const DegeneracyError&) {
            continue;
        }
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace polycover
