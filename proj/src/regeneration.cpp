#include "polycover/regeneration.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <random>

namespace polycover {

namespace {

ComplexPolynomial linear_form(const std::vector<std::string>& vars, const VectorXc& a)
{
    ComplexPolynomial p(vars);
    for (std::size_t j = 0; j < vars.size(); ++j) {
        Exponent e(vars.size(), 0);
        e[j] = 1;
        p.add_term(std::move(e), a[static_cast<Eigen::Index>(j)]);
    }
    return p;
}

VectorXc random_gaussian(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    VectorXc v(static_cast<Eigen::Index>(n));
    for (auto& x : v) x = Complex(normal(rng), normal(rng));
    return v;
}


/// Affine A x = b read off degree-one equations.
SolutionSet solve_linear(const ComplexSystem& sys, SolutionSet out, const SolveOptions& opts)
{
    const auto n = static_cast<Eigen::Index>(sys.nvars());
    MatrixXc A = MatrixXc::Zero(n, n);
    VectorXc b = VectorXc::Zero(n);
    for (std::size_t i = 0; i < sys.size(); ++i)
        for (const auto& [e, c] : sys[i].terms()) {
            const auto j = std::find(e.begin(), e.end(), 1u);
            if (j == e.end())
                b[static_cast<Eigen::Index>(i)] -= c;
            else
                A(static_cast<Eigen::Index>(i), j - e.begin()) += c;
        }
    Eigen::FullPivLU<MatrixXc> lu(A);
    LevelStats stats;
    stats.level = static_cast<int>(sys.size());
    stats.degree = 1;
    if (lu.isInvertible()) {
        const VectorXc x = lu.solve(b);
        out.solutions.push_back(finish_endpoint(CompiledSystem(sys), x, opts));
        out.paths.converged = 1;
    }
    stats.solutions = out.solutions.size();
    out.levels.push_back(stats);
    return out;
}

} // namespace

SolutionSet regenerate(const ComplexSystem& sys, const SolveOptions& opts)
{
    if (!sys.is_square()) throw StructuralError("regeneration needs a square system");
    opts.tracker.validate();
    const std::size_t n = sys.nvars();
    for (std::size_t i = 0; i < n; ++i)
        if (sys.degrees()[i] < 1)
            throw StructuralError("equation " + std::to_string(i + 1) + " is constant");

    SolutionSet out;
    out.method = "regeneration";
    out.vars = sys.vars();
    out.dedup_tolerance = opts.dedup_tolerance;
    out.seed = opts.seed;
    if (n == 0) {
        out.solutions.push_back({VectorXc(0), 0.0, false, 1});
        return out;
    }
    if (std::all_of(sys.degrees().begin(), sys.degrees().end(), [](int d) { return d == 1; }))
        return solve_linear(sys, std::move(out), opts);

    std::mt19937_64 rng(opts.seed);
    // q_i = f_i + sum_{j > i} r_ij f_j has the same zero set.
    std::vector<ComplexPolynomial> mixed;
    for (std::size_t i = 0; i < n; ++i) {
        ComplexPolynomial q = sys[i];
        for (std::size_t j = i + 1; opts.mix_equations && j < n; ++j) {
            std::normal_distribution<double> normal;
            const Complex r(normal(rng), normal(rng));
            q += sys[j] * r;
        }
        mixed.push_back(std::move(q));
    }
    const ComplexSystem qsys(std::move(mixed), sys.vars());
    const ComplexSystem qh = homogenize_system(qsys);
    const auto& pvars = qh.vars();
    const std::size_t N = n + 1;
    const auto patch = ProjectivePatch::random(N, rng);
    ComplexPolynomial patch_poly = linear_form(pvars, patch.c);
    patch_poly -= ComplexPolynomial::constant(pvars, 1.0);

    // slices[i][u] for equation i, u < D_i.
    std::vector<std::vector<ComplexPolynomial>> slices(n);
    for (std::size_t i = 0; i < n; ++i)
        for (int u = 0; u < qsys.degrees()[i]; ++u) {
            out.slices.push_back(random_gaussian(N, rng));
            slices[i].push_back(linear_form(pvars, out.slices.back()));
        }

    // Level 0: every equation replaced by its first slice, plus the patch.
    std::vector<VectorXc> current;
    {
        MatrixXc M(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
        VectorXc rhs = VectorXc::Zero(static_cast<Eigen::Index>(N));
        std::size_t row = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const VectorXc& a = out.slices[row];
            M.row(static_cast<Eigen::Index>(k)) = a.transpose();
            row += static_cast<std::size_t>(qsys.degrees()[k]);
        }
        M.row(static_cast<Eigen::Index>(n)) = patch.c.transpose();
        rhs[static_cast<Eigen::Index>(n)] = 1.0;
        Eigen::FullPivLU<MatrixXc> lu(M);
        if (!lu.isInvertible()) throw StructuralError("regeneration: level-0 slices are degenerate");
        current.push_back(lu.solve(rhs));
    }

    // System with equations [0, s) in place and slot s onward sliced.
    auto sliced = [&](std::size_t s, const ComplexPolynomial& slot) {
        std::vector<ComplexPolynomial> eqs;
        for (std::size_t i = 0; i < n; ++i) {
            if (i < s)
                eqs.push_back(qh[i]);
            else if (i == s)
                eqs.push_back(slot);
            else
                eqs.push_back(slices[i][0]);
        }
        return ComplexSystem(std::move(eqs), pvars);
    };
    const std::vector<VectorXc> patch_row{patch.row()};
    const std::vector<Complex> patch_rhs{1.0};

    TrackerOptions stage_one = opts.tracker;
    stage_one.endgame = false;
    const CompiledSystem affine_sys(sys);

    for (std::size_t s = 0; s < n; ++s) {
        LevelStats st;
        st.level = static_cast<int>(s + 1);
        st.degree = qsys.degrees()[s];
        st.start_points = current.size();
        const bool last = s + 1 == n;
        if (current.empty()) {
            out.levels.push_back(st);
            continue;
        }

        // Stage one: move slice s from its first form to each of the others.
        const ComplexSystem base = sliced(s, slices[s][0]);
        std::vector<VectorXc> starts = current;
        for (std::size_t u = 1; u < slices[s].size(); ++u) {
            const StraightLineHomotopy H(sliced(s, slices[s][u]), base, 1.0, patch_row, patch_rhs);
            const auto moved = track_all(H, current, stage_one, opts.threads);
            st.stage_one_paths += moved.size();
            for (const auto& r : moved) {
                if (r.status == PathStatus::Converged)
                    starts.push_back(r.endpoint);
                else
                    ++st.stage_one_lost;
            }
        }

        // Stage two: product of the slices deforms into equation s.
        ComplexPolynomial product = slices[s][0];
        for (std::size_t u = 1; u < slices[s].size(); ++u) product = product * slices[s][u];
        const ComplexSystem start = sliced(s, product);
        const ComplexSystem G = sliced(s + 1, last ? ComplexPolynomial(pvars) : slices[s + 1][0]);
        const StraightLineHomotopy H(G, start, 1.0, patch_row, patch_rhs);
        const auto paths = track_all(H, starts, opts.tracker, opts.threads);
        st.stage_two_paths = paths.size();

        std::vector<ComplexPolynomial> square = G.equations();
        square.push_back(patch_poly);
        const CompiledSystem projective(ComplexSystem(std::move(square), pvars));

        std::vector<Solution> kept;
        PathCounts counts;
        for (const auto& r : paths) {
            if (r.status == PathStatus::StepFailure) {
                ++st.failed;
                ++counts.failed;
                continue;
            }
            if (r.status == PathStatus::Diverged || patch.affine_magnitude(r.endpoint) > opts.infinity_threshold) {
                ++st.at_infinity;
                ++counts.diverged;
                continue;
            }
            ++counts.converged;
            if (last) {
                kept.push_back(finish_endpoint(affine_sys, patch.affine(r.endpoint), opts));
                continue;
            }
            const auto refined = refine_newton(projective, r.endpoint, opts.refine_tolerance, opts.refine_iters);
            if (!refined.converged) {
                ++st.singular_dropped;
                continue;
            }
            kept.push_back({refined.point, refined.residual, false, 1});
        }
        kept = deduplicate(std::move(kept), opts.dedup_tolerance);
        st.solutions = kept.size();
        out.levels.push_back(st);
        if (last) {
            out.solutions = std::move(kept);
            out.paths = counts;
        }
        else {
            current.clear();
            for (auto& k : kept) current.push_back(std::move(k.point));
        }
    }
    return out;
}

SolutionSet regenerate(const PolynomialSystem& sys, const SolveOptions& opts)
{
    return regenerate(sys.to_numeric(), opts);
}

SolutionSet slice_solutions(const ComplexSystem& prefix, const std::vector<VectorXc>& slices,
                            const SolveOptions& opts)
{
    const auto& vars = prefix.vars();
    if (prefix.size() + slices.size() != vars.size())
        throw StructuralError("slice_solutions: prefix and slices do not form a square system");
    std::vector<ComplexPolynomial> eqs = prefix.equations();
    for (const auto& a : slices) {
        if (static_cast<std::size_t>(a.size()) != vars.size() + 1)
            throw DimensionMismatch("slice_solutions: slice needs one coefficient per variable plus a constant");
        ComplexPolynomial l = ComplexPolynomial::constant(vars, a[0]);
        for (std::size_t j = 0; j < vars.size(); ++j)
            l += ComplexPolynomial::variable(vars, vars[j]) * a[static_cast<Eigen::Index>(j + 1)];
        eqs.push_back(std::move(l));
    }
    auto out = solve_total_degree(ComplexSystem(std::move(eqs), vars), opts);
    out.method = "slice";
    return out;
}

} // namespace polycover
