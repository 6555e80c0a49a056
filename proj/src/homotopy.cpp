#include "polycover/homotopy.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polycover {

// ---------------------------------------------------------------------------
// CompiledSystem

CompiledSystem::CompiledSystem(const ComplexSystem& sys) : nvars_(sys.nvars())
{
    for (const auto& eq : sys.equations()) {
        Row row;
        for (const auto& [e, c] : eq.terms()) {
            row.terms.push_back({c, static_cast<std::uint32_t>(exps_.size())});
            for (auto k : e) {
                exps_.push_back(k);
                max_exp_ = std::max(max_exp_, static_cast<int>(k));
            }
        }
        rows_.push_back(std::move(row));
    }
}

namespace {

// Powers x_j^k for k = 0..max_exp, laid out row-major by variable.
std::span<const Complex> fill_powers(std::span<const Complex> x, int max_exp)
{
    thread_local std::vector<Complex> pow;
    const std::size_t stride = static_cast<std::size_t>(max_exp) + 1;
    pow.resize(x.size() * stride);
    for (std::size_t j = 0; j < x.size(); ++j) {
        Complex* p = pow.data() + j * stride;
        p[0] = 1.0;
        for (int k = 1; k <= max_exp; ++k) p[k] = p[k - 1] * x[j];
    }
    return pow;
}

} // namespace

void CompiledSystem::evaluate(std::span<const Complex> x, VectorXc& values) const
{
    if (x.size() != nvars_) throw DimensionMismatch("compiled system: wrong point dimension");
    const auto pow = fill_powers(x, max_exp_);
    const std::size_t stride = static_cast<std::size_t>(max_exp_) + 1;
    values.resize(static_cast<Eigen::Index>(rows_.size()));
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        Complex sum = 0.0;
        for (const auto& t : rows_[i].terms) {
            Complex m = t.coeff;
            const auto* e = exps_.data() + t.offset;
            for (std::size_t j = 0; j < nvars_; ++j)
                if (e[j]) m *= pow[j * stride + e[j]];
            sum += m;
        }
        values[static_cast<Eigen::Index>(i)] = sum;
    }
}

void CompiledSystem::evaluate(std::span<const Complex> x, VectorXc& values, MatrixXc& jacobian) const
{
    if (x.size() != nvars_) throw DimensionMismatch("compiled system: wrong point dimension");
    const auto pow = fill_powers(x, max_exp_);
    const std::size_t stride = static_cast<std::size_t>(max_exp_) + 1;
    const auto rows = static_cast<Eigen::Index>(rows_.size());
    const auto cols = static_cast<Eigen::Index>(nvars_);
    values.resize(rows);
    jacobian.setZero(rows, cols);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        Complex sum = 0.0;
        for (const auto& t : rows_[i].terms) {
            const auto* e = exps_.data() + t.offset;
            Complex m = t.coeff;
            for (std::size_t j = 0; j < nvars_; ++j)
                if (e[j]) m *= pow[j * stride + e[j]];
            sum += m;
            for (std::size_t j = 0; j < nvars_; ++j) {
                if (!e[j]) continue;
                Complex d = t.coeff * static_cast<double>(e[j]) * pow[j * stride + e[j] - 1];
                for (std::size_t k = 0; k < nvars_; ++k)
                    if (k != j && e[k]) d *= pow[k * stride + e[k]];
                jacobian(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += d;
            }
        }
        values[static_cast<Eigen::Index>(i)] = sum;
    }
}

void CompiledSystem::evaluate_extended(std::span<const Complex> x, VectorXc& values) const
{
    if (x.size() != nvars_) throw DimensionMismatch("compiled system: wrong point dimension");
    using Wide = std::complex<long double>;
    values.resize(static_cast<Eigen::Index>(rows_.size()));
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        Wide sum = 0.0L;
        for (const auto& t : rows_[r].terms) {
            Wide m(t.coeff.real(), t.coeff.imag());
            const auto* e = exps_.data() + t.offset;
            for (std::size_t j = 0; j < nvars_; ++j)
                for (std::uint32_t k = 0; k < e[j]; ++k) m *= Wide(x[j].real(), x[j].imag());
            sum += m;
        }
        values[static_cast<Eigen::Index>(r)] = Complex(static_cast<double>(sum.real()), static_cast<double>(sum.imag()));
    }
}

double CompiledSystem::residual_extended(std::span<const Complex> x) const
{
    VectorXc v;
    evaluate_extended(x, v);
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Homotopies

StraightLineHomotopy::StraightLineHomotopy(const ComplexSystem& target, const ComplexSystem& start,
                                           Complex gamma, std::vector<VectorXc> linear_rows,
                                           std::vector<Complex> linear_rhs)
    : target_(target), start_(start), gamma_(gamma), rows_(std::move(linear_rows)),
      rhs_(std::move(linear_rhs))
{
    if (target.vars() != start.vars() || target.size() != start.size())
        throw DimensionMismatch("homotopy: target and start systems differ in shape");
    if (rows_.size() != rhs_.size()) throw DimensionMismatch("homotopy: linear rows and rhs differ");
    for (const auto& r : rows_)
        if (static_cast<std::size_t>(r.size()) != target.nvars())
            throw DimensionMismatch("homotopy: linear row has wrong length");
    dim_ = target.size() + rows_.size();
    if (dim_ != target.nvars()) throw StructuralError("homotopy must be square");
}

void StraightLineHomotopy::evaluate(const VectorXc& z, Complex t, VectorXc& h, MatrixXc& hz,
                                    VectorXc& ht) const
{
    thread_local VectorXc fv, gv;
    thread_local MatrixXc fj, gj;
    const std::span<const Complex> zs(z.data(), static_cast<std::size_t>(z.size()));
    target_.evaluate(zs, fv, fj);
    start_.evaluate(zs, gv, gj);
    const auto n = static_cast<Eigen::Index>(target_.equations());
    const auto dim = static_cast<Eigen::Index>(dim_);
    h.resize(dim);
    ht.resize(dim);
    hz.resize(dim, dim);
    const Complex a = 1.0 - t;
    const Complex b = gamma_ * t;
    h.head(n) = a * fv + b * gv;
    hz.topRows(n) = a * fj + b * gj;
    ht.head(n) = gamma_ * gv - fv;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        const auto i = n + static_cast<Eigen::Index>(r);
        h[i] = rows_[r].dot(z) - rhs_[r]; // dot() conjugates the first argument
        hz.row(i) = rows_[r].conjugate().transpose();
        ht[i] = 0.0;
    }
}

StraightLineHomotopy make_homotopy(const ComplexSystem& target, const ComplexSystem& start, double theta)
{
    return {target, start, std::polar(1.0, theta)};
}

// ---------------------------------------------------------------------------
// Tracking

void TrackerOptions::validate() const
{
    if (!(0 < min_step && min_step <= initial_step && initial_step <= max_step && max_step < 1))
        throw std::invalid_argument("tracker steps must satisfy 0 < min <= initial <= max < 1");
    if (!(corrector_tol > 0)) throw std::invalid_argument("corrector_tol must be positive");
    if (max_corrector_iters < 1) throw std::invalid_argument("max_corrector_iters must be >= 1");
    if (!(divergence_radius > 1)) throw std::invalid_argument("divergence_radius must exceed 1");
    if (!(step_shrink > 0 && step_shrink < 1 && step_grow > 1))
        throw std::invalid_argument("step shrink/grow factors out of range");
    if (!(endgame_t > 0 && endgame_t < 1)) throw std::invalid_argument("endgame_t must lie in (0, 1)");
    if (endgame_samples < 4 || !(endgame_ratio > 0 && endgame_ratio < 1) || max_cycle < 1)
        throw std::invalid_argument("invalid endgame settings");
}

const char* path_status_name(PathStatus s)
{
    switch (s) {
    case PathStatus::Converged: return "converged";
    case PathStatus::Diverged: return "diverged";
    case PathStatus::StepFailure: return "step_failure";
    }
    return "unknown";
}

namespace {

double inf_norm(const VectorXc& v)
{
    return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

struct Workspace {
    VectorXc h, ht, dz;
    MatrixXc hz;
};

/// Newton at fixed t; returns iterations used, or -1 if not converged.
int correct(const Homotopy& H, VectorXc& z, Complex t, const TrackerOptions& o, Workspace& w)
{
    double previous = 0.0;
    for (int k = 1; k <= o.max_corrector_iters; ++k) {
        H.evaluate(z, t, w.h, w.hz, w.ht);
        Eigen::PartialPivLU<MatrixXc> lu(w.hz);
        if (!(lu.rcond() > 1e-15)) return -1;
        w.dz = lu.solve(-w.h);
        if (!w.dz.allFinite()) return -1;
        const double size = inf_norm(w.dz);
        // Newton must contract, otherwise the prediction left the basin.
        if (k > 1 && size > 0.5 * previous) return -1;
        previous = size;
        z += w.dz;
        if (size <= o.corrector_tol * std::max(1.0, inf_norm(z))) return k;
    }
    return -1;
}

/// A curve in the t-plane parametrized by a real sigma.
struct Curve {
    virtual ~Curve() = default;
    virtual Complex t(double s) const = 0;
    virtual Complex dt(double s) const = 0;
    /// Scale applied to the relative step (step in sigma = rel * scale(s)).
    virtual double scale(double s) const = 0;
};

struct RealSegment final : Curve {
    double cap_below; // t below which steps become fractions of t
    Complex t(double s) const override { return s; }
    Complex dt(double) const override { return 1.0; }
    double scale(double s) const override { return s < cap_below ? std::abs(s) : 1.0; }
};

struct Circle final : Curve {
    double radius;
    Complex t(double s) const override { return std::polar(radius, s); }
    Complex dt(double s) const override { return Complex(0, 1) * std::polar(radius, s); }
    double scale(double) const override { return 1.0; }
};

enum class SegmentOutcome { Reached, Diverged, Failed };

struct StepState {
    double rel_step;
    int successes = 0;
};

struct Limits {
    double max_rel;
    double min_rel;
};

SegmentOutcome track_segment(const Homotopy& H, VectorXc& z, const Curve& curve, double s0, double s1,
                             const Limits& lim, StepState& st, const TrackerOptions& o, Workspace& w,
                             PathResult& stats)
{
    double s = s0;
    const double dir = s1 >= s0 ? 1.0 : -1.0;
    VectorXc zp;
    while (dir * (s1 - s) > 0) {
        st.rel_step = std::clamp(st.rel_step, lim.min_rel, lim.max_rel);
        double h = st.rel_step * curve.scale(s);
        bool last = false;
        if (h >= dir * (s1 - s) * (1 - 1e-12)) {
            h = dir * (s1 - s);
            last = true;
        }
        const Complex t0 = curve.t(s);
        H.evaluate(z, t0, w.h, w.hz, w.ht);
        Eigen::PartialPivLU<MatrixXc> lu(w.hz);
        bool ok = lu.rcond() > 1e-15;
        if (ok) {
            w.dz = lu.solve(-w.ht * curve.dt(s));
            ok = w.dz.allFinite();
        }
        double sn = last ? s1 : s + dir * h;
        int iters = -1;
        if (ok) {
            zp = z + (dir * h) * w.dz;
            const VectorXc predicted = zp;
            const double moved = inf_norm(predicted - z);
            iters = correct(H, zp, curve.t(sn), o, w);
            // Euler error is second order in the step; a correction comparable
            // to the predicted move means the step was too long.
            const double floor = 1e-9 * std::max(1.0, inf_norm(z));
            if (iters >= 0 && inf_norm(zp - predicted) > 0.25 * moved + floor) iters = -1;
        }
        ++stats.steps;
        if (iters >= 0) {
            stats.corrector_iters_total += iters;
            z = zp;
            s = sn;
            if (inf_norm(z) > o.divergence_radius) return SegmentOutcome::Diverged;
            if (++st.successes >= o.grow_after) {
                st.rel_step *= o.step_grow;
                st.successes = 0;
            }
        }
        else {
            st.successes = 0;
            st.rel_step *= o.step_shrink;
            if (st.rel_step < lim.min_rel) return SegmentOutcome::Failed;
        }
    }
    return SegmentOutcome::Reached;
}

/// Discrete Fourier modes of samples around the loop: index 0 is the mean,
/// 1..k the positive powers s^1..s^k, k+1..2k the negative powers s^-1..s^-k.
std::vector<VectorXc> fourier_modes(const std::vector<VectorXc>& samples, int k)
{
    const double n = static_cast<double>(samples.size());
    std::vector<VectorXc> out(static_cast<std::size_t>(2 * k + 1), VectorXc::Zero(samples.front().size()));
    for (std::size_t j = 0; j < samples.size(); ++j) {
        out[0] += samples[j];
        for (int m = 1; m <= k; ++m) {
            const double a = 2 * std::numbers::pi * static_cast<double>(j) * m / n;
            out[static_cast<std::size_t>(m)] += samples[j] * std::polar(1.0, -a);
            out[static_cast<std::size_t>(k + m)] += samples[j] * std::polar(1.0, a);
        }
    }
    for (auto& v : out) v /= n;
    return out;
}

double homotopy_residual(const Homotopy& H, const VectorXc& z, Complex t)
{
    Workspace w;
    H.evaluate(z, t, w.h, w.hz, w.ht);
    return inf_norm(w.h);
}

} // namespace

PathResult track_path(const Homotopy& H, const VectorXc& start, const TrackerOptions& o)
{
    o.validate();
    if (static_cast<std::size_t>(start.size()) != H.dimension())
        throw DimensionMismatch("track_path: start point has wrong dimension");

    PathResult r;
    Workspace w;
    VectorXc z = start;
    r.endpoint = z;

    // Sharpen the start point; it must already solve H(., 1) = 0 closely.
    {
        TrackerOptions strict = o;
        strict.max_corrector_iters = std::max(o.max_corrector_iters, 5);
        if (correct(H, z, 1.0, strict, w) < 0) {
            r.residual = homotopy_residual(H, start, 1.0);
            return r;
        }
    }

    const double stop_t = o.endgame ? o.endgame_t : 0.0;
    RealSegment real;
    real.cap_below = o.endgame ? o.endgame_t : 0.0;
    StepState st{o.initial_step};

    auto finish = [&](PathStatus s, double t) {
        r.status = s;
        r.endpoint = z;
        r.t_reached = t;
        r.residual = homotopy_residual(H, z, t);
        return r;
    };

    const Limits normal{o.max_step, o.min_step};
    auto out = track_segment(H, z, real, 1.0, stop_t, normal, st, o, w, r);
    if (out == SegmentOutcome::Diverged) return finish(PathStatus::Diverged, stop_t);
    if (out == SegmentOutcome::Failed) return finish(PathStatus::StepFailure, 1.0);
    if (!o.endgame) return finish(PathStatus::Converged, 0.0);

    // Cauchy endgame: loop around t = 0 until the path closes up (winding
    // number c), average the samples, and repeat on shrinking radii until two
    // consecutive estimates agree.
    const Limits endgame_real{0.1, o.min_step};
    const double two_pi = 2 * std::numbers::pi;
    const Limits loop_lim{two_pi / (4.0 * o.endgame_samples), o.min_step};
    double radius = o.endgame_t;
    VectorXc previous;
    bool have_previous = false;
    int previous_cycle = 0;
    VectorXc best = z;
    int best_cycle = 0;
    while (radius >= o.endgame_min_radius) {
        Circle circle;
        circle.radius = radius;
        VectorXc loop_start = z;
        std::vector<VectorXc> samples;
        int cycle = 0;
        bool closed = false;
        bool loop_failed = false;
        StepState ls{loop_lim.max_rel};
        while (cycle < o.max_cycle && !loop_failed) {
            ++cycle;
            for (int k = 0; k < o.endgame_samples; ++k) {
                samples.push_back(z);
                const double a0 = two_pi * k / o.endgame_samples;
                const double a1 = two_pi * (k + 1) / o.endgame_samples;
                const auto res = track_segment(H, z, circle, a0, a1, loop_lim, ls, o, w, r);
                if (res != SegmentOutcome::Reached) {
                    loop_failed = true;
                    break;
                }
            }
            if (loop_failed) break;
            const double scale = std::max(1.0, inf_norm(loop_start));
            if (inf_norm(z - loop_start) <= 1e-7 * scale) {
                closed = true;
                break;
            }
        }
        if (loop_failed) {
            // A loop broke down; continue from the loop's starting point.
            z = loop_start;
        }
        else if (closed) {
            z = loop_start; // snap back onto the sample at t = radius
            const auto modes = fourier_modes(samples, 3);
            const VectorXc& estimate = modes.front();
            // Inside an annulus that still encloses other branch points the
            // loop average is radius-independent but wrong; such loops show
            // negative powers of s in their expansion.
            double negative = 0.0;
            for (std::size_t m = 4; m <= 6; ++m) negative = std::max(negative, inf_norm(modes[m]));
            if (negative > 1e-8 * std::max(1.0, inf_norm(estimate))) {
                have_previous = false;
            }
            else {
                best = estimate;
                best_cycle = cycle;
                if (have_previous && cycle == previous_cycle &&
                    inf_norm(estimate - previous) <= o.endgame_tol * std::max(1.0, inf_norm(estimate))) {
                    r.cycle_number = cycle;
                    z = estimate;
                    return finish(PathStatus::Converged, 0.0);
                }
                previous = estimate;
                previous_cycle = cycle;
                have_previous = true;
            }
        }
        else {
            z = loop_start;
        }
        const double next = radius * o.endgame_ratio;
        StepState rs{0.1};
        const auto moved = track_segment(H, z, real, radius, next, endgame_real, rs, o, w, r);
        if (moved == SegmentOutcome::Diverged) return finish(PathStatus::Diverged, next);
        if (moved == SegmentOutcome::Failed) break;
        radius = next;
    }
    if (best_cycle > 0) {
        // Estimates never agreed to endgame_tol; report the last one.
        r.cycle_number = best_cycle;
        z = best;
        return finish(PathStatus::Converged, 0.0);
    }
    return finish(PathStatus::StepFailure, radius);
}

// ---------------------------------------------------------------------------
// Refinement

RefineResult refine_newton(const CompiledSystem& sys, const VectorXc& point, double tol, int max_iters)
{
    RefineResult res;
    res.point = point;
    VectorXc x = point;
    VectorXc f;
    MatrixXc j;
    auto span_of = [](const VectorXc& v) {
        return std::span<const Complex>(v.data(), static_cast<std::size_t>(v.size()));
    };
    sys.evaluate(span_of(x), f);
    res.residual = inf_norm(f);
    if (sys.equations() != sys.variables()) throw StructuralError("refine_newton needs a square system");

    double prev_step = -1.0;
    for (int it = 0; it <= max_iters; ++it) {
        sys.evaluate(span_of(x), f, j);
        Eigen::PartialPivLU<MatrixXc> lu(j);
        if (!(lu.rcond() > 1e-14)) return res; // singular Jacobian
        const VectorXc dx = lu.solve(-f);
        if (!dx.allFinite()) return res;
        const double step = inf_norm(dx);
        if (step <= tol * std::max(1.0, inf_norm(x))) {
            x += dx;
            sys.evaluate(span_of(x), f);
            res.point = x;
            res.residual = inf_norm(f);
            res.converged = true;
            res.iterations = it;
            return res;
        }
        // Linear contraction in the asymptotic regime indicates a multiple root.
        if (prev_step > 0 && prev_step < 1e-3 && step > 0.1 * prev_step) return res;
        if (it == max_iters) break;
        x += dx;
        prev_step = step;
    }
    return res;
}

RefineResult refine_newton(const ComplexSystem& sys, const VectorXc& point, double tol, int max_iters)
{
    return refine_newton(CompiledSystem(sys), point, tol, max_iters);
}

RefineResult refine_singular(const CompiledSystem& sys, const VectorXc& point, int max_iters)
{
    RefineResult res;
    res.point = point;
    VectorXc f;
    MatrixXc j;
    const auto span_of = [](const VectorXc& v) {
        return std::span<const Complex>(v.data(), static_cast<std::size_t>(v.size()));
    };
    sys.evaluate(span_of(point), f);
    res.residual = inf_norm(f);
    VectorXc x = point;
    for (int it = 0; it < max_iters; ++it) {
        sys.evaluate(span_of(x), f, j);
        Eigen::JacobiSVD<MatrixXc> svd(j, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        if (sv.size() == 0 || sv[0] == 0.0) break;
        const double cut = 1e-6 * sv[0];
        VectorXc rhs = svd.matrixU().adjoint() * (-f);
        VectorXc y = VectorXc::Zero(j.cols());
        for (Eigen::Index k = 0; k < sv.size(); ++k)
            if (sv[k] > cut) y[k] = rhs[k] / sv[k];
        const VectorXc cand = x + svd.matrixV() * y;
        VectorXc fc;
        sys.evaluate(span_of(cand), fc);
        const double rc = inf_norm(fc);
        if (!(rc < res.residual)) break;
        x = cand;
        res.point = x;
        res.residual = rc;
        res.iterations = it + 1;
    }
    res.converged = false;
    return res;
}

// ---------------------------------------------------------------------------
// Start systems

template <class Coeff>
StartSystem total_degree_start(const BasicPolynomialSystem<Coeff>& sys)
{
    if (!sys.is_square()) throw StructuralError("total-degree start system needs a square system");
    const auto& vars = sys.vars();
    const std::size_t n = vars.size();
    std::vector<ComplexPolynomial> eqs;
    for (std::size_t i = 0; i < n; ++i) {
        const int d = sys[i].total_degree();
        if (d < 1)
            throw StructuralError("equation " + std::to_string(i + 1) +
                                  " is constant; no total-degree start system");
        auto g = ComplexPolynomial::variable(vars, vars[i]).pow(static_cast<unsigned>(d));
        g -= ComplexPolynomial::constant(vars, 1.0);
        eqs.push_back(std::move(g));
    }
    StartSystem out{ComplexSystem(std::move(eqs), vars), {}};
    const auto& degs = out.system.degrees();
    std::vector<int> idx(n, 0);
    const std::uint64_t total = bezout_bound(out.system);
    out.points.reserve(total);
    for (std::uint64_t k = 0; k < total; ++k) {
        VectorXc p(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            p[static_cast<Eigen::Index>(i)] = std::polar(1.0, 2 * std::numbers::pi * idx[i] / degs[i]);
        out.points.push_back(std::move(p));
        // Lexicographic odometer, last coordinate fastest.
        for (std::size_t i = n; i-- > 0;) {
            if (++idx[i] < degs[i]) break;
            idx[i] = 0;
        }
    }
    return out;
}

template StartSystem total_degree_start(const BasicPolynomialSystem<mpq_class>&);
template StartSystem total_degree_start(const BasicPolynomialSystem<Complex>&);

ComplexPolynomial homogenize(const ComplexPolynomial& p, const std::string& h0, int degree)
{
    std::vector<std::string> vars{h0};
    vars.insert(vars.end(), p.vars().begin(), p.vars().end());
    ComplexPolynomial out(vars);
    for (const auto& [e, c] : p.terms()) {
        int d = 0;
        for (auto k : e) d += static_cast<int>(k);
        if (d > degree) throw StructuralError("homogenization degree below polynomial degree");
        Exponent ne;
        ne.reserve(e.size() + 1);
        ne.push_back(static_cast<std::uint32_t>(degree - d));
        ne.insert(ne.end(), e.begin(), e.end());
        out.add_term(std::move(ne), c);
    }
    return out;
}

} // namespace polycover
