#pragma once
// Homotopy continuation: compiled evaluation, straight-line homotopies,
// predictor-corrector path tracking with a Cauchy endgame, Newton refinement.

#include "polycover/polynomial_system.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace polycover {

using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

/// Flattened polynomial system for repeated numeric evaluation.
class CompiledSystem {
public:
    CompiledSystem() = default;
    explicit CompiledSystem(const ComplexSystem& sys);

    std::size_t equations() const { return rows_.size(); }
    std::size_t variables() const { return nvars_; }

    void evaluate(std::span<const Complex> x, VectorXc& values) const;
    void evaluate(std::span<const Complex> x, VectorXc& values, MatrixXc& jacobian) const;
    /// Values accumulated in long double, rounded once.
    void evaluate_extended(std::span<const Complex> x, VectorXc& values) const;
    /// max_i |f_i(x)| accumulated in extended precision.
    double residual_extended(std::span<const Complex> x) const;

private:
    struct Term {
        Complex coeff;
        std::uint32_t offset; // into exps_
    };
    struct Row {
        std::vector<Term> terms;
    };
    std::size_t nvars_ = 0;
    int max_exp_ = 0;
    std::vector<Row> rows_;
    std::vector<std::uint32_t> exps_;
};

/// H(z, t) for complex t, with its partial derivatives.
class Homotopy {
public:
    virtual ~Homotopy() = default;
    virtual std::size_t dimension() const = 0;
    virtual void evaluate(const VectorXc& z, Complex t, VectorXc& h, MatrixXc& hz, VectorXc& ht) const = 0;
};

/// H(z, t) = (1 - t) F(z) + gamma t G(z), optionally followed by t-independent
/// rows (e.g. a projective patch) that close the system.
class StraightLineHomotopy final : public Homotopy {
public:
    StraightLineHomotopy(const ComplexSystem& target, const ComplexSystem& start, Complex gamma,
                         std::vector<VectorXc> linear_rows = {}, std::vector<Complex> linear_rhs = {});

    std::size_t dimension() const override { return dim_; }
    void evaluate(const VectorXc& z, Complex t, VectorXc& h, MatrixXc& hz, VectorXc& ht) const override;

    Complex gamma() const { return gamma_; }

private:
    CompiledSystem target_;
    CompiledSystem start_;
    Complex gamma_;
    std::vector<VectorXc> rows_;
    std::vector<Complex> rhs_;
    std::size_t dim_;
};

/// (1 - t) F + e^{i theta} t G over the shared variable list of F and G.
StraightLineHomotopy make_homotopy(const ComplexSystem& target, const ComplexSystem& start, double theta);

struct TrackerOptions {
    double initial_step = 0.05;
    double min_step = 1e-7;
    double max_step = 0.1;
    double corrector_tol = 1e-10;
    int max_corrector_iters = 3;
    double divergence_radius = 1e8;
    double step_shrink = 0.5;
    double step_grow = 2.0;
    int grow_after = 5;
    /// Below this t, steps are capped at t/10 and the endgame starts.
    double endgame_t = 1e-2;

    /// Cauchy endgame; when off, paths are tracked straight to t = 0.
    bool endgame = true;
    int endgame_samples = 16;      ///< samples per loop around t = 0
    double endgame_ratio = 0.25;   ///< radius shrink between loop rounds
    double endgame_tol = 1e-11;    ///< agreement of successive estimates
    double endgame_min_radius = 1e-14;
    int max_cycle = 32;

    /// Validates the invariants (0 < min <= initial <= max < 1, ...).
    void validate() const;
};

enum class PathStatus { Converged, Diverged, StepFailure };

const char* path_status_name(PathStatus s);

struct PathResult {
    PathStatus status = PathStatus::StepFailure;
    VectorXc endpoint;
    double t_reached = 1.0;
    double residual = 0.0; ///< |H(endpoint, t_reached)|_inf
    int corrector_iters_total = 0;
    int steps = 0;
    int cycle_number = 0; ///< winding number found by the endgame (0 if unused)
};

/// Tracks from t = 1 to t = 0. `start` must satisfy H(., 1) = 0 to corrector_tol.
PathResult track_path(const Homotopy& h, const VectorXc& start, const TrackerOptions& opts);

struct RefineResult {
    VectorXc point;
    double residual = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Newton's method. Converges when a step falls below tol * max(1, |x|)
/// with quadratic contraction; linear contraction (a multiple root) or a
/// singular Jacobian returns the input point flagged non-converged.
RefineResult refine_newton(const CompiledSystem& sys, const VectorXc& point, double tol, int max_iters);
RefineResult refine_newton(const ComplexSystem& sys, const VectorXc& point, double tol, int max_iters);

/// Gauss-Newton restricted to the numerically nonsingular directions of the
/// Jacobian. Improves the residual at a multiple root without moving along its
/// null space. Never increases the residual.
RefineResult refine_singular(const CompiledSystem& sys, const VectorXc& point, int max_iters);

/// Start system x_i^{d_i} - 1 and its prod(d_i) roots-of-unity solutions.
struct StartSystem {
    ComplexSystem system;
    std::vector<VectorXc> points;
};

template <class Coeff>
StartSystem total_degree_start(const BasicPolynomialSystem<Coeff>& sys);

/// Homogenizes each equation with leading variable `h0` to the given degree.
ComplexPolynomial homogenize(const ComplexPolynomial& p, const std::string& h0, int degree);

} // namespace polycover
