#pragma once
// One-dimensional coverage problem: vehicles on [A, B], target density phi(x),
// cost C(p, x) = 1/2 f((p - x)^2). Builds the stationarity kernel and systems
// and evaluates objective, gradient and Hessian in closed form.

#include "polycover/kernels.hpp"
#include "polycover/polynomial.hpp"
#include "polycover/polynomial_system.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace polycover {

class InvalidProblem : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised for configurations that are unordered, coincident or out of range.
class DegeneracyError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct CoverageProblem {
    mpq_class A;
    mpq_class B;
    int m = 1;
    Polynomial phi; ///< univariate in "x"
    Polynomial f;   ///< univariate in "s"

    /// Validates and normalizes variable lists (phi over {x}, f over {s}).
    static CoverageProblem create(mpq_class A, mpq_class B, int m, const Polynomial& phi,
                                  const Polynomial& f);

    double a() const { return A.get_d(); }
    double b() const { return B.get_d(); }
    double width() const { return mpq_class(B - A).get_d(); }
    /// Minimum admissible gap between neighbouring vehicles.
    double coincidence_tol() const { return 1e-8 * width(); }
};

/// Sampling-based checks of phi >= 0 on [A, B] and f >= 0, f' >= 0 on
/// [0, (B - A)^2]; each violation yields one human-readable warning.
std::vector<std::string> assumption_warnings(const CoverageProblem& problem);

struct Configuration {
    std::vector<double> positions;

    std::size_t size() const { return positions.size(); }
    double operator[](std::size_t i) const { return positions[i]; }
    friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// Throws DegeneracyError unless strictly ascending with gaps above `gap_tol`.
/// With `check_domain`, every position must also lie in [A, B].
void validate_configuration(const Configuration& config, double A, double B, double gap_tol,
                            bool check_domain = true);

struct BoundaryPin {
    bool left = false;  ///< p_1 = A
    bool right = false; ///< p_m = B

    friend bool operator==(const BoundaryPin&, const BoundaryPin&) = default;
};

std::string pin_name(const BoundaryPin& pin); // "interior", "left", "right", "both"

struct StationarityInstance {
    BoundaryPin pin;
    /// 0-based vehicle indices of the free positions, ascending.
    std::vector<int> free_indices;
    /// Integer-normalized system F(p_i, upper_i, lower_i) = 0 over the free variables.
    PolynomialSystem system;
    /// Same zero set; repeated boundary factors (b - A)^r and (B - a)^r are
    /// reduced to first powers.
    PolynomialSystem reduced_system;

    std::size_t free_count() const { return free_indices.size(); }

    /// Embeds values of the free variables into a full m-vector, inserting the pins.
    template <class T>
    std::vector<T> embed(std::span<const T> free_values, const CoverageProblem& problem) const
    {
        std::vector<T> full(static_cast<std::size_t>(problem.m));
        if (pin.left) full.front() = T(problem.a());
        if (pin.right) full.back() = T(problem.b());
        for (std::size_t k = 0; k < free_indices.size(); ++k)
            full[static_cast<std::size_t>(free_indices[k])] = free_values[k];
        return full;
    }
};

std::string vehicle_variable(int index); // 0-based index -> "p1", "p2", ...

struct Interval {
    double lo;
    double hi;
};

/// Voronoi cells of an ordered configuration on [A, B].
std::vector<Interval> voronoi_cells(const Configuration& config, double A, double B);

enum class HessianClass { PositiveDefinite, Indefinite, NegativeDefinite, NearSingular, NotApplicable };

const char* hessian_class_name(HessianClass c);

/// Symmetric matrix classification; NearSingular when min|lambda| < rel_tol * max|lambda|.
HessianClass classify_hessian(const Eigen::MatrixXd& h, double rel_tol = 1e-6);

/// Closed-form evaluator for one problem. Immutable after construction.
class CoverageModel {
public:
    explicit CoverageModel(CoverageProblem problem);

    const CoverageProblem& problem() const { return problem_; }

    /// F(p, b, a) = int_a^b f'((p - x)^2) (p - x) phi(x) dx over variables (a, b, p).
    const Polynomial& kernel() const { return kernel_; }

    /// Antiderivative in x of 1/2 f((p - x)^2) phi(x), variables (p, x).
    const Polynomial& cost_antiderivative() const { return cost_prim_; }
    const kernels::DenseBivariate& cost_antiderivative_dense() const { return cost_dense_; }

    StationarityInstance assemble_instance(const BoundaryPin& pin) const;
    std::vector<StationarityInstance> enumerate_instances() const;

    double objective(const Configuration& config) const;
    std::vector<double> gradient(const Configuration& config) const;

    /// Central differences of the closed-form gradient, symmetrized. Only the
    /// coordinates listed in `coords` (default: all) are differentiated.
    Eigen::MatrixXd hessian_fd(const Configuration& config, double h,
                               std::vector<int> coords = {}) const;

    /// Kernel value F(p, upper, lower) in floating point.
    double kernel_value(double p, double upper, double lower) const;

private:
    double cell_cost(double p, double lo, double hi) const;

    CoverageProblem problem_;
    Polynomial kernel_;
    Polynomial kernel_prim_; // antiderivative in x of the gradient integrand, vars (p, x)
    Polynomial cost_prim_;
    kernels::DenseBivariate kernel_dense_;
    kernels::DenseBivariate cost_dense_;
};

} // namespace polycover
