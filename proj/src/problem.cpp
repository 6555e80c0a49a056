#include "polycover/problem.hpp"

#include "polycover/poly_text.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace polycover {

namespace {

const std::vector<std::string> kPX{"p", "x"};

Polynomial var(const std::vector<std::string>& vars, std::string_view name)
{
    return Polynomial::variable(vars, name);
}

Polynomial univariate_view(const Polynomial& p, const std::string& name, const char* role)
{
    for (const auto& v : p.vars()) {
        if (v == name) continue;
        for (const auto& [e, c] : p.terms())
            if (e[p.index_of(v)] != 0)
                throw InvalidProblem(std::string(role) + " must be univariate in '" + name +
                                     "', found '" + v + "'");
    }
    return p.aligned(std::vector<std::string>{name});
}

} // namespace

CoverageProblem CoverageProblem::create(mpq_class A, mpq_class B, int m, const Polynomial& phi,
                                        const Polynomial& f)
{
    if (!(A < B)) throw InvalidProblem("interval must satisfy A < B");
    if (m < 1) throw InvalidProblem("vehicle count must be positive");
    CoverageProblem p;
    p.A = std::move(A);
    p.B = std::move(B);
    p.m = m;
    p.phi = univariate_view(phi, "x", "density phi");
    p.f = univariate_view(f, "s", "cost kernel f");
    return p;
}

std::vector<std::string> assumption_warnings(const CoverageProblem& problem)
{
    std::vector<std::string> out;
    constexpr int kSamples = 1001;
    const auto phi = kernels::DenseBivariate::from(problem.phi, "", "x");
    const auto f = kernels::DenseBivariate::from(problem.f, "", "s");
    const auto df = kernels::DenseBivariate::from(problem.f.derivative("s"), "", "s");

    std::vector<double> xs(kSamples), ss(kSamples), zeros(kSamples, 0.0);
    const double a = problem.a();
    const double w = problem.width();
    for (int k = 0; k < kSamples; ++k) {
        xs[k] = a + w * k / (kSamples - 1);
        ss[k] = w * w * k / (kSamples - 1);
    }
    std::vector<double> vals(kSamples);
    auto report = [&](const kernels::DenseBivariate& poly, const std::vector<double>& at,
                      const char* what) {
        kernels::eval_batch(poly, zeros, at, vals);
        for (int k = 0; k < kSamples; ++k) {
            if (vals[k] < -1e-12) {
                std::ostringstream os;
                os << what << " is negative (" << vals[k] << ") at " << at[k];
                out.push_back(os.str());
                return;
            }
        }
    };
    report(phi, xs, "density phi");
    report(f, ss, "cost kernel f");
    report(df, ss, "derivative f'");
    return out;
}

void validate_configuration(const Configuration& config, double A, double B, double gap_tol,
                            bool check_domain)
{
    const auto& p = config.positions;
    if (p.empty()) throw DegeneracyError("configuration is empty");
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p[i])) throw DegeneracyError("configuration has a non-finite position");
        if (check_domain) {
            const double slack = 1e-12 * (B - A);
            if (p[i] < A - slack || p[i] > B + slack)
                throw DegeneracyError("position " + std::to_string(i + 1) + " lies outside [A, B]");
        }
        if (i > 0 && !(p[i] - p[i - 1] > gap_tol))
            throw DegeneracyError("positions " + std::to_string(i) + " and " + std::to_string(i + 1) +
                                  " are not strictly ascending");
    }
}

std::string pin_name(const BoundaryPin& pin)
{
    if (pin.left && pin.right) return "both";
    if (pin.left) return "left";
    if (pin.right) return "right";
    return "interior";
}

std::string vehicle_variable(int index)
{
    return "p" + std::to_string(index + 1);
}

std::vector<Interval> voronoi_cells(const Configuration& config, double A, double B)
{
    validate_configuration(config, A, B, 0.0, false);
    const auto& p = config.positions;
    std::vector<Interval> cells(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        cells[i].lo = i == 0 ? A : 0.5 * (p[i - 1] + p[i]);
        cells[i].hi = i + 1 == p.size() ? B : 0.5 * (p[i] + p[i + 1]);
    }
    return cells;
}

const char* hessian_class_name(HessianClass c)
{
    switch (c) {
    case HessianClass::PositiveDefinite: return "positive-definite";
    case HessianClass::Indefinite: return "indefinite";
    case HessianClass::NegativeDefinite: return "negative-definite";
    case HessianClass::NearSingular: return "near-singular";
    case HessianClass::NotApplicable: return "not-applicable";
    }
    return "unknown";
}

HessianClass classify_hessian(const Eigen::MatrixXd& h, double rel_tol)
{
    if (h.rows() == 0) return HessianClass::NotApplicable;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double big = ev.cwiseAbs().maxCoeff();
    const double small = ev.cwiseAbs().minCoeff();
    if (big == 0.0 || small < rel_tol * big) return HessianClass::NearSingular;
    if (ev.minCoeff() > 0) return HessianClass::PositiveDefinite;
    if (ev.maxCoeff() < 0) return HessianClass::NegativeDefinite;
    return HessianClass::Indefinite;
}

CoverageModel::CoverageModel(CoverageProblem problem) : problem_(std::move(problem))
{
    const auto p = var(kPX, "p");
    const auto x = var(kPX, "x");
    const auto diff = p - x;
    const auto sq = diff * diff;
    const auto phi = problem_.phi.aligned(kPX);

    const auto fprime = problem_.f.derivative("s").substitute("s", sq).aligned(kPX);
    kernel_prim_ = (fprime * diff * phi).antiderivative("x");

    const std::vector<std::string> abp{"a", "b", "p"};
    const auto upper = kernel_prim_.substitute("x", var({"b"}, "b")).aligned(abp);
    const auto lower = kernel_prim_.substitute("x", var({"a"}, "a")).aligned(abp);
    kernel_ = upper - lower;

    const auto cost = problem_.f.substitute("s", sq).aligned(kPX) * phi * mpq_class(1, 2);
    cost_prim_ = cost.antiderivative("x");

    kernel_dense_ = kernels::DenseBivariate::from(kernel_prim_, "p", "x");
    cost_dense_ = kernels::DenseBivariate::from(cost_prim_, "p", "x");
}

StationarityInstance CoverageModel::assemble_instance(const BoundaryPin& pin) const
{
    const int m = problem_.m;
    if (m == 1 && pin.left && pin.right)
        throw InvalidProblem("a single vehicle cannot be pinned to both endpoints");

    StationarityInstance inst;
    inst.pin = pin;
    std::vector<std::string> free_vars;
    for (int i = 0; i < m; ++i) {
        const bool pinned = (i == 0 && pin.left) || (i == m - 1 && pin.right);
        if (!pinned) {
            inst.free_indices.push_back(i);
            free_vars.push_back(vehicle_variable(i));
        }
    }

    auto position = [&](int i) -> Polynomial {
        if (i == 0 && pin.left) return Polynomial::constant(free_vars, problem_.A);
        if (i == m - 1 && pin.right) return Polynomial::constant(free_vars, problem_.B);
        return Polynomial::variable(free_vars, vehicle_variable(i));
    };
    const mpq_class half(1, 2);
    const auto constant = [&](const mpq_class& c) { return Polynomial::constant(free_vars, c); };

    // p_i -> position, b -> upper cell edge, a -> lower cell edge.
    auto instantiate = [&](const Polynomial& k, const Polynomial& pos, const std::string& upper_var,
                           const Polynomial& upper, const std::string& lower_var,
                           const Polynomial& lower) {
        auto e = k.substitute("p", pos);
        if (e.has_variable(upper_var)) e = e.substitute(upper_var, upper);
        if (e.has_variable(lower_var)) e = e.substitute(lower_var, lower);
        return integer_normalized(e.aligned(free_vars));
    };

    // Boundary kernels with the cell edge measured from the pinned end:
    // left(p, u) = F(p, A + u, A), right(p, w) = F(p, B, B - w).
    const std::vector<std::string> pu{"p", "u"};
    const std::vector<std::string> pw{"p", "w"};
    const auto left_kernel =
        strip_variable_power(kernel_.substitute("b", Polynomial::constant(pu, problem_.A) + var(pu, "u"))
                                 .substitute("a", Polynomial::constant(pu, problem_.A))
                                 .aligned(pu),
                             "u", 1)
            .first;
    const auto right_kernel =
        strip_variable_power(kernel_.substitute("a", Polynomial::constant(pw, problem_.B) - var(pw, "w"))
                                 .substitute("b", Polynomial::constant(pw, problem_.B))
                                 .aligned(pw),
                             "w", 1)
            .first;

    std::vector<Polynomial> eqs;
    std::vector<Polynomial> reduced;
    for (int i : inst.free_indices) {
        const auto pos = position(i);
        const bool first = i == 0;
        const bool last = i == m - 1;
        const auto upper = last ? constant(problem_.B) : (pos + position(i + 1)) * half;
        const auto lower = first ? constant(problem_.A) : (position(i - 1) + pos) * half;
        eqs.push_back(instantiate(kernel_, pos, "b", upper, "a", lower));

        if (first && !last)
            reduced.push_back(instantiate(left_kernel, pos, "u", upper - constant(problem_.A), "", {}));
        else if (last && !first)
            reduced.push_back(instantiate(right_kernel, pos, "w", constant(problem_.B) - lower, "", {}));
        else
            reduced.push_back(eqs.back());
    }
    inst.system = PolynomialSystem(std::move(eqs), free_vars);
    inst.reduced_system = PolynomialSystem(std::move(reduced), free_vars);
    return inst;
}

std::vector<StationarityInstance> CoverageModel::enumerate_instances() const
{
    std::vector<StationarityInstance> out;
    out.push_back(assemble_instance({false, false}));
    out.push_back(assemble_instance({true, false}));
    out.push_back(assemble_instance({false, true}));
    if (problem_.m >= 2) out.push_back(assemble_instance({true, true}));
    return out;
}

double CoverageModel::cell_cost(double p, double lo, double hi) const
{
    return cost_dense_(p, hi) - cost_dense_(p, lo);
}

double CoverageModel::kernel_value(double p, double upper, double lower) const
{
    return kernel_dense_(p, upper) - kernel_dense_(p, lower);
}

double CoverageModel::objective(const Configuration& config) const
{
    validate_configuration(config, problem_.a(), problem_.b(), problem_.coincidence_tol());
    if (static_cast<int>(config.size()) != problem_.m)
        throw DegeneracyError("configuration size differs from vehicle count");
    const auto cells = voronoi_cells(config, problem_.a(), problem_.b());
    double total = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i)
        total += cell_cost(config[i], cells[i].lo, cells[i].hi);
    return total;
}

std::vector<double> CoverageModel::gradient(const Configuration& config) const
{
    validate_configuration(config, problem_.a(), problem_.b(), problem_.coincidence_tol());
    if (static_cast<int>(config.size()) != problem_.m)
        throw DegeneracyError("configuration size differs from vehicle count");
    const auto cells = voronoi_cells(config, problem_.a(), problem_.b());
    std::vector<double> g(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) g[i] = kernel_value(config[i], cells[i].hi, cells[i].lo);
    return g;
}

Eigen::MatrixXd CoverageModel::hessian_fd(const Configuration& config, double h,
                                          std::vector<int> coords) const
{
    if (!(h > 0)) throw std::invalid_argument("finite-difference step must be positive");
    if (coords.empty())
        for (int i = 0; i < problem_.m; ++i) coords.push_back(i);
    const auto n = static_cast<Eigen::Index>(coords.size());
    Eigen::MatrixXd H(n, n);
    const double a = problem_.a();
    const double b = problem_.b();
    const double tol = problem_.coincidence_tol();
    auto grad_at = [&](const Configuration& c) {
        validate_configuration(c, a, b, tol, false);
        const auto cells = voronoi_cells(c, a, b);
        std::vector<double> g(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) g[i] = kernel_value(c[i], cells[i].hi, cells[i].lo);
        return g;
    };
    for (Eigen::Index col = 0; col < n; ++col) {
        auto plus = config;
        auto minus = config;
        plus.positions[static_cast<std::size_t>(coords[col])] += h;
        minus.positions[static_cast<std::size_t>(coords[col])] -= h;
        const auto gp = grad_at(plus);
        const auto gm = grad_at(minus);
        for (Eigen::Index row = 0; row < n; ++row) {
            const auto r = static_cast<std::size_t>(coords[row]);
            H(row, col) = (gp[r] - gm[r]) / (2 * h);
        }
    }
    return 0.5 * (H + H.transpose());
}

} // namespace polycover
