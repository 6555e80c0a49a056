#include "helpers.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

#include <random>

using namespace polycover;
using testing::ex1;
using testing::ex2;
using testing::make_problem;

namespace {

std::vector<double> random_config(std::mt19937_64& rng, double A, double B, int m)
{
    std::uniform_real_distribution<double> u(A, B);
    std::vector<double> p;
    for (int i = 0; i < m; ++i) p.push_back(u(rng));
    std::sort(p.begin(), p.end());
    return p;
}

double max_abs(const std::vector<double>& v)
{
    double r = 0;
    for (double x : v) r = std::max(r, std::abs(x));
    return r;
}

} // namespace

TEST_CASE("kernel closed forms", "[problem]")
{
    const std::vector<std::string> abp{"a", "b", "p"};
    const CoverageModel m1(ex1());
    CHECK(m1.kernel() ==
          parse_polynomial("(b^2*(6*p - 4*p*b - 4*b + 3*b^2) - a^2*(6*p - 4*p*a - 4*a + 3*a^2))/12", abp));
    const CoverageModel m2(ex2());
    CHECK(m2.kernel() ==
          parse_polynomial("p/3*(b^3 - a^3) - (b^4 - a^4)/4 - p/5*(b^5 - a^5) + (b^6 - a^6)/6", abp));
}

TEST_CASE("kernel vanishes on an empty cell and matches quadrature", "[problem]")
{
    const CoverageModel m1(ex1());
    CHECK(m1.kernel_value(1.0, 1.0, 0.0) == Catch::Approx(1.0 / 12.0).epsilon(1e-14));
    const auto quad = oracle::integrate([](double x) { return (1.0 - x) * x * (1.0 - x); }, 0.0, 1.0);
    CHECK(quad == Catch::Approx(1.0 / 12.0).epsilon(1e-12));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const CoverageModel m2(ex2());
    for (int k = 0; k < 20; ++k) {
        const double p = u(rng), a = u(rng), b = u(rng);
        CHECK(m2.kernel_value(p, a, a) == 0.0);
        const double q = oracle::integrate([&](double x) { return (p - x) * (x * x - x * x * x * x); }, a, b);
        CHECK(m2.kernel_value(p, b, a) == Catch::Approx(q).margin(1e-13));
    }
}

TEST_CASE("non-trivial cost function kernel", "[problem]")
{
    // f(s) = s + s^2 gives f'(s) = 1 + 2 s.
    const CoverageModel model(make_problem("0", "2", 2, "1 + x", "s + s^2"));
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int k = 0; k < 10; ++k) {
        const double p = u(rng), a = u(rng), b = u(rng);
        const double q = oracle::integrate(
            [&](double x) { return (1.0 + 2.0 * (p - x) * (p - x)) * (p - x) * (1.0 + x); }, a, b);
        CHECK(model.kernel_value(p, b, a) == Catch::Approx(q).margin(1e-12));
    }
}

TEST_CASE("problem validation", "[problem]")
{
    CHECK_THROWS_AS(make_problem("1", "0", 2, "x"), InvalidProblem);
    CHECK_THROWS_AS(make_problem("0", "0", 2, "x"), InvalidProblem);
    CHECK_THROWS_AS(make_problem("0", "1", 0, "x"), InvalidProblem);
    CHECK_THROWS(make_problem("0", "1", 2, "x*y"));
    CHECK_THROWS(make_problem("0", "1", 2, "x", "s*x"));
    CHECK(ex1().coincidence_tol() == Catch::Approx(1e-8));
    CHECK(ex2().coincidence_tol() == Catch::Approx(2e-8));
}

TEST_CASE("assumption warnings", "[problem]")
{
    CHECK(assumption_warnings(ex1()).empty());
    CHECK(assumption_warnings(ex2()).empty());
    CHECK(assumption_warnings(make_problem("0", "1", 2, "x - 1/2")).size() == 1);
    CHECK(assumption_warnings(make_problem("0", "1", 2, "x", "-s")).size() >= 1);
}

TEST_CASE("configuration validation", "[problem]")
{
    CHECK_NOTHROW(validate_configuration({{0.1, 0.5, 0.9}}, 0, 1, 1e-8));
    CHECK_THROWS_AS(validate_configuration({{0.5, 0.1, 0.9}}, 0, 1, 1e-8), DegeneracyError);
    CHECK_THROWS_AS(validate_configuration({{0.5, 0.5, 0.9}}, 0, 1, 1e-8), DegeneracyError);
    CHECK_THROWS_AS(validate_configuration({{-0.1, 0.5, 0.9}}, 0, 1, 1e-8), DegeneracyError);
    CHECK_NOTHROW(validate_configuration({{-0.1, 0.5, 0.9}}, 0, 1, 1e-8, false));
}

TEST_CASE("Voronoi cells", "[problem]")
{
    const auto cells = voronoi_cells({{0.2, 0.5, 0.9}}, 0.0, 1.0);
    REQUIRE(cells.size() == 3);
    CHECK(cells[0].lo == 0.0);
    CHECK(cells[0].hi == Catch::Approx(0.35));
    CHECK(cells[1].hi == Catch::Approx(0.7));
    CHECK(cells[2].hi == 1.0);
    const auto one = voronoi_cells({{0.3}}, -1.0, 1.0);
    REQUIRE(one.size() == 1);
    CHECK(one[0].lo == -1.0);
    CHECK(one[0].hi == 1.0);
}

TEST_CASE("instances have the expected free variables", "[problem]")
{
    const CoverageModel model(ex1());
    const auto inst = model.enumerate_instances();
    REQUIRE(inst.size() == 4);
    const std::vector<std::size_t> counts{3, 2, 2, 1};
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(inst[k].free_count() == counts[k]);
        CHECK(inst[k].system.size() == counts[k]);
        CHECK(inst[k].system.is_square());
        CHECK(inst[k].reduced_system.is_square());
    }
    CHECK(pin_name(inst[0].pin) == "interior");
    CHECK(pin_name(inst[1].pin) == "left");
    CHECK(pin_name(inst[2].pin) == "right");
    CHECK(pin_name(inst[3].pin) == "both");
    CHECK(inst[1].free_indices == std::vector<int>{1, 2});
    CHECK(inst[1].system.vars() == std::vector<std::string>{"p2", "p3"});
    CHECK(inst[3].free_indices == std::vector<int>{1});

    const auto embedded = inst[3].embed<double>(std::vector<double>{0.5}, model.problem());
    CHECK(embedded == std::vector<double>{0.0, 0.5, 1.0});

    CHECK(CoverageModel(ex1(1)).enumerate_instances().size() == 3);
    const auto two = CoverageModel(ex1(2)).enumerate_instances();
    REQUIRE(two.size() == 4);
    CHECK(two[3].free_count() == 0);
    CHECK(vehicle_variable(0) == "p1");
    CHECK(vehicle_variable(11) == "p12");
}

TEST_CASE("instance equations are integer normalized multiples of the gradient", "[problem]")
{
    for (const auto& pr : {ex1(), ex2()}) {
        const CoverageModel model(pr);
        const auto interior = model.assemble_instance({false, false});
        for (const auto& eq : interior.system.equations()) CHECK(integer_normalized(eq) == eq);
        const auto sys = interior.system.to_numeric();

        std::mt19937_64 rng(17);
        std::vector<double> ratio;
        for (int k = 0; k < 5; ++k) {
            const auto p = random_config(rng, pr.a(), pr.b(), 3);
            const auto g = model.gradient({p});
            const std::vector<Complex> z(p.begin(), p.end());
            const auto v = sys.evaluate(z);
            for (std::size_t i = 0; i < 3; ++i) {
                const double r = v[i].real() / g[i];
                if (k == 0)
                    ratio.push_back(r);
                else
                    CHECK(r == Catch::Approx(ratio[i]).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("objective agrees with quadrature", "[problem]")
{
    std::mt19937_64 rng(21);
    for (const auto& pr : {ex1(), ex2(), make_problem("0", "2", 4, "1 + x^3", "s + s^2")}) {
        const CoverageModel model(pr);
        for (int k = 0; k < 10; ++k) {
            const auto p = random_config(rng, pr.a(), pr.b(), pr.m);
            CHECK(model.objective({p}) == Catch::Approx(testing::quadrature_objective(pr, p)).margin(1e-12));
        }
    }
}

TEST_CASE("zero density has zero objective", "[problem]")
{
    const CoverageModel model(make_problem("0", "1", 3, "0"));
    CHECK(model.objective({{0.1, 0.4, 0.8}}) == 0.0);
    const auto g = model.gradient({{0.1, 0.4, 0.8}});
    CHECK(max_abs(g) == 0.0);
}

TEST_CASE("gradient matches finite differences of the objective", "[problem]")
{
    std::mt19937_64 rng(4);
    for (const auto& pr : {ex1(), ex2()}) {
        const CoverageModel model(pr);
        auto quad = [&](const std::vector<double>& p) { return testing::quadrature_objective(pr, p); };
        for (int k = 0; k < 5; ++k) {
            const auto p = random_config(rng, pr.a(), pr.b(), 3);
            const auto g = model.gradient({p});
            const auto fd = oracle::gradient_fd(quad, p, 1e-5);
            for (std::size_t i = 0; i < 3; ++i) CHECK(g[i] == Catch::Approx(fd[i]).margin(1e-8));
        }
    }
}

TEST_CASE("gradient is antisymmetric under reflection of a symmetric problem", "[problem]")
{
    const CoverageModel model(ex2());
    std::mt19937_64 rng(9);
    for (int k = 0; k < 10; ++k) {
        const auto p = random_config(rng, -1, 1, 3);
        std::vector<double> q{-p[2], -p[1], -p[0]};
        const auto gp = model.gradient({p});
        const auto gq = model.gradient({q});
        for (std::size_t i = 0; i < 3; ++i) CHECK(gq[i] == Catch::Approx(-gp[2 - i]).margin(1e-15));
        CHECK(model.objective({q}) == Catch::Approx(model.objective({p})).epsilon(1e-14));
    }
}

TEST_CASE("Hessian classification", "[problem]")
{
    const CoverageModel model(ex1());
    const Configuration opt{{0.2350889359, 0.5, 0.7649110641}};
    CHECK(classify_hessian(model.hessian_fd(opt, 1e-5)) == HessianClass::PositiveDefinite);

    const CoverageModel flat(make_problem("0", "1", 1, "1"));
    const auto H = flat.hessian_fd({{0.4}}, 1e-5);
    REQUIRE(H.rows() == 1);
    CHECK(H(0, 0) == Catch::Approx(1.0).epsilon(1e-8));

    Eigen::MatrixXd d(2, 2);
    d << 1, 0, 0, -1;
    CHECK(classify_hessian(d) == HessianClass::Indefinite);
    d << -1, 0, 0, -2;
    CHECK(classify_hessian(d) == HessianClass::NegativeDefinite);
    d << 1, 0, 0, 1e-9;
    CHECK(classify_hessian(d) == HessianClass::NearSingular);
    CHECK(std::string(hessian_class_name(HessianClass::PositiveDefinite)) == "positive-definite");

    const auto sub = model.hessian_fd(opt, 1e-5, {1, 2});
    CHECK(sub.rows() == 2);
}

TEST_CASE("symmetric stationary point of the two-hump density is a saddle", "[problem]")
{
    const auto pr = ex2();
    const CoverageModel model(pr);
    const double a = 0.6597487117;
    const Configuration c{{-a, 0.0, a}};
    CHECK(max_abs(model.gradient(c)) < 1e-9);
    CHECK(classify_hessian(model.hessian_fd(c, 1e-5)) == HessianClass::Indefinite);

    // Independent second difference along the middle vehicle.
    const double h = 1e-3;
    const double f0 = testing::quadrature_objective(pr, {-a, 0.0, a});
    const double fp = testing::quadrature_objective(pr, {-a, h, a});
    const double fm = testing::quadrature_objective(pr, {-a, -h, a});
    CHECK((fp - 2 * f0 + fm) / (h * h) < -1e-3);
}
