#include "helpers.hpp"
#include "polycover/regeneration.hpp"

#include <catch_amalgamated.hpp>

using namespace polycover;

namespace {

SolveOptions seeded(std::uint64_t seed)
{
    SolveOptions o;
    o.seed = seed;
    return o;
}

// Order-insensitive: coordinates that agree to rounding may sort either way.
bool same_points(const SolutionSet& a, const SolutionSet& b, double tol)
{
    if (a.size() != b.size()) return false;
    for (const auto& s : a.solutions) {
        const bool hit = std::any_of(b.solutions.begin(), b.solutions.end(), [&](const Solution& t) {
            return (s.point - t.point).cwiseAbs().maxCoeff() <= tol;
        });
        if (!hit) return false;
    }
    return true;
}

} // namespace

TEST_CASE("univariate quadratic", "[regeneration]")
{
    const auto s = regenerate(PolynomialSystem({parse_polynomial("p^2 - 3*p + 2")}), seeded(1));
    REQUIRE(s.size() == 2);
    CHECK(std::abs(s.solutions[0].point[0] - Complex(1)) < 1e-12);
    CHECK(std::abs(s.solutions[1].point[0] - Complex(2)) < 1e-12);
    REQUIRE(s.levels.size() == 1);
    CHECK(s.levels[0].start_points == 1);
    CHECK(s.levels[0].stage_two_paths == 2);
    CHECK(s.method == "regeneration");
}

TEST_CASE("linear systems bypass tracking", "[regeneration]")
{
    const auto s = regenerate(PolynomialSystem({parse_polynomial("x + y - 3"), parse_polynomial("x - y - 1")}),
                              seeded(1));
    REQUIRE(s.size() == 1);
    CHECK(std::abs(s.solutions[0].point[0] - Complex(2)) < 1e-12);
    CHECK(std::abs(s.solutions[0].point[1] - Complex(1)) < 1e-12);

    const auto singular = regenerate(
        PolynomialSystem({parse_polynomial("x + y - 3"), parse_polynomial("2*x + 2*y - 1")}), seeded(1));
    CHECK(singular.size() == 0);

    const auto empty = regenerate(ComplexSystem(), seeded(1));
    CHECK(empty.size() == 1);
}

TEST_CASE("structural errors", "[regeneration]")
{
    CHECK_THROWS_AS(regenerate(PolynomialSystem({parse_polynomial("x + y")}), seeded(1)), StructuralError);
    const std::vector<std::string> xy{"x", "y"};
    CHECK_THROWS_AS(regenerate(PolynomialSystem({parse_polynomial("x^2 - 1", xy), parse_polynomial("3", xy)}, xy),
                               seeded(1)),
                    StructuralError);
}

TEST_CASE("agrees with the total-degree engine", "[regeneration]")
{
    const CoverageModel model(testing::ex1());
    for (const auto& inst : model.enumerate_instances()) {
        const auto td = solve_total_degree(inst.system, seeded(1));
        const auto rg = regenerate(inst.reduced_system, seeded(1));
        CHECK(rg.paths.failed == 0);
        const auto pr = model.problem();
        const auto a = classify(td, 1e-8, pr, inst);
        const auto b = classify(rg, 1e-8, pr, inst);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < a[i].size(); ++j) CHECK(a[i][j] == Catch::Approx(b[i][j]).margin(1e-9));
    }
}

TEST_CASE("dense random system matches total degree", "[regeneration]")
{
    const PolynomialSystem sys({parse_polynomial("x^2 + 3*x*y - 2*y + 1"), parse_polynomial("y^2*x - x + 5*y - 2"),
                                parse_polynomial("x*y*z - z^2 + x - 1")});
    const auto td = solve_total_degree(sys, seeded(2));
    const auto rg = regenerate(sys, seeded(2));
    CHECK(td.paths.failed == 0);
    CHECK(same_points(td, rg, 1e-8));
    for (const auto& s : rg.solutions) CHECK(s.residual < 1e-10);
}

TEST_CASE("stage one keeps every start point", "[regeneration]")
{
    const CoverageModel model(testing::ex1());
    const auto inst = model.assemble_instance({false, false});
    const auto rg = regenerate(inst.reduced_system, seeded(3));
    for (const auto& lv : rg.levels) {
        CHECK(lv.stage_one_lost == 0);
        CHECK(lv.failed == 0);
        CHECK(lv.stage_two_paths == lv.start_points * static_cast<std::uint64_t>(lv.degree));
    }
}

TEST_CASE("an empty intermediate level short-circuits the rest", "[regeneration]")
{
    auto opts = seeded(1);
    opts.mix_equations = false;
    const PolynomialSystem sys(
        {parse_polynomial("x^2 - y"), parse_polynomial("x^2 - y + 1"), parse_polynomial("z^2 - 1")},
        {"x", "y", "z"});
    const auto s = regenerate(sys, opts);
    CHECK(s.size() == 0);
    REQUIRE(s.levels.size() == 3);
    CHECK(s.levels[1].solutions == 0);
    CHECK(s.levels[2].start_points == 0);
    CHECK(s.levels[2].stage_two_paths == 0);
}

TEST_CASE("slices of a positive-dimensional prefix", "[regeneration]")
{
    // Unit circle cut by the line x - y = 0.
    const ComplexSystem circle({parse_polynomial("x^2 + y^2 - 1").to_numeric()});
    VectorXc slice(3);
    slice << 0.0, 1.0, -1.0;
    const auto s = slice_solutions(circle, {slice}, seeded(1));
    REQUIRE(s.size() == 2);
    const double r = std::sqrt(0.5);
    CHECK(std::abs(s.solutions[0].point[0] + r) < 1e-12);
    CHECK(std::abs(s.solutions[1].point[1] - r) < 1e-12);
    CHECK_THROWS_AS(slice_solutions(circle, {}, seeded(1)), StructuralError);
}
