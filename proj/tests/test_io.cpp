#include "helpers.hpp"
#include "polycover/io.hpp"

#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

using namespace polycover;

namespace {

std::size_t count(const std::string& text, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

} // namespace

TEST_CASE("defaults round-trip", "[io]")
{
    const RunConfig c;
    const auto text = emit_config(c);
    CHECK(parse_config(text) == c);
    CHECK(emit_config(parse_config(text)) == text);
}

TEST_CASE("non-default values round-trip", "[io]")
{
    RunConfig c;
    c.problem.A = mpq_class(-3, 7);
    c.problem.B = mpq_class(5, 2);
    c.problem.m = 4;
    c.problem.phi = "x^2 - x^4 + 1/3";
    c.problem.f = "s + s^2";
    c.solver.method = Method::Regeneration;
    c.solver.seed = 123456789012345ULL;
    c.solver.threads = 2;
    c.solver.tracker.corrector_tol = 3.3e-11;
    c.solver.tracker.endgame = false;
    c.solver.tracker.initial_step = 0.1 / 3;
    c.lloyd.options.max_iters = 17;
    c.lloyd.options.grad_tol = 1.0 / 3e9;
    c.lloyd.options.projection = false;
    c.lloyd.initial = {InitialSpec::parse("explicit(-0.1, 0.1, 0.30000000000000004, 2)"),
                       InitialSpec::parse("symmetric(0.25)"), InitialSpec::parse("random(9)")};
    c.output.directory = "some dir/x";
    c.output.formats = {"csv"};
    const auto text = emit_config(c);
    const auto back = parse_config(text);
    CHECK(back == c);
    CHECK(emit_config(back) == text);
    CHECK(back.lloyd.initial[0].positions[2] == 0.30000000000000004);
    CHECK(back.output.wants("csv"));
    CHECK_FALSE(back.output.wants("svg"));
}

TEST_CASE("bundled configurations parse", "[io]")
{
    for (const char* name : {"ex1.cfg", "ex2.cfg"}) {
        const auto c = load_config(std::filesystem::path(POLYCOVER_CONFIG_DIR) / name);
        CHECK(c.problem.m == 3);
        CHECK_NOTHROW(c.build_problem());
        CHECK(parse_config(emit_config(c)) == c);
    }
    const auto ex2 = load_config(std::filesystem::path(POLYCOVER_CONFIG_DIR) / "ex2.cfg");
    CHECK(ex2.problem.A == -1);
    REQUIRE(ex2.lloyd.initial.size() == 2);
    CHECK(ex2.lloyd.initial[0].kind == InitialSpec::Kind::Symmetric);
    CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("unknown or malformed entries are rejected", "[io]")
{
    CHECK_THROWS_AS(parse_config("[problem]\nm = 3\ncolour = red\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[extras]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[problem]\nm = three\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[problem]\nA = 0.5x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[solver]\nmethod = bisection\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[solver]\nmin_step = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[lloyd]\narmijo_c = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[lloyd]\ninitial = uniform(3)\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[output]\nformats = json, pdf\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[problem\n"), ConfigError);
}

TEST_CASE("malformed polynomials surface as parse errors", "[io]")
{
    auto c = parse_config("[problem]\nphi = x*(1-\n");
    try {
        c.build_problem();
        FAIL("expected a parse error");
    }
    catch (const ParseError& e) {
        CHECK(e.position() == 5);
        CHECK(std::string(e.what()).find("problem.phi") != std::string::npos);
    }
}

TEST_CASE("start descriptions", "[io]")
{
    const auto e = InitialSpec::parse("explicit(0.1, 0.5,0.9)");
    CHECK(e.kind == InitialSpec::Kind::Explicit);
    CHECK(e.positions == std::vector<double>{0.1, 0.5, 0.9});
    CHECK(InitialSpec::parse(e.to_string()) == e);
    CHECK(InitialSpec::parse(" random( 4 ) ").seed == 4);
    CHECK(InitialSpec::parse("symmetric(0.5)").a == 0.5);
    CHECK_THROWS_AS(InitialSpec::parse("symmetric(1.5)"), ConfigError);
    CHECK_THROWS_AS(InitialSpec::parse("explicit()"), ConfigError);
    CHECK_THROWS_AS(InitialSpec::parse("random(-1)"), ConfigError);

    const auto pr = testing::ex1();
    CHECK(e.resolve(pr).positions == e.positions);
    CHECK_THROWS_AS(InitialSpec::parse("explicit(0.1, 0.5)").resolve(pr), ConfigError);
    CHECK_THROWS_AS(InitialSpec::parse("explicit(0.5, 0.1, 0.9)").resolve(pr), DegeneracyError);
}

TEST_CASE("doubles are written in shortest round-trip form", "[io]")
{
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5e-12) == "-2.5e-12");
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int k = 0; k < 1000; ++k) {
        const double v = u(rng);
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("result documents", "[io]")
{
    RunConfig cfg;
    cfg.problem = {0, 1, 1, "x*(1 - x)", "s"};
    const CoverageModel model(cfg.build_problem());
    OptimizerOptions o;
    o.solve = cfg.solve_options();
    const auto search = find_candidates(model, Method::TotalDegree, o);
    const auto& winner = select_winner(search.candidates);

    const auto doc = candidates_document(cfg, search, &winner);
    std::vector<std::string> keys;
    for (const auto& [k, v] : doc.items()) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"metadata", "winner", "candidates"});
    CHECK(doc["metadata"]["method"] == "total-degree");
    CHECK(doc["metadata"]["census"]["all_patterns"]["complex"].get<std::size_t>() == search.all_patterns.complex_total);
    CHECK(doc["metadata"]["instances"].size() == 3);
    CHECK(doc["metadata"]["instances"][0]["path_counts"]["failed"] == 0);
    CHECK(doc["winner"]["positions"][0].get<double>() == winner.config[0]);
    CHECK(doc["candidates"].size() == search.candidates.size());
    CHECK(candidates_document(cfg, search, nullptr)["winner"].is_null());

    const auto csv = lines(candidates_csv(search.candidates));
    REQUIRE(csv.size() == search.candidates.size() + 1);
    CHECK(csv[0] == "rank,p1,objective,pin,hessian_class,source,gradient_norm");
    CHECK(csv[1].rfind("1,", 0) == 0);

    LloydOptions lo;
    lo.max_iters = 3;
    const std::vector<LloydRun> runs{{InitialSpec::parse("explicit(0.2)"), lloyd_run(model, {{0.2}}, lo)},
                                     {InitialSpec::parse("random(1)"), lloyd_run(model, {{0.9}}, lo)}};
    const auto tr = lines(trace_csv(runs));
    CHECK(tr[0] == "run,iter,p1,objective,grad_norm,step");
    CHECK(tr.size() == 1 + runs[0].trace.iterates.size() + runs[1].trace.iterates.size());
    CHECK(tr[1].rfind("1,0,0.2,", 0) == 0);
    const auto ld = lloyd_document(cfg, runs);
    CHECK(ld["runs"].size() == 2);
    CHECK(ld["runs"][0]["initial_spec"] == "explicit(0.2)");
    CHECK(ld["runs"][1]["terminated_by"] == "max_iters");
}

TEST_CASE("figure markup", "[io]")
{
    const auto pr = testing::ex2();
    const auto svg = render_svg(pr, {{-0.6, 0.4, 0.7}, {-0.6, 0.4, 0.7}, {-0.65, 0.0, 0.65}});
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(count(svg, "class=\"density\"") == 1);
    CHECK(count(svg, "stroke-dasharray") == 1);
    CHECK(count(svg, "class=\"global\"") == 3);
    CHECK(count(svg, "class=\"lloyd-global\"") == 3);
    CHECK(count(svg, "class=\"lloyd-local\"") == 3);
    CHECK(svg.find("</svg>") != std::string::npos);

    const auto bare = render_svg(pr, {});
    CHECK(count(bare, "class=\"global\"") == 0);
    CHECK(count(bare, "<circle") == 0);
}
