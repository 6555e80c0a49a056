#include "polycover/cli.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace polycover;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "polycover");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "polycover_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path write_config(const fs::path& dir, const std::string& body)
{
    const auto path = dir / "run.cfg";
    std::ofstream(path) << body << "\n[output]\ndirectory = " << (dir / "out").string() << "\n";
    return path;
}

const std::string kParabola = "[problem]\nA = 0\nB = 1\nm = 3\nphi = x*(1 - x)\nf = s\n[solver]\nseed = 1\n";

std::size_t count(const std::string& text, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

} // namespace

TEST_CASE("usage errors exit with code 2", "[cli]")
{
    CHECK(cli({}).code == ExitConfigError);
    CHECK(cli({"solve"}).code == ExitConfigError);
    CHECK(cli({"frobnicate", "--config", "x"}).code == ExitConfigError);
    CHECK(cli({"solve", "--config", "/nonexistent/run.cfg"}).code == ExitConfigError);
    const auto dir = scratch("usage");
    const auto cfg = write_config(dir, kParabola);
    CHECK(cli({"solve", "--config", cfg.string(), "--method", "bisection"}).code == ExitConfigError);
    CHECK(cli({"solve", "--config", cfg.string(), "--threads", "0"}).code == ExitConfigError);
    CHECK(cli({"solve", "--help"}).code == ExitOk);
}

TEST_CASE("malformed polynomial reports its position", "[cli]")
{
    const auto dir = scratch("malformed");
    const auto cfg = write_config(dir, "[problem]\nm = 2\nphi = x*(1-\n");
    const auto r = cli({"solve", "--config", cfg.string()});
    CHECK(r.code == ExitConfigError);
    CHECK(r.err.find("position 5") != std::string::npos);
    CHECK(r.err.find("problem.phi") != std::string::npos);
}

TEST_CASE("unknown configuration key", "[cli]")
{
    const auto dir = scratch("unknown_key");
    const auto cfg = write_config(dir, kParabola + "colour = red\n");
    const auto r = cli({"lloyd", "--config", cfg.string()});
    CHECK(r.code == ExitConfigError);
    CHECK(r.err.find("colour") != std::string::npos);
}

TEST_CASE("plot without results", "[cli]")
{
    const auto dir = scratch("plot_missing");
    const auto cfg = write_config(dir, kParabola);
    const auto r = cli({"plot", "--config", cfg.string()});
    CHECK(r.code == ExitConfigError);
    CHECK(r.err.find("missing results file") != std::string::npos);
}

TEST_CASE("solve writes deterministic results", "[cli]")
{
    const auto dir = scratch("solve");
    const auto cfg = write_config(dir, kParabola);
    const auto a = cli({"solve", "--config", cfg.string(), "--out", (dir / "a").string()});
    const auto b = cli({"solve", "--config", cfg.string(), "--out", (dir / "b").string(), "--threads", "2"});
    REQUIRE(a.code == ExitOk);
    REQUIRE(b.code == ExitOk);
    CHECK(a.out == b.out);
    CHECK(a.out.find("global minimum: (0.235089, 0.5, 0.764911)") != std::string::npos);
    CHECK(a.out.find("census (all pin patterns): 44 complex / 32 real") != std::string::npos);
    for (const char* f : {"candidates.json", "candidates.csv"}) {
        REQUIRE(fs::exists(dir / "a" / f));
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }

    const auto dump = cli({"solve", "--config", cfg.string(), "--dump-system", "--out", (dir / "c").string()});
    CHECK(dump.out.find("# interior (3 equations)") != std::string::npos);
    CHECK(dump.out.find("# both (1 equations)") != std::string::npos);
}

TEST_CASE("strict mode turns failed paths into exit code 3", "[cli]")
{
    const auto dir = scratch("strict");
    const std::string tracker = "initial_step = 0.5\nmin_step = 0.5\nmax_step = 0.5\n"
                                "max_corrector_iters = 1\ncorrector_tol = 1e-14\n";
    const auto cfg = write_config(dir, kParabola + tracker);
    const auto loose = cli({"solve", "--config", cfg.string()});
    CHECK(loose.code == ExitOk);
    CHECK(loose.err.find("path(s) failed") != std::string::npos);
    const auto strict = cli({"solve", "--config", cfg.string(), "--strict"});
    CHECK(strict.code == ExitStrictFailure);

    const auto clean = write_config(scratch("strict_clean"), kParabola);
    CHECK(cli({"solve", "--config", clean.string(), "--strict"}).code == ExitOk);
}

TEST_CASE("lloyd with zero iterations", "[cli]")
{
    const auto dir = scratch("lloyd_zero");
    const auto cfg = write_config(dir, kParabola + "[lloyd]\nmax_iters = 0\ninitial = explicit(0.1, 0.5, 0.9)\n");
    const auto r = cli({"lloyd", "--config", cfg.string()});
    CHECK(r.code == ExitOk);
    const auto trace = slurp(dir / "out" / "trace.csv");
    CHECK(trace == "run,iter,p1,p2,p3,objective,grad_norm,step\n1,0,0.1,0.5,0.9," +
                       trace.substr(trace.find("1,0,0.1,0.5,0.9,") + 16));
    CHECK(count(trace, "\n") == 2);
}

TEST_CASE("compare and plot on the parabola density", "[cli]")
{
    const auto dir = scratch("compare");
    const auto cfg = write_config(dir, kParabola + "[lloyd]\ninitial = random(1); explicit(0.1, 0.2, 0.3)\n"
                                                   "max_iters = 2\n");
    const auto r = cli({"compare", "--config", cfg.string()});
    REQUIRE(r.code == ExitOk);
    CHECK(r.out.find("verdict explicit(0.1, 0.2, 0.3): local") != std::string::npos);
    const auto table = slurp(dir / "out" / "compare.csv");
    CHECK(table.rfind("run,initial,p1,p2,p3,lloyd_objective,global_objective,gap,verdict\n", 0) == 0);

    const auto full = write_config(scratch("compare_full"), kParabola + "[lloyd]\ninitial = random(1)\n");
    const auto g = cli({"compare", "--config", full.string()});
    REQUIRE(g.code == ExitOk);
    CHECK(g.out.find("verdict random(1): global") != std::string::npos);

    fs::remove(dir / "out" / "figure.svg");
    const auto p = cli({"plot", "--config", cfg.string()});
    REQUIRE(p.code == ExitOk);
    const auto svg = slurp(dir / "out" / "figure.svg");
    CHECK(count(svg, "class=\"global\"") == 3);
    // Both runs stop after two iterations, short of the minimum.
    CHECK(count(svg, "class=\"lloyd-local\"") == 6);
    CHECK(count(svg, "class=\"lloyd-global\"") == 0);
    CHECK(count(svg, "class=\"density\"") == 1);

    const auto gdir = full.parent_path() / "out";
    fs::remove(gdir / "figure.svg");
    REQUIRE(cli({"plot", "--config", full.string()}).code == ExitOk);
    const auto gsvg = slurp(gdir / "figure.svg");
    CHECK(count(gsvg, "class=\"global\"") == 3);
    CHECK(count(gsvg, "class=\"lloyd-global\"") == 3);
    CHECK(count(gsvg, "class=\"lloyd-local\"") == 0);
}

TEST_CASE("plot with an empty candidate list", "[cli]")
{
    const auto dir = scratch("plot_empty");
    const auto cfg = write_config(dir, kParabola);
    fs::create_directories(dir / "out");
    std::ofstream(dir / "out" / "candidates.json") << R"({"metadata": {}, "winner": null, "candidates": []})";
    const auto r = cli({"plot", "--config", cfg.string()});
    CHECK(r.code == ExitOk);
    CHECK(r.err.find("candidate list is empty") != std::string::npos);
    const auto svg = slurp(dir / "out" / "figure.svg");
    CHECK(count(svg, "class=\"global\"") == 0);
    CHECK(count(svg, "class=\"density\"") == 1);

    std::ofstream(dir / "out" / "candidates.json") << "{ not json";
    CHECK(cli({"plot", "--config", cfg.string()}).code == ExitConfigError);
}

TEST_CASE("two-hump density separates local and global Lloyd endpoints", "[cli]")
{
    const auto dir = scratch("compare_ex2");
    const auto cfg = std::string(POLYCOVER_CONFIG_DIR) + "/ex2.cfg";
    const auto r = cli({"compare", "--config", cfg, "--out", dir.string()});
    REQUIRE(r.code == ExitOk);
    CHECK(r.out.find("verdict symmetric(0.5): local") != std::string::npos);
    CHECK(r.out.find("verdict random(1): global") != std::string::npos);
    const auto svg = slurp(dir / "figure.svg");
    CHECK(count(svg, "class=\"lloyd-local\"") == 3);
    CHECK(count(svg, "class=\"lloyd-global\"") == 3);
    CHECK(count(svg, "class=\"global\"") == 3);
}
