#include "polycover/cli.hpp"

#include "polycover/io.hpp"
#include "polycover/poly_text.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace polycover {

namespace {

namespace fs = std::filesystem;

struct Flags {
    std::string config;
    std::string method;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    bool strict = false;
    bool dump_system = false;
    std::string out;
};

struct Context {
    RunConfig config;
    CoverageProblem problem;
    fs::path out_dir;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string describe(const std::vector<double>& p)
{
    std::ostringstream s;
    s.precision(6);
    s << "(";
    for (std::size_t i = 0; i < p.size(); ++i) s << (i ? ", " : "") << p[i];
    s << ")";
    return s.str();
}

Context load(const Flags& flags)
{
    if (flags.config.empty()) throw UsageError("--config is required");
    Context ctx{load_config(flags.config), {}, {}};
    auto& c = ctx.config;
    if (!flags.method.empty()) {
        const auto m = parse_method(flags.method);
        if (!m) throw UsageError("--method: expected total-degree or regeneration");
        c.solver.method = *m;
    }
    if (flags.seed) c.solver.seed = *flags.seed;
    if (flags.threads) {
        if (*flags.threads < 1) throw UsageError("--threads must be at least 1");
        c.solver.threads = *flags.threads;
    }
    if (!flags.out.empty()) c.output.directory = flags.out;
    ctx.out_dir = c.output.directory;
    ctx.problem = c.build_problem();
    return ctx;
}

void dump_systems(const CoverageModel& model, std::ostream& out)
{
    for (const auto& inst : model.enumerate_instances()) {
        out << "# " << pin_name(inst.pin) << " (" << inst.system.size() << " equations)\n";
        for (const auto& eq : inst.system.equations()) out << to_string(eq) << "\n";
    }
}

struct SolveOutcome {
    CandidateSearch search;
    std::optional<Candidate> winner;
};

SolveOutcome run_solve(const Context& ctx, const Flags& flags, std::ostream& out, std::ostream& err)
{
    const CoverageModel model(ctx.problem);
    for (const auto& w : assumption_warnings(ctx.problem)) err << "warning: " << w << "\n";
    if (flags.dump_system) dump_systems(model, out);

    OptimizerOptions opts;
    opts.solve = ctx.config.solve_options();
    SolveOutcome r;
    r.search = find_candidates(model, ctx.config.solver.method, opts);
    if (!r.search.candidates.empty()) r.winner = select_winner(r.search.candidates, opts.tie_tolerance);

    const auto& s = r.search;
    out << "method: " << method_name(ctx.config.solver.method) << "\n";
    for (const auto& inst : s.instances)
        out << "  " << pin_name(inst.pin) << ": " << inst.solutions.size() << " complex, " << inst.real << " real, "
            << inst.feasible << " feasible\n";
    out << "census (interior, left, right): " << s.interior_left_right.complex_total << " complex / "
        << s.interior_left_right.real_total << " real\n";
    out << "census (all pin patterns): " << s.all_patterns.complex_total << " complex / "
        << s.all_patterns.real_total << " real\n";
    out << "feasible candidates: " << s.feasible_total << "\n";
    if (r.winner)
        out << "global minimum: " << describe(r.winner->config.positions) << " objective " << r.winner->objective_value
            << "\n";
    else
        out << "global minimum: none (no feasible candidate)\n";
    for (const auto& w : s.warnings) err << "warning: " << w << "\n";

    const auto& o = ctx.config.output;
    if (o.wants("json"))
        write_text(ctx.out_dir / "candidates.json",
                   candidates_document(ctx.config, s, r.winner ? &*r.winner : nullptr).dump(2) + "\n");
    if (o.wants("csv")) write_text(ctx.out_dir / "candidates.csv", candidates_csv(s.candidates));
    return r;
}

std::vector<LloydRun> run_lloyd(const Context& ctx, std::ostream& out)
{
    const CoverageModel model(ctx.problem);
    std::vector<LloydRun> runs;
    for (const auto& spec : ctx.config.lloyd.initial) {
        LloydRun r{spec, lloyd_run(model, spec.resolve(ctx.problem), ctx.config.lloyd.options)};
        const auto& f = r.trace.final();
        out << "lloyd " << spec.to_string() << ": " << describe(f.config.positions) << " objective " << f.objective
            << " after " << r.trace.iterates.size() - 1 << " iterations (" << termination_name(r.trace.terminated_by)
            << ")\n";
        runs.push_back(std::move(r));
    }
    const auto& o = ctx.config.output;
    if (o.wants("csv")) write_text(ctx.out_dir / "trace.csv", trace_csv(runs));
    if (o.wants("json")) write_text(ctx.out_dir / "lloyd.json", lloyd_document(ctx.config, runs).dump(2) + "\n");
    return runs;
}

PlotMarkers markers_for(const std::optional<Candidate>& winner, const std::vector<std::vector<double>>& finals,
                        const std::vector<double>& objectives)
{
    PlotMarkers m;
    if (winner) m.global = winner->config.positions;
    for (std::size_t k = 0; k < finals.size(); ++k) {
        const bool global = winner && objectives[k] - winner->objective_value < kGlobalGap;
        auto& dst = global ? m.lloyd_global : m.lloyd_local;
        dst.insert(dst.end(), finals[k].begin(), finals[k].end());
    }
    return m;
}

int cmd_solve(const Flags& flags, std::ostream& out, std::ostream& err)
{
    const auto ctx = load(flags);
    const auto r = run_solve(ctx, flags, out, err);
    if (flags.strict && !r.search.warnings.empty()) return ExitStrictFailure;
    return ExitOk;
}

int cmd_lloyd(const Flags& flags, std::ostream& out, std::ostream&)
{
    const auto ctx = load(flags);
    run_lloyd(ctx, out);
    return ExitOk;
}

int cmd_compare(const Flags& flags, std::ostream& out, std::ostream& err)
{
    const auto ctx = load(flags);
    const auto solved = run_solve(ctx, flags, out, err);
    const auto runs = run_lloyd(ctx, out);
    if (!solved.winner) {
        err << "error: no certified minimum to compare against\n";
        return ExitFailure;
    }
    const auto& w = *solved.winner;
    std::ostringstream table;
    const auto m = static_cast<std::size_t>(ctx.problem.m);
    table << "run,initial";
    for (std::size_t i = 1; i <= m; ++i) table << ",p" << i;
    table << ",lloyd_objective,global_objective,gap,verdict\n";
    std::vector<std::vector<double>> finals;
    std::vector<double> objectives;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const auto& f = runs[k].trace.final();
        const double gap = f.objective - w.objective_value;
        const char* verdict = gap < kGlobalGap ? "global" : "local";
        table << k + 1 << ",\"" << runs[k].initial.to_string() << "\"";
        for (double p : f.config.positions) table << "," << format_double(p);
        table << "," << format_double(f.objective) << "," << format_double(w.objective_value) << ","
              << format_double(gap) << "," << verdict << "\n";
        out << "verdict " << runs[k].initial.to_string() << ": " << verdict << " (gap " << gap << ")\n";
        finals.push_back(f.config.positions);
        objectives.push_back(f.objective);
    }
    const auto& o = ctx.config.output;
    if (o.wants("csv")) write_text(ctx.out_dir / "compare.csv", table.str());
    if (o.wants("svg"))
        write_text(ctx.out_dir / "figure.svg", render_svg(ctx.problem, markers_for(solved.winner, finals, objectives)));
    if (flags.strict && !solved.search.warnings.empty()) return ExitStrictFailure;
    return ExitOk;
}

nlohmann::ordered_json read_json(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("missing results file " + path.string());
    try {
        return nlohmann::ordered_json::parse(in);
    }
    catch (const nlohmann::ordered_json::exception& e) {
        throw UsageError(path.string() + ": " + e.what());
    }
}

int cmd_plot(const Flags& flags, std::ostream& out, std::ostream& err)
{
    const auto ctx = load(flags);
    const auto cand_path = ctx.out_dir / "candidates.json";
    const auto lloyd_path = ctx.out_dir / "lloyd.json";
    if (!fs::exists(cand_path) && !fs::exists(lloyd_path))
        throw UsageError("missing results file: neither " + cand_path.string() + " nor " + lloyd_path.string() +
                         " exists");

    std::optional<Candidate> winner;
    if (fs::exists(cand_path)) {
        const auto doc = read_json(cand_path);
        if (doc.contains("winner") && !doc["winner"].is_null()) {
            Candidate c;
            c.config.positions = doc["winner"]["positions"].get<std::vector<double>>();
            c.objective_value = doc["winner"]["objective"].get<double>();
            winner = c;
        }
        if (doc.value("candidates", nlohmann::ordered_json::array()).empty())
            err << "warning: candidate list is empty; plotting the density only\n";
    }
    std::vector<std::vector<double>> finals;
    std::vector<double> objectives;
    if (fs::exists(lloyd_path)) {
        const auto doc = read_json(lloyd_path);
        for (const auto& r : doc.value("runs", nlohmann::ordered_json::array())) {
            finals.push_back(r["final"].get<std::vector<double>>());
            objectives.push_back(r["objective"].get<double>());
        }
    }
    const auto path = ctx.out_dir / "figure.svg";
    write_text(path, render_svg(ctx.problem, markers_for(winner, finals, objectives)));
    out << "wrote " << path.string() << "\n";
    return ExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Stationary configurations and global minima for 1-D polynomial coverage problems"};
    app.require_subcommand(1);
    Flags flags;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config, "run configuration file")->required();
        sub->add_option("--method", flags.method, "total-degree or regeneration");
        sub->add_option("--seed", flags.seed, "solver seed");
        sub->add_option("--threads", flags.threads, "worker threads for path tracking");
        sub->add_flag("--strict", flags.strict, "exit 3 when any path fails");
        sub->add_flag("--dump-system", flags.dump_system, "print the stationarity systems");
        sub->add_option("--out", flags.out, "output directory");
    };
    auto* solve = app.add_subcommand("solve", "find all stationary configurations and the global minimum");
    auto* lloyd = app.add_subcommand("lloyd", "run Lloyd descent from the configured starts");
    auto* compare = app.add_subcommand("compare", "compare Lloyd endpoints with the certified minimum");
    auto* plot = app.add_subcommand("plot", "draw density and markers from existing results");
    for (auto* s : {solve, lloyd, compare, plot}) add_common(s);

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp&) {
        out << app.help();
        return ExitOk;
    }
    catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return ExitConfigError;
    }

    try {
        if (solve->parsed()) return cmd_solve(flags, out, err);
        if (lloyd->parsed()) return cmd_lloyd(flags, out, err);
        if (compare->parsed()) return cmd_compare(flags, out, err);
        return cmd_plot(flags, out, err);
    }
    catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return ExitConfigError;
    }
    catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return ExitConfigError;
    }
    catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return ExitConfigError;
    }
    catch (const InvalidProblem& e) {
        err << "error: " << e.what() << "\n";
        return ExitConfigError;
    }
    catch (const DegeneracyError& e) {
        err << "error: " << e.what() << "\n";
        return ExitConfigError;
    }
    catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return ExitFailure;
    }
}

} // namespace polycover
