#pragma once
// Run configuration files and result serialization (JSON, CSV, SVG).

#include "polycover/lloyd.hpp"
#include "polycover/optimizer.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace polycover {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One Lloyd start: explicit(p1, ...), random(seed) or symmetric(a).
struct InitialSpec {
    enum class Kind { Explicit, Random, Symmetric };
    Kind kind = Kind::Random;
    std::vector<double> positions;
    std::uint64_t seed = 1;
    double a = 0.5;

    Configuration resolve(const CoverageProblem& problem) const;
    std::string to_string() const;
    static InitialSpec parse(std::string_view text);

    friend bool operator==(const InitialSpec&, const InitialSpec&) = default;
};

struct RunConfig {
    struct Problem {
        mpq_class A = 0;
        mpq_class B = 1;
        int m = 1;
        std::string phi = "1";
        std::string f = "s";

        bool operator==(const Problem& o) const
        {
            return A == o.A && B == o.B && m == o.m && phi == o.phi && f == o.f;
        }
    } problem;

    struct Solver {
        Method method = Method::TotalDegree;
        std::uint64_t seed = 0;
        int threads = 1;
        TrackerOptions tracker;

        bool operator==(const Solver& o) const;
    } solver;

    struct Lloyd {
        LloydOptions options;
        std::vector<InitialSpec> initial{InitialSpec{}};

        bool operator==(const Lloyd& o) const;
    } lloyd;

    struct Output {
        std::string directory = "out";
        std::vector<std::string> formats{"json", "csv", "svg"};

        bool wants(std::string_view format) const;
        friend bool operator==(const Output&, const Output&) = default;
    } output;

    bool operator==(const RunConfig& o) const
    {
        return problem == o.problem && solver == o.solver && lloyd == o.lloyd && output == o.output;
    }

    /// Builds the problem; polynomial syntax errors surface as ParseError.
    CoverageProblem build_problem() const;
    SolveOptions solve_options() const;
};

/// INI-style text with [problem], [solver], [lloyd] and [output] sections.
/// Unknown sections or keys are rejected.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
std::string emit_config(const RunConfig& config);

nlohmann::ordered_json to_json(const Candidate& c);
nlohmann::ordered_json to_json(const SolutionSet& s);
nlohmann::ordered_json to_json(const LloydTrace& trace);

/// candidates.json: metadata (method, seed, census, per-instance solution
/// sets with gamma angle and path counts) followed by the candidate array.
/// `winner` may be null when no candidate is feasible.
nlohmann::ordered_json candidates_document(const RunConfig& config, const CandidateSearch& search, const Candidate* winner);

std::string candidates_csv(const std::vector<Candidate>& candidates);

struct LloydRun {
    InitialSpec initial;
    LloydTrace trace;
};

/// Columns: run, iter, p1..pm, objective, grad_norm, step.
std::string trace_csv(const std::vector<LloydRun>& runs);

nlohmann::ordered_json lloyd_document(const RunConfig& config, const std::vector<LloydRun>& runs);

/// Marker groups drawn over the density curve.
struct PlotMarkers {
    std::vector<double> global;       ///< certified global minimum
    std::vector<double> lloyd_global; ///< Lloyd endpoints matching it
    std::vector<double> lloyd_local;  ///< Lloyd endpoints stuck elsewhere
};

std::string render_svg(const CoverageProblem& problem, const PlotMarkers& markers);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace polycover
