#include "polycover/io.hpp"

#include "polycover/poly_text.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace polycover {

namespace pt = boost::property_tree;

namespace {

std::string fmt(double v) { return format_double(v); }

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto k = s.find(sep, start);
        out.push_back(trim(s.substr(start, k == std::string_view::npos ? s.npos : k - start)));
        if (k == std::string_view::npos) break;
        start = k + 1;
    }
    return out;
}

double to_double(const std::string& key, const std::string& text)
{
    double v = 0;
    const auto t = trim(text);
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size() || !std::isfinite(v))
        throw ConfigError(key + ": expected a number, got '" + text + "'");
    return v;
}

template <class Int>
Int to_int(const std::string& key, const std::string& text)
{
    Int v = 0;
    const auto t = trim(text);
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size())
        throw ConfigError(key + ": expected an integer, got '" + text + "'");
    return v;
}

bool to_bool(const std::string& key, const std::string& text)
{
    const auto t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

// Reads the known keys of one section and rejects anything else.
class Section {
public:
    Section(const pt::ptree& root, const std::string& name) : name_(name)
    {
        if (const auto node = root.get_child_optional(name)) tree_ = &*node;
    }

    template <class F>
    void read(const std::string& key, F&& assign)
    {
        known_.insert(key);
        if (!tree_) return;
        if (const auto v = tree_->get_optional<std::string>(pt::ptree::path_type(key, '\0'))) {
            const std::string full = name_ + "." + key;
            assign(full, *v);
        }
    }

    void finish() const
    {
        if (!tree_) return;
        for (const auto& [k, v] : *tree_)
            if (!known_.count(k)) throw ConfigError("unknown key '" + k + "' in [" + name_ + "]");
    }

private:
    std::string name_;
    const pt::ptree* tree_ = nullptr;
    std::set<std::string> known_;
};

} // namespace

// ---------------------------------------------------------------------------

Configuration InitialSpec::resolve(const CoverageProblem& problem) const
{
    switch (kind) {
    case Kind::Explicit: {
        Configuration c{positions};
        if (static_cast<int>(c.size()) != problem.m)
            throw ConfigError("explicit initial configuration has " + std::to_string(c.size()) +
                              " positions, expected " + std::to_string(problem.m));
        validate_configuration(c, problem.a(), problem.b(), problem.coincidence_tol());
        return c;
    }
    case Kind::Random: return random_configuration(problem, seed);
    case Kind::Symmetric: return symmetric_configuration(problem, a);
    }
    return {};
}

std::string InitialSpec::to_string() const
{
    switch (kind) {
    case Kind::Explicit: {
        std::string s = "explicit(";
        for (std::size_t i = 0; i < positions.size(); ++i) s += (i ? ", " : "") + fmt(positions[i]);
        return s + ")";
    }
    case Kind::Random: return "random(" + std::to_string(seed) + ")";
    case Kind::Symmetric: return "symmetric(" + fmt(a) + ")";
    }
    return {};
}

InitialSpec InitialSpec::parse(std::string_view text)
{
    const auto t = trim(text);
    const auto open = t.find('(');
    if (open == std::string::npos || t.back() != ')')
        throw ConfigError("initial: expected explicit(...), random(seed) or symmetric(a), got '" + t + "'");
    const auto kind = trim(t.substr(0, open));
    const auto args = t.substr(open + 1, t.size() - open - 2);
    InitialSpec s;
    if (kind == "explicit") {
        s.kind = Kind::Explicit;
        for (const auto& p : split(args, ',')) s.positions.push_back(to_double("lloyd.initial", p));
    }
    else if (kind == "random") {
        s.kind = Kind::Random;
        s.seed = to_int<std::uint64_t>("lloyd.initial", args);
    }
    else if (kind == "symmetric") {
        s.kind = Kind::Symmetric;
        s.a = to_double("lloyd.initial", args);
        if (!(s.a > 0 && s.a < 1)) throw ConfigError("lloyd.initial: symmetric(a) needs 0 < a < 1");
    }
    else {
        throw ConfigError("initial: unknown kind '" + kind + "'");
    }
    return s;
}

bool RunConfig::Solver::operator==(const Solver& o) const
{
    const auto& a = tracker;
    const auto& b = o.tracker;
    return method == o.method && seed == o.seed && threads == o.threads && a.initial_step == b.initial_step &&
           a.min_step == b.min_step && a.max_step == b.max_step && a.corrector_tol == b.corrector_tol &&
           a.max_corrector_iters == b.max_corrector_iters && a.divergence_radius == b.divergence_radius &&
           a.step_shrink == b.step_shrink && a.step_grow == b.step_grow && a.grow_after == b.grow_after &&
           a.endgame_t == b.endgame_t && a.endgame == b.endgame;
}

bool RunConfig::Lloyd::operator==(const Lloyd& o) const
{
    const auto& a = options;
    const auto& b = o.options;
    return a.max_iters == b.max_iters && a.grad_tol == b.grad_tol && a.armijo_c == b.armijo_c &&
           a.shrink_rho == b.shrink_rho && a.initial_step == b.initial_step && a.projection == b.projection &&
           initial == o.initial;
}

bool RunConfig::Output::wants(std::string_view format) const
{
    return std::find(formats.begin(), formats.end(), format) != formats.end();
}

CoverageProblem RunConfig::build_problem() const
{
    auto parse = [](const char* key, const std::string& text) {
        try {
            return parse_polynomial(text);
        }
        catch (const ParseError& e) {
            std::string msg = e.what();
            msg = msg.substr(msg.find(": ") + 2);
            throw ParseError(std::string(key) + " = '" + text + "': " + msg, e.position());
        }
    };
    return CoverageProblem::create(problem.A, problem.B, problem.m, parse("problem.phi", problem.phi),
                                   parse("problem.f", problem.f));
}

SolveOptions RunConfig::solve_options() const
{
    SolveOptions o;
    o.tracker = solver.tracker;
    o.seed = solver.seed;
    o.threads = solver.threads;
    return o;
}

RunConfig parse_config(const std::string& text)
{
    pt::ptree root;
    std::istringstream in(text);
    try {
        pt::read_ini(in, root);
    }
    catch (const pt::ini_parser_error& e) {
        throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
    }
    for (const auto& [name, node] : root) {
        if (name != "problem" && name != "solver" && name != "lloyd" && name != "output")
            throw ConfigError(node.empty() ? "key '" + name + "' outside a section" : "unknown section [" + name + "]");
    }

    RunConfig c;
    auto rational = [](const std::string& key, const std::string& v) {
        try {
            return parse_rational(trim(v));
        }
        catch (const std::exception& e) {
            throw ConfigError(key + ": " + e.what());
        }
    };

    Section p(root, "problem");
    p.read("A", [&](auto& k, auto& v) { c.problem.A = rational(k, v); });
    p.read("B", [&](auto& k, auto& v) { c.problem.B = rational(k, v); });
    p.read("m", [&](auto& k, auto& v) { c.problem.m = to_int<int>(k, v); });
    p.read("phi", [&](auto&, auto& v) { c.problem.phi = trim(v); });
    p.read("f", [&](auto&, auto& v) { c.problem.f = trim(v); });
    p.finish();

    auto& tr = c.solver.tracker;
    Section s(root, "solver");
    s.read("method", [&](auto& k, auto& v) {
        const auto m = parse_method(trim(v));
        if (!m) throw ConfigError(k + ": expected total-degree or regeneration, got '" + v + "'");
        c.solver.method = *m;
    });
    s.read("seed", [&](auto& k, auto& v) { c.solver.seed = to_int<std::uint64_t>(k, v); });
    s.read("threads", [&](auto& k, auto& v) { c.solver.threads = to_int<int>(k, v); });
    s.read("initial_step", [&](auto& k, auto& v) { tr.initial_step = to_double(k, v); });
    s.read("min_step", [&](auto& k, auto& v) { tr.min_step = to_double(k, v); });
    s.read("max_step", [&](auto& k, auto& v) { tr.max_step = to_double(k, v); });
    s.read("corrector_tol", [&](auto& k, auto& v) { tr.corrector_tol = to_double(k, v); });
    s.read("max_corrector_iters", [&](auto& k, auto& v) { tr.max_corrector_iters = to_int<int>(k, v); });
    s.read("divergence_radius", [&](auto& k, auto& v) { tr.divergence_radius = to_double(k, v); });
    s.read("step_shrink", [&](auto& k, auto& v) { tr.step_shrink = to_double(k, v); });
    s.read("step_grow", [&](auto& k, auto& v) { tr.step_grow = to_double(k, v); });
    s.read("grow_after", [&](auto& k, auto& v) { tr.grow_after = to_int<int>(k, v); });
    s.read("endgame_t", [&](auto& k, auto& v) { tr.endgame_t = to_double(k, v); });
    s.read("endgame", [&](auto& k, auto& v) { tr.endgame = to_bool(k, v); });
    s.finish();

    auto& lo = c.lloyd.options;
    Section l(root, "lloyd");
    l.read("max_iters", [&](auto& k, auto& v) { lo.max_iters = to_int<int>(k, v); });
    l.read("grad_tol", [&](auto& k, auto& v) { lo.grad_tol = to_double(k, v); });
    l.read("armijo_c", [&](auto& k, auto& v) { lo.armijo_c = to_double(k, v); });
    l.read("shrink_rho", [&](auto& k, auto& v) { lo.shrink_rho = to_double(k, v); });
    l.read("initial_step", [&](auto& k, auto& v) { lo.initial_step = to_double(k, v); });
    l.read("projection", [&](auto& k, auto& v) { lo.projection = to_bool(k, v); });
    l.read("initial", [&](auto&, auto& v) {
        c.lloyd.initial.clear();
        for (const auto& item : split(v, ';'))
            if (!item.empty()) c.lloyd.initial.push_back(InitialSpec::parse(item));
        if (c.lloyd.initial.empty()) throw ConfigError("lloyd.initial: no initial configuration given");
    });
    l.finish();

    Section o(root, "output");
    o.read("directory", [&](auto&, auto& v) { c.output.directory = trim(v); });
    o.read("formats", [&](auto& k, auto& v) {
        c.output.formats.clear();
        for (const auto& f : split(v, ',')) {
            if (f != "json" && f != "csv" && f != "svg") throw ConfigError(k + ": unknown format '" + f + "'");
            c.output.formats.push_back(f);
        }
    });
    o.finish();

    if (c.solver.threads < 1) throw ConfigError("solver.threads must be at least 1");
    if (c.problem.m < 1) throw ConfigError("problem.m must be at least 1");
    try {
        c.solver.tracker.validate();
        c.lloyd.options.validate();
    }
    catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string emit_config(const RunConfig& c)
{
    std::ostringstream out;
    const auto& tr = c.solver.tracker;
    const auto& lo = c.lloyd.options;
    out << "[problem]\n"
        << "A = " << to_string(c.problem.A) << "\n"
        << "B = " << to_string(c.problem.B) << "\n"
        << "m = " << c.problem.m << "\n"
        << "phi = " << c.problem.phi << "\n"
        << "f = " << c.problem.f << "\n\n";
    out << "[solver]\n"
        << "method = " << method_name(c.solver.method) << "\n"
        << "seed = " << c.solver.seed << "\n"
        << "threads = " << c.solver.threads << "\n"
        << "initial_step = " << fmt(tr.initial_step) << "\n"
        << "min_step = " << fmt(tr.min_step) << "\n"
        << "max_step = " << fmt(tr.max_step) << "\n"
        << "corrector_tol = " << fmt(tr.corrector_tol) << "\n"
        << "max_corrector_iters = " << tr.max_corrector_iters << "\n"
        << "divergence_radius = " << fmt(tr.divergence_radius) << "\n"
        << "step_shrink = " << fmt(tr.step_shrink) << "\n"
        << "step_grow = " << fmt(tr.step_grow) << "\n"
        << "grow_after = " << tr.grow_after << "\n"
        << "endgame_t = " << fmt(tr.endgame_t) << "\n"
        << "endgame = " << (tr.endgame ? "true" : "false") << "\n\n";
    out << "[lloyd]\n"
        << "max_iters = " << lo.max_iters << "\n"
        << "grad_tol = " << fmt(lo.grad_tol) << "\n"
        << "armijo_c = " << fmt(lo.armijo_c) << "\n"
        << "shrink_rho = " << fmt(lo.shrink_rho) << "\n"
        << "initial_step = " << fmt(lo.initial_step) << "\n"
        << "projection = " << (lo.projection ? "true" : "false") << "\n"
        << "initial = ";
    for (std::size_t i = 0; i < c.lloyd.initial.size(); ++i) out << (i ? "; " : "") << c.lloyd.initial[i].to_string();
    out << "\n\n[output]\n"
        << "directory = " << c.output.directory << "\n"
        << "formats = ";
    for (std::size_t i = 0; i < c.output.formats.size(); ++i) out << (i ? ", " : "") << c.output.formats[i];
    out << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::ordered_json to_json(const Candidate& c)
{
    return {{"positions", c.config.positions},
            {"objective", c.objective_value},
            {"pin", pin_name(c.pin)},
            {"hessian_class", hessian_class_name(c.hessian_class)},
            {"source", source_name(c.source)},
            {"gradient_norm", c.gradient_norm}};
}

nlohmann::ordered_json to_json(const SolutionSet& s)
{
    nlohmann::ordered_json j;
    j["method"] = s.method;
    j["vars"] = s.vars;
    j["seed"] = s.seed;
    j["theta"] = s.theta;
    j["attempts"] = s.attempts;
    j["dedup_tolerance"] = s.dedup_tolerance;
    j["path_counts"] = {{"converged", s.paths.converged}, {"diverged", s.paths.diverged}, {"failed", s.paths.failed}};
    auto& points = j["solutions"] = nlohmann::ordered_json::array();
    for (const auto& p : s.solutions) {
        std::vector<double> re, im;
        for (const auto& z : p.point) {
            re.push_back(z.real());
            im.push_back(z.imag());
        }
        points.push_back({{"re", re},
                          {"im", im},
                          {"residual", p.residual},
                          {"singular", p.singular},
                          {"multiplicity", p.multiplicity}});
    }
    if (!s.levels.empty()) {
        auto& levels = j["levels"] = nlohmann::ordered_json::array();
        for (const auto& l : s.levels)
            levels.push_back({{"level", l.level},
                              {"degree", l.degree},
                              {"start_points", l.start_points},
                              {"stage_one_paths", l.stage_one_paths},
                              {"stage_one_lost", l.stage_one_lost},
                              {"stage_two_paths", l.stage_two_paths},
                              {"at_infinity", l.at_infinity},
                              {"singular_dropped", l.singular_dropped},
                              {"failed", l.failed},
                              {"solutions", l.solutions}});
        auto& slices = j["slices"] = nlohmann::ordered_json::array();
        for (const auto& row : s.slices) {
            nlohmann::ordered_json r = nlohmann::ordered_json::array();
            for (const auto& z : row) r.push_back({z.real(), z.imag()});
            slices.push_back(std::move(r));
        }
    }
    return j;
}

nlohmann::ordered_json to_json(const LloydTrace& trace)
{
    const auto& last = trace.final();
    return {{"final", last.config.positions},
            {"objective", last.objective},
            {"gradient_norm", last.gradient_norm},
            {"iterations", trace.iterates.size() - 1},
            {"terminated_by", termination_name(trace.terminated_by)}};
}

nlohmann::ordered_json candidates_document(const RunConfig& config, const CandidateSearch& search, const Candidate* winner)
{
    nlohmann::ordered_json meta;
    meta["method"] = method_name(config.solver.method);
    meta["seed"] = config.solver.seed;
    meta["problem"] = {{"A", to_string(config.problem.A)},
                       {"B", to_string(config.problem.B)},
                       {"m", config.problem.m},
                       {"phi", config.problem.phi},
                       {"f", config.problem.f}};
    meta["census"] = {{"interior_left_right",
                       {{"complex", search.interior_left_right.complex_total},
                        {"real", search.interior_left_right.real_total}}},
                      {"all_patterns",
                       {{"complex", search.all_patterns.complex_total}, {"real", search.all_patterns.real_total}}}};
    meta["feasible"] = search.feasible_total;
    meta["warnings"] = search.warnings;
    auto& inst = meta["instances"] = nlohmann::ordered_json::array();
    for (const auto& r : search.instances) {
        auto j = to_json(r.solutions);
        j["pin"] = pin_name(r.pin);
        j["real"] = r.real;
        j["feasible"] = r.feasible;
        inst.push_back(std::move(j));
    }

    nlohmann::ordered_json doc;
    doc["metadata"] = std::move(meta);
    doc["winner"] = winner ? to_json(*winner) : nlohmann::ordered_json();
    auto& arr = doc["candidates"] = nlohmann::ordered_json::array();
    for (const auto& c : search.candidates) arr.push_back(to_json(c));
    return doc;
}

std::string candidates_csv(const std::vector<Candidate>& candidates)
{
    std::ostringstream out;
    const std::size_t m = candidates.empty() ? 0 : candidates.front().config.size();
    out << "rank";
    for (std::size_t i = 1; i <= m; ++i) out << ",p" << i;
    out << ",objective,pin,hessian_class,source,gradient_norm\n";
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const auto& c = candidates[k];
        out << k + 1;
        for (double p : c.config.positions) out << "," << fmt(p);
        out << "," << fmt(c.objective_value) << "," << pin_name(c.pin) << "," << hessian_class_name(c.hessian_class)
            << "," << source_name(c.source) << "," << fmt(c.gradient_norm) << "\n";
    }
    return out.str();
}

std::string trace_csv(const std::vector<LloydRun>& runs)
{
    std::ostringstream out;
    const std::size_t m = runs.empty() ? 0 : runs.front().trace.final().config.size();
    out << "run,iter";
    for (std::size_t i = 1; i <= m; ++i) out << ",p" << i;
    out << ",objective,grad_norm,step\n";
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto& its = runs[r].trace.iterates;
        for (std::size_t k = 0; k < its.size(); ++k) {
            out << r + 1 << "," << k;
            for (double p : its[k].config.positions) out << "," << fmt(p);
            out << "," << fmt(its[k].objective) << "," << fmt(its[k].gradient_norm) << "," << fmt(its[k].step) << "\n";
        }
    }
    return out.str();
}

nlohmann::ordered_json lloyd_document(const RunConfig& config, const std::vector<LloydRun>& runs)
{
    nlohmann::ordered_json doc;
    doc["problem"] = {{"A", to_string(config.problem.A)},
                      {"B", to_string(config.problem.B)},
                      {"m", config.problem.m},
                      {"phi", config.problem.phi},
                      {"f", config.problem.f}};
    auto& arr = doc["runs"] = nlohmann::ordered_json::array();
    for (const auto& r : runs) {
        auto j = to_json(r.trace);
        j["initial_spec"] = r.initial.to_string();
        j["initial"] = r.trace.iterates.front().config.positions;
        arr.push_back(std::move(j));
    }
    return doc;
}

// ---------------------------------------------------------------------------
// SVG

std::string render_svg(const CoverageProblem& problem, const PlotMarkers& markers)
{
    constexpr double W = 640, H = 360, left = 50, right = 20, top = 20, bottom = 40;
    const double A = problem.a(), B = problem.b();
    const auto phi = problem.phi.to_numeric();
    constexpr int samples = 400;
    std::vector<double> ys;
    double ymax = 0;
    for (int k = 0; k <= samples; ++k) {
        const double x = A + (B - A) * k / samples;
        ys.push_back(phi.evaluate(std::vector<Complex>{Complex(x)}).real());
        ymax = std::max(ymax, ys.back());
    }
    if (ymax <= 0) ymax = 1;
    const double baseline = H - bottom;
    auto sx = [&](double x) { return left + (x - A) / (B - A) * (W - left - right); };
    auto sy = [&](double y) { return baseline - y / ymax * (H - top - bottom); };

    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(2);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
        << W << " " << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << sx(A) << "\" y1=\"" << baseline << "\" x2=\"" << sx(B) << "\" y2=\"" << baseline
        << "\" stroke=\"black\"/>\n";
    for (double x : {A, 0.5 * (A + B), B})
        out << "<text x=\"" << sx(x) << "\" y=\"" << baseline + 18 << "\" font-size=\"12\" text-anchor=\"middle\">"
            << fmt(x) << "</text>\n";
    out << "<polyline class=\"density\" fill=\"none\" stroke=\"red\" stroke-dasharray=\"6,4\" points=\"";
    for (int k = 0; k <= samples; ++k) out << (k ? " " : "") << sx(A + (B - A) * k / samples) << "," << sy(ys[k]);
    out << "\"/>\n";
    for (double p : markers.global)
        out << "<path class=\"global\" d=\"M" << sx(p) << " " << baseline - 14 << " l6 10 h-12 z\" fill=\"green\"/>\n";
    for (double p : markers.lloyd_global)
        out << "<rect class=\"lloyd-global\" x=\"" << sx(p) - 4 << "\" y=\"" << baseline - 4
            << "\" width=\"8\" height=\"8\" fill=\"blue\"/>\n";
    for (double p : markers.lloyd_local)
        out << "<circle class=\"lloyd-local\" cx=\"" << sx(p) << "\" cy=\"" << baseline << "\" r=\"4\" fill=\"black\"/>\n";
    out << "</svg>\n";
    return out.str();
}

std::string format_double(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, r.ptr};
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

} // namespace polycover
