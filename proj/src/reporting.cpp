#include "mtlab/reporting.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "mtlab/functionals.hpp"
#include "mtlab/radial_calculus.hpp"

namespace mtlab::report {

namespace fs = std::filesystem;

std::string to_string(Command c) {
    switch (c) {
        case Command::constants: return "constants";
        case Command::eval: return "eval";
        case Command::maximize: return "maximize";
        case Command::gap: return "gap";
        case Command::sharpness: return "sharpness";
        case Command::pde: return "pde";
        case Command::eigen: return "eigen";
        case Command::conditions: return "conditions";
    }
    return "?";
}

Command command_from_string(const std::string& name) {
    for (auto c : {Command::constants, Command::eval, Command::maximize, Command::gap, Command::sharpness,
                   Command::pde, Command::eigen, Command::conditions})
        if (to_string(c) == name) return c;
    throw ConfigError("unknown command: " + name);
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object() || !j.contains("command") || !j["command"].is_string())
        throw ConfigError("config must be an object with a string \"command\"");
    ExperimentConfig c;
    c.command = command_from_string(j["command"].get<std::string>());
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw ConfigError("\"params\" must be an object");
        for (const auto& [key, v] : j["params"].items()) {
            if (v.is_string()) {
                c.params[key] = v.get<std::string>();
            } else if (v.is_number()) {
                c.params[key] = format_number(v.get<double>());
            } else if (v.is_array()) {
                std::string s;
                for (const auto& x : v) {
                    if (!x.is_number()) throw ConfigError("list parameter " + key + " must hold numbers");
                    s += (s.empty() ? "" : ",") + format_number(x.get<double>());
                }
                c.params[key] = s;
            } else {
                throw ConfigError("parameter " + key + " must be a string, number or list");
            }
        }
    }
    if (j.contains("out")) {
        if (!j["out"].is_string()) throw ConfigError("\"out\" must be a string");
        c.out_dir = j["out"].get<std::string>();
    }
    return c;
}

std::string ExperimentConfig::get_string(const std::string& key, const std::string& fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

namespace {

double parse_double(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("parameter " + key + " is not a number: " + text);
    }
    if (used != text.size()) throw ConfigError("parameter " + key + " is not a number: " + text);
    return v;
}

}  // namespace

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : parse_double(key, it->second);
}

int ExperimentConfig::get_int(const std::string& key, int fallback) const {
    const double v = get_double(key, fallback);
    if (v != std::floor(v) || std::abs(v) > 2e9) throw ConfigError("parameter " + key + " must be an integer");
    return static_cast<int>(v);
}

std::vector<double> ExperimentConfig::get_list(const std::string& key, const std::vector<double>& fallback) const {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
    if (out.empty()) throw ConfigError("parameter " + key + " is an empty list");
    return out;
}

namespace {

const std::set<std::string>& allowed_keys(Command c) {
    static const std::set<std::string> constants{"n"};
    static const std::set<std::string> eval{"kind", "n", "alpha", "gamma-mult", "input", "j", "eps",
                                            "grid-count", "grading", "grid-strength"};
    static const std::set<std::string> maximize{"kind", "n", "alpha", "gamma-mult", "grid-count", "grading",
                                                "grid-strength", "seed", "max-iters"};
    static const std::set<std::string> gap{"kind", "against", "n", "alpha", "gamma-mult", "grid-count",
                                           "grading", "grid-strength", "seed", "max-iters", "resolution"};
    static const std::set<std::string> sharpness{"kind", "n", "alpha", "gamma-mult", "j", "grid-count"};
    static const std::set<std::string> pde{"n", "alpha", "alpha0", "c", "grid-count", "grading", "grid-strength",
                                           "j"};
    static const std::set<std::string> eigen{"n"};
    static const std::set<std::string> conditions{"n", "alpha", "alpha0", "c", "M", "R"};
    switch (c) {
        case Command::constants: return constants;
        case Command::eval: return eval;
        case Command::maximize: return maximize;
        case Command::gap: return gap;
        case Command::sharpness: return sharpness;
        case Command::pde: return pde;
        case Command::eigen: return eigen;
        case Command::conditions: return conditions;
    }
    return constants;
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

GradingSpec grading_from(const ExperimentConfig& c, const std::string& fallback) {
    const std::string g = c.get_string("grading", fallback);
    const double s = c.get_double("grid-strength", 40.0);
    if (g == "uniform") return GradingSpec::uniform();
    if (g == "log") return GradingSpec::log_origin(s);
    if (g == "doubly") return GradingSpec::doubly(s, 20.0);
    throw ConfigError("unknown grading: " + g);
}

FunctionalSpec functional_from(const ExperimentConfig& c, const std::string& key, const std::string& fallback) {
    FunctionalKind kind;
    try {
        kind = functional_kind_from_string(c.get_string(key, fallback));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (kind == FunctionalKind::GeneralAdditive || kind == FunctionalKind::GeneralExponent)
        throw ConfigError("general functionals need a profile and are library-only");
    FunctionalSpec s = FunctionalSpec::mt(c.get_int("n", 2), c.get_double("gamma-mult", 1.0));
    s.kind = kind;
    s.alpha = c.get_double("alpha", 1.0);
    return s;
}

pde::NonlinearitySpec nonlinearity_from(const ExperimentConfig& c) {
    auto s = pde::NonlinearitySpec::defaults(c.get_int("n", 2));
    s.alpha = c.get_double("alpha", 1.0);
    s.alpha0 = c.get_double("alpha0", 0.0);
    s.c = c.get_double("c", 1.0);
    s.M = c.get_double("M", 1.0);
    s.R = c.get_double("R", 1.0);
    return s;
}

}  // namespace

void ExperimentConfig::validate() const {
    const auto& keys = allowed_keys(command);
    for (const auto& [k, v] : params)
        require(keys.count(k) > 0, "parameter " + k + " does not apply to " + to_string(command));
    const int n = get_int("n", 2);
    require(n >= 2 && n <= 12, "n must be an integer in [2, 12]");
    require(get_double("alpha", 1.0) > 0.0, "alpha must be positive");
    require(get_double("gamma-mult", 1.0) > 0.0, "gamma-mult must be positive");
    require(get_int("grid-count", 2000) >= 16, "grid-count must be at least 16");
    require(get_double("grid-strength", 40.0) > 0.0, "grid-strength must be positive");
    require(get_int("seed", 0) >= 0, "seed must be non-negative");
    require(get_int("max-iters", 0) >= 0, "max-iters must be non-negative");
    require(get_double("resolution", 0.0) >= 0.0, "resolution must be non-negative");
    require(get_double("alpha0", 1.0) > 0.0, "alpha0 must be positive");
    require(std::isfinite(get_double("c", 1.0)), "c must be finite");
    require(get_double("M", 1.0) > 0.0 && get_double("R", 1.0) > 0.0, "M and R must be positive");
    for (double j : get_list("j", {8.0})) require(j > 1.0, "every j must exceed 1");
    const double eps = get_double("eps", 1e-3);
    require(eps > 0.0 && eps < std::exp(-std::numbers::e), "eps must lie in (0, e^{-e})");
    const std::string input = get_string("input", "zero");
    require(input == "zero" || input == "moser" || input == "concentrating",
            "input must be zero, moser or concentrating");
    if (has("grading")) grading_from(*this, "log");
    if (has("kind")) functional_from(*this, "kind", "mt");
    if (has("against")) functional_from(*this, "against", "mt");
    if (command == Command::sharpness) require(get_double("gamma-mult", 1.0) >= 1.0, "sharpness needs gamma-mult >= 1");
    if (command == Command::pde)
        for (double j : get_list("j", {64.0})) require(j >= 8.0 && j == std::floor(j), "pde j values must be integers >= 8");
}

fs::path default_out_dir() {
    if (const char* env = std::getenv("MTLAB_OUT_DIR"); env && *env) return env;
    return "mtlab_out";
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
    if (header_.empty()) throw std::invalid_argument("csv needs at least one column");
}

void CsvTable::add_row(const std::vector<double>& row) {
    if (row.size() != header_.size()) throw std::invalid_argument("csv row width differs from header");
    rows_.push_back(row);
}

std::string CsvTable::str() const {
    std::string s;
    for (std::size_t i = 0; i < header_.size(); ++i) s += (i ? "," : "") + header_[i];
    s += '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + format_number(row[i]);
        s += '\n';
    }
    return s;
}

void CsvTable::write(const fs::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << str();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

namespace {

fs::path write_table(const CsvTable& t, const fs::path& dir, const std::string& name) {
    const fs::path p = dir / name;
    t.write(p);
    return p;
}

json run_constants(const ExperimentConfig& c, const fs::path& dir, std::vector<fs::path>& files) {
    const auto k = constants_for(c.get_int("n", 2));
    CsvTable t({"n", "omega", "ball_volume", "alpha_n", "harmonic_partial", "J"});
    t.add_row({double(k.n), k.omega, k.ball_volume, k.alpha_n, k.harmonic_partial, k.J});
    files.push_back(write_table(t, dir, "constants.csv"));
    return {{"n", k.n},           {"omega", k.omega}, {"ball_volume", k.ball_volume},
            {"alpha_n", k.alpha_n}, {"harmonic_partial", k.harmonic_partial}, {"J", k.J}};
}

json run_eval(const ExperimentConfig& c, const fs::path& dir, std::vector<fs::path>& files) {
    const auto spec = functional_from(c, "kind", "mt");
    const auto grid = make_grid(c.get_int("grid-count", 2000), grading_from(c, "log"));
    const std::string input = c.get_string("input", "zero");
    json extra = json::object();
    RadialFunction u = [&] {
        if (input == "zero") return RadialFunction(grid, std::vector<double>(grid.count(), 0.0), spec.n);
        if (input == "moser") {
            const double j = c.get_list("j", {8.0}).front();
            extra["j"] = j;
            return moser_function({j, spec.n}, grid);
        }
        const double eps = c.get_double("eps", 1e-3);
        auto [f, p] = concentrating_function(eps, spec.n, grid);
        extra["eps"] = eps;
        extra["c"] = p.c;
        extra["c_continuum"] = p.c_continuum;
        return f;
    }();
    const auto v = eval_functional(u, spec);
    for (auto& p : emit_plot_data(u, dir, "eval_profile")) files.push_back(p);
    json r{{"kind", to_string(spec.kind)}, {"gamma", spec.effective_gamma()}, {"input", input},
           {"value", v.value},            {"divergent", v.divergent},     {"max_exponent", v.max_exponent},
           {"energy", dirichlet_energy(u)}};
    r.update(extra);
    return r;
}

MaximizerOptions options_from(const ExperimentConfig& c) {
    MaximizerOptions o;
    o.seed = static_cast<std::uint64_t>(c.get_int("seed", 20240601));
    o.max_iters = c.get_int("max-iters", o.max_iters);
    return o;
}

json report_json(const MaximizerReport& r) {
    json starts = json::array();
    for (const auto& s : r.starts)
        starts.push_back({{"start", s.provenance},
                          {"initial", s.initial_value},
                          {"final", s.final_value},
                          {"iterations", s.iterations},
                          {"diverged", s.diverged},
                          {"skipped", s.skipped},
                          {"note", s.note}});
    json j{{"best_value", r.best_value},
           {"start", r.start_provenance},
           {"diverged", r.diverged},
           {"trivial_plateau", r.trivial_plateau},
           {"iterations", r.iterations},
           {"starts", starts},
           {"J", r.compared_thresholds.J},
           {"ball_volume", r.compared_thresholds.ball_volume}};
    if (r.compared_thresholds.mt_numeric) j["mt_numeric"] = *r.compared_thresholds.mt_numeric;
    return j;
}

json run_maximize(const ExperimentConfig& c, const fs::path& dir, std::vector<fs::path>& files) {
    const auto spec = functional_from(c, "kind", "mt");
    const auto grid = make_grid(c.get_int("grid-count", 2000), grading_from(c, "log"));
    const auto rep = maximize(spec, grid, options_from(c));
    for (auto& p : emit_plot_data(rep, dir, "maximize")) files.push_back(p);
    json j = report_json(rep);
    j["kind"] = to_string(spec.kind);
    return j;
}

json run_gap(const ExperimentConfig& c, const fs::path& dir, std::vector<fs::path>& files) {
    const auto first = functional_from(c, "kind", "mt1");
    const auto second = functional_from(c, "against", "mt");
    const auto grid = make_grid(c.get_int("grid-count", 2000), grading_from(c, "log"));
    const auto g = certified_gap_report(first, second, grid, options_from(c), c.get_double("resolution", 0.0));
    for (auto& p : emit_plot_data(g.first, dir, "gap_first")) files.push_back(p);
    for (auto& p : emit_plot_data(g.second, dir, "gap_second")) files.push_back(p);
    return {{"first_kind", to_string(first.kind)}, {"second_kind", to_string(second.kind)},
            {"first", report_json(g.first)},        {"second", report_json(g.second)},
            {"gap", g.gap},                          {"tolerance", g.tolerance},
            {"status", g.status}};
}

json run_sharpness(const ExperimentConfig& c, const fs::path& dir, std::vector<fs::path>& files) {
    const auto spec = functional_from(c, "kind", "mt2");
    const auto js = c.get_list("j", {64.0, 256.0, 1024.0});
    const auto rows = blowup_table(spec.kind, c.get_double("gamma-mult", 1.1), spec.alpha, spec.n, js,
                                   c.get_int("grid-count", 4000));
    CsvTable t({"j", "value", "lower_bound", "divergent"});
    std::vector<double> x, y;
    for (const auto& r : rows) {
        t.add_row({r.j, r.value, r.lower_bound, r.divergent ? 1.0 : 0.0});
        x.push_back(r.j);
        y.push_back(r.value);
    }
    files.push_back(write_table(t, dir, "sharpness.csv"));
    for (auto& p : emit_plot_data(rows, dir, "sharpness")) files.push_back(p);
    json j{{"kind", to_string(spec.kind)},
           {"gamma", spec.effective_gamma()},
           {"predicted_slope", spec.n * (spec.effective_gamma() / constants_for(spec.n).alpha_n - 1.0)},
           {"rows", rows.size()}};
    bool dominated = true;
    for (const auto& r : rows) dominated = dominated && r.value >= r.lower_bound;
    j["dominates_lower_bound"] = dominated;
    if (x.size() >= 2) j["fitted_slope"] = loglog_slope(x, y);
    return j;
}

json run_pde(const ExperimentConfig& c, const fs::path& dir, std::vector<fs::path>& files) {
    const auto spec = nonlinearity_from(c);
    const auto grid = make_grid(c.get_int("grid-count", 2001), grading_from(c, "uniform"));
    const auto bvp = pde::solve_bvp(spec, grid);
    json j{{"found", bvp.found}, {"note", bvp.note}, {"bracket", {bvp.bracket.first, bvp.bracket.second}}};
    if (bvp.found) {
        const auto& s = bvp.solution;
        j["s"] = s.s;
        j["boundary_residual"] = s.boundary_residual;
        j["flux_identity_residual"] = pde::flux_identity_residual(spec, s);
        j["positive"] = s.positive;
        j["monotone"] = s.monotone;
        const auto u = s.profile(spec.n);
        j["energy_I"] = pde::energy_I(u, spec);
        CsvTable t({"r", "u", "du", "flux"});
        for (std::size_t k = 0; k < grid.count(); ++k)
            t.add_row({grid.node(k), u.value(k), s.du[k], s.flux[k]});
        files.push_back(write_table(t, dir, "pde_solution.csv"));
        for (auto& p : emit_plot_data(s, spec.n, dir, "pde")) files.push_back(p);
    }
    json levels = json::array();
    const auto level_grid = make_grid(4000, GradingSpec::log_origin(40.0));
    for (double jv : c.get_list("j", {64.0, 256.0, 1024.0})) {
        const auto l = pde::mountain_pass_level(spec, static_cast<int>(jv), level_grid);
        levels.push_back({{"j", l.j},
                          {"t_star", l.t_star},
                          {"level", l.level},
                          {"bound", l.bound},
                          {"interior", l.interior},
                          {"below_bound", l.below_bound()}});
    }
    j["levels"] = levels;
    return j;
}

json run_eigen(const ExperimentConfig& c, const fs::path& dir, std::vector<fs::path>& files) {
    const int n = c.get_int("n", 2);
    const auto ep = pde::lambda1(n);
    for (auto& p : emit_plot_data(*ep.eigenfunction, dir, "eigenfunction")) files.push_back(p);
    return {{"n", n}, {"lambda1", ep.lambda}};
}

json entry_json(const pde::ConditionEntry& e) {
    json w = json::array();
    for (const auto& x : e.witnesses) w.push_back({{"r", x.r}, {"t", x.t}, {"value", x.value}, {"bound", x.bound}});
    return {{"ok", e.ok}, {"note", e.note}, {"witnesses", w}};
}

json run_conditions(const ExperimentConfig& c, const fs::path&, std::vector<fs::path>&) {
    const auto spec = nonlinearity_from(c);
    const auto r = pde::check_conditions(spec);
    return {{"F1", entry_json(r.f1)},       {"F2", entry_json(r.f2)},         {"F3", entry_json(r.f3)},
            {"F4", entry_json(r.f4)},       {"F5", entry_json(r.f5)},         {"F1prime", entry_json(r.f1prime)},
            {"lambda1", r.lambda1},         {"beta0_floor", r.beta0_floor},   {"F3_to_F5", r.f3_to_f5()}};
}

json params_json(const ExperimentConfig& c) {
    json p = json::object();
    for (const auto& [k, v] : c.params) p[k] = v;
    return p;
}

}  // namespace

RunOutcome run(const ExperimentConfig& config) {
    RunOutcome out;
    const std::string name = to_string(config.command);
    out.summary = {{"command", name}, {"params", params_json(config)}};
    try {
        config.validate();
    } catch (const ConfigError& e) {
        out.exit_code = 2;
        out.summary["status"] = "error";
        out.summary["error"] = {{"kind", "config"}, {"message", e.what()}};
        return out;
    }
    const fs::path dir = config.out_dir.empty() ? default_out_dir() : config.out_dir;
    try {
        fs::create_directories(dir);
        std::vector<fs::path> files;
        json results;
        switch (config.command) {
            case Command::constants: results = run_constants(config, dir, files); break;
            case Command::eval: results = run_eval(config, dir, files); break;
            case Command::maximize: results = run_maximize(config, dir, files); break;
            case Command::gap: results = run_gap(config, dir, files); break;
            case Command::sharpness: results = run_sharpness(config, dir, files); break;
            case Command::pde: results = run_pde(config, dir, files); break;
            case Command::eigen: results = run_eigen(config, dir, files); break;
            case Command::conditions: results = run_conditions(config, dir, files); break;
        }
        out.summary["status"] = "ok";
        out.summary["results"] = results;
        json names = json::array();
        for (const auto& f : files) names.push_back(f.filename().string());
        out.summary["files"] = names;
        out.files = files;
    } catch (const std::exception& e) {
        out.exit_code = 1;
        out.summary["status"] = "error";
        out.summary["error"] = {{"kind", "module"}, {"message", e.what()}};
        out.summary.erase("results");
        out.summary.erase("files");
    }
    try {
        validate_summary(out.summary);
        const fs::path p = dir / (name + "_summary.json");
        std::ofstream(p) << out.summary.dump(2) << '\n';
        out.files.push_back(p);
    } catch (const std::exception& e) {
        out.exit_code = 1;
        out.summary["status"] = "error";
        out.summary["error"] = {{"kind", "module"}, {"message", e.what()}};
    }
    return out;
}

void validate_summary(const json& s) {
    auto fail = [](const std::string& m) { throw std::invalid_argument("summary schema: " + m); };
    if (!s.is_object()) fail("not an object");
    if (!s.contains("command") || !s["command"].is_string()) fail("missing command");
    command_from_string(s["command"].get<std::string>());
    if (!s.contains("params") || !s["params"].is_object()) fail("missing params");
    for (const auto& [k, v] : s["params"].items())
        if (!v.is_string()) fail("param " + k + " is not a string");
    if (!s.contains("status") || !s["status"].is_string()) fail("missing status");
    const std::string status = s["status"].get<std::string>();
    if (status == "ok") {
        if (!s.contains("results") || !s["results"].is_object()) fail("missing results");
        if (!s.contains("files") || !s["files"].is_array()) fail("missing files");
        for (const auto& f : s["files"])
            if (!f.is_string()) fail("file entry is not a string");
    } else if (status == "error") {
        if (!s.contains("error") || !s["error"].is_object()) fail("missing error record");
        const auto& e = s["error"];
        if (!e.contains("kind") || !e["kind"].is_string() || !e.contains("message") || !e["message"].is_string())
            fail("malformed error record");
    } else {
        fail("unknown status " + status);
    }
}

std::vector<fs::path> emit_plot_data(const std::vector<BlowupRow>& rows, const fs::path& dir,
                                     const std::string& stem) {
    CsvTable t({"log_j", "log_value"});
    for (const auto& r : rows) t.add_row({std::log(r.j), std::log(r.value)});
    return {write_table(t, dir, stem + "_loglog.csv")};
}

std::vector<fs::path> emit_plot_data(const MaximizerReport& rep, const fs::path& dir, const std::string& stem) {
    CsvTable t({"iter", "value"});
    for (const auto& e : rep.trace) t.add_row({double(e.iter), e.value});
    std::vector<fs::path> out{write_table(t, dir, stem + "_trace.csv")};
    if (rep.argmax)
        for (auto& p : emit_plot_data(*rep.argmax, dir, stem + "_argmax")) out.push_back(p);
    return out;
}

std::vector<fs::path> emit_plot_data(const pde::ShootingResult& shot, int n, const fs::path& dir,
                                     const std::string& stem) {
    return emit_plot_data(shot.profile(n), dir, stem + "_profile");
}

std::vector<fs::path> emit_plot_data(const RadialFunction& u, const fs::path& dir, const std::string& stem) {
    CsvTable t({"r", "u"});
    for (std::size_t k = 0; k < u.grid().count(); ++k) t.add_row({u.grid().node(k), u.value(k)});
    return {write_table(t, dir, stem + ".csv")};
}

}  // namespace mtlab::report
