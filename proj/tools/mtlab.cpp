#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "mtlab/reporting.hpp"

namespace {

struct Flags {
    std::map<std::string, std::string> values;
    std::string out;
};

void add_flags(CLI::App* sub, Flags& f, std::initializer_list<std::pair<const char*, const char*>> flags) {
    for (const auto& [name, help] : flags) sub->add_option(std::string("--") + name, f.values[name], help);
    sub->add_option("--out", f.out, "output directory (default $MTLAB_OUT_DIR or ./mtlab_out)");
}

}  // namespace

int main(int argc, char** argv) {
    using mtlab::report::Command;
    CLI::App app{"Numerical experiments for Moser-Trudinger type functionals on the unit ball"};
    app.require_subcommand(0, 1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON experiment config {command, params, out}");

    Flags f;
    const std::pair<const char*, const char*> n{"n", "dimension"}, alpha{"alpha", "radial weight exponent"},
        gmult{"gamma-mult", "gamma as a multiple of alpha_n"}, kind{"kind", "mt | mt1 | mt2"},
        count{"grid-count", "number of grid nodes"}, grading{"grading", "uniform | log | doubly"},
        strength{"grid-strength", "-log of the first positive node"}, j{"j", "comma separated j values"},
        eps{"eps", "concentration parameter"}, seed{"seed", "random seed"},
        input{"input", "zero | moser | concentrating"}, iters{"max-iters", "ascent iteration cap"},
        against{"against", "second functional kind"}, resolution{"resolution", "extra gap tolerance"},
        alpha0{"alpha0", "critical growth rate (default alpha_n)"}, c{"c", "Taylor correction coefficient"},
        M{"M", "superlinearity constant"}, R{"R", "superlinearity threshold"};

    std::map<CLI::App*, Command> commands;
    auto sub = [&](Command cmd, const char* help, std::initializer_list<std::pair<const char*, const char*>> flags) {
        auto* s = app.add_subcommand(mtlab::report::to_string(cmd), help);
        add_flags(s, f, flags);
        commands[s] = cmd;
    };
    sub(Command::constants, "dimension constants", {n});
    sub(Command::eval, "evaluate a functional on a test function",
        {kind, n, alpha, gmult, input, j, eps, count, grading, strength});
    sub(Command::maximize, "multistart ascent for the sharp constant",
        {kind, n, alpha, gmult, count, grading, strength, seed, iters});
    sub(Command::gap, "difference of two maximized constants",
        {kind, against, n, alpha, gmult, count, grading, strength, seed, iters, resolution});
    sub(Command::sharpness, "functional values along Moser functions", {kind, n, alpha, gmult, j, count});
    sub(Command::pde, "shooting solution and mountain-pass levels", {n, alpha, alpha0, c, count, grading, strength, j});
    sub(Command::eigen, "first Dirichlet eigenvalue of the n-Laplacian", {n});
    sub(Command::conditions, "sampled checks of the nonlinearity conditions", {n, alpha, alpha0, c, M, R});

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    mtlab::report::ExperimentConfig config;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw mtlab::report::ConfigError("cannot read config " + config_path);
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw mtlab::report::ConfigError(std::string("config is not valid JSON: ") + e.what());
            }
            config = mtlab::report::ExperimentConfig::from_json(j);
        }
        CLI::App* chosen = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front();
        if (!chosen && config_path.empty()) throw mtlab::report::ConfigError("no command given");
        if (chosen) {
            config.command = commands.at(chosen);
            for (const auto* opt : chosen->get_options())
                if (opt->count() > 0 && opt->get_name() != "--out" && opt->get_name() != "--help")
                    config.params[opt->get_name().substr(2)] = f.values[opt->get_name().substr(2)];
            if (!f.out.empty()) config.out_dir = f.out;
        }
    } catch (const mtlab::report::ConfigError& e) {
        nlohmann::json err{{"status", "error"}, {"error", {{"kind", "config"}, {"message", e.what()}}}};
        std::cout << err.dump(2) << '\n';
        return 2;
    }

    const auto outcome = mtlab::report::run(config);
    std::cout << outcome.summary.dump(2) << '\n';
    return outcome.exit_code;
}
