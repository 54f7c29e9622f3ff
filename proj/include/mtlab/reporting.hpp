#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "mtlab/maximizer.hpp"
#include "mtlab/pde_solver.hpp"
#include "mtlab/test_families.hpp"

namespace mtlab::report {

using nlohmann::json;

enum class Command { constants, eval, maximize, gap, sharpness, pde, eigen, conditions };

std::string to_string(Command c);
Command command_from_string(const std::string& name);

// Raised for configurations that fail validation; the front end maps it to exit status 2.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    Command command = Command::constants;
    std::map<std::string, std::string> params;  // scalar values; lists are comma separated
    std::filesystem::path out_dir;              // empty means default_out_dir()

    // {"command": "...", "params": {...}, "out": "..."}; numbers and lists are accepted as values.
    static ExperimentConfig from_json(const json& j);

    bool has(const std::string& key) const { return params.count(key) > 0; }
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

    // Checks keys and values against the preconditions of the dispatched module.
    void validate() const;
};

// MTLAB_OUT_DIR if set, otherwise ./mtlab_out
std::filesystem::path default_out_dir();

struct RunOutcome {
    int exit_code = 0;  // 0 ok, 1 module failure, 2 invalid config
    json summary;
    std::vector<std::filesystem::path> files;
};

// Dispatches, writes summary.json and the CSV tables into the output directory.
RunOutcome run(const ExperimentConfig& config);

// Throws std::invalid_argument if the summary does not match the emitted schema.
void validate_summary(const json& summary);

// %.17g, with inf and nan spelled out
std::string format_number(double x);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add_row(const std::vector<double>& row);
    std::string str() const;
    void write(const std::filesystem::path& path) const;
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

// Two-column series for plotting; each returns the written paths.
std::vector<std::filesystem::path> emit_plot_data(const std::vector<BlowupRow>& rows,
                                                  const std::filesystem::path& dir, const std::string& stem);
std::vector<std::filesystem::path> emit_plot_data(const MaximizerReport& rep, const std::filesystem::path& dir,
                                                  const std::string& stem);
std::vector<std::filesystem::path> emit_plot_data(const pde::ShootingResult& shot, int n,
                                                  const std::filesystem::path& dir, const std::string& stem);
std::vector<std::filesystem::path> emit_plot_data(const RadialFunction& u, const std::filesystem::path& dir,
                                                  const std::string& stem);

}  // namespace mtlab::report
