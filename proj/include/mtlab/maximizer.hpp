#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtlab/functionals.hpp"
#include "mtlab/radial_calculus.hpp"

namespace mtlab {

struct StartDescriptor {
    enum class Kind { zero_perturbed, moser, concentrating, previous };
    Kind kind = Kind::zero_perturbed;
    double param = 0.0;                     // j for moser, eps for concentrating
    std::optional<RadialFunction> previous; // resampled onto the optimisation grid

    static StartDescriptor zero_perturbed() { return {}; }
    static StartDescriptor moser(double j) { return {Kind::moser, j, std::nullopt}; }
    static StartDescriptor concentrating(double eps) { return {Kind::concentrating, eps, std::nullopt}; }
    static StartDescriptor from_previous(RadialFunction u) { return {Kind::previous, 0.0, std::move(u)}; }

    std::string label() const;
};

// zero+noise, u_j for j in {8, 64, 512}, u_eps for eps in {1e-2, 1e-4, 1e-6}
std::vector<StartDescriptor> default_starts();

struct MaximizerOptions {
    int max_iters = 2000;
    double tol_rel = 1e-8;
    double step0 = 0.25;  // initial step, relative to the metric norm of the iterate
    std::vector<StartDescriptor> multistart = default_starts();
    std::uint64_t seed = 20240601;
    bool monotone_projection = false;
    double ceiling = 1e6;  // values above this count as divergence
    int patience = 5;      // consecutive small relative changes before stopping

    void validate() const;
};

struct TraceEntry {
    int iter = 0;
    double value = 0.0;
    double step = 0.0;
    double energy = 0.0;
};

struct StartOutcome {
    std::string provenance;
    double initial_value = 0.0;
    double final_value = 0.0;
    int iterations = 0;
    bool diverged = false;
    bool skipped = false;  // start could not be built on this grid
    std::string note;
};

struct MaximizerReport {
    double best_value = 0.0;
    std::optional<RadialFunction> argmax;
    std::vector<TraceEntry> trace;  // of the winning start
    std::string start_provenance;
    bool diverged = false;          // every start diverged
    bool trivial_plateau = false;   // best value stayed below |B| + 1e-6
    int iterations = 0;
    std::vector<StartOutcome> starts;
    struct Thresholds {
        std::optional<double> mt_numeric;
        double J = 0.0;
        double ball_volume = 0.0;
    } compared_thresholds;
};

// Projected gradient ascent on the unit n-energy sphere: step along the
// Sobolev-preconditioned gradient, rescale to unit energy, accept only increases.
MaximizerReport maximize(const FunctionalSpec& spec, const RadialGrid& grid, const MaximizerOptions& opts);

// Builds a start on `grid` (unit energy). Throws if the start cannot be represented.
RadialFunction build_start(const StartDescriptor& start, const RadialGrid& grid, int n, std::uint64_t seed);

struct GapReport {
    MaximizerReport first, second;
    double gap = 0.0;        // best(first) - best(second)
    double tolerance = 0.0;  // tol_rel (|b1| + |b2|) + resolution
    std::string status;      // "positive", "negative", "indistinguishable at resolution"
    bool significant() const { return status == "positive"; }
};

GapReport certified_gap_report(const FunctionalSpec& first, const FunctionalSpec& second, const RadialGrid& grid,
                               const MaximizerOptions& opts, double resolution = 0.0);

struct BaselineGap {
    MaximizerReport report;
    double baseline = 0.0;
    double gap = 0.0;
    double tolerance = 0.0;
    std::string status;
};

BaselineGap gap_against_baseline(const FunctionalSpec& spec, double baseline, const RadialGrid& grid,
                                 const MaximizerOptions& opts, double resolution = 0.0);

struct ProbeRow {
    double j = 0.0;
    double start_value = 0.0;
    double ascended_value = 0.0;
    bool divergent = false;
};

struct DivergenceReport {
    std::vector<ProbeRow> rows;
    bool diverged = false;        // flag tripped or ceiling exceeded somewhere in the sweep
    double first_divergent_j = 0.0;
    double growth_slope = 0.0;    // fitted d log(start value) / d log j
    double predicted_slope = 0.0; // n (gamma/alpha_n - 1)
};

// Moser starts of increasing j; each row evaluates u_j and ascends briefly from it.
// The sweep keeps going after divergence so the growth slope uses every j.
DivergenceReport divergence_probe(const FunctionalSpec& spec, const RadialGrid& grid, const MaximizerOptions& opts,
                                  std::vector<double> j_list = {});

}  // namespace mtlab
