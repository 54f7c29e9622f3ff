#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mtlab/functionals.hpp"
#include "mtlab/maximizer.hpp"
#include "mtlab/pde_solver.hpp"
#include "mtlab/test_families.hpp"
#include "oracles.hpp"

using namespace mtlab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double time_limit;  // seconds
    std::function<Outcome()> body;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome moser_normalization() {
    double worst = 0.0;
    const auto grid = make_grid(4000, GradingSpec::log_origin(40.0));
    for (int n : {2, 3, 4})
        for (double j : {8.0, 64.0, 512.0}) worst = std::max(worst, std::abs(dirichlet_energy(moser_function({j, n}, grid)) - 1.0));
    return {worst <= 1e-6, fmt("max |energy - 1| = %.3e", worst)};
}

Outcome pointwise_bound_check() {
    std::mt19937_64 rng(2024);
    const GradingSpec gradings[] = {GradingSpec::uniform(), GradingSpec::log_origin(35.0), GradingSpec::doubly()};
    long violations = 0, checked = 0;
    for (int i = 0; i < 200; ++i) {
        const int n = 2 + i % 3;
        const auto grid = make_grid(500, gradings[i % 3]);
        const auto u = normalize(oracle::random_function(grid, n, rng, false));
        for (std::size_t k = 1; k + 1 < grid.count(); ++k, ++checked)
            if (std::abs(u.value(k)) > pointwise_bound(grid.node(k), n) * (1.0 + 1e-12)) ++violations;
    }
    return {violations == 0, fmt("%ld violations over %ld interior nodes", violations, checked)};
}

std::vector<double> sharpness_js() {
    std::vector<double> js;
    for (int e = 8; e <= 16; ++e) js.push_back(std::ldexp(1.0, e));
    return js;
}

Outcome sharpness_slope() {
    const auto js = sharpness_js();
    bool ok = true;
    std::string detail;
    for (auto kind : {FunctionalKind::MT1, FunctionalKind::MT2}) {
        const auto rows = blowup_table(kind, 1.1, 1.0, 2, js);
        std::vector<double> v;
        for (const auto& r : rows) v.push_back(r.value);
        const double slope = loglog_slope(js, v);
        ok = ok && std::abs(slope - 0.2) <= 0.05 * 0.2;
        detail += fmt("%s slope %.4f; ", to_string(kind).c_str(), slope);
    }
    return {ok, detail + "target 0.2 +- 5%"};
}

Outcome criticality_plateau() {
    const auto js = sharpness_js();
    bool ok = true;
    std::string detail;
    for (auto kind : {FunctionalKind::MT1, FunctionalKind::MT2}) {
        const auto rows = blowup_table(kind, 1.0, 1.0, 2, js);
        std::vector<double> v;
        for (const auto& r : rows) v.push_back(r.value);
        const double mx = *std::max_element(v.begin(), v.end());
        auto sorted = v;
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted[sorted.size() / 2];
        ok = ok && mx <= 1.01 * median;
        detail += fmt("%s max %.5f median %.5f (ratio %.4f); ", to_string(kind).c_str(), mx, median, mx / median);
    }
    return {ok, detail + "need ratio <= 1.01"};
}

MaximizerOptions acceptance_options() {
    MaximizerOptions o;
    o.max_iters = 2000;
    o.tol_rel = 1e-10;
    return o;
}

Outcome strict_gap_1() {
    const auto o = acceptance_options();
    double v[2][2];  // [grid][functional]
    const std::size_t counts[] = {2000, 4000};
    for (int g = 0; g < 2; ++g) {
        const auto grid = make_grid(counts[g], GradingSpec::log_origin(40.0));
        v[g][0] = maximize(FunctionalSpec::mt1(2, 1.0), grid, o).best_value;
        v[g][1] = maximize(FunctionalSpec::mt(2), grid, o).best_value;
    }
    const double variation = std::max(std::abs(v[0][0] - v[1][0]), std::abs(v[0][1] - v[1][1]));
    const double gap2000 = v[0][0] - v[0][1], gap4000 = v[1][0] - v[1][1];
    const bool ok = gap2000 > 3.0 * variation && gap4000 > 3.0 * variation;
    return {ok, fmt("gap %.6f (2000) %.6f (4000), refinement variation %.3e", gap2000, gap4000, variation)};
}

Outcome strict_gap_2() {
    const auto o = acceptance_options();
    const double J = constants_for(2).J;
    const auto g2000 = make_grid(2000, GradingSpec::log_origin(40.0));
    const auto rep = maximize(FunctionalSpec::mt2(2, 1.0), g2000, o);
    const double fine = maximize(FunctionalSpec::mt2(2, 1.0), make_grid(4000, GradingSpec::log_origin(40.0)), o).best_value;
    const double grid_error = std::abs(rep.best_value - fine);
    bool seeded = false;
    for (const auto& s : rep.starts)
        if (s.provenance.rfind("concentrating", 0) == 0 && !s.skipped && s.final_value > J) seeded = true;
    double sweep = 0.0;
    for (double eps : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8})
        sweep = std::max(sweep, eval_functional(concentrating_function(eps, 2, g2000).first, FunctionalSpec::mt2(2, 1.0)).value);
    bool ok = rep.best_value > J && seeded;
    if (rep.best_value - J < grid_error) ok = ok && rep.best_value >= sweep;
    return {ok, fmt("best %.8f vs J %.8f (margin %.3e, grid error %.3e), family sweep max %.8f, seeded witness %s",
                    rep.best_value, J, rep.best_value - J, grid_error, sweep, seeded ? "yes" : "no")};
}

Outcome gradient_check() {
    std::mt19937_64 rng(99);
    const auto grid = make_grid(200, GradingSpec::log_origin(20.0));
    double worst = 0.0;
    for (const auto& spec : {FunctionalSpec::mt(2), FunctionalSpec::mt1(2, 1.0), FunctionalSpec::mt2(2, 1.0)})
        for (int i = 0; i < 20; ++i) {
            const auto u = normalize(oracle::random_function(grid, 2, rng, true));
            const auto g = objective_gradient(u, spec).grad;
            const auto fd = oracle::fd_gradient(u, spec, 1e-6);
            double err = 0.0, scale = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k) {
                err = std::max(err, std::abs(g[k] - fd[k]));
                scale = std::max(scale, std::abs(g[k]));
            }
            worst = std::max(worst, err / scale);
        }
    return {worst <= 1e-5, fmt("max relative error %.3e", worst)};
}

Outcome concentrating_asymptotics() {
    std::vector<double> R, d;
    for (double eps : {1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
        const auto p = concentrating_function(eps, 2, make_grid(4000, GradingSpec::log_origin(45.0))).second;
        R.push_back(-std::log(eps));
        d.push_back(std::abs(std::pow(p.c_continuum, 2.0) - concentrating_c_power_asymptotic(eps, 2)));
    }
    const double rate = loglog_slope(R, d);
    return {rate <= -2.0 + 0.2, fmt("fitted rate exponent %.4f (need <= -1.8)", rate)};
}

Outcome eigenvalue_oracle() {
    const double z = oracle::bessel_j0_first_zero();
    const double lam = pde::lambda1(2).lambda;
    const double rel = std::abs(lam - z * z) / (z * z);
    return {rel <= 1e-5, fmt("lambda1 %.12f, oracle %.12f, relative error %.3e", lam, z * z, rel)};
}

Outcome pde_existence() {
    const auto spec = pde::NonlinearitySpec::defaults(2);
    const auto res = pde::solve_bvp(spec, make_grid(2001, GradingSpec::uniform()));
    if (!res.found) return {false, "no root of the boundary residual: " + res.note};
    const auto& s = res.solution;
    const double flux = pde::flux_identity_residual(spec, s);
    const bool bvp_ok = s.positive && s.monotone && std::abs(s.boundary_residual) <= 1e-8 && flux <= 1e-6;
    const auto grid = make_grid(4000, GradingSpec::log_origin(40.0));
    bool level_ok = false;
    std::string levels;
    for (int j : {64, 256, 1024}) {
        const auto lv = pde::mountain_pass_level(spec, j, grid);
        level_ok = level_ok || lv.below_bound();
        levels += fmt("j=%d level %.5f; ", j, lv.level);
    }
    return {bvp_ok && level_ok,
            fmt("u(0) %.10f, u(1) %.3e, flux residual %.3e, positive %d, decreasing %d; ", s.s, s.boundary_residual,
                flux, int(s.positive), int(s.monotone)) +
                levels + fmt("bound %.3f", spec.level_bound())};
}

Outcome condition_battery() {
    const auto rep = pde::check_conditions(pde::NonlinearitySpec::defaults(2));
    auto bad = pde::NonlinearitySpec::defaults(2);
    bad.c = 10.0;
    const auto r10 = pde::check_conditions(bad);
    bool witness = false;
    for (const auto& w : r10.f3.witnesses) witness = witness || w.value < 0.0;
    const bool ok = rep.f3_to_f5() && rep.f1prime.ok && !r10.f3.ok && witness;
    return {ok, fmt("defaults F3 %d F4 %d F5 %d F1' %d; c = 10: F3 %d with %zu witnesses", int(rep.f3.ok),
                    int(rep.f4.ok), int(rep.f5.ok), int(rep.f1prime.ok), int(r10.f3.ok), r10.f3.witnesses.size())};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    int only = 0;
    app.add_option("--only", only, "run a single criterion (1-11)")->check(CLI::Range(0, 11));
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> all = {
        {1, "Moser normalization", 5, moser_normalization},
        {2, "pointwise bound", 10, pointwise_bound_check},
        {3, "sharpness slope", 30, sharpness_slope},
        {4, "criticality plateau", 30, criticality_plateau},
        {5, "strict gap MT1 over MT", 300, strict_gap_1},
        {6, "strict gap MT2 over concentration level", 300, strict_gap_2},
        {7, "gradient correctness", 60, gradient_check},
        {8, "concentrating-family asymptotics", 30, concentrating_asymptotics},
        {9, "eigenvalue oracle", 10, eigenvalue_oracle},
        {10, "PDE existence witness", 120, pde_existence},
        {11, "condition battery", 30, condition_battery},
    };
    int failures = 0;
    for (const auto& c : all) {
        if (only && c.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && dt < c.time_limit;
        if (!pass) ++failures;
        std::printf("%s criterion %d (%s): %s [%.2f s, limit %.0f s]\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    o.detail.c_str(), dt, c.time_limit);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
