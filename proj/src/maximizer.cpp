#include "mtlab/maximizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "mtlab/kernels.hpp"
#include "mtlab/test_families.hpp"

namespace mtlab {

std::string StartDescriptor::label() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::zero_perturbed: os << "zero+noise"; break;
        case Kind::moser: os << "moser(j=" << param << ")"; break;
        case Kind::concentrating: os << "concentrating(eps=" << param << ")"; break;
        case Kind::previous: os << "previous-solution"; break;
    }
    return os.str();
}

std::vector<StartDescriptor> default_starts() {
    return {StartDescriptor::zero_perturbed(),   StartDescriptor::moser(8),
            StartDescriptor::moser(64),          StartDescriptor::moser(512),
            StartDescriptor::concentrating(1e-2), StartDescriptor::concentrating(1e-4),
            StartDescriptor::concentrating(1e-6)};
}

void MaximizerOptions::validate() const {
    if (!(tol_rel > 0.0)) throw std::invalid_argument("tol_rel must be positive");
    if (multistart.empty()) throw std::invalid_argument("at least one start required");
    if (max_iters < 0) throw std::invalid_argument("max_iters must be non-negative");
    if (!(step0 > 0.0)) throw std::invalid_argument("step0 must be positive");
}

namespace {

struct Problem {
    kernels::CellGeometry geom;
    kernels::ExponentModel model;
    int n = 2;
};

void project(std::vector<double>& u, const Problem& p, bool monotone) {
    if (monotone) {
        for (double& x : u) x = std::abs(x);
        std::sort(u.begin(), u.end(), std::greater<>());
    }
    u.back() = 0.0;
    const double e = kernels::parallel::energy(p.geom, u);
    if (!(e > 0.0)) throw std::domain_error("zero energy");
    const double s = std::pow(e, -1.0 / p.n);
    for (double& x : u) x *= s;
    u.back() = 0.0;
}

struct Ascent {
    std::vector<double> u;
    double initial = 0.0;
    double value = 0.0;
    int iterations = 0;
    bool diverged = false;
    std::vector<TraceEntry> trace;
};

Ascent ascend(const Problem& p, std::vector<double> u, const MaximizerOptions& opts, int max_iters) {
    Ascent a;
    project(u, p, opts.monotone_projection);
    auto eval = [&](const std::vector<double>& x) { return kernels::parallel::exp_sum(p.geom, p.model, x); };
    auto cur = eval(u);
    a.initial = cur.value;
    a.trace.push_back({0, cur.value, 0.0, kernels::parallel::energy(p.geom, u)});
    if (cur.divergent || cur.value > opts.ceiling) {
        a.diverged = true;
        a.value = cur.value;
        a.u = std::move(u);
        return a;
    }
    std::vector<double> grad(u.size()), cand(u.size());
    double tau = opts.step0;
    int quiet = 0;
    for (int it = 1; it <= max_iters; ++it) {
        kernels::parallel::exp_sum_gradient(p.geom, p.model, u, grad);
        auto dir = kernels::metric_solve(p.geom, grad);
        const double nd = kernels::metric_norm(p.geom, dir);
        if (!(nd > 0.0)) break;
        const double scale = kernels::metric_norm(p.geom, u) / nd;
        bool accepted = false;
        kernels::ExpSum next;
        while (tau > 1e-12) {
            for (std::size_t k = 0; k < u.size(); ++k) cand[k] = u[k] + tau * scale * dir[k];
            project(cand, p, opts.monotone_projection);
            next = eval(cand);
            if (next.divergent || next.value > opts.ceiling) {
                a.diverged = true;
                accepted = true;
                break;
            }
            if (next.value > cur.value) {
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        if (!accepted) break;
        const double rel = (next.value - cur.value) / std::abs(cur.value);
        u.swap(cand);
        cur = next;
        a.iterations = it;
        a.trace.push_back({it, cur.value, tau, kernels::parallel::energy(p.geom, u)});
        if (a.diverged) break;
        tau = std::min(2.0 * tau, 1.0);
        quiet = rel < opts.tol_rel ? quiet + 1 : 0;
        if (quiet >= opts.patience) break;
    }
    a.value = cur.value;
    a.u = std::move(u);
    return a;
}

Problem make_problem(const FunctionalSpec& spec, const RadialGrid& grid) {
    Problem p;
    p.n = spec.n;
    p.geom = kernels::cell_geometry(grid, spec.n);
    p.model = exponent_model(spec, p.geom);
    return p;
}

}  // namespace

RadialFunction build_start(const StartDescriptor& start, const RadialGrid& grid, int n, std::uint64_t seed) {
    std::function<double(double)> f;
    switch (start.kind) {
        case StartDescriptor::Kind::zero_perturbed: {
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> normal(0.0, 1.0);
            std::vector<double> a(6);
            for (auto& x : a) x = normal(rng);
            f = [a](double r) {
                double s = 0.0;
                for (std::size_t m = 1; m <= a.size(); ++m)
                    s += a[m - 1] * std::sin(m * std::numbers::pi * (1.0 - r) / 2.0) / m;
                return s;
            };
            break;
        }
        case StartDescriptor::Kind::moser: {
            const MoserParams mp{start.param, n};
            if (!(mp.j > 1.0) || grid.nodes_below(1.0 / mp.j) < 8)
                throw std::invalid_argument("grid does not resolve the Moser start");
            f = [mp](double r) { return moser_value(mp, r); };
            break;
        }
        case StartDescriptor::Kind::concentrating: {
            const double eps = start.param;
            if (!(eps > 0.0) || -std::log(eps) * eps >= 0.5 || grid.nodes_below(-std::log(eps) * eps) < 8)
                throw std::invalid_argument("grid does not resolve the concentrating start");
            f = [eps, n](double r) { return concentrating_shape(eps, n, r); };
            break;
        }
        case StartDescriptor::Kind::previous: {
            if (!start.previous) throw std::invalid_argument("previous-solution start without a function");
            const RadialFunction prev = *start.previous;
            f = [prev](double r) { return prev.at(r); };
            break;
        }
    }
    return normalize(sample_profile(f, grid, n));
}

MaximizerReport maximize(const FunctionalSpec& spec, const RadialGrid& grid, const MaximizerOptions& opts) {
    spec.validate();
    opts.validate();
    const Problem p = make_problem(spec, grid);
    const auto consts = constants_for(spec.n);
    const std::size_t ns = opts.multistart.size();
    std::vector<StartOutcome> outcomes(ns);
    std::vector<Ascent> runs(ns);

#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < ns; ++i) {
        const auto& s = opts.multistart[i];
        outcomes[i].provenance = s.label();
        try {
            const auto u0 = build_start(s, grid, spec.n, opts.seed + i);
            runs[i] = ascend(p, std::vector<double>(u0.values().begin(), u0.values().end()), opts, opts.max_iters);
            outcomes[i].initial_value = runs[i].initial;
            outcomes[i].final_value = runs[i].value;
            outcomes[i].iterations = runs[i].iterations;
            outcomes[i].diverged = runs[i].diverged;
        } catch (const std::exception& e) {
            outcomes[i].skipped = true;
            outcomes[i].note = e.what();
        }
    }

    MaximizerReport rep;
    rep.starts = outcomes;
    rep.compared_thresholds.J = consts.J;
    rep.compared_thresholds.ball_volume = consts.ball_volume;

    // highest value wins; ties go to the run with fewer iterations
    auto better = [&](std::size_t a, std::size_t b) {
        const double va = runs[a].value, vb = runs[b].value;
        if (std::abs(va - vb) > 1e-12 * std::max(std::abs(va), std::abs(vb))) return va > vb;
        return runs[a].iterations < runs[b].iterations;
    };
    std::optional<std::size_t> best, best_any;
    for (std::size_t i = 0; i < ns; ++i) {
        if (outcomes[i].skipped) continue;
        if (!best_any || better(i, *best_any)) best_any = i;
        if (!outcomes[i].diverged && (!best || better(i, *best))) best = i;
    }
    if (!best_any) throw std::runtime_error("no multistart could be built on this grid");
    rep.diverged = !best;
    const std::size_t w = best ? *best : *best_any;
    rep.best_value = runs[w].value;
    rep.argmax = RadialFunction(grid, runs[w].u, spec.n);
    rep.trace = runs[w].trace;
    rep.start_provenance = outcomes[w].provenance;
    rep.iterations = runs[w].iterations;
    rep.trivial_plateau = !rep.diverged && rep.best_value < consts.ball_volume + 1e-6;
    return rep;
}

namespace {

std::string classify(double gap, double tol) {
    if (gap > tol) return "positive";
    if (gap < -tol) return "negative";
    return "indistinguishable at resolution";
}

}  // namespace

GapReport certified_gap_report(const FunctionalSpec& first, const FunctionalSpec& second, const RadialGrid& grid,
                               const MaximizerOptions& opts, double resolution) {
    if (first.n != second.n) throw std::invalid_argument("gap report needs specs of the same dimension");
    GapReport g;
    g.first = maximize(first, grid, opts);
    g.second = maximize(second, grid, opts);
    if (second.kind == FunctionalKind::MT) g.first.compared_thresholds.mt_numeric = g.second.best_value;
    if (first.kind == FunctionalKind::MT) g.second.compared_thresholds.mt_numeric = g.first.best_value;
    g.gap = g.first.best_value - g.second.best_value;
    g.tolerance = opts.tol_rel * (std::abs(g.first.best_value) + std::abs(g.second.best_value)) + resolution;
    g.status = classify(g.gap, g.tolerance);
    return g;
}

BaselineGap gap_against_baseline(const FunctionalSpec& spec, double baseline, const RadialGrid& grid,
                                 const MaximizerOptions& opts, double resolution) {
    BaselineGap b;
    b.report = maximize(spec, grid, opts);
    b.baseline = baseline;
    b.gap = b.report.best_value - baseline;
    b.tolerance = opts.tol_rel * std::abs(b.report.best_value) + resolution;
    b.status = classify(b.gap, b.tolerance);
    return b;
}

DivergenceReport divergence_probe(const FunctionalSpec& spec, const RadialGrid& grid, const MaximizerOptions& opts,
                                  std::vector<double> j_list) {
    spec.validate();
    const auto consts = constants_for(spec.n);
    if (j_list.empty())
        for (int e = 4; e <= 48; e += 4) j_list.push_back(std::ldexp(1.0, e));
    const Problem p = make_problem(spec, grid);
    DivergenceReport rep;
    rep.predicted_slope = spec.n * (spec.effective_gamma() / consts.alpha_n - 1.0);
    std::vector<double> js, vals;
    for (double j : j_list) {
        if (grid.nodes_below(1.0 / j) < 8) continue;
        ProbeRow row;
        row.j = j;
        const auto u0 = normalize(sample_profile([&](double r) { return moser_value({j, spec.n}, r); }, grid, spec.n));
        const auto v0 = kernels::parallel::exp_sum(p.geom, p.model, u0.values());
        row.start_value = v0.value;
        row.divergent = v0.divergent || v0.value > opts.ceiling;
        if (!row.divergent) {
            const auto a = ascend(p, std::vector<double>(u0.values().begin(), u0.values().end()), opts,
                                  std::min(opts.max_iters, 50));
            row.ascended_value = a.value;
            row.divergent = a.diverged;
        } else {
            row.ascended_value = row.start_value;
        }
        if (!v0.divergent) {
            js.push_back(j);
            vals.push_back(v0.value);
        }
        if (row.divergent && !rep.diverged) {
            rep.diverged = true;
            rep.first_divergent_j = j;
        }
        rep.rows.push_back(row);
    }
    if (js.size() >= 2) rep.growth_slope = loglog_slope(js, vals);
    return rep;
}

}  // namespace mtlab
