#include "mtlab/pde_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "mtlab/kernels.hpp"
#include "mtlab/test_families.hpp"

namespace mtlab::pde {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;  // (u, flux)

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double ode_tol = 1e-11;

double factorial(int m) {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
}

// exp(X) - sum_{i<=n-3} X^i/i! - c X^{n-2}/(n-2)!
double taylor_tail(double X, int n, double c) {
    const int m = n - 2;
    double rest;  // exp(X) - sum_{i<=m} X^i/i!
    if (X < 1.0) {
        double term = std::pow(X, m + 1) / factorial(m + 1);
        rest = 0.0;
        for (int i = m + 1; i < m + 60 && term > 1e-18 * rest; ++i) {
            rest += term;
            term *= X / (i + 1);
        }
    } else if (m == 0) {
        rest = std::expm1(X);
    } else {
        double poly = 0.0, term = 1.0;
        for (int i = 0; i <= m; ++i) {
            poly += term;
            term *= X / (i + 1);
        }
        rest = std::exp(X) - poly;
    }
    return rest + (1.0 - c) * std::pow(X, m) / factorial(m);
}

struct Exponents {
    double prefactor;  // 1/(n-1) + r^alpha
    double growth;     // n/(n-1) + r^alpha
};

Exponents exponents(const NonlinearitySpec& s, double r) {
    const double ra = std::pow(r, s.alpha);
    return {1.0 / (s.n - 1.0) + ra, s.n / (s.n - 1.0) + ra};
}

// largest t with alpha0 t^growth <= cap
double overflow_t(const NonlinearitySpec& s, double r) {
    return std::pow(s.exponent_cap / s.effective_alpha0(), 1.0 / exponents(s, r).growth);
}

// top of the sampling range, kept clear of the cap by rounding
double sample_top(const NonlinearitySpec& s, double r) { return overflow_t(s, r) * (1.0 - 1e-9); }

// u' from the flux w = r^{n-1} |u'|^{n-2} u'
double slope_from_flux(double w, double r, int n) {
    if (w == 0.0) return 0.0;
    const double m = std::pow(std::abs(w) / std::pow(r, n - 1.0), 1.0 / (n - 1.0));
    return w > 0.0 ? m : -m;
}

struct BlowUp {};

}  // namespace

NonlinearitySpec NonlinearitySpec::defaults(int n) {
    NonlinearitySpec s;
    s.n = n;
    return s;
}

double NonlinearitySpec::effective_alpha0() const { return alpha0 > 0.0 ? alpha0 : constants_for(n).alpha_n; }

double NonlinearitySpec::beta0_floor() const {
    const auto k = constants_for(n);
    return std::pow(n, n) / (std::pow(effective_alpha0(), n - 1.0) * std::exp(k.harmonic_partial));
}

double NonlinearitySpec::level_bound() const {
    return std::pow(constants_for(n).alpha_n / effective_alpha0(), n - 1.0) / n;
}

void NonlinearitySpec::validate() const {
    if (n < 2) throw std::invalid_argument("dimension must be at least 2");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (!(alpha0 >= 0.0) || !std::isfinite(alpha0)) throw std::invalid_argument("alpha0 must be positive");
    if (!std::isfinite(c)) throw std::invalid_argument("c must be finite");
    if (!(M > 0.0) || !(R > 0.0)) throw std::invalid_argument("M and R must be positive");
    if (!(exponent_cap > 0.0)) throw std::invalid_argument("exponent cap must be positive");
}

NonlinearValue eval_nonlinearity(const NonlinearitySpec& spec, double r, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("nonlinearity needs t >= 0");
    if (spec.zero || t == 0.0) return {0.0, false};
    const auto e = exponents(spec, r);
    const double X = spec.effective_alpha0() * std::pow(t, e.growth);
    if (X > spec.exponent_cap) return {inf, true};
    return {std::pow(t, e.prefactor) * taylor_tail(X, spec.n, spec.c), false};
}

double log_nonlinearity(const NonlinearitySpec& spec, double r, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("log nonlinearity needs t > 0");
    const auto e = exponents(spec, r);
    const double X = spec.effective_alpha0() * std::pow(t, e.growth);
    double log_tail;
    if (X <= spec.exponent_cap) {
        log_tail = std::log(taylor_tail(X, spec.n, spec.c));
    } else {
        const int m = spec.n - 2;
        double poly = 0.0, term = 1.0;
        for (int i = 0; i <= m; ++i) {
            poly += term;
            term *= X / (i + 1);
        }
        const double lower = -poly + (1.0 - spec.c) * std::pow(X, m) / factorial(m);
        log_tail = X + std::log1p(lower * std::exp(-X));
    }
    return e.prefactor * std::log(t) + log_tail;
}

double primitive(const NonlinearitySpec& spec, double r, double t) {
    if (!(t > 0.0) || spec.zero) return 0.0;
    const auto e = exponents(spec, r);
    const double X = spec.effective_alpha0() * std::pow(t, e.growth);
    if (X > spec.exponent_cap) return inf;
    // int_0^t s^q (alpha0 s^p)^i ds = t^{q+1} X^i / (q + p i + 1), summed over the Taylor tail
    const int m = spec.n - 2;
    const double base = std::pow(t, e.prefactor + 1.0);
    auto denom = [&](int i) { return e.prefactor + e.growth * i + 1.0; };
    double coef = std::pow(X, m + 1) / factorial(m + 1);
    double sum = 0.0;
    for (int i = m + 1; i < 100000; ++i) {
        const double term = coef / denom(i);
        sum += term;
        if (i > X && term < 1e-17 * sum) break;
        coef *= X / (i + 1);
    }
    sum += (1.0 - spec.c) * std::pow(X, m) / factorial(m) / denom(m);
    return base * sum;
}

// ---------------------------------------------------------------- eigenvalue

namespace {

struct EigenSystem {
    int n;
    double lambda;
    void operator()(const State& x, State& dx, double r) const {
        dx[0] = slope_from_flux(x[1], r, n);
        dx[1] = -lambda * std::pow(r, n - 1.0) * std::pow(std::abs(x[0]), n - 2.0) * x[0];
    }
};

constexpr double eigen_r0 = 1e-6;

State eigen_start(int n, double lambda, double r) {
    return {1.0 - (n - 1.0) / n * std::pow(lambda / n, 1.0 / (n - 1.0)) * std::pow(r, n / (n - 1.0)),
            -lambda * std::pow(r, n) / n};
}

struct Crossed {};

}  // namespace

bool eigen_crosses(int n, double lambda) {
    EigenSystem sys{n, lambda};
    State x = eigen_start(n, lambda, eigen_r0);
    auto stepper = odeint::make_controlled(1e-12, 1e-12, odeint::runge_kutta_dopri5<State>());
    try {
        odeint::integrate_adaptive(stepper, sys, x, eigen_r0, 1.0, 1e-4, [](const State& s, double) {
            if (s[0] <= 0.0) throw Crossed{};
        });
    } catch (const Crossed&) {
        return true;
    }
    return x[0] <= 0.0;
}

Eigenpair lambda1(int n, std::size_t profile_nodes) {
    if (n < 2) throw std::invalid_argument("dimension must be at least 2");
    double lo = 0.0, hi = 1.0;
    while (!eigen_crosses(n, hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6) throw std::runtime_error("eigenvalue bracket failure");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (eigen_crosses(n, mid) ? hi : lo) = mid;
    }
    Eigenpair ep;
    ep.lambda = 0.5 * (lo + hi);

    const RadialGrid grid = make_grid(profile_nodes, GradingSpec::uniform());
    std::vector<double> v(grid.count(), 1.0);
    std::vector<double> times{eigen_r0};
    for (std::size_t k = 1; k < grid.count(); ++k) times.push_back(grid.node(k));
    State x = eigen_start(n, lo, eigen_r0);
    std::size_t idx = 0;
    odeint::integrate_times(odeint::make_dense_output(1e-12, 1e-12, odeint::runge_kutta_dopri5<State>()),
                            EigenSystem{n, lo}, x, times.begin(), times.end(), 1e-4,
                            [&](const State& s, double) {
                                if (idx > 0) v[idx] = s[0];
                                ++idx;
                            });
    v.back() = 0.0;
    ep.eigenfunction = RadialFunction(grid, std::move(v), n);
    return ep;
}

// ---------------------------------------------------------------- shooting

namespace {

struct ShootSystem {
    const NonlinearitySpec& spec;
    void operator()(const State& x, State& dx, double r) const {
        const auto f = eval_nonlinearity(spec, r, std::max(0.0, x[0]));
        if (f.overflow) throw BlowUp{};
        dx[0] = slope_from_flux(x[1], r, spec.n);
        dx[1] = -std::pow(r, spec.n - 1.0) * f.value;
    }
};

}  // namespace

RadialFunction ShootingResult::profile(int n) const {
    if (!grid || blew_up) throw std::logic_error("no profile for a failed shot");
    std::vector<double> v = u;
    v.back() = 0.0;
    return RadialFunction(*grid, std::move(v), n);
}

ShootingResult shoot(const NonlinearitySpec& spec, double s, const RadialGrid& grid) {
    spec.validate();
    if (!(s > 0.0)) throw std::invalid_argument("shooting needs u(0) > 0");
    const int n = spec.n;
    const std::size_t N = grid.count();
    ShootingResult res;
    res.s = s;
    res.grid = grid;
    res.u.assign(N, s);
    res.du.assign(N, 0.0);
    res.flux.assign(N, 0.0);
    res.mid_u.assign(N - 1, s);

    const auto f0 = eval_nonlinearity(spec, 0.0, s);
    if (f0.overflow) {
        res.blew_up = true;
        res.boundary_residual = std::numeric_limits<double>::quiet_NaN();
        return res;
    }
    // leading balance near the origin: w = -f0 r^n / n
    const double r0 = std::min(1e-5, 0.5 * grid.node(N - 1));
    const double k = (n - 1.0) / n * std::pow(f0.value / n, 1.0 / (n - 1.0));
    auto taylor = [&](double r) -> State { return {s - k * std::pow(r, n / (n - 1.0)), -f0.value * std::pow(r, n) / n}; };

    // output slots: even = node, odd = cell midpoint
    std::vector<double> times;
    std::vector<std::size_t> slots;
    times.push_back(r0);
    slots.push_back(std::size_t(-1));
    auto put = [&](std::size_t slot, double r, const State& x) {
        if (slot % 2 == 0) {
            const std::size_t i = slot / 2;
            res.u[i] = x[0];
            res.flux[i] = x[1];
            res.du[i] = i == 0 ? 0.0 : slope_from_flux(x[1], r, n);
        } else {
            res.mid_u[slot / 2] = x[0];
        }
    };
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t half = 0; half < 2; ++half) {
            if (i + 1 == N && half == 1) break;
            const double r = half == 0 ? grid.node(i) : 0.5 * (grid.node(i) + grid.node(i + 1));
            const std::size_t slot = 2 * i + half;
            if (r <= r0) {
                put(slot, r, taylor(r));
            } else {
                times.push_back(r);
                slots.push_back(slot);
            }
        }
    }
    State x = taylor(r0);
    std::size_t idx = 0;
    try {
        odeint::integrate_times(odeint::make_dense_output(ode_tol, ode_tol, odeint::runge_kutta_dopri5<State>()),
                                ShootSystem{spec}, x, times.begin(), times.end(), 1e-6,
                                [&](const State& st, double r) {
                                    if (idx > 0) put(slots[idx], r, st);
                                    ++idx;
                                });
    } catch (const BlowUp&) {
        res.blew_up = true;
        res.boundary_residual = std::numeric_limits<double>::quiet_NaN();
        return res;
    }
    res.boundary_residual = res.u.back();
    res.monotone = true;
    res.positive = true;
    for (std::size_t i = 0; i + 1 < N; ++i) {
        if (res.u[i + 1] > res.u[i] || res.du[i] > 0.0) res.monotone = false;
        if (!(res.u[i] > 0.0)) res.positive = false;
    }
    return res;
}

BvpResult solve_bvp(const NonlinearitySpec& spec, const RadialGrid& grid,
                    std::optional<std::pair<double, double>> bracket, double s_max) {
    spec.validate();
    BvpResult out;
    auto residual = [&](double s) { return shoot(spec, s, grid).boundary_residual; };
    if (bracket) {
        const double a = residual(bracket->first), b = residual(bracket->second);
        if (!(a * b < 0.0)) {
            out.note = "given bracket does not straddle a root";
            return out;
        }
    } else {
        if (!(s_max > 0.0)) throw std::invalid_argument("s_max must be positive");
        constexpr int samples = 64;
        std::vector<double> s(samples), r(samples);
        for (int k = 0; k < samples; ++k) s[k] = s_max * std::pow(1e-3, (samples - 1.0 - k) / (samples - 1.0));
#pragma omp parallel for schedule(dynamic)
        for (int k = 0; k < samples; ++k) r[k] = residual(s[k]);
        for (int k = 0; k + 1 < samples && !bracket; ++k)
            if (std::isfinite(r[k]) && std::isfinite(r[k + 1]) && r[k] > 0.0 && r[k + 1] < 0.0)
                bracket = std::make_pair(s[k], s[k + 1]);
        if (!bracket) {
            out.note = "no bracket found in scan range";
            return out;
        }
    }
    out.bracket = *bracket;
    std::uintmax_t iters = 200;
    const auto root = boost::math::tools::toms748_solve(residual, bracket->first, bracket->second,
                                                        boost::math::tools::eps_tolerance<double>(50), iters);
    auto a = shoot(spec, root.first, grid);
    auto b = shoot(spec, root.second, grid);
    out.solution = std::abs(a.boundary_residual) <= std::abs(b.boundary_residual) ? std::move(a) : std::move(b);
    out.found = std::abs(out.solution.boundary_residual) <= 1e-8;
    if (!out.found) out.note = "root finder stopped above the residual tolerance";
    return out;
}

double flux_identity_residual(const NonlinearitySpec& spec, const ShootingResult& shot) {
    if (!shot.grid || shot.blew_up) throw std::invalid_argument("flux identity needs a completed shot");
    const auto& grid = *shot.grid;
    const int n = spec.n;
    auto g = [&](double r, double u) {
        if (r == 0.0) return 0.0;
        return std::pow(r, n - 1.0) * eval_nonlinearity(spec, r, std::max(0.0, u)).value;
    };
    double acc = 0.0, worst = std::abs(shot.flux[0]);
    for (std::size_t i = 0; i + 1 < grid.count(); ++i) {
        const double a = grid.node(i), b = grid.node(i + 1);
        acc += (b - a) / 6.0 * (g(a, shot.u[i]) + 4.0 * g(0.5 * (a + b), shot.mid_u[i]) + g(b, shot.u[i + 1]));
        worst = std::max(worst, std::abs(shot.flux[i + 1] + acc));
    }
    return worst;
}

// ---------------------------------------------------------------- energy

namespace {

double energy_I_scaled(const kernels::CellGeometry& g, const NonlinearitySpec& spec, double base_energy,
                       std::span<const double> u, double t) {
    std::vector<double> v(u.begin(), u.end());
    for (double& x : v) x *= t;
    const double P =
        kernels::parallel::primitive_sum(g, v, [&](std::size_t c, double s) { return primitive(spec, g.mid[c], s); });
    if (!std::isfinite(P)) return -inf;
    return std::pow(std::abs(t), g.n) * base_energy / g.n - P;
}

}  // namespace

double energy_I(const RadialFunction& u, const NonlinearitySpec& spec) {
    spec.validate();
    if (u.dim() != spec.n) throw std::invalid_argument("function dimension differs from nonlinearity dimension");
    const auto g = kernels::cell_geometry(u.grid(), u.dim());
    return energy_I_scaled(g, spec, kernels::parallel::energy(g, u.values()), u.values(), 1.0);
}

LevelResult mountain_pass_level(const NonlinearitySpec& spec, int j, const RadialGrid& grid) {
    spec.validate();
    const auto Mj = mountain_pass_function(j, spec.n, grid).first;
    const auto g = kernels::cell_geometry(Mj.grid(), spec.n);
    const double E = kernels::parallel::energy(g, Mj.values());
    auto I = [&](double t) { return energy_I_scaled(g, spec, E, Mj.values(), t); };

    LevelResult out;
    out.j = j;
    out.bound = spec.level_bound();
    std::vector<double> ts{0.0}, vals{0.0};
    for (double t = 0.01; t < 1e3; t *= 1.1) {
        ts.push_back(t);
        vals.push_back(I(t));
        if (vals.back() < 0.0 && vals.back() < vals[vals.size() - 2]) break;
    }
    const auto best = std::max_element(vals.begin(), vals.end()) - vals.begin();
    out.t_star = ts[best];
    out.level = vals[best];
    if (best == 0 || best + 1 == static_cast<long>(vals.size())) return out;
    out.interior = true;
    // golden section on the bracketing neighbours
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = ts[best - 1], b = ts[best + 1];
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = I(x1), f2 = I(x2);
    while (b - a > 1e-10 * b) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = I(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = I(x1);
        }
    }
    const double tm = 0.5 * (a + b);
    const double fm = I(tm);
    if (fm > out.level) {
        out.t_star = tm;
        out.level = fm;
    }
    return out;
}

// ---------------------------------------------------------------- conditions

namespace {

const std::vector<double>& sample_radii() {
    static const std::vector<double> r{0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0};
    return r;
}

std::vector<double> geometric(double a, double b, int count) {
    std::vector<double> v;
    if (!(b > a)) return v;
    for (int k = 0; k < count; ++k) v.push_back(a * std::pow(b / a, k / (count - 1.0)));
    return v;
}

}  // namespace

ConditionReport check_conditions(const NonlinearitySpec& spec) {
    spec.validate();
    ConditionReport rep;
    const int n = spec.n;
    rep.lambda1 = lambda1(n).lambda;
    rep.beta0_floor = spec.beta0_floor();

    rep.f1.ok = true;
    rep.f1.note = "radial by construction";

    // F2: 0 < F <= M f on [R, 50]
    {
        auto& e = rep.f2;
        e.ok = true;
        bool suppressed = false;
        for (double r : sample_radii()) {
            const double top = std::min(50.0, sample_top(spec, r));
            if (top < 50.0) suppressed = true;
            for (double t : geometric(spec.R, top, 24)) {
                const double F = primitive(spec, r, t);
                const double f = eval_nonlinearity(spec, r, t).value;
                if (!(F > 0.0 && F <= spec.M * f)) {
                    e.ok = false;
                    e.witnesses.push_back({r, t, F, spec.M * f});
                }
            }
        }
        if (!e.ok) e.note = "no witness found in range for the given M and R";
        else if (suppressed) e.note = "samples above the overflow cap suppressed";
    }
    // F3: f(r, 0) = 0 and f >= 0
    {
        auto& e = rep.f3;
        e.ok = true;
        for (double r : sample_radii()) {
            const double f0 = eval_nonlinearity(spec, r, 0.0).value;
            if (f0 != 0.0) {
                e.ok = false;
                e.witnesses.push_back({r, 0.0, f0, 0.0});
            }
            for (double t : geometric(1e-8, sample_top(spec, r), 48)) {
                const double f = eval_nonlinearity(spec, r, t).value;
                if (f < 0.0) {
                    e.ok = false;
                    e.witnesses.push_back({r, t, f, 0.0});
                }
            }
        }
        if (!e.ok) e.note = "negative value found";
    }
    // F4: n F / t^n < lambda_1 as t -> 0
    {
        auto& e = rep.f4;
        e.ok = true;
        ConditionWitness worst{0.0, 0.0, -inf, rep.lambda1};
        for (double r : sample_radii())
            for (double t : {1e-2, 1e-3, 1e-4}) {
                const double q = n * primitive(spec, r, t) / std::pow(t, n);
                if (q > worst.value) worst = {r, t, q, rep.lambda1};
                if (!(q < rep.lambda1)) {
                    e.ok = false;
                    e.witnesses.push_back({r, t, q, rep.lambda1});
                }
            }
        if (e.ok) e.witnesses.push_back(worst);
    }
    // F5: t f / exp(alpha0 t^{n/(n-1)}) above the floor at large t, compared in log scale
    {
        auto& e = rep.f5;
        e.ok = true;
        e.note = "values are logarithms";
        const double a0 = spec.effective_alpha0();
        const double floor_log = std::log(rep.beta0_floor);
        for (double r : sample_radii()) {
            double prev = -inf;
            for (double t : {10.0, 20.0, 50.0}) {
                const double L = std::log(t) + log_nonlinearity(spec, r, t) - a0 * std::pow(t, n / (n - 1.0));
                if (!(L > floor_log) || L < prev) {
                    e.ok = false;
                    e.witnesses.push_back({r, t, L, floor_log});
                }
                prev = L;
            }
            if (e.ok) e.witnesses.push_back({r, 50.0, prev, floor_log});
        }
    }
    // F'1: theta F <= t f for t >= max(R, theta M), theta = n + 1
    {
        auto& e = rep.f1prime;
        e.ok = true;
        const double theta = n + 1.0;
        const double R0 = std::max(spec.R, theta * spec.M);
        int sampled = 0;
        for (double r : sample_radii())
            for (double t : geometric(R0, sample_top(spec, r), 16)) {
                ++sampled;
                const double lhs = theta * primitive(spec, r, t);
                const double rhs = t * eval_nonlinearity(spec, r, t).value;
                if (!(lhs <= rhs)) {
                    e.ok = false;
                    e.witnesses.push_back({r, t, lhs, rhs});
                }
            }
        if (sampled == 0) e.note = "no samples below the overflow cap";
    }
    return rep;
}

}  // namespace mtlab::pde
