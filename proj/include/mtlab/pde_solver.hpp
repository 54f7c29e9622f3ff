#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mtlab/radial_calculus.hpp"

namespace mtlab::pde {

// f(r, t) = t^{1/(n-1) + r^alpha} ( exp(X) - sum_{i<=n-3} X^i/i! - c X^{n-2}/(n-2)! ),
// X = alpha0 t^{n/(n-1) + r^alpha}.
struct NonlinearitySpec {
    int n = 2;
    double alpha = 1.0;
    double alpha0 = 0.0;  // <= 0 means alpha_n
    double c = 1.0;
    double M = 1.0;       // constants of the superlinearity check
    double R = 1.0;
    double exponent_cap = 700.0;
    bool zero = false;    // f == 0, for testing the integrator

    static NonlinearitySpec defaults(int n = 2);
    double effective_alpha0() const;
    // n^n / (alpha0^{n-1} e^{H_{n-1}})
    double beta0_floor() const;
    // (1/n) (alpha_n/alpha0)^{n-1}
    double level_bound() const;
    void validate() const;
};

struct NonlinearValue {
    double value = 0.0;
    bool overflow = false;  // exponent above the cap; value is +inf
};

NonlinearValue eval_nonlinearity(const NonlinearitySpec& spec, double r, double t);
// log f(r, t) for t > 0 where f > 0; usable far beyond the overflow cap.
double log_nonlinearity(const NonlinearitySpec& spec, double r, double t);

// F(r, t) = int_0^t f(r, s) ds, summed termwise from the Taylor tail of exp (all terms positive).
// +inf above the overflow cap.
double primitive(const NonlinearitySpec& spec, double r, double t);

struct ConditionWitness {
    double r = 0.0;
    double t = 0.0;
    double value = 0.0;
    double bound = 0.0;
};

struct ConditionEntry {
    bool ok = false;
    std::string note;
    std::vector<ConditionWitness> witnesses;  // failures, or the sampled extremes when passing
};

struct ConditionReport {
    ConditionEntry f1, f2, f3, f4, f5, f1prime;
    double lambda1 = 0.0;
    double beta0_floor = 0.0;
    bool f3_to_f5() const { return f3.ok && f4.ok && f5.ok; }
};

ConditionReport check_conditions(const NonlinearitySpec& spec);

struct Eigenpair {
    double lambda = 0.0;
    std::optional<RadialFunction> eigenfunction;  // u(0) = 1 on a uniform grid
};

// First Dirichlet eigenvalue of the radial n-Laplacian on the unit ball.
Eigenpair lambda1(int n, std::size_t profile_nodes = 201);

// Shooting with eigenvalue lambda: true when the solution with u(0) = 1 vanishes in (0, 1].
bool eigen_crosses(int n, double lambda);

struct ShootingResult {
    double s = 0.0;
    std::optional<RadialGrid> grid;
    std::vector<double> u, du, flux;  // at nodes
    std::vector<double> mid_u;        // at arithmetic cell midpoints
    double boundary_residual = 0.0;   // u(1)
    bool monotone = false;
    bool positive = false;
    bool blew_up = false;

    // Nodal profile with the boundary value set to 0.
    RadialFunction profile(int n) const;
};

ShootingResult shoot(const NonlinearitySpec& spec, double s, const RadialGrid& grid);

struct BvpResult {
    ShootingResult solution;
    bool found = false;
    std::string note;
    std::pair<double, double> bracket{0.0, 0.0};
};

// Root of u(1) in s. Without a bracket, scans (0, s_max] geometrically with 64 samples.
BvpResult solve_bvp(const NonlinearitySpec& spec, const RadialGrid& grid,
                    std::optional<std::pair<double, double>> bracket = std::nullopt, double s_max = 10.0);

// max over nodes of |flux(r) + int_0^r f(s, u_+) s^{n-1} ds|, the integral by composite Simpson.
double flux_identity_residual(const NonlinearitySpec& spec, const ShootingResult& shot);

// (1/n) int |grad u|^n - int F(x, u_+); -inf when F overflows.
double energy_I(const RadialFunction& u, const NonlinearitySpec& spec);

struct LevelResult {
    int j = 0;
    double t_star = 0.0;
    double level = 0.0;
    double bound = 0.0;
    bool interior = false;  // an interior maximum was bracketed
    bool below_bound() const { return interior && level < bound; }
};

// max over t >= 0 of I(t M_j) by bracketing scan plus golden section.
LevelResult mountain_pass_level(const NonlinearitySpec& spec, int j, const RadialGrid& grid);

}  // namespace mtlab::pde
