#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mtlab/kernels.hpp"
#include "mtlab/radial_calculus.hpp"

namespace mtlab {

enum class FunctionalKind { MT, MT1, MT2, GeneralAdditive, GeneralExponent };

std::string to_string(FunctionalKind kind);
FunctionalKind functional_kind_from_string(const std::string& name);

using Profile = std::function<double(double)>;

// Which exponential functional to evaluate:
//   MT   : int_B exp(gamma |u|^{n/(n-1)})
//   MT1  : int_B exp((gamma + r^alpha) |u|^{n/(n-1)})
//   MT2  : int_B exp(gamma |u|^{n/(n-1) + r^alpha})
//   GeneralAdditive / GeneralExponent replace r^alpha by profile(r).
struct FunctionalSpec {
    FunctionalKind kind = FunctionalKind::MT;
    int n = 2;
    double gamma = 0.0;  // <= 0 means alpha_n
    double alpha = 1.0;
    Profile profile;
    double exponent_cap = 700.0;

    static FunctionalSpec mt(int n, double gamma_mult = 1.0);
    static FunctionalSpec mt1(int n, double alpha, double gamma_mult = 1.0);
    static FunctionalSpec mt2(int n, double alpha, double gamma_mult = 1.0);

    double effective_gamma() const;
    void validate() const;  // throws std::invalid_argument
};

struct FunctionalValue {
    double value = 0.0;
    bool divergent = false;  // some cell exponent exceeded the cap; value uses the capped exponent
    double max_exponent = 0.0;
};

// Per-cell exponent model for a spec on a given geometry.
kernels::ExponentModel exponent_model(const FunctionalSpec& spec, const kernels::CellGeometry& g);

FunctionalValue eval_functional(const RadialFunction& u, const FunctionalSpec& spec);

// max(family_best, |B|): u = 0 is always admissible.
double eval_mt_constant_lower_bound(const FunctionalSpec& spec, std::optional<double> family_best);

struct GradientResult {
    std::vector<double> grad;  // one entry per node; the boundary entry is 0
    bool divergent = false;
};

GradientResult objective_gradient(const RadialFunction& u, const FunctionalSpec& spec);

enum class NearZeroCondition { f2, f2prime };

struct ProfileParams {
    int n = 2;
    double c = 1.0;              // constant in (f2)/(f2')
    double gamma_f3 = 0.5;       // gamma in (0,1) of (f3)
    double gamma_exponent = 3.0; // gamma > 2 of (f2')
};

struct Witness {
    double r = 0.0;
    double value = 0.0;
    double bound = 0.0;
    double margin = 0.0;  // bound - value (>= 0 passes)
};

struct ConditionCheck {
    bool ok = false;
    std::vector<Witness> witnesses;
};

struct ProfileReport {
    NearZeroCondition which = NearZeroCondition::f2;
    ConditionCheck f1, f2, f2prime, f3;
    bool admissible() const;  // f1, the selected near-zero condition, and f3
};

// Samples 8 log-spaced radii 1e-2..1e-9 near 0 and 8 radii 1 - 1e-2..1 - 1e-9 near 1.
ProfileReport check_profile_conditions(const Profile& profile, NearZeroCondition which, const ProfileParams& params);

std::vector<double> near_zero_samples();
std::vector<double> near_one_samples();

}  // namespace mtlab
