#include "mtlab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mtlab {

std::string to_string(FunctionalKind kind) {
    switch (kind) {
        case FunctionalKind::MT: return "mt";
        case FunctionalKind::MT1: return "mt1";
        case FunctionalKind::MT2: return "mt2";
        case FunctionalKind::GeneralAdditive: return "general-additive";
        case FunctionalKind::GeneralExponent: return "general-exponent";
    }
    return "?";
}

FunctionalKind functional_kind_from_string(const std::string& name) {
    if (name == "mt") return FunctionalKind::MT;
    if (name == "mt1") return FunctionalKind::MT1;
    if (name == "mt2") return FunctionalKind::MT2;
    if (name == "general-additive") return FunctionalKind::GeneralAdditive;
    if (name == "general-exponent") return FunctionalKind::GeneralExponent;
    throw std::invalid_argument("unknown functional kind: " + name);
}

FunctionalSpec FunctionalSpec::mt(int n, double gamma_mult) {
    FunctionalSpec s;
    s.kind = FunctionalKind::MT;
    s.n = n;
    s.gamma = gamma_mult * constants_for(n).alpha_n;
    return s;
}

FunctionalSpec FunctionalSpec::mt1(int n, double alpha, double gamma_mult) {
    FunctionalSpec s = mt(n, gamma_mult);
    s.kind = FunctionalKind::MT1;
    s.alpha = alpha;
    return s;
}

FunctionalSpec FunctionalSpec::mt2(int n, double alpha, double gamma_mult) {
    FunctionalSpec s = mt(n, gamma_mult);
    s.kind = FunctionalKind::MT2;
    s.alpha = alpha;
    return s;
}

double FunctionalSpec::effective_gamma() const {
    return gamma > 0.0 ? gamma : constants_for(n).alpha_n;
}

void FunctionalSpec::validate() const {
    if (n < 2) throw std::invalid_argument("dimension must be at least 2");
    const bool general = kind == FunctionalKind::GeneralAdditive || kind == FunctionalKind::GeneralExponent;
    if ((kind == FunctionalKind::MT1 || kind == FunctionalKind::MT2) && !(alpha > 0.0))
        throw std::invalid_argument("alpha must be positive for mt1/mt2");
    if (general && !profile) throw std::invalid_argument("general functionals need a profile");
    if (!general && profile) throw std::invalid_argument("profile given for a non-general functional");
    if (!(exponent_cap > 0.0)) throw std::invalid_argument("exponent cap must be positive");
}

kernels::ExponentModel exponent_model(const FunctionalSpec& spec, const kernels::CellGeometry& g) {
    spec.validate();
    if (spec.n != g.n) throw std::invalid_argument("function dimension differs from spec dimension");
    const double gamma = spec.effective_gamma();
    const double base = spec.n / (spec.n - 1.0);
    kernels::ExponentModel m;
    m.cap = spec.exponent_cap;
    m.coef.assign(g.cells(), gamma);
    m.power.assign(g.cells(), base);
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const double r = g.mid[c];
        switch (spec.kind) {
            case FunctionalKind::MT: break;
            case FunctionalKind::MT1: m.coef[c] += std::pow(r, spec.alpha); break;
            case FunctionalKind::MT2: m.power[c] += std::pow(r, spec.alpha); break;
            case FunctionalKind::GeneralAdditive: m.coef[c] += spec.profile(r); break;
            case FunctionalKind::GeneralExponent: m.power[c] += spec.profile(r); break;
        }
    }
    return m;
}

FunctionalValue eval_functional(const RadialFunction& u, const FunctionalSpec& spec) {
    const auto g = kernels::cell_geometry(u.grid(), u.dim());
    const auto m = exponent_model(spec, g);
    const auto s = kernels::parallel::exp_sum(g, m, u.values());
    return {s.value, s.divergent, s.max_exponent};
}

double eval_mt_constant_lower_bound(const FunctionalSpec& spec, std::optional<double> family_best) {
    const double ball = constants_for(spec.n).ball_volume;
    return family_best ? std::max(*family_best, ball) : ball;
}

GradientResult objective_gradient(const RadialFunction& u, const FunctionalSpec& spec) {
    const auto g = kernels::cell_geometry(u.grid(), u.dim());
    const auto m = exponent_model(spec, g);
    GradientResult r;
    r.grad.resize(u.grid().count());
    kernels::parallel::exp_sum_gradient(g, m, u.values(), r.grad);
    r.divergent = kernels::parallel::exp_sum(g, m, u.values()).divergent;
    return r;
}

bool ProfileReport::admissible() const {
    const bool near_zero = which == NearZeroCondition::f2 ? f2.ok : f2prime.ok;
    return f1.ok && near_zero && f3.ok;
}

std::vector<double> near_zero_samples() {
    std::vector<double> s;
    for (int k = 2; k <= 9; ++k) s.push_back(std::pow(10.0, -k));
    return s;
}

std::vector<double> near_one_samples() {
    std::vector<double> s;
    for (int k = 2; k <= 9; ++k) s.push_back(1.0 - std::pow(10.0, -k));
    return s;
}

namespace {

double sample(const Profile& f, double r) {
    const double v = f(r);
    if (!std::isfinite(v)) throw std::domain_error("profile returned a non-finite value");
    if (v < 0.0) throw std::domain_error("profile returned a negative value");
    return v;
}

template <class Bound>
ConditionCheck check_upper(const Profile& f, const std::vector<double>& radii, Bound bound) {
    ConditionCheck cc;
    cc.ok = true;
    for (double r : radii) {
        Witness w{r, sample(f, r), bound(r), 0.0};
        w.margin = w.bound - w.value;
        cc.ok = cc.ok && w.margin >= 0.0;
        cc.witnesses.push_back(w);
    }
    return cc;
}

}  // namespace

ProfileReport check_profile_conditions(const Profile& profile, NearZeroCondition which, const ProfileParams& params) {
    if (!profile) throw std::invalid_argument("profile required");
    const auto consts = constants_for(params.n);
    const auto zero = near_zero_samples();
    const auto one = near_one_samples();
    ProfileReport rep;
    rep.which = which;

    // f1: f(0) = 0 and f > 0 away from 0. Witnesses carry value and, for r = 0, bound 0.
    {
        ConditionCheck cc;
        const double f0 = sample(profile, 0.0);
        cc.ok = f0 == 0.0;
        cc.witnesses.push_back({0.0, f0, 0.0, -f0});
        for (const auto* set : {&zero, &one})
            for (double r : *set) {
                const double v = sample(profile, r);
                cc.ok = cc.ok && v > 0.0;
                cc.witnesses.push_back({r, v, 0.0, v});
            }
        rep.f1 = std::move(cc);
    }
    rep.f2 = check_upper(profile, zero, [&](double r) { return params.c / (-std::log(r)); });
    rep.f2prime = check_upper(profile, zero,
                              [&](double r) { return params.c / std::pow(-std::log(r), params.gamma_exponent); });
    rep.f3 = check_upper(profile, one, [&](double r) {
        return params.gamma_f3 * consts.alpha_n / params.n * std::log1p(-r) / std::log(r);
    });
    if (!(params.gamma_f3 > 0.0 && params.gamma_f3 < 1.0)) rep.f3.ok = false;
    if (!(params.gamma_exponent > 2.0)) rep.f2prime.ok = false;
    return rep;
}

}  // namespace mtlab
