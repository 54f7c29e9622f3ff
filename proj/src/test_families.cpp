#include "mtlab/test_families.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mtlab {

double moser_value(const MoserParams& p, double r) {
    const auto k = constants_for(p.n);
    const double L = std::log(p.j);
    const double scale = std::pow(k.omega, -1.0 / p.n);
    if (r <= 1.0 / p.j) return scale * std::pow(L, (p.n - 1.0) / p.n);
    if (r >= 1.0) return 0.0;
    return -scale * std::log(r) / std::pow(L, 1.0 / p.n);
}

RadialFunction moser_function(const MoserParams& p, const RadialGrid& grid) {
    if (!(p.j > 1.0)) throw std::invalid_argument("Moser parameter j must exceed 1");
    const RadialGrid g = grid.with_node(1.0 / p.j);
    if (g.nodes_below(1.0 / p.j) < 8) throw std::invalid_argument("grid does not resolve r = 1/j");
    return sample_profile([&](double r) { return moser_value(p, r); }, g, p.n);
}

RadialFunction sample_profile(const std::function<double(double)>& f, const RadialGrid& grid, int n) {
    std::vector<double> v(grid.count());
    for (std::size_t k = 0; k + 1 < grid.count(); ++k) v[k] = f(grid.node(k));
    v.back() = 0.0;
    return RadialFunction(grid, std::move(v), n);
}

namespace {

double kappa_for(int n) {
    const auto k = constants_for(n);
    return std::pow(k.omega / n, 1.0 / (n - 1.0));
}

}  // namespace

double concentrating_shape(double eps, int n, double r) {
    const auto k = constants_for(n);
    const double R = -std::log(eps);
    const double kappa = kappa_for(n);
    const double q = n / (n - 1.0);
    if (r >= R * eps) return r >= 1.0 ? 0.0 : -(n / k.alpha_n) * std::log(r);
    const double Y = kappa * std::pow(R, q);
    const double B = -(n / k.alpha_n) * std::log(R * eps) + ((n - 1.0) / k.alpha_n) * std::log1p(Y);
    return -((n - 1.0) / k.alpha_n) * std::log1p(kappa * std::pow(r / eps, q)) + B;
}

double concentrating_value(const ConcentratingParams& p, double r) {
    return std::pow(p.c, -1.0 / (p.n - 1.0)) * concentrating_shape(p.eps, p.n, r);
}

double concentrating_c_power_exact(double eps, int n) {
    const auto k = constants_for(n);
    const double R = -std::log(eps);
    const double Y = kappa_for(n) * std::pow(R, n / (n - 1.0));
    // int_0^Y y^{n-1}/(1+y)^n dy = log(1+Y) - sum_{i<n} (Y/(1+Y))^i / i
    const double ratio = Y / (1.0 + Y);
    double partial = 0.0;
    for (int i = 1; i <= n - 1; ++i) partial += std::pow(ratio, i) / i;
    const double outer = (n / k.alpha_n) * (-std::log(R * eps));
    const double inner = ((n - 1.0) / k.alpha_n) * (std::log1p(Y) - partial);
    return outer + inner;
}

double concentrating_c_power_asymptotic(double eps, int n) {
    const auto k = constants_for(n);
    return -(n / k.alpha_n) * std::log(eps) + std::log(k.omega / n) / k.alpha_n -
           ((n - 1.0) / k.alpha_n) * k.harmonic_partial;
}

namespace {

std::pair<RadialFunction, ConcentratingParams> build_concentrating(double eps, int n, const RadialGrid& grid) {
    ConcentratingParams p;
    p.eps = eps;
    p.n = n;
    p.R = -std::log(eps);
    p.kappa = kappa_for(n);
    if (!(p.R * eps < 0.5)) throw std::invalid_argument("eps too large: need R eps < 1/2");
    const double rc = p.R * eps;
    const RadialGrid g = grid.with_node(rc);
    if (g.nodes_below(rc) < 8) throw std::invalid_argument("grid does not resolve r = R eps");
    RadialFunction shape = sample_profile([&](double r) { return concentrating_shape(eps, n, r); }, g, n);
    const double q = n / (n - 1.0);
    const double shape_energy = dirichlet_energy(shape);
    p.c = std::pow(shape_energy, 1.0 / q);
    p.c_continuum = std::pow(concentrating_c_power_exact(eps, n), 1.0 / q);
    const auto k = constants_for(n);
    const double Y = p.kappa * std::pow(p.R, q);
    const double B = -(n / k.alpha_n) * std::log(rc) + ((n - 1.0) / k.alpha_n) * std::log1p(Y);
    p.A = B - std::pow(p.c, q);
    return {shape.scaled(std::pow(p.c, -1.0 / (n - 1.0))), p};
}

}  // namespace

std::pair<RadialFunction, ConcentratingParams> concentrating_function(double eps, int n, const RadialGrid& grid) {
    if (!(eps > 0.0 && eps < std::exp(-std::numbers::e)))
        throw std::invalid_argument("eps must lie in (0, e^{-e})");
    return build_concentrating(eps, n, grid);
}

std::pair<RadialFunction, ConcentratingParams> mountain_pass_function(int j, int n, const RadialGrid& grid) {
    if (j < 8) throw std::invalid_argument("mountain-pass family needs j >= 8");
    return build_concentrating(1.0 / j, n, grid);
}

double moser_lower_bound(int n, double gamma, double j) {
    const auto k = constants_for(n);
    return k.ball_volume * std::exp(n * (gamma / k.alpha_n - 1.0) * std::log(j));
}

std::vector<BlowupRow> blowup_table(FunctionalKind kind, double gamma_mult, double alpha, int n,
                                    std::span<const double> j_list, std::size_t count) {
    if (!(gamma_mult >= 1.0)) throw std::invalid_argument("blow-up table needs gamma >= alpha_n");
    if (kind != FunctionalKind::MT1 && kind != FunctionalKind::MT2 && kind != FunctionalKind::MT)
        throw std::invalid_argument("blow-up table supports mt, mt1, mt2");
    FunctionalSpec spec = FunctionalSpec::mt(n, gamma_mult);
    spec.kind = kind;
    spec.alpha = alpha;
    std::vector<BlowupRow> rows;
    for (double j : j_list) {
        const double strength = std::max(40.0, std::log(j) + 10.0);
        const auto u = moser_function({j, n}, make_grid(count, GradingSpec::log_origin(strength)));
        const auto v = eval_functional(u, spec);
        rows.push_back({j, v.value, moser_lower_bound(n, spec.effective_gamma(), j), v.divergent});
    }
    return rows;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs matching series of length >= 2");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

}  // namespace mtlab
