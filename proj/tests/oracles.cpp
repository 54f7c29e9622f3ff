#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

double bessel_j0(double x) {
    double term = 1.0, sum = 1.0;
    const double q = -(x * x) / 4.0;
    for (int k = 1; k < 80; ++k) {
        term *= q / (double(k) * k);
        sum += term;
    }
    return sum;
}

double bessel_j0_first_zero() {
    double lo = 2.0, hi = 3.0;  // J0(2) > 0 > J0(3)
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bessel_j0(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double sphere_area(int n) { return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0); }

double radial_integral(int n, const std::function<double(double)>& g, std::vector<double> breaks) {
    breaks.push_back(0.0);
    breaks.push_back(1.0);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    auto h = [&](double s) { return g(std::exp(-s)) * std::exp(-n * s); };
    double total = 0.0;
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i], b = breaks[i + 1];
        if (a == 0.0) total += es.integrate(h, -std::log(b), std::numeric_limits<double>::infinity());
        else total += ts.integrate(h, -std::log(b), -std::log(a));
    }
    return sphere_area(n) * total;
}

double concentrating_shape_energy(double eps, int n) {
    const double omega = sphere_area(n);
    const double alpha = n * std::pow(omega, 1.0 / (n - 1.0));
    const double kappa = std::pow(omega / n, 1.0 / (n - 1.0));
    const double q = n / (n - 1.0);
    const double R = -std::log(eps);
    auto dv_inner = [&](double r) {
        const double x = r / eps;
        return (n / alpha) * kappa * std::pow(x, q - 1.0) / eps / (1.0 + kappa * std::pow(x, q));
    };
    auto dv_outer = [&](double r) { return (n / alpha) / r; };
    boost::math::quadrature::tanh_sinh<double> ts;
    const double inner = ts.integrate([&](double r) { return std::pow(dv_inner(r), n) * std::pow(r, n - 1.0); }, 0.0,
                                      R * eps);
    const double outer = ts.integrate([&](double r) { return std::pow(dv_outer(r), n) * std::pow(r, n - 1.0); },
                                      R * eps, 1.0);
    return omega * (inner + outer);
}

double primitive_quadrature(const mtlab::pde::NonlinearitySpec& spec, double r, double t) {
    if (t <= 0.0) return 0.0;
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate([&](double s) { return mtlab::pde::eval_nonlinearity(spec, r, s).value; }, 0.0, t);
}

std::vector<double> fd_gradient(const mtlab::RadialFunction& u, const mtlab::FunctionalSpec& spec, double rel_step) {
    const auto& grid = u.grid();
    std::vector<double> v(u.values().begin(), u.values().end());
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    std::vector<double> g(v.size(), 0.0);
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        const double h = rel_step * std::max(std::abs(v[k]), scale);
        const double keep = v[k];
        v[k] = keep + h;
        const double fp = mtlab::eval_functional(mtlab::RadialFunction(grid, v, u.dim()), spec).value;
        v[k] = keep - h;
        const double fm = mtlab::eval_functional(mtlab::RadialFunction(grid, v, u.dim()), spec).value;
        v[k] = keep;
        g[k] = (fp - fm) / (2.0 * h);
    }
    return g;
}

mtlab::RadialFunction random_function(const mtlab::RadialGrid& grid, int n, std::mt19937_64& rng, bool nonnegative) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t N = grid.count();
    std::vector<double> a(6);
    for (auto& x : a) x = normal(rng);
    const double log_weight = normal(rng);
    const double cut = std::exp(-2.0 - 28.0 * unit(rng));
    const double walk = 0.05 * unit(rng);
    std::vector<double> v(N, 0.0);
    double w = 0.0;
    for (std::size_t k = N - 1; k-- > 0;) {
        const double r = grid.node(k);
        w += walk * normal(rng);
        double s = w;
        for (std::size_t m = 1; m <= a.size(); ++m) s += a[m - 1] * std::sin(m * std::numbers::pi * (1.0 - r) / 2.0) / m;
        s += log_weight * -std::log(std::max(r, cut)) / std::sqrt(-std::log(cut));
        v[k] = nonnegative ? std::abs(s) : s;
    }
    return mtlab::RadialFunction(grid, std::move(v), n);
}

}  // namespace oracle
