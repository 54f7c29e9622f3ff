#include "mtlab/radial_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "mtlab/kernels.hpp"

namespace mtlab {

std::string GradingSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Grading::uniform: os << "uniform"; break;
        case Grading::log_origin: os << "log-graded-origin(" << strength0 << ")"; break;
        case Grading::doubly: os << "doubly-graded(" << strength0 << "," << strength1 << ")"; break;
    }
    return os.str();
}

RadialGrid::RadialGrid(std::vector<double> nodes, CellRule rule, GradingSpec grading)
    : nodes_(std::move(nodes)), rule_(rule), grading_(grading) {
    if (nodes_.size() < min_grid_count)
        throw std::invalid_argument("grid needs at least 16 nodes");
    if (nodes_.front() != 0.0 || nodes_.back() != 1.0)
        throw std::invalid_argument("grid must start at 0 and end at 1");
    for (std::size_t k = 1; k < nodes_.size(); ++k)
        if (!(nodes_[k] > nodes_[k - 1]))
            throw std::invalid_argument("grid nodes must be strictly increasing");
}

std::size_t RadialGrid::find_node(double r) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), r * (1.0 - 1e-14));
    if (it != nodes_.end() && std::abs(*it - r) <= 1e-14 * std::max(r, 1e-300))
        return static_cast<std::size_t>(it - nodes_.begin());
    if (r == 0.0) return 0;
    return nodes_.size();
}

RadialGrid RadialGrid::with_node(double r) const {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("inserted node must lie in (0,1)");
    if (find_node(r) != count()) return *this;
    std::vector<double> nodes = nodes_;
    nodes.insert(std::upper_bound(nodes.begin(), nodes.end(), r), r);
    return RadialGrid(std::move(nodes), rule_, grading_);
}

std::size_t RadialGrid::nodes_below(double r) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), r);
    return static_cast<std::size_t>(it - nodes_.begin()) - 1;  // excludes r = 0
}

RadialGrid make_grid(std::size_t count, const GradingSpec& grading) {
    if (count < min_grid_count) throw std::invalid_argument("grid count must be at least 16");
    std::vector<double> r(count);
    r.front() = 0.0;
    r.back() = 1.0;
    switch (grading.kind) {
        case Grading::uniform: {
            for (std::size_t k = 1; k + 1 < count; ++k)
                r[k] = static_cast<double>(k) / static_cast<double>(count - 1);
            return RadialGrid(std::move(r), CellRule::linear, grading);
        }
        case Grading::log_origin: {
            const double s = grading.strength0;
            if (!(s > 0.0)) throw std::invalid_argument("grading strength must be positive");
            // uniform in t = -log r from t = s (node 1) to t = 0 (last node)
            const double m = static_cast<double>(count - 2);
            for (std::size_t k = 1; k + 1 < count; ++k)
                r[k] = std::exp(-s * (m - static_cast<double>(k - 1)) / m);
            return RadialGrid(std::move(r), CellRule::log_linear, grading);
        }
        case Grading::doubly: {
            const double s0 = grading.strength0, s1 = grading.strength1;
            if (!(s0 > std::numbers::ln2 && s1 > std::numbers::ln2))
                throw std::invalid_argument("doubly-graded strengths must exceed log 2");
            const std::size_t q = count - 1;  // positive nodes
            const std::size_t a = q / 2;      // geometric in r from e^{-s0} to 1/2
            const std::size_t b = q - a;      // geometric in 1-r from 1/2 to e^{-s1}, then 1
            for (std::size_t i = 0; i < a; ++i) {
                const double t = s0 + (std::numbers::ln2 - s0) * static_cast<double>(i) / static_cast<double>(a - 1);
                r[1 + i] = std::exp(-t);
            }
            r[a] = 0.5;
            for (std::size_t i = 1; i < b; ++i) {
                const double t = std::numbers::ln2 + (s1 - std::numbers::ln2) * static_cast<double>(i) / static_cast<double>(b - 1);
                r[a + i] = -std::expm1(-t);
            }
            return RadialGrid(std::move(r), CellRule::log_linear, grading);
        }
    }
    throw std::invalid_argument("unknown grading");
}

RadialFunction::RadialFunction(RadialGrid grid, std::vector<double> values, int dim_n)
    : grid_(std::move(grid)), values_(std::move(values)), n_(dim_n) {
    if (n_ < 2) throw std::invalid_argument("dimension must be at least 2");
    if (values_.size() != grid_.count()) throw std::invalid_argument("one value per grid node required");
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("function values must be finite");
    if (values_.back() != 0.0) throw std::invalid_argument("u(1) must be 0");
}

double RadialFunction::at(double r) const {
    const auto x = grid_.nodes();
    if (r <= 0.0) return values_.front();
    if (r >= 1.0) return 0.0;
    const auto k = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), r) - x.begin()) - 1;
    double theta;
    if (k == 0 || grid_.rule() == CellRule::linear)
        theta = (r - x[k]) / (x[k + 1] - x[k]);
    else
        theta = std::log(r / x[k]) / std::log(x[k + 1] / x[k]);
    return values_[k] + theta * (values_[k + 1] - values_[k]);
}

RadialFunction RadialFunction::scaled(double factor) const {
    std::vector<double> v = values_;
    for (double& x : v) x *= factor;
    v.back() = 0.0;
    return RadialFunction(grid_, std::move(v), n_);
}

namespace {

// Gamma(n/2) through Gamma(1) = 1, Gamma(1/2) = sqrt(pi), Gamma(x+1) = x Gamma(x).
double gamma_half_integer(int twice_x) {
    double g = (twice_x % 2 == 0) ? 1.0 : std::sqrt(std::numbers::pi);
    for (int m = (twice_x % 2 == 0) ? 2 : 1; m + 2 <= twice_x; m += 2) g *= 0.5 * m;
    return g;
}

}  // namespace

DimensionConstants constants_for(int n) {
    if (n < 2) throw std::invalid_argument("dimension must be at least 2");
    DimensionConstants c;
    c.n = n;
    const double nd = n;
    c.omega = 2.0 * std::pow(std::numbers::pi, nd / 2.0) / gamma_half_integer(n);
    c.ball_volume = c.omega / nd;
    c.alpha_n = nd * std::pow(c.omega, 1.0 / (nd - 1.0));
    c.alpha_n_alt = std::pow(nd, nd / (nd - 1.0)) * std::pow(c.ball_volume, 1.0 / (nd - 1.0));
    for (int i = 1; i <= n - 1; ++i) c.harmonic_partial += 1.0 / i;
    c.J = c.ball_volume * (1.0 + std::exp(c.harmonic_partial));
    return c;
}

double dirichlet_energy(const RadialFunction& u) {
    const auto g = kernels::cell_geometry(u.grid(), u.dim());
    return kernels::parallel::energy(g, u.values());
}

RadialFunction normalize(const RadialFunction& u) {
    const double e = dirichlet_energy(u);
    if (!(e > 0.0)) throw std::domain_error("zero energy");
    return u.scaled(std::pow(e, -1.0 / u.dim()));
}

double pointwise_bound(double r, int n) {
    if (!(r > 0.0 && r < 1.0)) throw std::domain_error("pointwise bound needs 0 < r < 1");
    const auto c = constants_for(n);
    const double q = (n - 1.0) / n;
    return std::pow(n / c.alpha_n, q) * std::pow(-std::log(r), q);
}

}  // namespace mtlab
