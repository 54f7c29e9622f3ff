#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mtlab {

// How the grid clusters its nodes.
enum class Grading { uniform, log_origin, doubly };

struct GradingSpec {
    Grading kind = Grading::log_origin;
    double strength0 = 40.0;  // -log of the first positive node (log_origin, doubly)
    double strength1 = 20.0;  // -log(1 - last interior node) (doubly only)

    static GradingSpec uniform() { return {Grading::uniform, 0.0, 0.0}; }
    static GradingSpec log_origin(double strength = 40.0) { return {Grading::log_origin, strength, 0.0}; }
    static GradingSpec doubly(double s0 = 40.0, double s1 = 20.0) { return {Grading::doubly, s0, s1}; }

    std::string describe() const;
};

// Interpolation inside a cell. The first cell [0, r1] is always linear in r.
enum class CellRule { linear, log_linear };

class RadialGrid {
public:
    RadialGrid(std::vector<double> nodes, CellRule rule, GradingSpec grading);

    std::span<const double> nodes() const { return nodes_; }
    double node(std::size_t k) const { return nodes_[k]; }
    std::size_t count() const { return nodes_.size(); }
    std::size_t cells() const { return nodes_.size() - 1; }
    CellRule rule() const { return rule_; }
    const GradingSpec& grading() const { return grading_; }

    // Copy of the grid with r inserted as a node (no-op if already present to 1e-14 relative).
    RadialGrid with_node(double r) const;
    // Number of nodes strictly inside (0, r).
    std::size_t nodes_below(double r) const;
    // Index of the node equal to r (to 1e-14 relative), or count() if absent.
    std::size_t find_node(double r) const;

private:
    std::vector<double> nodes_;
    CellRule rule_;
    GradingSpec grading_;
};

constexpr std::size_t min_grid_count = 16;

RadialGrid make_grid(std::size_t count, const GradingSpec& grading);

class RadialFunction {
public:
    RadialFunction(RadialGrid grid, std::vector<double> values, int dim_n);

    const RadialGrid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double value(std::size_t k) const { return values_[k]; }
    int dim() const { return n_; }

    // Interpolated value following the grid's cell rule.
    double at(double r) const;
    RadialFunction scaled(double factor) const;

private:
    RadialGrid grid_;
    std::vector<double> values_;
    int n_;
};

struct DimensionConstants {
    int n = 2;
    double omega = 0.0;        // surface measure of S^{n-1}
    double ball_volume = 0.0;  // |B| = omega / n
    double alpha_n = 0.0;
    double alpha_n_alt = 0.0;  // n^{n/(n-1)} |B|^{1/(n-1)}, kept for the consistency check
    double harmonic_partial = 0.0;
    double J = 0.0;            // concentration level |B|(1 + e^{H_{n-1}})
};

DimensionConstants constants_for(int n);

// Integral of |u'|^n over the ball for the cellwise interpolant.
double dirichlet_energy(const RadialFunction& u);

// u scaled to unit n-energy. Throws std::domain_error on zero energy.
RadialFunction normalize(const RadialFunction& u);

// (n/alpha_n)^{(n-1)/n} (-log r)^{(n-1)/n}: sup of |u(r)| over unit-energy radial u.
double pointwise_bound(double r, int n);

}  // namespace mtlab
