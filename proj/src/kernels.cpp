#include "mtlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mtlab::kernels {

namespace {

constexpr std::size_t reduction_chunks = 64;
constexpr std::size_t parallel_threshold = 2048;

inline double abs_pow(double x, int n) {
    const double a = std::abs(x);
    switch (n) {
        case 2: return a * a;
        case 3: return a * a * a;
        case 4: { const double s = a * a; return s * s; }
        default: return std::pow(a, n);
    }
}

inline double cell_exponent(const ExponentModel& m, std::size_t c, double um) {
    const double a = std::abs(um);
    if (a == 0.0) return 0.0;
    const double p = m.power[c];
    const double powed = (p == 2.0) ? a * a : std::pow(a, p);
    return m.coef[c] * powed;
}

inline double energy_term(const CellGeometry& g, std::span<const double> u, std::size_t c) {
    return g.conductance[c] * abs_pow(u[c + 1] - u[c], g.n);
}

inline double exp_term(const CellGeometry& g, const ExponentModel& m, std::span<const double> u,
                       std::size_t c, bool& divergent, double& max_e) {
    double e = cell_exponent(m, c, 0.5 * (u[c] + u[c + 1]));
    max_e = std::max(max_e, e);
    if (e > m.cap) {
        divergent = true;
        e = m.cap;
    }
    return g.volume[c] * std::exp(e);
}

// d/du_k of the cell term, for either endpoint (the midpoint average gives the 1/2).
inline double exp_term_derivative(const CellGeometry& g, const ExponentModel& m, std::span<const double> u,
                                  std::size_t c) {
    const double um = 0.5 * (u[c] + u[c + 1]);
    const double a = std::abs(um);
    if (a == 0.0) return 0.0;
    const double e = cell_exponent(m, c, um);
    if (e > m.cap) return 0.0;
    const double p = m.power[c];
    const double de = m.coef[c] * p * std::pow(a, p - 1.0) * (um > 0.0 ? 1.0 : -1.0);
    return 0.5 * g.volume[c] * std::exp(e) * de;
}

void check_sizes(const CellGeometry& g, std::span<const double> u) {
    if (u.size() != g.cells() + 1) throw std::invalid_argument("function size does not match geometry");
}

struct ChunkRange {
    std::size_t begin, end;
};

inline ChunkRange chunk(std::size_t total, std::size_t nchunks, std::size_t i) {
    return {total * i / nchunks, total * (i + 1) / nchunks};
}

}  // namespace

CellGeometry cell_geometry(const RadialGrid& grid, int n) {
    if (n < 2) throw std::invalid_argument("dimension must be at least 2");
    const auto consts = constants_for(n);
    const auto x = grid.nodes();
    const std::size_t cells = grid.cells();
    const double nd = n;
    CellGeometry g;
    g.n = n;
    g.omega = consts.omega;
    g.mid.resize(cells);
    g.volume.resize(cells);
    g.conductance.resize(cells);
    g.metric.resize(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        const double a = x[c], b = x[c + 1], h = b - a;
        if (a == 0.0)
            g.volume[c] = consts.omega * std::pow(b, nd) / nd;
        else
            g.volume[c] = consts.omega / nd * std::pow(a, nd) * std::expm1(nd * std::log1p(h / a));
        if (a > 0.0 && grid.rule() == CellRule::log_linear) {
            const double dt = std::log1p(h / a);
            g.mid[c] = std::sqrt(a * b);
            g.conductance[c] = consts.omega / std::pow(dt, nd - 1.0);
            g.metric[c] = 1.0 / dt;
        } else {
            g.mid[c] = 0.5 * (a + b);
            g.conductance[c] = g.volume[c] / std::pow(h, nd);
            g.metric[c] = 0.5 * (a + b) / h;
        }
    }
    return g;
}

namespace serial {

double energy(const CellGeometry& g, std::span<const double> u) {
    check_sizes(g, u);
    double s = 0.0;
    for (std::size_t c = 0; c < g.cells(); ++c) s += energy_term(g, u, c);
    return s;
}

ExpSum exp_sum(const CellGeometry& g, const ExponentModel& m, std::span<const double> u) {
    check_sizes(g, u);
    ExpSum r;
    for (std::size_t c = 0; c < g.cells(); ++c) r.value += exp_term(g, m, u, c, r.divergent, r.max_exponent);
    return r;
}

void exp_sum_gradient(const CellGeometry& g, const ExponentModel& m, std::span<const double> u,
                      std::span<double> grad) {
    check_sizes(g, u);
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const double d = exp_term_derivative(g, m, u, c);
        grad[c] += d;
        grad[c + 1] += d;
    }
    grad[g.cells()] = 0.0;
}

double primitive_sum(const CellGeometry& g, std::span<const double> u, const CellPrimitive& F) {
    check_sizes(g, u);
    double s = 0.0;
    for (std::size_t c = 0; c < g.cells(); ++c)
        s += g.volume[c] * F(c, std::max(0.0, 0.5 * (u[c] + u[c + 1])));
    return s;
}

}  // namespace serial

namespace parallel {

double energy(const CellGeometry& g, std::span<const double> u) {
    check_sizes(g, u);
    const std::size_t cells = g.cells();
    const std::size_t nch = std::min(reduction_chunks, cells);
    std::vector<double> partial(nch, 0.0);
#pragma omp parallel for schedule(static) if (cells >= parallel_threshold)
    for (std::size_t i = 0; i < nch; ++i) {
        const auto [b, e] = chunk(cells, nch, i);
        double s = 0.0;
        for (std::size_t c = b; c < e; ++c) s += energy_term(g, u, c);
        partial[i] = s;
    }
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

ExpSum exp_sum(const CellGeometry& g, const ExponentModel& m, std::span<const double> u) {
    check_sizes(g, u);
    const std::size_t cells = g.cells();
    const std::size_t nch = std::min(reduction_chunks, cells);
    std::vector<ExpSum> partial(nch);
#pragma omp parallel for schedule(static) if (cells >= parallel_threshold)
    for (std::size_t i = 0; i < nch; ++i) {
        const auto [b, e] = chunk(cells, nch, i);
        ExpSum r;
        for (std::size_t c = b; c < e; ++c) r.value += exp_term(g, m, u, c, r.divergent, r.max_exponent);
        partial[i] = r;
    }
    ExpSum r;
    for (const auto& p : partial) {
        r.value += p.value;
        r.divergent = r.divergent || p.divergent;
        r.max_exponent = std::max(r.max_exponent, p.max_exponent);
    }
    return r;
}

void exp_sum_gradient(const CellGeometry& g, const ExponentModel& m, std::span<const double> u,
                      std::span<double> grad) {
    check_sizes(g, u);
    const std::size_t cells = g.cells();
    std::vector<double> d(cells);
#pragma omp parallel if (cells >= parallel_threshold)
    {
#pragma omp for schedule(static)
        for (std::size_t c = 0; c < cells; ++c) d[c] = exp_term_derivative(g, m, u, c);
#pragma omp for schedule(static)
        for (std::size_t k = 0; k <= cells; ++k)
            grad[k] = (k > 0 ? d[k - 1] : 0.0) + (k < cells ? d[k] : 0.0);
    }
    grad[cells] = 0.0;
}

double primitive_sum(const CellGeometry& g, std::span<const double> u, const CellPrimitive& F) {
    check_sizes(g, u);
    const std::size_t cells = g.cells();
    const std::size_t nch = std::min(reduction_chunks, cells);
    std::vector<double> partial(nch, 0.0);
    // F is expensive, so parallelise regardless of size.
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < nch; ++i) {
        const auto [b, e] = chunk(cells, nch, i);
        double s = 0.0;
        for (std::size_t c = b; c < e; ++c) s += g.volume[c] * F(c, std::max(0.0, 0.5 * (u[c] + u[c + 1])));
        partial[i] = s;
    }
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

}  // namespace parallel

std::vector<double> metric_solve(const CellGeometry& g, std::span<const double> rhs) {
    const std::size_t cells = g.cells();
    if (rhs.size() != cells + 1) throw std::invalid_argument("rhs size does not match geometry");
    const std::size_t m = cells;  // unknowns 0..cells-1, node `cells` pinned to 0
    std::vector<double> diag(m), upper(m, 0.0), x(cells + 1, 0.0), cp(m), dp(m);
    for (std::size_t k = 0; k < m; ++k) {
        diag[k] = g.metric[k] + (k > 0 ? g.metric[k - 1] : 0.0);
        if (k + 1 < m) upper[k] = -g.metric[k];
    }
    // Thomas algorithm; the matrix is a grounded path Laplacian, so no pivoting is needed.
    cp[0] = upper[0] / diag[0];
    dp[0] = rhs[0] / diag[0];
    for (std::size_t k = 1; k < m; ++k) {
        const double denom = diag[k] - upper[k - 1] * cp[k - 1];
        cp[k] = upper[k] / denom;
        dp[k] = (rhs[k] - upper[k - 1] * dp[k - 1]) / denom;
    }
    x[m - 1] = dp[m - 1];
    for (std::size_t k = m - 1; k-- > 0;) x[k] = dp[k] - cp[k] * x[k + 1];
    return x;
}

double metric_norm(const CellGeometry& g, std::span<const double> u) {
    double s = 0.0;
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const double d = u[c + 1] - u[c];
        s += g.metric[c] * d * d;
    }
    return std::sqrt(s);
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace mtlab::kernels
