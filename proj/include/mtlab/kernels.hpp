#pragma once

// Cell-sum kernels shared by the energy, the exponential functionals and the
// variational functional I. Each kernel has a serial reference and an OpenMP
// version. The OpenMP versions reduce over a fixed number of chunks so the
// result does not depend on the thread count.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mtlab/radial_calculus.hpp"

namespace mtlab::kernels {

// Per-cell data for a grid in dimension n.
struct CellGeometry {
    int n = 2;
    double omega = 0.0;
    std::vector<double> mid;          // evaluation radius (geometric mean on log cells)
    std::vector<double> volume;       // omega * int_cell r^{n-1} dr
    std::vector<double> conductance;  // energy of the cell = conductance * |du|^n
    std::vector<double> metric;       // same for int |u'|^2 r dr (planar Dirichlet form, any n)

    std::size_t cells() const { return mid.size(); }
};

CellGeometry cell_geometry(const RadialGrid& grid, int n);

// exponent on cell c = coef[c] * |u_mid|^power[c], clamped at cap.
struct ExponentModel {
    std::vector<double> coef;
    std::vector<double> power;
    double cap = 700.0;
};

struct ExpSum {
    double value = 0.0;
    bool divergent = false;  // some cell exponent hit the cap
    double max_exponent = 0.0;
};

// F(cell, t) for the I functional; must be safe to call concurrently for distinct cells.
using CellPrimitive = std::function<double(std::size_t cell, double t)>;

namespace serial {
double energy(const CellGeometry& g, std::span<const double> u);
ExpSum exp_sum(const CellGeometry& g, const ExponentModel& m, std::span<const double> u);
// grad has one entry per node; the boundary node gets 0.
void exp_sum_gradient(const CellGeometry& g, const ExponentModel& m, std::span<const double> u,
                      std::span<double> grad);
double primitive_sum(const CellGeometry& g, std::span<const double> u, const CellPrimitive& F);
}  // namespace serial

namespace parallel {
double energy(const CellGeometry& g, std::span<const double> u);
ExpSum exp_sum(const CellGeometry& g, const ExponentModel& m, std::span<const double> u);
void exp_sum_gradient(const CellGeometry& g, const ExponentModel& m, std::span<const double> u,
                      std::span<double> grad);
double primitive_sum(const CellGeometry& g, std::span<const double> u, const CellPrimitive& F);
}  // namespace parallel

// Solves the tridiagonal system of the quadratic form `metric` with u[last] = 0.
// Used as the Sobolev preconditioner for gradient ascent.
std::vector<double> metric_solve(const CellGeometry& g, std::span<const double> rhs);
double metric_norm(const CellGeometry& g, std::span<const double> u);

int max_threads();

}  // namespace mtlab::kernels
