#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "mtlab/functionals.hpp"
#include "mtlab/kernels.hpp"
#include "mtlab/test_families.hpp"

using namespace mtlab;
namespace k = mtlab::kernels;

namespace {

struct Setup {
    RadialFunction u;
    k::CellGeometry g;
    k::ExponentModel m;

    explicit Setup(std::size_t count)
        : u(moser_function({1e4, 2}, make_grid(count, GradingSpec::log_origin(40.0)))),
          g(k::cell_geometry(u.grid(), 2)),
          m(exponent_model(FunctionalSpec::mt2(2, 1.0), g)) {}
};

template <bool Parallel>
void bm_energy(benchmark::State& st) {
    Setup s(st.range(0));
    for (auto _ : st)
        benchmark::DoNotOptimize(Parallel ? k::parallel::energy(s.g, s.u.values()) : k::serial::energy(s.g, s.u.values()));
}

template <bool Parallel>
void bm_exp_sum(benchmark::State& st) {
    Setup s(st.range(0));
    for (auto _ : st)
        benchmark::DoNotOptimize(Parallel ? k::parallel::exp_sum(s.g, s.m, s.u.values())
                                          : k::serial::exp_sum(s.g, s.m, s.u.values()));
}

template <bool Parallel>
void bm_gradient(benchmark::State& st) {
    Setup s(st.range(0));
    std::vector<double> out(s.u.grid().count());
    for (auto _ : st) {
        if (Parallel) k::parallel::exp_sum_gradient(s.g, s.m, s.u.values(), out);
        else k::serial::exp_sum_gradient(s.g, s.m, s.u.values(), out);
        benchmark::DoNotOptimize(out.data());
    }
}

}  // namespace

BENCHMARK(bm_energy<false>)->Arg(4000)->Arg(64000);
BENCHMARK(bm_energy<true>)->Arg(4000)->Arg(64000);
BENCHMARK(bm_exp_sum<false>)->Arg(4000)->Arg(64000);
BENCHMARK(bm_exp_sum<true>)->Arg(4000)->Arg(64000);
BENCHMARK(bm_gradient<false>)->Arg(4000)->Arg(64000);
BENCHMARK(bm_gradient<true>)->Arg(4000)->Arg(64000);

BENCHMARK_MAIN();
