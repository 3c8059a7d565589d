#include "actukit/dyno.hpp"
#include "actukit/kernels.hpp"
#include "actukit/thermal.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

using namespace actukit;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::Parallel : Exec::Serial; }

void label(benchmark::State& s) { s.SetLabel(s.range(0) ? "parallel" : "serial"); }

// Thermal-fit style objective: a 2 h simulation per grid point.
void BM_Grid(benchmark::State& s) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 40.0);
    std::vector<double> P(7200);
    for (auto& p : P) p = u(rng);
    const auto target = thermal::simulate_rise(thermal::ThermalNetwork::fan(), P, 1.0);
    const kernels::Objective f = [&](std::span<const double> x) {
        const thermal::ThermalNetwork n{std::pow(10.0, x[0]), std::pow(10.0, x[1]), std::pow(10.0, x[2]),
                                        std::pow(10.0, x[3])};
        const auto r = thermal::simulate_rise(n, P, 1.0);
        double e = 0.0;
        for (std::size_t k = 0; k < r.size(); ++k) e += (r[k] - target[k]) * (r[k] - target[k]);
        return e;
    };
    std::vector<std::vector<double>> axes(4, std::vector<double>(6));
    for (auto& a : axes)
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = -1.0 + 0.6 * static_cast<double>(i);
    for (auto _ : s) benchmark::DoNotOptimize(kernels::evaluate_grid(f, axes, exec_of(s)));
    label(s);
}

void BM_Welch(benchmark::State& s) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    std::vector<double> u(1 << 20), y(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
        u[k] = g(rng);
        y[k] = 0.5 * u[k] + 0.1 * g(rng);
    }
    for (auto _ : s) benchmark::DoNotOptimize(kernels::welch(u, y, 4096, 2048, exec_of(s)));
    label(s);
}

void BM_EfficiencySweep(benchmark::State& s) {
    const auto act = dyno::VirtualActuator::from_spec(derive_actuator(MotorParams::ri50(), {7.5, TransmissionStyle::Planetary}));
    dyno::SweepGrid g;
    g.count = 32;
    g.speed_limit = 20.0;
    for (auto _ : s) benchmark::DoNotOptimize(dyno::run_efficiency_sweep(act, g, {}, exec_of(s)));
    label(s);
}

void BM_LimitCurve(benchmark::State& s) {
    std::vector<double> currents;
    for (double i = 6.0; i <= 30.0; i += 0.25) currents.push_back(i);
    const auto net = thermal::ThermalNetwork::fan();
    const auto motor = MotorParams::ri50();
    for (auto _ : s) benchmark::DoNotOptimize(thermal::limit_curve(net, motor, currents, exec_of(s)));
    label(s);
}

} // namespace

BENCHMARK(BM_Grid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Welch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EfficiencySweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_LimitCurve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
