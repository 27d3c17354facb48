// Micro-benchmarks for the hot kernels: sparse-spectrum screen synthesis
// (matrix-product kernel vs. the plain-loop reference) and the Monte-Carlo
// driver (OpenMP vs. the serial reference).  Prints wall times and the
// worst absolute deviation between the two implementations.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "aqc/phase_screens.hpp"
#include "aqc/statistics.hpp"
#include "aqc/turbulence.hpp"

using namespace aqc;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

void bench_screen_kernel() {
    const auto turb = TurbulenceParams::make(1e-15, 1e-3, 80.0);
    const double k = 2.0 * M_PI / 808e-9;
    const RingTable table(turb, k, 2500.0, 256);
    const SparseSpectrum spec = sample_spectrum(table, 42);
    const GridSpec grid{512, 2.1e-3};

    std::vector<double> fast(grid.n * grid.n), ref(grid.n * grid.n);
    ScreenEvalWorkspace ws;
    evaluate_screen(spec, grid, 0.0, fast.data(), ws);  // warm-up / alloc

    const int reps = 20;
    auto t0 = clock_type::now();
    for (int r = 0; r < reps; ++r)
        evaluate_screen(spec, grid, 1e-3 * r, fast.data(), ws);
    const double t_fast = seconds_since(t0) / reps;

    t0 = clock_type::now();
    for (int r = 0; r < reps; ++r)
        evaluate_screen_reference(spec, grid, 1e-3 * r, ref.data());
    const double t_ref = seconds_since(t0) / reps;

    double worst = 0.0;
    for (std::size_t i = 0; i < fast.size(); ++i)
        worst = std::max(worst, std::abs(fast[i] - ref[i]));

    std::printf("screen kernel   512^2 grid, 256 modes\n");
    std::printf("  matrix-product  %8.2f ms/screen\n", 1e3 * t_fast);
    std::printf("  reference loop  %8.2f ms/screen\n", 1e3 * t_ref);
    std::printf("  speedup         %8.2fx   max |diff| = %.2e\n\n",
                t_ref / t_fast, worst);
}

void bench_driver() {
    SimulationConfig cfg;
    cfg.turbulence = TurbulenceParams::make(1e-15, 1e-3, 80.0);
    cfg.geometry = {808e-9, 2e3, 3, 128, 4.2e-3, 0.05};
    cfg.beam = {0.024, std::numeric_limits<double>::infinity()};
    cfg.shifts = {0.0, 0.01};
    cfg.n_samples = 24;
    cfg.master_seed = 7;
    cfg.ring_count = 64;

    auto t0 = clock_type::now();
    const SampleSet par = run_monte_carlo(cfg);
    const double t_par = seconds_since(t0);

    t0 = clock_type::now();
    const SampleSet ser = run_monte_carlo_serial(cfg);
    const double t_ser = seconds_since(t0);

    double worst = 0.0;
    for (std::size_t i = 0; i < par.records.size(); ++i)
        for (std::size_t j = 0; j < cfg.shifts.size(); ++j)
            worst = std::max(worst, std::abs(par.records[i].etas[j] -
                                             ser.records[i].etas[j]));

    std::printf("monte-carlo driver   128^2 grid, 3 screens, 24 samples\n");
    std::printf("  parallel driver %8.2f s\n", t_par);
    std::printf("  serial driver   %8.2f s\n", t_ser);
    std::printf("  speedup         %8.2fx   max |diff| = %.2e\n",
                t_ser / t_par, worst);
}

}  // namespace

int main() {
    bench_screen_kernel();
    bench_driver();
    return 0;
}
