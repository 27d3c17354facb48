#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "aqc/phase_screens.hpp"
#include "aqc/propagation.hpp"
#include "aqc/turbulence.hpp"

namespace aqc {

struct SampleRecord {
    std::uint64_t realization_id = 0;
    std::uint64_t seed = 0;
    std::vector<double> etas;  // aligned to SampleSet::shifts
    bool flagged = false;      // aliasing guard tripped during propagation
};

// Monte-Carlo transmittance samples at a common list of wind shifts.
struct SampleSet {
    std::vector<double> shifts;  // m, strictly increasing, shifts[0] == 0
    std::vector<SampleRecord> records;
    std::vector<std::pair<std::string, std::string>> meta;

    void validate() const;
    // Index of `shift` in the shift list; throws std::invalid_argument if
    // absent.
    std::size_t shift_index(double shift) const;
};

struct SimulationConfig {
    TurbulenceParams turbulence{};
    ChannelGeometry geometry{};
    BeamParams beam{};
    std::vector<double> shifts;
    std::size_t n_samples = 1;
    std::uint64_t master_seed = 1;
    int ring_count = 1024;
    AmplitudeLaw amplitude_law = AmplitudeLaw::Deterministic;
    int n_threads = 0;  // 0 = OpenMP default

    void validate() const;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

// Samples the multi-shift transmittance set.  Realizations run in parallel
// with per-realization seeds split from the master seed, so the result is
// independent of the thread count.  If `resume_from` is given, records
// already present there are reused instead of recomputed.
SampleSet run_monte_carlo(const SimulationConfig& cfg,
                          const SampleSet* resume_from = nullptr,
                          const ProgressFn& progress = {});

// Serial reference driver, kept for testing the parallel path.
SampleSet run_monte_carlo_serial(const SimulationConfig& cfg);

struct Histogram {
    std::vector<double> edges;    // bins+1 edges on [0, 1]
    std::vector<double> density;  // normalized: sum(density * width) == 1
};

Histogram marginal_pdt(const SampleSet& s, double shift, int bins = 100);

// Histogram of eta_shift over records with eta_0 >= eta_min.
Histogram conditional_pdt(const SampleSet& s, double eta_min, double shift,
                          int bins = 100);

struct Exceedance {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t survivors = 0;
};

// Fraction of records with eta_0 >= eta_min, with binomial standard error.
Exceedance exceedance(const SampleSet& s, double eta_min);

struct MomentsRow {
    double shift = 0.0;
    double mean0 = 0.0;       // <eta_0>
    double mean_s = 0.0;      // <eta_s>
    double cross = 0.0;       // <sqrt(eta_0 eta_s)>
    double m2 = 0.0;          // <eta_s^2>
    double var = 0.0;         // <Delta eta_s^2>, unbiased
    double pearson = 0.0;
    bool pearson_degenerate = false;
    double se_mean0 = 0.0;
    double se_mean_s = 0.0;
    double se_cross = 0.0;
    std::size_t n = 0;
};

MomentsRow moments(const SampleSet& s, double shift);

std::vector<MomentsRow> moments_table(const SampleSet& s);

// First downward crossing of 1/e on a (shift, pearson) curve, by piecewise
// linear interpolation.
double coherence_radius(
    const std::vector<std::pair<double, double>>& corr_curve);

}  // namespace aqc
