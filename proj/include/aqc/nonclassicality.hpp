#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "aqc/statistics.hpp"

namespace aqc {

// Amplitude-squeezed coherent state D(alpha0) S(xi) |0>, displacement real,
// squeezing along the amplitude quadrature.
struct SqueezedCoherentState {
    double alpha0 = 0.0;
    double xi = 0.0;

    double mean_photons() const {
        return alpha0 * alpha0 + std::sinh(xi) * std::sinh(xi);
    }
};

// Photon-number distribution p(0..cutoff); throws cutoff_error if the tail
// above `cutoff` carries >= 1e-10 probability.
std::vector<double> input_pnd(const SqueezedCoherentState& state, int cutoff);

// Binomial loss map on number statistics.
std::vector<double> lossy_pnd(const std::vector<double>& p_in, double eta);

// Photon-number distribution after adaptive selection: lossy_pnd averaged
// over records with eta_0 >= eta_min, total transmittance t_det * eta_s.
std::vector<double> selected_pnd(const std::vector<double>& p_in,
                                 const SampleSet& samples, double eta_min,
                                 double shift, double t_det);

// Mandel Q = <dn^2>/<n> - 1.
double mandel_q(const std::vector<double>& p);

// Click-number POVM in the Fock basis for N on-off detectors:
// (N+1) x (cutoff+1) matrix, columns sum to 1.
Eigen::MatrixXd click_povm_fock(int n_detectors, int cutoff);

// Click distribution P(n) = sum_m Pi(n|m) p(m).
std::vector<double> click_distribution(const std::vector<double>& p,
                                       int n_detectors);

// Closed-form click distribution for a coherent state of intensity
// alpha2 = |alpha|^2.
std::vector<double> coherent_click_distribution(double alpha2,
                                                int n_detectors);

// Binomial Q parameter; negative values witness nonclassicality.
double binomial_q(const std::vector<double>& clicks, int n_detectors);

struct WitnessResult {
    double violation = 0.0;       // > 0 certifies nonclassicality
    std::vector<double> lambda;   // optimal witness, in [-1, 1]^(N+1)
    double violation_refined = 0.0;  // value on the doubled alpha grid
    bool grid_ok = true;          // refinement changed value by <= 1e-6
};

// Default radial grid in |alpha|^2 for the witness constraints: 0 plus
// `points` log-spaced values covering the POVM saturation range.
std::vector<double> witness_alpha_grid(int n_detectors, int points = 400);

// Box-normalized linear-programming nonclassicality witness on the click
// inequalities.
WitnessResult witness_violation(const std::vector<double>& clicks,
                                int n_detectors,
                                std::vector<double> alpha2_grid = {});

// Violation of the inequalities for a fixed witness lambda (linear in P).
double witness_value(const std::vector<double>& lambda,
                     const std::vector<double>& clicks, int n_detectors,
                     const std::vector<double>& alpha2_grid);

struct ScanCell {
    int n_detectors = 0;
    double q_binomial = 0.0;
    double q_binomial_lo = 0.0, q_binomial_hi = 0.0;
    double violation = 0.0;
    double violation_lo = 0.0, violation_hi = 0.0;
};

struct ScanRow {
    double shift = 0.0;
    double mandel = 0.0;
    double mandel_lo = 0.0, mandel_hi = 0.0;
    std::vector<ScanCell> cells;
};

struct ScanOptions {
    double eta_min = 0.1;
    double t_det = 1.0;
    int cutoff = 64;
    std::size_t ci_events = 1000000;  // selected events per resample
    int ci_resamples = 1000;
    std::uint64_t ci_seed = 12345;
};

// Full shift scan: Mandel Q, binomial Q_N, witness violation with
// resampled confidence intervals (2.5/97.5 percentiles).
std::vector<ScanRow> selection_scan(const SqueezedCoherentState& state,
                                    const SampleSet& samples,
                                    const std::vector<double>& shifts,
                                    const std::vector<int>& detector_counts,
                                    const ScanOptions& opt);

}  // namespace aqc
