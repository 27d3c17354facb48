#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <vector>

#include "aqc/statistics.hpp"

namespace aqc {

enum class DvSource { Bell, Pdc };

// Polarization-entangled two-pulse CHSH experiment with correlated
// fluctuating losses, noise counts, and decaying memory efficiency.
struct DvExperiment {
    DvSource source = DvSource::Bell;
    double xi = 0.1;  // PDC squeezing parameter
    // CHSH-optimal analyzer defaults.
    double angle_a = 0.0;
    double angle_a_prime = M_PI / 4.0;
    double angle_b = M_PI / 8.0;
    double angle_b_prime = 3.0 * M_PI / 8.0;
    double noise_mean = 5e-4;          // noise counts per detector per window
    double deterministic_db = 9.42;    // non-splitter receiver+channel losses
    double splitter_db = 3.0;          // photon-sorting beam splitter
    double memory_decay_db_per_ms = 3.0;
    double wind_v = 10.0;              // m/s, converts shift to storage time
    bool memory_on_early_arm = true;   // which pulse sits in memory
    int fock_cutoff = 8;               // PDC pair-number truncation

    double t_deterministic() const {
        return std::pow(10.0, -(deterministic_db + splitter_db) / 10.0);
    }
    double t_memory(double tau_s) const {
        return std::pow(10.0,
                        -memory_decay_db_per_ms * (tau_s * 1e3) / 10.0);
    }
    double p_noise() const { return 1.0 - std::exp(-noise_mean); }
};

// Source state in pair-number sectors, already rotated into the detector
// bases of both analyzers.  weights[n](a, b) is the squared amplitude of
// a photons on detector +A, n-a on -A, b on +B, n-b on -B.
struct RotatedSource {
    std::vector<Eigen::MatrixXd> weights;
};

// Symmetric-subspace representation of a polarization rotation by `theta`
// on a total-photon-number-n pair of modes; (n+1)x(n+1) orthogonal matrix.
Eigen::MatrixXd polarization_rotation(double theta, int n);

// Builds the rotated source for one analyzer-angle pair.  Throws
// cutoff_error if the PDC truncation leaves more than 1e-6 norm.
RotatedSource rotate_source(const DvExperiment& exp, double theta_a,
                            double theta_b);

// 16 exact click-pattern probabilities for given per-arm transmittances.
// Pattern index bit layout: 1 = +A, 2 = -A, 4 = +B, 8 = -B clicked.
std::array<double, 16> click_pattern_probabilities(const RotatedSource& src,
                                                   double t_arm_a,
                                                   double t_arm_b,
                                                   double p_noise);

// Squash-model correlation from a set of pattern probabilities: no-click
// sides discarded, double clicks assigned a random dichotomic outcome.
double squash_correlation(const std::array<double, 16>& patterns);

// Single-realization correlation E(theta_A, theta_B) at fixed
// transmittances (eta_0, eta_tau); deterministic losses and memory decay
// for storage time tau are folded in.
double correlation_given_eta(const DvExperiment& exp, double eta0,
                             double eta_tau, double tau_s, double theta_a,
                             double theta_b);

struct ChshEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

// PDT-averaged CHSH parameter at one wind shift: pattern probabilities are
// averaged over the (eta_0, eta_s) sample pairs before outcomes are formed.
ChshEstimate chsh_parameter(const DvExperiment& exp, const SampleSet& samples,
                            double shift);

struct ChshMaxResult {
    double b_max = 0.0;
    double xi_star = 0.0;
    double std_error = 0.0;
    bool at_grid_edge = false;
};

// Maximizes the PDC Bell parameter over the squeezing parameter: coarse
// grid scan refined by golden-section search.
ChshMaxResult chsh_max_over_xi(const DvExperiment& exp_template,
                               const SampleSet& samples, double shift,
                               const std::vector<double>& xi_grid);

}  // namespace aqc
