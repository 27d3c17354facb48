#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "aqc/turbulence.hpp"

namespace aqc {

// One stored spectral mode of a sparse-spectrum phase screen.
struct SpectralMode {
    double kx;         // rad/m
    double ky;         // rad/m
    double amplitude;  // rad
    double phase;      // rad, offset
};

struct SparseSpectrum {
    std::vector<SpectralMode> modes;
    int ring_count = 0;
    std::uint64_t rng_seed = 0;
};

enum class AmplitudeLaw { Deterministic, Rayleigh };

// Log-partition of [kmin, kmax] into spectral rings with per-ring
// integrated phase variance and a tabulated in-ring CDF.  Built once per
// (turbulence, geometry) pair and shared by all realizations.
class RingTable {
public:
    RingTable(const TurbulenceParams& p, double wavenumber,
              double slab_thickness, int ring_count);

    int ring_count() const { return static_cast<int>(sigma2_.size()); }
    double ring_variance(int j) const { return sigma2_[j]; }
    // Total per-screen phase variance, sum of ring variances.
    double total_variance() const { return total_variance_; }

    // Inverse-CDF draw of |k| inside ring j, weighted by kappa*Phi_n(kappa).
    double sample_kappa(int j, double u) const;

private:
    static constexpr int kSubNodes = 8;  // CDF nodes per ring
    std::vector<double> edges_;          // ring_count*kSubNodes + 1 kappa nodes
    std::vector<double> cdf_;            // per-ring cumulative weights, same layout
    std::vector<double> sigma2_;
    double total_variance_ = 0.0;
};

// Draws one screen realization: one stochastic mode per ring.
SparseSpectrum sample_spectrum(const RingTable& table, std::uint64_t seed,
                               AmplitudeLaw law = AmplitudeLaw::Deterministic);

// Square evaluation grid centred on the optical axis.
struct GridSpec {
    int n;
    double step;
    double coord(int i) const { return (i - n / 2) * step; }
};

// Scratch buffers for the fast screen-evaluation kernel.
struct ScreenEvalWorkspace {
    Eigen::MatrixXd ar, ai, br, bi;
};

// phi(x, y) = sum_j a_j cos(kx_j (x + shift) + ky_j y + theta_j),
// written row-major as phi[iy*n + ix].

// Plain-loop reference implementation, kept for testing and benchmarks.
void evaluate_screen_reference(const SparseSpectrum& s, const GridSpec& grid,
                               double shift, double* phi);

// Production kernel: separable outer-product form reduced to two real
// matrix products.
void evaluate_screen(const SparseSpectrum& s, const GridSpec& grid,
                     double shift, double* phi, ScreenEvalWorkspace& ws);

// Exact evaluation at scattered points (x, y); no grid involved.
std::vector<double> evaluate_screen_at(
    const SparseSpectrum& s,
    const std::vector<std::pair<double, double>>& points, double shift);

struct SparseScreenSet {
    std::vector<SparseSpectrum> screens;
    std::vector<double> screen_positions;  // slab centers, m
    double slab_thickness = 0.0;           // z_ap / M
};

// Screens for one atmospheric realization; screen j gets seed
// split_seed(realization_seed, j).
SparseScreenSet sample_screen_set(const RingTable& table,
                                  const ChannelGeometry& g,
                                  std::uint64_t realization_seed,
                                  AmplitudeLaw law = AmplitudeLaw::Deterministic);

inline double wind_shift(double v, double tau) {
    if (v < 0.0 || tau < 0.0)
        throw std::invalid_argument("wind_shift: v and tau must be >= 0");
    return v * tau;
}

}  // namespace aqc
