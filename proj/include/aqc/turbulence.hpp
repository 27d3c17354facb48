#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace aqc {

// Modified von Karman refractive-index spectrum parameters.
struct TurbulenceParams {
    double cn2;   // structure constant, m^(-2/3)
    double l0;    // inner scale, m
    double L0;    // outer scale, m
    double kmin;  // low spectral cutoff, rad/m
    double kmax;  // high spectral cutoff, rad/m

    // Defaults: kmin = 1/(15 L0), kmax = 2/l0.  The low cutoff is a
    // config knob, see make().
    static TurbulenceParams make(double cn2, double l0, double L0,
                                 double kmin = -1.0, double kmax = -1.0) {
        TurbulenceParams p;
        p.cn2 = cn2;
        p.l0 = l0;
        p.L0 = L0;
        p.kmin = kmin > 0.0 ? kmin : 1.0 / (15.0 * L0);
        p.kmax = kmax > 0.0 ? kmax : 2.0 / l0;
        p.validate();
        return p;
    }

    void validate() const {
        if (!(cn2 > 0.0)) throw std::invalid_argument("cn2 must be > 0");
        if (!(l0 > 0.0 && l0 < L0))
            throw std::invalid_argument("need 0 < l0 < L0");
        if (!(kmin > 0.0 && kmin < kmax))
            throw std::invalid_argument("need 0 < kmin < kmax");
    }
};

// Link geometry and numerical grid.
struct ChannelGeometry {
    double wavelength;       // m
    double z_ap;             // propagation distance, m
    int n_screens;           // M
    int grid_n;              // points per axis, power of two
    double grid_step;        // m
    double aperture_radius;  // m

    double wavenumber() const { return 2.0 * M_PI / wavelength; }
    double slab_thickness() const { return z_ap / n_screens; }
    double grid_extent() const { return grid_n * grid_step; }

    void validate() const {
        if (!(wavelength > 0.0))
            throw std::invalid_argument("wavelength must be > 0");
        if (!(z_ap >= 0.0)) throw std::invalid_argument("z_ap must be >= 0");
        if (n_screens < 1) throw std::invalid_argument("n_screens must be >= 1");
        if (grid_n < 2 || (grid_n & (grid_n - 1)) != 0)
            throw std::invalid_argument("grid_n must be a power of two");
        if (!(grid_step > 0.0))
            throw std::invalid_argument("grid_step must be > 0");
        if (!(aperture_radius >= 0.0))
            throw std::invalid_argument("aperture_radius must be >= 0");
    }
};

// Phase power spectral density Phi_n(kappa) of the modified von
// Karman-Tatarskii spectrum, in m^3.
double phase_psd(double kappa, const TurbulenceParams& p);

// Plane-wave Rytov variance, a scintillation-strength diagnostic.
double rytov_variance(const TurbulenceParams& p, const ChannelGeometry& g);

}  // namespace aqc
