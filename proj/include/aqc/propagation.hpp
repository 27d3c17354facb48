#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "aqc/phase_screens.hpp"
#include "aqc/turbulence.hpp"

// Forward declarations so fftw3.h stays out of the public header.
struct fftw_plan_s;

namespace aqc {

// Discretized transverse complex field amplitude, units 1/m; row-major,
// values[iy*n + ix], x = (ix - n/2)*step.
struct ComplexField {
    std::vector<std::complex<double>> values;
    int n = 0;
    double grid_step = 0.0;
    double z = 0.0;

    GridSpec grid() const { return {n, grid_step}; }
    // Discrete power, sum |u|^2 dx dy.
    double power() const;
};

// Gaussian source beam.
struct BeamParams {
    double waist;        // W0, m
    double focal_range;  // F0, m; +/- infinity means collimated
};

// Reusable 2-D FFT plans for a fixed grid size.  Plans are created with
// FFTW_ESTIMATE so the chosen algorithm, and hence the output bits, do not
// depend on runtime timing.  One instance per thread.
class Fft2D {
public:
    explicit Fft2D(int n);
    ~Fft2D();
    Fft2D(const Fft2D&) = delete;
    Fft2D& operator=(const Fft2D&) = delete;

    int size() const { return n_; }
    void forward(std::complex<double>* data);   // unnormalized
    void inverse(std::complex<double>* data);   // scales by 1/n^2

private:
    int n_;
    std::complex<double>* buf_;
    fftw_plan_s* fwd_;
    fftw_plan_s* inv_;
};

// u(r, 0) = sqrt(2/(pi W0^2)) exp(-r^2/W0^2 - i k r^2 / (2 F0)).
ComplexField init_gaussian_beam(const BeamParams& beam,
                                const ChannelGeometry& g);

// Angular-spectrum vacuum step over distance dz; power-conserving.
void vacuum_propagate(ComplexField& f, double dz, double wavenumber,
                      Fft2D& fft);

// Pointwise u -> u exp(i phi); phi is row-major n*n.
void apply_screen(ComplexField& f, const double* phi, std::size_t phi_size);

// Analytic vacuum beam-spot radius W(z) for a Gaussian source.
double gaussian_spot_radius(const BeamParams& beam, double z,
                            double wavenumber);

struct PropagationResult {
    ComplexField field;
    bool flagged = false;  // aliasing guard tripped
};

// Per-run scratch: screen buffer + evaluation workspace + boundary mask.
struct PropagationWorkspace {
    std::vector<double> screen;
    std::vector<double> edge_window;  // per-axis absorbing window
    ScreenEvalWorkspace eval;
};

// Full split-step run: source -> [z_s/2 -> screen -> z_s/2] x M with fused
// half steps, absorbing boundary after every vacuum step, aliasing guard.
PropagationResult propagate_channel(const SparseScreenSet& screens,
                                    double shift, const ChannelGeometry& g,
                                    const BeamParams& beam, Fft2D& fft,
                                    PropagationWorkspace& ws);

// Discrete aperture transmittance: cells with center |r| <= R_ap.
double aperture_transmittance(const ComplexField& f, double aperture_radius);

}  // namespace aqc
