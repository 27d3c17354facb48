#include "aqc/propagation.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace aqc {

namespace {
// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

double ComplexField::power() const {
    double s = 0.0;
    for (const auto& v : values) s += std::norm(v);
    return s * grid_step * grid_step;
}

Fft2D::Fft2D(int n) : n_(n) {
    buf_ = reinterpret_cast<std::complex<double>*>(
        fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(n) * n));
    if (!buf_) throw std::bad_alloc();
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd_ = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(buf_),
                            reinterpret_cast<fftw_complex*>(buf_),
                            FFTW_FORWARD, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(buf_),
                            reinterpret_cast<fftw_complex*>(buf_),
                            FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft2D::~Fft2D() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    fftw_free(buf_);
}

void Fft2D::forward(std::complex<double>* data) {
    const std::size_t bytes =
        sizeof(std::complex<double>) * static_cast<std::size_t>(n_) * n_;
    std::memcpy(buf_, data, bytes);
    fftw_execute(fwd_);
    std::memcpy(data, buf_, bytes);
}

void Fft2D::inverse(std::complex<double>* data) {
    const std::size_t bytes =
        sizeof(std::complex<double>) * static_cast<std::size_t>(n_) * n_;
    std::memcpy(buf_, data, bytes);
    fftw_execute(inv_);
    std::memcpy(data, buf_, bytes);
    const double scale = 1.0 / (static_cast<double>(n_) * n_);
    for (std::size_t i = 0; i < static_cast<std::size_t>(n_) * n_; ++i)
        data[i] *= scale;
}

ComplexField init_gaussian_beam(const BeamParams& beam,
                                const ChannelGeometry& g) {
    g.validate();
    if (!(beam.waist > 0.0))
        throw std::invalid_argument("init_gaussian_beam: W0 must be > 0");
    if (beam.focal_range == 0.0)
        throw std::invalid_argument("init_gaussian_beam: F0 must be nonzero");
    if (beam.waist < 4.0 * g.grid_step)
        throw std::invalid_argument(
            "init_gaussian_beam: beam not resolvable (W0 < 4 grid steps)");

    ComplexField f;
    f.n = g.grid_n;
    f.grid_step = g.grid_step;
    f.z = 0.0;
    f.values.resize(static_cast<std::size_t>(f.n) * f.n);

    const double amp = std::sqrt(2.0 / (M_PI * beam.waist * beam.waist));
    const double k = g.wavenumber();
    const double curvature =
        std::isinf(beam.focal_range) ? 0.0 : k / (2.0 * beam.focal_range);
    const GridSpec grid = f.grid();
    for (int iy = 0; iy < f.n; ++iy) {
        const double y = grid.coord(iy);
        for (int ix = 0; ix < f.n; ++ix) {
            const double x = grid.coord(ix);
            const double r2 = x * x + y * y;
            f.values[static_cast<std::size_t>(iy) * f.n + ix] =
                std::polar(amp * std::exp(-r2 / (beam.waist * beam.waist)),
                           -curvature * r2);
        }
    }
    return f;
}

void vacuum_propagate(ComplexField& f, double dz, double wavenumber,
                      Fft2D& fft) {
    if (dz < 0.0)
        throw std::invalid_argument("vacuum_propagate: dz must be >= 0");
    if (dz == 0.0) return;
    if (fft.size() != f.n)
        throw std::invalid_argument("vacuum_propagate: FFT size mismatch");

    fft.forward(f.values.data());
    const int n = f.n;
    const double dkappa = 2.0 * M_PI / (n * f.grid_step);
    const double c = dz / (2.0 * wavenumber);
    std::vector<double> kap2(n);
    for (int i = 0; i < n; ++i) {
        const double kx = dkappa * (i < n / 2 ? i : i - n);
        kap2[i] = kx * kx;
    }
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix)
            f.values[static_cast<std::size_t>(iy) * n + ix] *=
                std::polar(1.0, -c * (kap2[ix] + kap2[iy]));
    fft.inverse(f.values.data());
    f.z += dz;
}

void apply_screen(ComplexField& f, const double* phi, std::size_t phi_size) {
    if (phi_size != f.values.size())
        throw std::invalid_argument("apply_screen: shape mismatch");
    for (std::size_t i = 0; i < phi_size; ++i)
        f.values[i] *= std::polar(1.0, phi[i]);
}

double gaussian_spot_radius(const BeamParams& beam, double z,
                            double wavenumber) {
    const double focus_term =
        std::isinf(beam.focal_range) ? 1.0 : 1.0 - z / beam.focal_range;
    const double diff_term =
        2.0 * z / (wavenumber * beam.waist * beam.waist);
    return beam.waist *
           std::sqrt(focus_term * focus_term + diff_term * diff_term);
}

namespace {

void build_edge_window(std::vector<double>& w, int n) {
    // Super-Gaussian roll-off over the outer 5% of each axis; amplitude
    // at the grid edge is 1e-3.
    w.resize(n);
    const double band = 0.05;
    const double strength = -std::log(1e-3);
    for (int i = 0; i < n; ++i) {
        const double d = std::abs(i - n / 2.0) / (n / 2.0);  // in [0, 1]
        const double t = (d - (1.0 - 2.0 * band)) / (2.0 * band);
        w[i] = t <= 0.0 ? 1.0
                        : std::exp(-strength * t * t * t * t);
    }
}

// Power fraction in the outer 10% band of the grid.
double edge_power_fraction(const ComplexField& f) {
    const int n = f.n;
    const int lo = n / 10;
    const int hi = n - 1 - lo;
    double total = 0.0, edge = 0.0;
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            const double p =
                std::norm(f.values[static_cast<std::size_t>(iy) * n + ix]);
            total += p;
            if (ix < lo || ix > hi || iy < lo || iy > hi) edge += p;
        }
    return total > 0.0 ? edge / total : 0.0;
}

}  // namespace

PropagationResult propagate_channel(const SparseScreenSet& screens,
                                    double shift, const ChannelGeometry& g,
                                    const BeamParams& beam, Fft2D& fft,
                                    PropagationWorkspace& ws) {
    if (static_cast<int>(screens.screens.size()) != g.n_screens)
        throw std::invalid_argument(
            "propagate_channel: screen count does not match geometry");

    PropagationResult res;
    res.field = init_gaussian_beam(beam, g);
    const double k = g.wavenumber();
    const double half = 0.5 * g.slab_thickness();
    const GridSpec grid = res.field.grid();
    const std::size_t npts = res.field.values.size();
    ws.screen.resize(npts);
    if (ws.edge_window.size() != static_cast<std::size_t>(g.grid_n))
        build_edge_window(ws.edge_window, g.grid_n);

    const auto vacuum_step = [&](double dz) {
        vacuum_propagate(res.field, dz, k, fft);
        if (edge_power_fraction(res.field) > 0.01) res.flagged = true;
        for (int iy = 0; iy < g.grid_n; ++iy) {
            const double wy = ws.edge_window[iy];
            for (int ix = 0; ix < g.grid_n; ++ix)
                res.field.values[static_cast<std::size_t>(iy) * g.grid_n +
                                 ix] *= wy * ws.edge_window[ix];
        }
    };

    for (int j = 0; j < g.n_screens; ++j) {
        vacuum_step(j == 0 ? half : 2.0 * half);  // fused half steps
        evaluate_screen(screens.screens[j], grid, shift, ws.screen.data(),
                        ws.eval);
        apply_screen(res.field, ws.screen.data(), npts);
    }
    vacuum_step(half);
    return res;
}

double aperture_transmittance(const ComplexField& f, double aperture_radius) {
    if (aperture_radius < 0.0)
        throw std::invalid_argument("aperture_transmittance: R_ap < 0");
    const GridSpec grid = f.grid();
    const double r2max = aperture_radius * aperture_radius;
    double s = 0.0;
    for (int iy = 0; iy < f.n; ++iy) {
        const double y = grid.coord(iy);
        for (int ix = 0; ix < f.n; ++ix) {
            const double x = grid.coord(ix);
            if (x * x + y * y <= r2max)
                s += std::norm(
                    f.values[static_cast<std::size_t>(iy) * f.n + ix]);
        }
    }
    const double eta = s * f.grid_step * f.grid_step;
    return eta < 0.0 ? 0.0 : (eta > 1.0 ? 1.0 : eta);
}

}  // namespace aqc
