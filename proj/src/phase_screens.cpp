#include "aqc/phase_screens.hpp"

#include <cmath>
#include <complex>

#include "aqc/quadrature.hpp"
#include "aqc/rng.hpp"

namespace aqc {

RingTable::RingTable(const TurbulenceParams& p, double wavenumber,
                     double slab_thickness, int ring_count) {
    p.validate();
    if (ring_count < 8)
        throw std::invalid_argument("RingTable: need at least 8 rings");
    if (!(wavenumber > 0.0) || !(slab_thickness > 0.0))
        throw std::invalid_argument("RingTable: bad wavenumber or slab");

    const double scale =
        2.0 * M_PI * wavenumber * wavenumber * slab_thickness;
    const double ratio = std::pow(p.kmax / p.kmin, 1.0 / ring_count);

    edges_.resize(static_cast<std::size_t>(ring_count) * kSubNodes + 1);
    cdf_.resize(edges_.size());
    sigma2_.resize(ring_count);

    const auto weight = [&p](double k) { return k * phase_psd(k, p); };

    double lo = p.kmin;
    edges_[0] = lo;
    cdf_[0] = 0.0;
    double acc = 0.0;  // globally cumulative, shared ring boundaries
    for (int j = 0; j < ring_count; ++j) {
        const double hi = (j + 1 == ring_count) ? p.kmax : lo * ratio;
        const double ring_start = acc;
        for (int i = 0; i < kSubNodes; ++i) {
            const double a = lo + (hi - lo) * i / kSubNodes;
            const double b = lo + (hi - lo) * (i + 1) / kSubNodes;
            acc += simpson_fixed(weight, a, b, 8);
            edges_[j * kSubNodes + i + 1] = b;
            cdf_[j * kSubNodes + i + 1] = acc;
        }
        sigma2_[j] = scale * (acc - ring_start);
        total_variance_ += sigma2_[j];
        lo = hi;
    }
}

double RingTable::sample_kappa(int j, double u) const {
    const std::size_t base = static_cast<std::size_t>(j) * kSubNodes;
    const double target = u * cdf_[base + kSubNodes] +
                          (1.0 - u) * cdf_[base];
    std::size_t i = base;
    while (i + 1 < base + kSubNodes && cdf_[i + 1] < target) ++i;
    const double w0 = cdf_[i], w1 = cdf_[i + 1];
    const double t = w1 > w0 ? (target - w0) / (w1 - w0) : 0.5;
    return edges_[i] + t * (edges_[i + 1] - edges_[i]);
}

SparseSpectrum sample_spectrum(const RingTable& table, std::uint64_t seed,
                               AmplitudeLaw law) {
    SparseSpectrum s;
    s.ring_count = table.ring_count();
    s.rng_seed = seed;
    s.modes.resize(table.ring_count());
    Rng rng(seed);
    for (int j = 0; j < table.ring_count(); ++j) {
        // Draw order is part of the determinism contract.
        const double kappa = table.sample_kappa(j, rng.uniform());
        const double psi = rng.uniform(0.0, 2.0 * M_PI);
        const double theta = rng.uniform(0.0, 2.0 * M_PI);
        double a = std::sqrt(2.0 * table.ring_variance(j));
        if (law == AmplitudeLaw::Rayleigh) {
            const double u = rng.uniform();
            a = std::sqrt(table.ring_variance(j)) *
                std::sqrt(-2.0 * std::log(1.0 - u));
        }
        s.modes[j] = {kappa * std::cos(psi), kappa * std::sin(psi), a, theta};
    }
    return s;
}

void evaluate_screen_reference(const SparseSpectrum& s, const GridSpec& grid,
                               double shift, double* phi) {
    const int n = grid.n;
    for (int iy = 0; iy < n; ++iy) {
        const double y = grid.coord(iy);
        for (int ix = 0; ix < n; ++ix) {
            const double x = grid.coord(ix) + shift;
            double acc = 0.0;
            for (const auto& m : s.modes)
                acc += m.amplitude * std::cos(m.kx * x + m.ky * y + m.phase);
            phi[static_cast<std::size_t>(iy) * n + ix] = acc;
        }
    }
}

void evaluate_screen(const SparseSpectrum& s, const GridSpec& grid,
                     double shift, double* phi, ScreenEvalWorkspace& ws) {
    const int n = grid.n;
    const int nm = static_cast<int>(s.modes.size());
    if (ws.ar.rows() != nm || ws.ar.cols() != n) {
        ws.ar.resize(nm, n);
        ws.ai.resize(nm, n);
        ws.br.resize(nm, n);
        ws.bi.resize(nm, n);
    }
    const double x0 = grid.coord(0) + shift;
    const double y0 = grid.coord(0);
    for (int j = 0; j < nm; ++j) {
        const auto& m = s.modes[j];
        // a(x) = amp * exp(i (kx x + theta)), b(y) = exp(i ky y), advanced
        // by one fixed complex rotation per grid column.
        std::complex<double> a =
            std::polar(m.amplitude, m.kx * x0 + m.phase);
        const std::complex<double> da = std::polar(1.0, m.kx * grid.step);
        std::complex<double> b = std::polar(1.0, m.ky * y0);
        const std::complex<double> db = std::polar(1.0, m.ky * grid.step);
        for (int i = 0; i < n; ++i) {
            ws.ar(j, i) = a.real();
            ws.ai(j, i) = a.imag();
            ws.br(j, i) = b.real();
            ws.bi(j, i) = b.imag();
            a *= da;
            b *= db;
        }
    }
    // phi(ix, iy) = Re( a^T b ); column-major map matches phi[iy*n + ix].
    Eigen::Map<Eigen::MatrixXd> out(phi, n, n);
    out.noalias() = ws.ar.transpose() * ws.br;
    out.noalias() -= ws.ai.transpose() * ws.bi;
}

std::vector<double> evaluate_screen_at(
    const SparseSpectrum& s,
    const std::vector<std::pair<double, double>>& points, double shift) {
    std::vector<double> out(points.size(), 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double x = points[i].first + shift;
        const double y = points[i].second;
        double acc = 0.0;
        for (const auto& m : s.modes)
            acc += m.amplitude * std::cos(m.kx * x + m.ky * y + m.phase);
        out[i] = acc;
    }
    return out;
}

SparseScreenSet sample_screen_set(const RingTable& table,
                                  const ChannelGeometry& g,
                                  std::uint64_t realization_seed,
                                  AmplitudeLaw law) {
    g.validate();
    SparseScreenSet set;
    set.slab_thickness = g.slab_thickness();
    set.screens.reserve(g.n_screens);
    set.screen_positions.reserve(g.n_screens);
    for (int j = 0; j < g.n_screens; ++j) {
        set.screens.push_back(
            sample_spectrum(table, split_seed(realization_seed, j), law));
        set.screen_positions.push_back(set.slab_thickness * (j + 0.5));
    }
    return set;
}

}  // namespace aqc
