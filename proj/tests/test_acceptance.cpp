// Acceptance suite: one line per criterion, "criterion NN PASS/FAIL ...".
// Criterion 10 (full-scale exceedance) is a long-running job documented in
// the README and reported here as SKIP; everything else runs to completion
// on a desk machine (criterion 4 dominates at tens of minutes).

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

#include "aqc/cv_entanglement.hpp"
#include "aqc/dv_entanglement.hpp"
#include "aqc/nonclassicality.hpp"
#include "aqc/phase_screens.hpp"
#include "aqc/propagation.hpp"
#include "aqc/quadrature.hpp"
#include "aqc/rng.hpp"
#include "aqc/statistics.hpp"
#include "aqc/turbulence.hpp"

using namespace aqc;

namespace {

bool g_all_ok = true;

void report(int idx, bool pass, const std::string& what) {
    if (!pass) g_all_ok = false;
    std::printf("criterion %02d %s  %s\n", idx, pass ? "PASS" : "FAIL",
                what.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

// ---------------------------------------------------------------- 1
void criterion_rytov() {
    const ChannelGeometry g{808e-9, 50e3, 1, 2, 1e-3, 0.0};
    const std::array<double, 3> cn2 = {1e-16, 2e-16, 3e-16};
    const std::array<double, 3> expect = {5.5, 11.0, 16.5};
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        const auto p = TurbulenceParams::make(cn2[i], 1e-3, 80.0);
        worst = std::max(worst,
                         std::abs(rytov_variance(p, g) / expect[i] - 1.0));
    }
    report(1, worst < 0.05,
           fmt("Rytov variance at 50 km vs 5.5/11/16.5 (worst rel err "
               "%.2e, tol 5e-2)",
               worst));
}

// ---------------------------------------------------------------- 2
double spot_radius_of(const ComplexField& f) {
    double p = 0.0, r2w = 0.0;
    const GridSpec grid = f.grid();
    for (int iy = 0; iy < f.n; ++iy)
        for (int ix = 0; ix < f.n; ++ix) {
            const double w = std::norm(f.values[iy * f.n + ix]);
            const double x = grid.coord(ix), y = grid.coord(iy);
            p += w;
            r2w += (x * x + y * y) * w;
        }
    return std::sqrt(2.0 * r2w / p);
}

void criterion_vacuum_optics() {
    const ChannelGeometry g{808e-9, 10e3, 1, 256, 4e-3, 0.2};
    const BeamParams beam{0.04, std::numeric_limits<double>::infinity()};
    Fft2D fft(g.grid_n);
    ComplexField f = init_gaussian_beam(beam, g);
    vacuum_propagate(f, g.z_ap, g.wavenumber(), fft);
    const double w_ana = gaussian_spot_radius(beam, g.z_ap, g.wavenumber());
    const double err_spot = std::abs(spot_radius_of(f) / w_ana - 1.0);
    double err_ap = 0.0;
    for (double r_ap : {0.05, 0.1, 0.2}) {
        const double closed = 1.0 - std::exp(-2.0 * r_ap * r_ap /
                                             (w_ana * w_ana));
        err_ap = std::max(err_ap,
                          std::abs(aperture_transmittance(f, r_ap) / closed -
                                   1.0));
    }
    report(2, err_spot < 0.01 && err_ap < 0.01,
           fmt("vacuum beam spot %.2e and aperture transmittance %.2e vs "
               "analytic (tol 1e-2)",
               err_spot, err_ap));
}

// ---------------------------------------------------------------- 3
double structure_oracle(const TurbulenceParams& p, double k, double zs,
                        double dr) {
    const auto f = [&](double u) {
        const double kap = std::exp(u);
        return kap * kap * phase_psd(kap, p) *
               (1.0 - std::cyl_bessel_j(0, kap * dr));
    };
    const double rough =
        simpson_fixed(f, std::log(p.kmin), std::log(p.kmax), 4096);
    return 4.0 * M_PI * k * k * zs *
           integrate(f, std::log(p.kmin), std::log(p.kmax), 1e-12 * rough);
}

void criterion_structure_function() {
    const auto turb = TurbulenceParams::make(1e-15, 1e-3, 80.0);
    const double k = 2.0 * M_PI / 808e-9;
    const double zs = 2500.0;
    const RingTable table(turb, k, zs, 256);
    Rng rng(4049);
    double worst = 0.0;
    for (double dr : {0.01, 0.1, 1.0, 8.0}) {
        double mc = 0.0;
        std::size_t cnt = 0;
        const int n_screens = 250, n_probe = 24;
        for (int sc = 0; sc < n_screens; ++sc) {
            const SparseSpectrum s =
                sample_spectrum(table, split_seed(881, sc));
            std::vector<std::pair<double, double>> pts;
            for (int q = 0; q < n_probe; ++q) {
                const double x = rng.uniform(-2.0, 2.0);
                const double y = rng.uniform(-2.0, 2.0);
                const double ang = rng.uniform(0.0, 2.0 * M_PI);
                pts.push_back({x, y});
                pts.push_back(
                    {x + dr * std::cos(ang), y + dr * std::sin(ang)});
            }
            const auto phi = evaluate_screen_at(s, pts, 0.0);
            for (int q = 0; q < n_probe; ++q) {
                const double d = phi[2 * q] - phi[2 * q + 1];
                mc += d * d;
                ++cnt;
            }
        }
        mc /= static_cast<double>(cnt);
        worst = std::max(worst,
                         std::abs(mc / structure_oracle(turb, k, zs, dr) -
                                  1.0));
    }
    report(3, worst < 0.10,
           fmt("screen ensemble structure function vs quadrature, 250 "
               "screens (worst rel err %.2e, tol 1e-1)",
               worst));
}

// ---------------------------------------------------------------- 4
struct CorrPoint {
    double pearson = 0.0;
    double se = 0.0;
};

CorrPoint pearson_with_se(const std::vector<std::array<double, 6>>& etas,
                          int j) {
    const auto pearson_of = [j](const double* e0, const double* es,
                                std::size_t n) {
        double m0 = 0.0, ms = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            m0 += e0[i];
            ms += es[i];
        }
        m0 /= static_cast<double>(n);
        ms /= static_cast<double>(n);
        double c = 0.0, v0 = 0.0, vs = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            c += (e0[i] - m0) * (es[i] - ms);
            v0 += (e0[i] - m0) * (e0[i] - m0);
            vs += (es[i] - ms) * (es[i] - ms);
        }
        return c / std::sqrt(v0 * vs);
    };

    const std::size_t n = etas.size();
    std::vector<double> e0(n), es(n);
    for (std::size_t i = 0; i < n; ++i) {
        e0[i] = etas[i][0];
        es[i] = etas[i][static_cast<std::size_t>(j)];
    }
    CorrPoint out;
    out.pearson = pearson_of(e0.data(), es.data(), n);

    const std::size_t nb = 20;
    std::vector<double> bvals;
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t lo = b * n / nb, hi = (b + 1) * n / nb;
        if (hi - lo < 3) continue;
        bvals.push_back(pearson_of(e0.data() + lo, es.data() + lo, hi - lo));
    }
    double mean = 0.0, m2 = 0.0;
    for (double v : bvals) mean += v;
    mean /= static_cast<double>(bvals.size());
    for (double v : bvals) m2 += (v - mean) * (v - mean);
    out.se = std::sqrt(m2 / (static_cast<double>(bvals.size()) *
                             static_cast<double>(bvals.size() - 1)));
    return out;
}

void criterion_correlation_decay() {
    const auto turb = TurbulenceParams::make(1e-15, 1e-3, 80.0);
    const ChannelGeometry g{808e-9, 10e3, 4, 512, 2.1e-3, 0.2};
    const BeamParams beam{0.012, std::numeric_limits<double>::infinity()};
    const std::array<double, 6> shifts = {0.0,  0.005, 0.01,
                                          0.02, 0.04,  0.08};
    const std::array<double, 3> radii = {0.05, 0.10, 0.20};
    const std::size_t n_samples = 2000;
    const std::uint64_t master = 20260823;
    const RingTable table(turb, g.wavenumber(), g.slab_thickness(), 128);

    // One propagation per (realization, shift); all three apertures read
    // off the same field.
    std::array<std::vector<std::array<double, 6>>, 3> etas;
    for (auto& v : etas) v.resize(n_samples);
    Fft2D fft(g.grid_n);
    PropagationWorkspace ws;
    for (std::size_t id = 0; id < n_samples; ++id) {
        const auto set = sample_screen_set(table, g, split_seed(master, id));
        for (std::size_t j = 0; j < shifts.size(); ++j) {
            const PropagationResult res =
                propagate_channel(set, shifts[j], g, beam, fft, ws);
            for (std::size_t r = 0; r < radii.size(); ++r)
                etas[r][id][j] = aperture_transmittance(res.field, radii[r]);
        }
        if (id % 100 == 99) {
            std::fprintf(stderr, "  [criterion 4] %zu/%zu realizations\n",
                         id + 1, n_samples);
            std::fflush(stderr);
        }
    }

    bool monotone_ok = true;
    std::array<double, 3> rho0{}, rho0_err{};
    const double level = std::exp(-1.0);
    for (std::size_t r = 0; r < radii.size(); ++r) {
        std::vector<CorrPoint> curve(shifts.size());
        curve[0] = {1.0, 0.0};  // exact at zero shift by definition
        for (std::size_t j = 1; j < shifts.size(); ++j)
            curve[j] = pearson_with_se(etas[r], static_cast<int>(j));
        for (std::size_t j = 0; j + 1 < shifts.size(); ++j) {
            const double slack =
                2.0 * std::sqrt(curve[j].se * curve[j].se +
                                curve[j + 1].se * curve[j + 1].se);
            if (curve[j + 1].pearson > curve[j].pearson + slack)
                monotone_ok = false;
        }
        rho0[r] = -1.0;
        for (std::size_t j = 1; j < shifts.size(); ++j) {
            if (curve[j].pearson > level) continue;
            const double p1 = curve[j - 1].pearson, p2 = curve[j].pearson;
            const double s1 = shifts[j - 1], s2 = shifts[j];
            const double t = (p1 - level) / (p1 - p2);
            rho0[r] = s1 + t * (s2 - s1);
            const double slope = (p1 - p2) / (s2 - s1);
            const double se_here =
                curve[j - 1].se + t * (curve[j].se - curve[j - 1].se);
            rho0_err[r] = se_here / slope;
            break;
        }
    }

    bool rho_ok = true;
    for (std::size_t r = 0; r < radii.size(); ++r)
        if (rho0[r] < 0.0) rho_ok = false;
    if (rho_ok)
        for (std::size_t r = 0; r + 1 < radii.size(); ++r)
            if (rho0[r + 1] < rho0[r] - 2.0 * (rho0_err[r] + rho0_err[r + 1]))
                rho_ok = false;

    report(4, monotone_ok && rho_ok,
           fmt("desk channel: pearson(0)=1, decay monotone within 2 sigma, "
               "rho0 = %.3f / %.3f / %.3f cm non-decreasing over apertures",
               1e2 * rho0[0], 1e2 * rho0[1], 1e2 * rho0[2]));
}

// ---------------------------------------------------------------- 5
void criterion_simon() {
    const DeterministicLosses none{0.0, 0.0, 0.0, 0.0, 0.0};
    MomentsRow unit;
    unit.mean0 = unit.mean_s = unit.cross = 1.0;
    const double sh = std::sinh(1.0), ch = std::cosh(1.0);
    const double exact_err = std::abs(
        simon_certifier(unit, 1.0, none).certifier + sh * sh * ch * ch);
    const bool exact_ok = exact_err < 1e-12;

    Rng rng(515);
    bool sign_ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
        MomentsRow m;
        const std::size_t k = 8;
        for (std::size_t i = 0; i < k; ++i) {
            const double e0 = 1e-3 + 0.999 * rng.uniform();
            const double es = 1e-3 + 0.999 * rng.uniform();
            m.mean0 += e0 / k;
            m.mean_s += es / k;
            m.cross += std::sqrt(e0 * es) / k;
        }
        DeterministicLosses l;
        l.channel_length_km = 50.0 * rng.uniform();
        l.optics_db = 5.0 * rng.uniform();
        l.memory_write_db = 2.0 * rng.uniform();
        l.memory_read_db = 2.0 * rng.uniform();
        const double xi = 0.05 + 1.5 * rng.uniform();
        const double w0 = simon_certifier(m, xi, none).certifier;
        const double wl = simon_certifier(m, xi, l).certifier;
        if (std::abs(w0) < 1e-12 || std::abs(wl) < 1e-14) continue;
        if ((w0 < 0.0) != (wl < 0.0)) sign_ok = false;
    }

    std::vector<MomentsRow> curve;
    for (int i = 0; i <= 20; ++i) {
        MomentsRow m;
        m.shift = 0.01 * i;
        m.mean0 = m.mean_s = 0.6;
        m.cross = 0.6 * std::exp(-m.shift * m.shift / (2.0 * 0.05 * 0.05));
        curve.push_back(m);
    }
    bool thr_ok = true;
    double prev = 1e9;
    for (double xi : {0.3, 0.6, 1.0}) {
        const ThresholdResult t = threshold_shift(curve, xi, none);
        if (t.status != ThresholdStatus::Crossed || t.s_th >= prev)
            thr_ok = false;
        prev = t.s_th;
    }

    report(5, exact_ok && sign_ok && thr_ok,
           fmt("Simon certifier: lossless value err %.1e, sign invariant "
               "under losses (1000 sets), threshold decreasing in xi",
               exact_err));
}

// ---------------------------------------------------------------- 6
Eigen::MatrixXd rotation_generator(int n) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int a = 0; a <= n; ++a) {
        if (a + 1 <= n) g(a + 1, a) = std::sqrt((a + 1.0) * (n - a));
        if (a - 1 >= 0) g(a - 1, a) = -std::sqrt(a * (n - a + 1.0));
    }
    return g;
}

std::array<double, 16> oracle_patterns(const DvExperiment& exp,
                                       double theta_a, double theta_b,
                                       double t_a, double t_b,
                                       double p_noise) {
    std::vector<double> w(exp.fock_cutoff + 1);
    const double th = std::tanh(exp.xi);
    for (int n = 0; n <= exp.fock_cutoff; ++n)
        w[n] = std::sqrt(n + 1.0) * std::pow(th, n) /
               std::pow(std::cosh(exp.xi), 2);

    std::array<double, 16> p{};
    for (int n = 0; n < static_cast<int>(w.size()); ++n) {
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n + 1, n + 1);
        for (int a = 0; a <= n; ++a)
            c(a, n - a) =
                w[n] * (((n - a) % 2) ? -1.0 : 1.0) / std::sqrt(n + 1.0);
        const Eigen::MatrixXd amp =
            (theta_a * rotation_generator(n)).exp() * c *
            (theta_b * rotation_generator(n)).exp().transpose();
        for (int ap = 0; ap <= n; ++ap)
            for (int bp = 0; bp <= n; ++bp) {
                const double prob = amp(ap, bp) * amp(ap, bp);
                if (prob == 0.0) continue;
                const std::array<int, 4> counts = {ap, n - ap, bp, n - bp};
                const std::array<double, 2> t_det = {t_a, t_b};
                std::array<double, 4> q{};
                for (int d = 0; d < 4; ++d)
                    q[d] = (1.0 - p_noise) *
                           std::pow(1.0 - t_det[d / 2], counts[d]);
                for (int k = 0; k < 16; ++k) {
                    double f = prob;
                    for (int d = 0; d < 4; ++d)
                        f *= (k >> d & 1) ? 1.0 - q[d] : q[d];
                    p[k] += f;
                }
            }
    }
    return p;
}

void criterion_chsh() {
    DvExperiment bell;
    bell.source = DvSource::Bell;
    bell.noise_mean = 0.0;
    bell.deterministic_db = 0.0;
    bell.splitter_db = 0.0;
    bell.memory_decay_db_per_ms = 0.0;
    SampleSet unit;
    unit.shifts = {0.0};
    for (std::size_t i = 0; i < 4; ++i)
        unit.records.push_back({i, split_seed(1, i), {1.0}, false});
    const double b_err = std::abs(chsh_parameter(bell, unit, 0.0).value -
                                  2.0 * std::sqrt(2.0));
    const bool bell_ok = b_err < 1e-10;

    Rng rng(606);
    double worst = 0.0;
    for (double xi : {0.1, 0.2, 0.3}) {
        DvExperiment exp;
        exp.source = DvSource::Pdc;
        exp.xi = xi;
        exp.fock_cutoff = 6;
        for (int trial = 0; trial < 5; ++trial) {
            const double ta = 0.05 + 0.9 * rng.uniform();
            const double tb = 0.05 + 0.9 * rng.uniform();
            const double pn = trial % 2 ? 1e-3 : 0.0;
            const double tha = M_PI * (rng.uniform() - 0.5);
            const double thb = M_PI * (rng.uniform() - 0.5);
            const auto lib = click_pattern_probabilities(
                rotate_source(exp, tha, thb), ta, tb, pn);
            const auto ref = oracle_patterns(exp, tha, thb, ta, tb, pn);
            for (int k = 0; k < 16; ++k)
                worst = std::max(worst, std::abs(lib[k] - ref[k]));
        }
    }
    const bool oracle_ok = worst < 1e-8;

    SampleSet dim;
    dim.shifts = {0.0};
    for (std::size_t i = 0; i < 4; ++i)
        dim.records.push_back({i, split_seed(2, i), {0.4}, false});
    bool mono_ok = true;
    double prev = 1e9;
    for (double noise : {0.0, 1e-4, 1e-3, 1e-2}) {
        DvExperiment exp;
        exp.noise_mean = noise;
        const double b = chsh_parameter(exp, dim, 0.0).value;
        if (b > prev + 1e-12) mono_ok = false;
        prev = b;
    }

    report(6, bell_ok && oracle_ok && mono_ok,
           fmt("CHSH: ideal Bell err %.1e, PDC vs Fock oracle %.1e (tol "
               "1e-8), noise monotone",
               b_err, worst));
}

// ---------------------------------------------------------------- 7
std::vector<double> poisson_pnd(double mean, int cutoff) {
    std::vector<double> p(cutoff + 1);
    p[0] = std::exp(-mean);
    for (int m = 1; m <= cutoff; ++m) p[m] = p[m - 1] * mean / m;
    return p;
}

void criterion_click_identities() {
    double col_err = 0.0;
    for (int nd : {2, 3, 5, 8}) {
        const Eigen::MatrixXd pi = click_povm_fock(nd, 30);
        for (int m = 0; m <= 30; ++m)
            col_err = std::max(col_err, std::abs(pi.col(m).sum() - 1.0));
    }

    double closed_err = 0.0, q_err = 0.0;
    for (int nd : {2, 5}) {
        for (double a2 : {0.3, 1.0, 4.0}) {
            const auto closed = coherent_click_distribution(a2, nd);
            const auto chained =
                click_distribution(poisson_pnd(a2, 150), nd);
            for (int n = 0; n <= nd; ++n)
                closed_err = std::max(closed_err,
                                      std::abs(closed[n] - chained[n]));
            q_err = std::max(q_err, std::abs(binomial_q(closed, nd)));
        }
    }
    q_err = std::max(q_err, std::abs(mandel_q(poisson_pnd(1.3, 120))));

    const auto p = input_pnd({1.15, 0.59}, 60);
    const double q = mandel_q(p);
    const double q10 = binomial_q(click_distribution(p, 10), 10);
    const double q1000 = binomial_q(click_distribution(p, 1000), 1000);
    const bool conv_ok = std::abs(q1000 - q) < std::abs(q10 - q);

    report(7,
           col_err < 1e-12 && closed_err < 1e-9 && q_err < 1e-10 && conv_ok,
           fmt("click identities: POVM cols %.1e, coherent closed form "
               "%.1e, coherent Q %.1e, Q_N converges to Q",
               col_err, closed_err, q_err));
}

// ---------------------------------------------------------------- 8
void criterion_witness_lp() {
    Rng rng(808);
    double worst_classical = -1e9;
    int done = 0;
    while (done < 100) {
        const int nd = std::array<int, 3>{2, 3, 5}[done % 3];
        const auto grid = witness_alpha_grid(nd);
        std::vector<double> clicks(nd + 1, 0.0);
        std::vector<double> ws(4);
        double wsum = 0.0;
        for (double& w : ws) {
            w = 0.05 + rng.uniform();
            wsum += w;
        }
        for (double w : ws) {
            const std::size_t pick = static_cast<std::size_t>(
                rng.uniform() * static_cast<double>(grid.size() - 1));
            const auto pi = coherent_click_distribution(grid[pick], nd);
            for (int n = 0; n <= nd; ++n) clicks[n] += (w / wsum) * pi[n];
        }
        worst_classical = std::max(
            worst_classical, witness_violation(clicks, nd).violation);
        ++done;
    }

    const auto p = input_pnd({1.15, 0.59}, 64);
    bool positive_ok = true;
    double min_viol = 1e9, worst_grid = 0.0;
    for (int nd : {2, 3, 5}) {
        const WitnessResult res =
            witness_violation(click_distribution(p, nd), nd);
        min_viol = std::min(min_viol, res.violation);
        if (!(res.violation > 0.0)) positive_ok = false;
        worst_grid = std::max(
            worst_grid, std::abs(res.violation_refined - res.violation));
    }

    report(8,
           worst_classical <= 1e-9 && positive_ok && worst_grid < 1e-6,
           fmt("witness LP: classical mixtures <= %.1e (tol 1e-9), "
               "squeezed-coherent violation >= %.2e, grid doubling moves "
               "it by <= %.1e (tol 1e-6)",
               worst_classical, min_viol, worst_grid));
}

// ---------------------------------------------------------------- 9
double cross_up(const std::vector<double>& s, const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i - 1] < 0.0 && v[i] >= 0.0)
            return s[i - 1] +
                   (s[i] - s[i - 1]) * (-v[i - 1]) / (v[i] - v[i - 1]);
    return -1.0;
}

double cross_down(const std::vector<double>& s, const std::vector<double>& v,
                  double lvl) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i - 1] > lvl && v[i] <= lvl)
            return s[i - 1] +
                   (s[i] - s[i - 1]) * (v[i - 1] - lvl) / (v[i - 1] - v[i]);
    return -1.0;
}

void criterion_selection_thresholds() {
    // Synthetic two-time PDT: Gaussian copula with correlation
    // exp(-s^2 / (2 sc^2)) and a logistic marginal.
    const double sc = 0.03;
    std::vector<double> shifts;
    for (int i = 0; i <= 20; ++i) shifts.push_back(0.0025 * i);
    SampleSet s;
    s.shifts = shifts;
    Rng rng(101);
    const auto gauss = [&rng]() {
        const double u1 = rng.uniform(), u2 = rng.uniform();
        return std::sqrt(-2.0 * std::log(1.0 - u1)) *
               std::cos(2.0 * M_PI * u2);
    };
    for (std::size_t i = 0; i < 4000; ++i) {
        const double z0 = gauss();
        std::vector<double> etas;
        for (double sh : shifts) {
            const double rho = std::exp(-sh * sh / (2.0 * sc * sc));
            const double zs =
                rho * z0 + std::sqrt(1.0 - rho * rho) * gauss();
            etas.push_back(1.0 / (1.0 + std::exp(-(-0.5 + 1.5 * zs))));
        }
        s.records.push_back({i, split_seed(9, i), etas, false});
    }

    ScanOptions opt;
    opt.eta_min = 0.5;
    opt.t_det = std::pow(10.0, -0.6);
    opt.cutoff = 64;
    opt.ci_events = 100000;
    opt.ci_resamples = 100;
    opt.ci_seed = 7;
    const SqueezedCoherentState state{1.15, 0.59};
    const auto rows = selection_scan(state, s, shifts, {2, 3, 5}, opt);

    // Independent moment-criterion Mandel parameter from the selected
    // transmittance moments.
    const auto pin = input_pnd(state, opt.cutoff);
    double nbar = 0.0, n2 = 0.0;
    for (std::size_t m = 0; m < pin.size(); ++m) {
        nbar += static_cast<double>(m) * pin[m];
        n2 += static_cast<double>(m) * static_cast<double>(m) * pin[m];
    }
    double mandel_err = 0.0;
    std::vector<double> md, qn3, w2, w3, w5;
    for (const auto& row : rows) {
        const std::size_t j = s.shift_index(row.shift);
        double t1 = 0.0, t2 = 0.0;
        std::size_t cnt = 0;
        for (const auto& rec : s.records) {
            if (rec.etas[0] < opt.eta_min) continue;
            const double tau = opt.t_det * rec.etas[j];
            t1 += tau;
            t2 += tau * tau;
            ++cnt;
        }
        t1 /= static_cast<double>(cnt);
        t2 /= static_cast<double>(cnt);
        const double nout = t1 * nbar;
        const double n2out = t2 * (n2 - nbar) + t1 * nbar;
        const double q_moment = (n2out - nout * nout) / nout - 1.0;
        mandel_err = std::max(mandel_err, std::abs(row.mandel - q_moment));
        md.push_back(row.mandel);
        qn3.push_back(row.cells[1].q_binomial);
        w2.push_back(row.cells[0].violation);
        w3.push_back(row.cells[1].violation);
        w5.push_back(row.cells[2].violation);
    }

    // Thresholds: Q_N loses its negative sign going up through 0; the LP
    // violation is floored at 0, so its threshold is read at a small
    // positive level above the floor.
    const double lvl = 2e-4;
    const double th_mandel = cross_up(shifts, md);
    const double th_qn3 = cross_up(shifts, qn3);
    const double th_w2 = cross_down(shifts, w2, lvl);
    const double th_w3 = cross_down(shifts, w3, lvl);
    const double th_w5 = cross_down(shifts, w5, lvl);

    const bool ok = mandel_err < 1e-8 && th_mandel > 0.0 && th_qn3 > 0.0 &&
                    th_w3 > th_qn3 && th_w2 < th_w3 && th_w3 < th_w5;
    report(9, ok,
           fmt("selection thresholds: witness(N=3)=%.4f > Q_N(N=3)=%.4f, "
               "witness grows with N, Mandel = moment criterion",
               th_w3, th_qn3));
}

}  // namespace

int main(int argc, char** argv) {
    // Optional arguments select a subset of criteria by number, e.g.
    // "test_acceptance 8 9"; no arguments runs everything.
    std::vector<int> pick;
    for (int i = 1; i < argc; ++i) pick.push_back(std::atoi(argv[i]));
    const auto wanted = [&pick](int idx) {
        return pick.empty() ||
               std::find(pick.begin(), pick.end(), idx) != pick.end();
    };
    if (wanted(1)) criterion_rytov();
    if (wanted(2)) criterion_vacuum_optics();
    if (wanted(3)) criterion_structure_function();
    if (wanted(4)) criterion_correlation_decay();
    if (wanted(5)) criterion_simon();
    if (wanted(6)) criterion_chsh();
    if (wanted(7)) criterion_click_identities();
    if (wanted(8)) criterion_witness_lp();
    if (wanted(9)) criterion_selection_thresholds();
    if (wanted(10))
        std::printf(
        "criterion 10 SKIP  full-scale exceedance: run "
        "'aqc simulate --preset paper_50km' then "
        "'aqc analyze' and check exceedance F(0.1) = 0.58 +/- 0.03; "
        "overnight job, excluded from CI (see README)\n");
    return g_all_ok ? 0 : 1;
}
