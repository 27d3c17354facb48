// Command-line front end: simulate / analyze / selfcheck.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "aqc/config.hpp"
#include "aqc/cv_entanglement.hpp"
#include "aqc/dv_entanglement.hpp"
#include "aqc/errors.hpp"
#include "aqc/io.hpp"
#include "aqc/lp.hpp"
#include "aqc/nonclassicality.hpp"
#include "aqc/phase_screens.hpp"
#include "aqc/propagation.hpp"
#include "aqc/quadrature.hpp"
#include "aqc/rng.hpp"
#include "aqc/statistics.hpp"
#include "aqc/turbulence.hpp"

namespace fs = std::filesystem;
using namespace aqc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumericalGuard = 3;
constexpr int kExitSelfcheck = 4;

std::string output_root() {
    const char* env = std::getenv("AQC_OUTPUT_ROOT");
    return env ? env : ".";
}

std::vector<std::pair<std::string, std::string>> stamp_meta(
    const RunConfig& cfg) {
    return {{"config_hash", cfg.config_hash}, {"code_version", kCodeVersion}};
}

void stamp_samples(SampleSet& s, const RunConfig& cfg) {
    for (auto& kv : stamp_meta(cfg)) s.meta.push_back(kv);
}

double meta_double(const SampleSet& s, const std::string& key, double dflt) {
    for (const auto& [k, v] : s.meta)
        if (k == key) return std::strtod(v.c_str(), nullptr);
    return dflt;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(RunConfig cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    {
        std::ofstream os(dir / "resolved_config.json");
        os << serialize_config(cfg) << "\n";
    }

    // Checkpointed run: grow the sample set in chunks, rewriting the
    // partial CSV after each chunk so a killed run resumes losslessly.
    const fs::path partial = dir / "samples.partial.csv";
    SampleSet acc;
    bool have_partial = false;
    if (fs::exists(partial)) {
        try {
            acc = load_samples_csv(partial.string());
            have_partial = true;
            std::fprintf(stderr, "resuming from %zu checkpointed records\n",
                         acc.records.size());
        } catch (const std::exception& e) {
            std::fprintf(stderr, "ignoring unreadable checkpoint: %s\n",
                         e.what());
        }
    }

    const std::size_t total = cfg.sim.n_samples;
    const std::size_t chunk = std::max<std::size_t>(1, total / 20);
    SimulationConfig sim = cfg.sim;
    std::size_t done = 0;
    const std::size_t first_end = std::min(
        total, std::max(chunk, have_partial ? acc.records.size() : 0));
    for (std::size_t end = first_end; done < total;
         end = std::min(end + chunk, total)) {
        sim.n_samples = end;
        acc = run_monte_carlo(sim, have_partial ? &acc : nullptr);
        have_partial = true;
        done = end;
        stamp_samples(acc, cfg);
        save_samples_csv(acc, partial.string());
        std::fprintf(stderr, "progress: %zu / %zu realizations\n", done,
                     total);
        if (end == total) break;
    }

    save_samples_csv(acc, (dir / "samples.csv").string());
    save_samples_binary(acc, (dir / "samples.bin").string());
    fs::remove(partial);
    const Exceedance exc = exceedance(acc, 0.1);
    std::fprintf(stderr, "done: %zu records, F(0.1) = %.4f +/- %.4f\n",
                 acc.records.size(), exc.value, exc.std_error);
    return kExitOk;
}

// ----------------------------------------------------------------- analyze

// Per-shift Pearson correlation with batch-means standard errors.
struct PearsonCurve {
    std::vector<double> shifts, r, se;
};

PearsonCurve pearson_with_errors(const SampleSet& s, int n_batches = 20) {
    PearsonCurve c;
    c.shifts = s.shifts;
    const std::size_t n = s.records.size();
    n_batches = static_cast<int>(
        std::min<std::size_t>(n_batches, std::max<std::size_t>(n / 2, 1)));
    for (double shift : s.shifts) {
        const MomentsRow full = moments(s, shift);
        std::vector<double> batch_r;
        for (int b = 0; b < n_batches; ++b) {
            SampleSet sub;
            sub.shifts = s.shifts;
            const std::size_t lo = n * b / n_batches,
                              hi = n * (b + 1) / n_batches;
            for (std::size_t i = lo; i < hi; ++i)
                sub.records.push_back(s.records[i]);
            if (sub.records.size() < 3) continue;
            const MomentsRow m = moments(sub, shift);
            if (!m.pearson_degenerate) batch_r.push_back(m.pearson);
        }
        double se = 0.0;
        if (batch_r.size() > 1) {
            double mean = 0.0;
            for (double v : batch_r) mean += v;
            mean /= static_cast<double>(batch_r.size());
            double ss = 0.0;
            for (double v : batch_r) ss += (v - mean) * (v - mean);
            se = std::sqrt(ss / (static_cast<double>(batch_r.size()) - 1.0) /
                           static_cast<double>(batch_r.size()));
        }
        c.r.push_back(full.pearson);
        c.se.push_back(se);
    }
    return c;
}

// 1/e crossing with an error bar from the local slope.
struct Rho0 {
    double value = 0.0, se = 0.0;
    bool found = false;
};

Rho0 rho0_with_error(const PearsonCurve& c) {
    Rho0 out;
    const double level = std::exp(-1.0);
    for (std::size_t i = 1; i < c.shifts.size(); ++i) {
        if (c.r[i - 1] >= level && c.r[i] < level) {
            const double slope =
                (c.r[i] - c.r[i - 1]) / (c.shifts[i] - c.shifts[i - 1]);
            const double f = (c.r[i - 1] - level) / (c.r[i - 1] - c.r[i]);
            out.value = c.shifts[i - 1] + f * (c.shifts[i] - c.shifts[i - 1]);
            const double se_r = (1.0 - f) * c.se[i - 1] + f * c.se[i];
            out.se = std::abs(slope) > 0.0 ? se_r / std::abs(slope) : 0.0;
            out.found = true;
            return out;
        }
    }
    return out;
}

int cmd_analyze(const RunConfig& cfg, const std::vector<std::string>& samples,
                const std::string& out_dir) {
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    const auto meta = stamp_meta(cfg);

    std::vector<SampleSet> sets;
    for (const auto& path : samples) {
        sets.push_back(path.size() > 4 &&
                               path.substr(path.size() - 4) == ".bin"
                           ? load_samples_binary(path)
                           : load_samples_csv(path));
    }
    const SampleSet& s0 = sets.front();

    // Always-on summary tables.
    {
        std::vector<std::vector<double>> rows;
        for (const MomentsRow& m : moments_table(s0))
            rows.push_back({m.shift, m.mean0, m.se_mean0, m.mean_s,
                            m.se_mean_s, m.cross, m.se_cross, m.m2, m.var,
                            m.pearson, static_cast<double>(m.n)});
        save_table_csv((dir / "moments.csv").string(),
                       {"shift_m", "mean0", "se_mean0", "mean_s", "se_mean_s",
                        "cross", "se_cross", "m2", "var", "pearson", "n"},
                       rows, meta);
    }
    {
        std::vector<std::vector<double>> rows;
        for (double eta_min : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8}) {
            const Exceedance e = exceedance(s0, eta_min);
            rows.push_back({eta_min, e.value, e.std_error,
                            static_cast<double>(e.survivors)});
        }
        save_table_csv((dir / "exceedance.csv").string(),
                       {"eta_min", "exceedance", "std_error", "survivors"},
                       rows, meta);
    }

    if (cfg.pdt) {
        std::vector<std::vector<double>> rows;
        for (double shift : s0.shifts) {
            const Histogram h =
                conditional_pdt(s0, cfg.pdt->eta_min, shift, cfg.pdt->bins);
            for (std::size_t b = 0; b + 1 < h.edges.size(); ++b)
                rows.push_back(
                    {shift, h.edges[b], h.edges[b + 1], h.density[b]});
        }
        save_table_csv((dir / "fig2_conditional_pdt.csv").string(),
                       {"shift_m", "eta_lo", "eta_hi", "density"}, rows,
                       meta);
    }

    // Coherence: Pearson curve and rho0 per sample file (one per aperture).
    {
        std::vector<std::vector<double>> rows;
        for (const SampleSet& s : sets) {
            const double r_ap = meta_double(s, "aperture_radius", -1.0);
            const PearsonCurve c = pearson_with_errors(s);
            const Rho0 rho = rho0_with_error(c);
            for (std::size_t i = 0; i < c.shifts.size(); ++i)
                rows.push_back({r_ap, c.shifts[i], c.r[i], c.se[i],
                                rho.found ? rho.value : -1.0, rho.se});
        }
        save_table_csv((dir / "fig3_coherence.csv").string(),
                       {"aperture_radius_m", "shift_m", "pearson",
                        "pearson_se", "rho0_m", "rho0_se"},
                       rows, meta);
    }

    if (cfg.cv) {
        const std::vector<MomentsRow> curve = moments_table(s0);
        std::vector<std::vector<double>> rows, th_rows;
        for (double xi : cfg.cv->xi_values) {
            for (const MomentsRow& m : curve)
                rows.push_back(
                    {xi, m.shift,
                     simon_certifier(m, xi, cfg.cv->losses).certifier});
            const ThresholdResult t =
                threshold_shift(curve, xi, cfg.cv->losses);
            th_rows.push_back({xi, static_cast<double>(t.status), t.s_th,
                               t.w_min, t.w_max});
        }
        save_table_csv((dir / "fig4_gaussian.csv").string(), {"xi", "s", "W"},
                       rows, meta);
        save_table_csv((dir / "fig4_thresholds.csv").string(),
                       {"xi", "status", "s_th", "w_min", "w_max"}, th_rows,
                       meta);
    }

    if (cfg.dv) {
        std::vector<std::vector<double>> rows;
        for (double shift : s0.shifts) {
            if (cfg.dv->xi_grid.empty()) {
                const ChshEstimate e =
                    chsh_parameter(cfg.dv->experiment, s0, shift);
                rows.push_back({shift, e.value, e.std_error,
                                cfg.dv->experiment.xi, 0.0});
            } else {
                const ChshMaxResult r = chsh_max_over_xi(
                    cfg.dv->experiment, s0, shift, cfg.dv->xi_grid);
                rows.push_back({shift, r.b_max, r.std_error, r.xi_star,
                                r.at_grid_edge ? 1.0 : 0.0});
            }
        }
        save_table_csv((dir / "fig5_bell.csv").string(),
                       {"shift_m", "B", "B_se", "xi", "at_grid_edge"}, rows,
                       meta);
    }

    if (cfg.nonclassicality) {
        const auto& nc = *cfg.nonclassicality;
        const std::vector<ScanRow> scan = selection_scan(
            nc.state, s0, s0.shifts, nc.detector_counts, nc.options);
        std::vector<std::vector<double>> rows;
        for (const ScanRow& row : scan)
            for (const ScanCell& cell : row.cells)
                rows.push_back({row.shift,
                                static_cast<double>(cell.n_detectors),
                                row.mandel, row.mandel_lo, row.mandel_hi,
                                cell.q_binomial, cell.q_binomial_lo,
                                cell.q_binomial_hi, cell.violation,
                                cell.violation_lo, cell.violation_hi});
        save_table_csv((dir / "fig6_nonclassicality.csv").string(),
                       {"shift_m", "n_detectors", "mandel", "mandel_lo",
                        "mandel_hi", "q_binomial", "q_lo", "q_hi",
                        "violation", "violation_lo", "violation_hi"},
                       rows, meta);
    }
    return kExitOk;
}

// --------------------------------------------------------------- selfcheck

struct OracleReport {
    bool all_pass = true;
    void line(const std::string& name, double err, double tol) {
        const bool ok = err <= tol;
        all_pass = all_pass && ok;
        std::printf("oracle %-34s %-4s  err=%.3e  tol=%.1e\n", name.c_str(),
                    ok ? "pass" : "FAIL", err, tol);
    }
};

int cmd_selfcheck() {
    OracleReport rep;

    // Scintillation-strength diagnostic against frozen reference values.
    {
        const ChannelGeometry g{808e-9, 50e3, 15, 2048, 1e-3, 0.3};
        const double expect[] = {5.5, 11.0, 16.5};
        double worst = 0.0;
        for (int i = 0; i < 3; ++i) {
            const auto p =
                TurbulenceParams::make((i + 1) * 1e-16, 1e-3, 80.0);
            worst = std::max(
                worst,
                std::abs(rytov_variance(p, g) / expect[i] - 1.0));
        }
        rep.line("rytov-reference-values", worst, 0.05);
    }

    // Vacuum Gaussian optics: numerical split-step vs analytic beam law.
    {
        const ChannelGeometry g{808e-9, 10e3, 1, 256, 4e-3, 0.2};
        const BeamParams beam{0.04, std::numeric_limits<double>::infinity()};
        ComplexField f = init_gaussian_beam(beam, g);
        Fft2D fft(g.grid_n);
        vacuum_propagate(f, g.z_ap, g.wavenumber(), fft);
        double p = 0.0, r2w = 0.0;
        const GridSpec grid = f.grid();
        for (int iy = 0; iy < g.grid_n; ++iy)
            for (int ix = 0; ix < g.grid_n; ++ix) {
                const double w =
                    std::norm(f.values[iy * g.grid_n + ix]);
                const double x = grid.coord(ix), y = grid.coord(iy);
                p += w;
                r2w += (x * x + y * y) * w;
            }
        const double w_num = std::sqrt(2.0 * r2w / p);
        const double w_ana =
            gaussian_spot_radius(beam, g.z_ap, g.wavenumber());
        rep.line("vacuum-spot-radius", std::abs(w_num / w_ana - 1.0), 0.01);

        const double eta = aperture_transmittance(f, g.aperture_radius);
        const double eta_ana =
            1.0 - std::exp(-2.0 * g.aperture_radius * g.aperture_radius /
                           (w_ana * w_ana));
        rep.line("vacuum-aperture-transmittance",
                 std::abs(eta / eta_ana - 1.0), 0.01);
    }

    // Spectral-table phase variance against a frozen quadrature value.
    // Catches any drift in the spectrum constants or the ring integrator.
    {
        const auto p = TurbulenceParams::make(2e-15, 1e-3, 80.0);
        const ChannelGeometry g{808e-9, 10e3, 5, 512, 1e-3, 0.2};
        const RingTable table(p, g.wavenumber(), g.slab_thickness(), 256);
        const double frozen = 2088.902442296594;
        rep.line("ring-table-phase-variance",
                 std::abs(table.total_variance() / frozen - 1.0), 1e-9);
    }

    // Ensemble structure function of sampled screens vs direct quadrature.
    {
        const auto p = TurbulenceParams::make(2e-15, 1e-3, 80.0);
        const ChannelGeometry g{808e-9, 10e3, 5, 512, 1e-3, 0.2};
        const double k = g.wavenumber(), zs = g.slab_thickness();
        const RingTable table(p, g.wavenumber(), g.slab_thickness(), 256);
        const double dr = 0.02;
        double mc = 0.0;
        const int n_screens = 200, n_probe = 64;
        Rng rng(424242);
        std::size_t cnt = 0;
        for (int sc = 0; sc < n_screens; ++sc) {
            const SparseSpectrum spec =
                sample_spectrum(table, split_seed(99, sc));
            std::vector<std::pair<double, double>> pts;
            for (int q = 0; q < n_probe; ++q) {
                const double x = rng.uniform(-0.2, 0.2),
                             y = rng.uniform(-0.2, 0.2);
                const double ang = rng.uniform(0.0, 2.0 * M_PI);
                pts.push_back({x, y});
                pts.push_back(
                    {x + dr * std::cos(ang), y + dr * std::sin(ang)});
            }
            const std::vector<double> phi =
                evaluate_screen_at(spec, pts, 0.0);
            for (int q = 0; q < n_probe; ++q) {
                const double d = phi[2 * q] - phi[2 * q + 1];
                mc += d * d;
                ++cnt;
            }
        }
        mc /= static_cast<double>(cnt);
        // Log substitution keeps the adaptive tolerance meaningful for the
        // strongly peaked integrand.
        const auto f = [&](double u) {
            const double kap = std::exp(u);
            return kap * kap * phase_psd(kap, p) *
                   (1.0 - std::cyl_bessel_j(0, kap * dr));
        };
        const double rough = simpson_fixed(f, std::log(p.kmin),
                                           std::log(p.kmax), 4096);
        const double oracle =
            4.0 * M_PI * k * k * zs *
            integrate(f, std::log(p.kmin), std::log(p.kmax), 1e-12 * rough);
        const double frozen_d = 0.14957224969715724;
        rep.line("structure-function-quadrature",
                 std::abs(oracle / frozen_d - 1.0), 1e-9);
        rep.line("screen-structure-function", std::abs(mc / oracle - 1.0),
                 0.10);
    }

    // Click-detector POVM identities.
    {
        const Eigen::MatrixXd pov = click_povm_fock(4, 80);
        double worst = 0.0;
        for (int m = 0; m <= 80; ++m)
            worst = std::max(worst, std::abs(pov.col(m).sum() - 1.0));
        rep.line("povm-column-normalization", worst, 1e-12);

        const double a2 = 2.7;
        std::vector<double> pn(161);
        for (int n = 0; n <= 160; ++n)
            pn[n] = std::exp(-a2 + n * std::log(a2) - std::lgamma(n + 1.0));
        const std::vector<double> via_fock = click_distribution(pn, 4);
        const std::vector<double> closed =
            coherent_click_distribution(a2, 4);
        double err = 0.0;
        for (int n = 0; n <= 4; ++n)
            err = std::max(err, std::abs(via_fock[n] - closed[n]));
        rep.line("coherent-click-closed-form", err, 1e-9);
    }

    // Linear-programming kernel sanity on a known optimum.
    {
        Eigen::MatrixXd A(3, 2);
        A << 1, 0, 0, 1, 1, 1;
        Eigen::VectorXd b(3);
        b << 1, 2, 2.5;
        Eigen::VectorXd c(2);
        c << 1, 1;
        const LpResult r = simplex_maximize(A, b, c);
        rep.line("lp-known-optimum",
                 r.bounded ? std::abs(r.value - 2.5) : 1.0, 1e-9);
    }

    std::printf("selfcheck: %s\n", rep.all_pass ? "all oracles passed"
                                                : "FAILURES detected");
    return rep.all_pass ? kExitOk : kExitSelfcheck;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Atmospheric quantum-channel simulator"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir;
    int threads = -1;
    long long seed = -1;
    std::vector<std::string> sample_paths;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--preset", preset,
                        "named preset (presets/<name>.json) or path");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "worker thread count");
        sub->add_option("--seed", seed, "master seed override");
    };

    CLI::App* sim = app.add_subcommand("simulate", "run the Monte Carlo");
    add_common(sim);
    CLI::App* ana = app.add_subcommand("analyze", "emit figure tables");
    add_common(ana);
    ana->add_option("--samples", sample_paths, "sample file(s), CSV or .bin")
        ->required();
    CLI::App* chk = app.add_subcommand("selfcheck", "run the oracle suite");
    (void)chk;

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("selfcheck")) return cmd_selfcheck();

        std::string path = config_path;
        if (path.empty() && !preset.empty())
            path = fs::exists(preset)
                       ? preset
                       : (fs::path("presets") / (preset + ".json")).string();
        if (path.empty()) {
            std::fprintf(stderr, "error: --config or --preset required\n");
            return kExitConfig;
        }
        RunConfig cfg;
        try {
            cfg = load_config(path);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "config error: %s\n", e.what());
            return kExitConfig;
        }
        if (threads >= 0) cfg.sim.n_threads = threads;
        if (seed >= 0)
            cfg.sim.master_seed = static_cast<std::uint64_t>(seed);
        std::string dir = !out_dir.empty()
                              ? out_dir
                              : (fs::path(output_root()) /
                                 (cfg.output_dir.empty() ? "."
                                                         : cfg.output_dir))
                                    .string();

        if (app.got_subcommand("simulate")) return cmd_simulate(cfg, dir);
        return cmd_analyze(cfg, sample_paths, dir);
    } catch (const cutoff_error& e) {
        std::fprintf(stderr, "numerical guard: %s\n", e.what());
        return kExitNumericalGuard;
    } catch (const empty_selection_error& e) {
        std::fprintf(stderr, "numerical guard: %s\n", e.what());
        return kExitNumericalGuard;
    } catch (const undefined_statistic_error& e) {
        std::fprintf(stderr, "numerical guard: %s\n", e.what());
        return kExitNumericalGuard;
    } catch (const out_of_range_error& e) {
        std::fprintf(stderr, "numerical guard: %s\n", e.what());
        return kExitNumericalGuard;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
