#include "aqc/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "aqc/errors.hpp"
#include "aqc/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace aqc {

void SampleSet::validate() const {
    if (shifts.empty() || shifts.front() != 0.0)
        throw std::invalid_argument("SampleSet: shifts must start at 0");
    for (std::size_t i = 1; i < shifts.size(); ++i)
        if (!(shifts[i] > shifts[i - 1]))
            throw std::invalid_argument(
                "SampleSet: shifts must be strictly increasing");
    if (records.empty())
        throw std::invalid_argument("SampleSet: no records");
    std::set<std::uint64_t> ids;
    for (const auto& r : records) {
        if (r.etas.size() != shifts.size())
            throw std::invalid_argument("SampleSet: ragged record");
        for (double e : r.etas)
            if (!(e >= 0.0 && e <= 1.0))
                throw std::invalid_argument("SampleSet: eta outside [0,1]");
        if (!ids.insert(r.realization_id).second)
            throw std::invalid_argument("SampleSet: duplicate realization id");
    }
}

std::size_t SampleSet::shift_index(double shift) const {
    for (std::size_t i = 0; i < shifts.size(); ++i)
        if (shifts[i] == shift ||
            std::abs(shifts[i] - shift) <= 1e-12 * std::max(1.0, shift))
            return i;
    throw std::invalid_argument("unknown shift value");
}

void SimulationConfig::validate() const {
    turbulence.validate();
    geometry.validate();
    if (shifts.empty() || shifts.front() != 0.0)
        throw std::invalid_argument("shifts must start at 0");
    for (std::size_t i = 1; i < shifts.size(); ++i)
        if (!(shifts[i] > shifts[i - 1]))
            throw std::invalid_argument("shifts must be strictly increasing");
    if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
    if (ring_count < 8) throw std::invalid_argument("ring_count must be >= 8");
}

namespace {

SampleRecord simulate_one(const SimulationConfig& cfg, const RingTable& table,
                          std::uint64_t id, Fft2D& fft,
                          PropagationWorkspace& ws) {
    SampleRecord rec;
    rec.realization_id = id;
    rec.seed = split_seed(cfg.master_seed, id);
    rec.etas.reserve(cfg.shifts.size());
    const SparseScreenSet screens =
        sample_screen_set(table, cfg.geometry, rec.seed, cfg.amplitude_law);
    for (double s : cfg.shifts) {
        // All shifts of one realization reuse the same stored spectra, so
        // (eta_0, eta_s) pairs are exactly co-realized.
        const PropagationResult pr =
            propagate_channel(screens, s, cfg.geometry, cfg.beam, fft, ws);
        rec.etas.push_back(
            aperture_transmittance(pr.field, cfg.geometry.aperture_radius));
        rec.flagged = rec.flagged || pr.flagged;
    }
    return rec;
}

void finish_meta(SampleSet& out, const SimulationConfig& cfg) {
    std::size_t flagged = 0;
    for (const auto& r : out.records) flagged += r.flagged ? 1 : 0;
    const auto put = [&out](const std::string& k, double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out.meta.emplace_back(k, buf);
    };
    out.meta.emplace_back("master_seed", std::to_string(cfg.master_seed));
    out.meta.emplace_back("n_samples", std::to_string(cfg.n_samples));
    out.meta.emplace_back("ring_count", std::to_string(cfg.ring_count));
    out.meta.emplace_back("n_screens", std::to_string(cfg.geometry.n_screens));
    out.meta.emplace_back("grid_n", std::to_string(cfg.geometry.grid_n));
    put("cn2", cfg.turbulence.cn2);
    put("l0", cfg.turbulence.l0);
    put("L0", cfg.turbulence.L0);
    put("wavelength", cfg.geometry.wavelength);
    put("z_ap", cfg.geometry.z_ap);
    put("grid_step", cfg.geometry.grid_step);
    put("aperture_radius", cfg.geometry.aperture_radius);
    put("beam_waist", cfg.beam.waist);
    put("beam_focal_range", cfg.beam.focal_range);
    out.meta.emplace_back("flagged_records", std::to_string(flagged));
    if (flagged * 100 > out.records.size())
        out.meta.emplace_back("warning",
                              "more than 1% of records tripped the aliasing guard");
}

}  // namespace

SampleSet run_monte_carlo(const SimulationConfig& cfg,
                          const SampleSet* resume_from,
                          const ProgressFn& progress) {
    cfg.validate();
    const RingTable table(cfg.turbulence, cfg.geometry.wavenumber(),
                          cfg.geometry.slab_thickness(), cfg.ring_count);

    SampleSet out;
    out.shifts = cfg.shifts;
    out.records.resize(cfg.n_samples);

    std::vector<std::uint64_t> todo;
    std::vector<char> have(cfg.n_samples, 0);
    if (resume_from && resume_from->shifts == cfg.shifts) {
        for (const auto& r : resume_from->records)
            if (r.realization_id < cfg.n_samples &&
                r.seed == split_seed(cfg.master_seed, r.realization_id)) {
                out.records[r.realization_id] = r;
                have[r.realization_id] = 1;
            }
    }
    for (std::uint64_t id = 0; id < cfg.n_samples; ++id)
        if (!have[id]) todo.push_back(id);

    std::size_t done = cfg.n_samples - todo.size();
#ifdef _OPENMP
    if (cfg.n_threads > 0) omp_set_num_threads(cfg.n_threads);
#endif
#pragma omp parallel
    {
        Fft2D fft(cfg.geometry.grid_n);
        PropagationWorkspace ws;
#pragma omp for schedule(dynamic)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(todo.size());
             ++i) {
            out.records[todo[i]] = simulate_one(cfg, table, todo[i], fft, ws);
            if (progress) {
#pragma omp critical
                progress(++done, cfg.n_samples);
            }
        }
    }
    finish_meta(out, cfg);
    out.validate();
    return out;
}

SampleSet run_monte_carlo_serial(const SimulationConfig& cfg) {
    cfg.validate();
    const RingTable table(cfg.turbulence, cfg.geometry.wavenumber(),
                          cfg.geometry.slab_thickness(), cfg.ring_count);
    SampleSet out;
    out.shifts = cfg.shifts;
    Fft2D fft(cfg.geometry.grid_n);
    PropagationWorkspace ws;
    for (std::uint64_t id = 0; id < cfg.n_samples; ++id)
        out.records.push_back(simulate_one(cfg, table, id, fft, ws));
    finish_meta(out, cfg);
    out.validate();
    return out;
}

namespace {

Histogram histogram_from(const std::vector<double>& values, int bins) {
    if (bins < 1) throw std::invalid_argument("bins must be >= 1");
    Histogram h;
    h.edges.resize(bins + 1);
    for (int i = 0; i <= bins; ++i)
        h.edges[i] = static_cast<double>(i) / bins;
    h.density.assign(bins, 0.0);
    for (double v : values) {
        int b = static_cast<int>(v * bins);
        if (b == bins) b = bins - 1;  // eta == 1 goes in the top bin
        h.density[b] += 1.0;
    }
    const double width = 1.0 / bins;
    const double norm = 1.0 / (static_cast<double>(values.size()) * width);
    for (double& d : h.density) d *= norm;
    return h;
}

}  // namespace

Histogram marginal_pdt(const SampleSet& s, double shift, int bins) {
    const std::size_t j = s.shift_index(shift);
    std::vector<double> vals;
    vals.reserve(s.records.size());
    for (const auto& r : s.records) vals.push_back(r.etas[j]);
    return histogram_from(vals, bins);
}

Histogram conditional_pdt(const SampleSet& s, double eta_min, double shift,
                          int bins) {
    if (!(eta_min >= 0.0 && eta_min < 1.0))
        throw std::invalid_argument("conditional_pdt: eta_min outside [0,1)");
    const std::size_t j = s.shift_index(shift);
    std::vector<double> vals;
    for (const auto& r : s.records)
        if (r.etas[0] >= eta_min) vals.push_back(r.etas[j]);
    if (vals.empty())
        throw empty_selection_error("conditional_pdt: no surviving records",
                                    0);
    return histogram_from(vals, bins);
}

Exceedance exceedance(const SampleSet& s, double eta_min) {
    Exceedance e;
    const std::size_t n = s.records.size();
    for (const auto& r : s.records)
        if (r.etas[0] >= eta_min) ++e.survivors;
    e.value = static_cast<double>(e.survivors) / static_cast<double>(n);
    e.std_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(n));
    return e;
}

MomentsRow moments(const SampleSet& s, double shift) {
    const std::size_t j = s.shift_index(shift);
    const std::size_t n = s.records.size();
    MomentsRow m;
    m.shift = s.shifts[j];
    m.n = n;

    double s0 = 0.0, ss = 0.0, sc = 0.0, s0sq = 0.0, sssq = 0.0, scsq = 0.0,
           sprod = 0.0;
    for (const auto& r : s.records) {
        const double e0 = r.etas[0], es = r.etas[j];
        const double c = std::sqrt(e0 * es);
        s0 += e0;
        ss += es;
        sc += c;
        s0sq += e0 * e0;
        sssq += es * es;
        scsq += c * c;
        sprod += e0 * es;
    }
    const double dn = static_cast<double>(n);
    m.mean0 = s0 / dn;
    m.mean_s = ss / dn;
    m.cross = sc / dn;
    m.m2 = sssq / dn;
    const double var0 = n > 1 ? (s0sq - dn * m.mean0 * m.mean0) / (dn - 1.0)
                              : 0.0;
    m.var = n > 1 ? (sssq - dn * m.mean_s * m.mean_s) / (dn - 1.0) : 0.0;
    const double varc =
        n > 1 ? (scsq - dn * m.cross * m.cross) / (dn - 1.0) : 0.0;
    m.se_mean0 = std::sqrt(std::max(0.0, var0) / dn);
    m.se_mean_s = std::sqrt(std::max(0.0, m.var) / dn);
    m.se_cross = std::sqrt(std::max(0.0, varc) / dn);

    if (j == 0) {
        m.pearson = 1.0;  // exact by definition at zero shift
    } else if (var0 <= 0.0 || m.var <= 0.0) {
        m.pearson = 0.0;
        m.pearson_degenerate = true;
    } else {
        const double cov = (sprod - dn * m.mean0 * m.mean_s) / (dn - 1.0);
        m.pearson = cov / std::sqrt(var0 * m.var);
        if (m.pearson > 1.0) m.pearson = 1.0;
        if (m.pearson < -1.0) m.pearson = -1.0;
    }
    return m;
}

std::vector<MomentsRow> moments_table(const SampleSet& s) {
    std::vector<MomentsRow> rows;
    rows.reserve(s.shifts.size());
    for (double shift : s.shifts) rows.push_back(moments(s, shift));
    return rows;
}

double coherence_radius(
    const std::vector<std::pair<double, double>>& corr_curve) {
    if (corr_curve.size() < 2 || corr_curve.front().first != 0.0 ||
        std::abs(corr_curve.front().second - 1.0) > 1e-9)
        throw std::invalid_argument(
            "coherence_radius: curve must start at (0, 1)");
    const double level = std::exp(-1.0);
    double rmin = corr_curve.front().second;
    for (std::size_t i = 1; i < corr_curve.size(); ++i) {
        const auto [s0, r0] = corr_curve[i - 1];
        const auto [s1, r1] = corr_curve[i];
        rmin = std::min(rmin, r1);
        if (r0 >= level && r1 < level)
            return s0 + (s1 - s0) * (r0 - level) / (r0 - r1);
    }
    throw out_of_range_error("coherence_radius: no crossing of 1/e", rmin);
}

}  // namespace aqc
