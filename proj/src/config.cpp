#include "aqc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace aqc {

const char* const kCodeVersion = "1.0.0";

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument("config: " + msg);
}

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            fail("unknown key '" + it.key() + "' in " + where);
}

double num(const json& obj, const std::string& key) {
    if (!obj.contains(key)) fail("missing key '" + key + "'");
    if (!obj[key].is_number()) fail("key '" + key + "' must be a number");
    return obj[key].get<double>();
}

double num_or(const json& obj, const std::string& key, double dflt) {
    return obj.contains(key) ? num(obj, key) : dflt;
}

TurbulenceParams parse_turbulence(const json& j) {
    check_keys(j, "turbulence", {"cn2", "l0", "L0", "kmin", "kmax"});
    return TurbulenceParams::make(num(j, "cn2"), num(j, "l0"), num(j, "L0"),
                                  num_or(j, "kmin", -1.0),
                                  num_or(j, "kmax", -1.0));
}

ChannelGeometry parse_geometry(const json& j) {
    check_keys(j, "geometry",
               {"wavelength", "z_ap", "n_screens", "grid_n", "grid_step",
                "aperture_radius"});
    ChannelGeometry g;
    g.wavelength = num(j, "wavelength");
    g.z_ap = num(j, "z_ap");
    g.n_screens = static_cast<int>(num(j, "n_screens"));
    g.grid_n = static_cast<int>(num(j, "grid_n"));
    g.grid_step = num(j, "grid_step");
    g.aperture_radius = num(j, "aperture_radius");
    g.validate();
    return g;
}

BeamParams parse_beam(const json& j) {
    check_keys(j, "beam", {"waist", "focal_range"});
    BeamParams b;
    b.waist = num(j, "waist");
    if (j.contains("focal_range") && j["focal_range"].is_string()) {
        if (j["focal_range"] != "inf") fail("focal_range: number or \"inf\"");
        b.focal_range = std::numeric_limits<double>::infinity();
    } else {
        b.focal_range = num(j, "focal_range");
    }
    return b;
}

DeterministicLosses parse_losses(const json& j) {
    check_keys(j, "losses",
               {"atmospheric_db_per_km", "channel_length_km", "optics_db",
                "memory_write_db", "memory_read_db"});
    DeterministicLosses l;
    l.atmospheric_db_per_km = num_or(j, "atmospheric_db_per_km", 0.1);
    l.channel_length_km = num_or(j, "channel_length_km", 0.0);
    l.optics_db = num_or(j, "optics_db", 0.0);
    l.memory_write_db = num_or(j, "memory_write_db", 0.0);
    l.memory_read_db = num_or(j, "memory_read_db", 0.0);
    return l;
}

DvExperiment parse_dv_experiment(const json& j) {
    check_keys(j, "dv",
               {"source", "xi", "xi_grid", "angles", "noise_mean",
                "deterministic_db", "splitter_db", "memory_decay_db_per_ms",
                "wind_v", "memory_on_early_arm", "fock_cutoff"});
    DvExperiment e;
    if (j.contains("source")) {
        const std::string s = j["source"].get<std::string>();
        if (s == "bell")
            e.source = DvSource::Bell;
        else if (s == "pdc")
            e.source = DvSource::Pdc;
        else
            fail("dv.source must be 'bell' or 'pdc'");
    }
    e.xi = num_or(j, "xi", e.xi);
    if (j.contains("angles")) {
        const auto a = j["angles"].get<std::vector<double>>();
        if (a.size() != 4) fail("dv.angles must have 4 entries");
        e.angle_a = a[0];
        e.angle_a_prime = a[1];
        e.angle_b = a[2];
        e.angle_b_prime = a[3];
    }
    e.noise_mean = num_or(j, "noise_mean", e.noise_mean);
    e.deterministic_db = num_or(j, "deterministic_db", e.deterministic_db);
    e.splitter_db = num_or(j, "splitter_db", e.splitter_db);
    e.memory_decay_db_per_ms =
        num_or(j, "memory_decay_db_per_ms", e.memory_decay_db_per_ms);
    e.wind_v = num_or(j, "wind_v", e.wind_v);
    if (j.contains("memory_on_early_arm"))
        e.memory_on_early_arm = j["memory_on_early_arm"].get<bool>();
    e.fock_cutoff = static_cast<int>(num_or(j, "fock_cutoff", e.fock_cutoff));
    return e;
}

std::string fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

RunConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(std::string("invalid JSON: ") + e.what());
    }
    check_keys(j, "top level",
               {"turbulence", "geometry", "beam", "shifts", "n_samples",
                "master_seed", "ring_count", "amplitude_law", "output_dir",
                "n_threads", "analysis"});

    RunConfig cfg;
    if (!j.contains("turbulence")) fail("missing 'turbulence' block");
    if (!j.contains("geometry")) fail("missing 'geometry' block");
    if (!j.contains("beam")) fail("missing 'beam' block");
    cfg.sim.turbulence = parse_turbulence(j["turbulence"]);
    cfg.sim.geometry = parse_geometry(j["geometry"]);
    cfg.sim.beam = parse_beam(j["beam"]);
    if (!j.contains("shifts")) fail("missing 'shifts'");
    cfg.sim.shifts = j["shifts"].get<std::vector<double>>();
    cfg.sim.n_samples = static_cast<std::size_t>(num(j, "n_samples"));
    cfg.sim.master_seed =
        static_cast<std::uint64_t>(num_or(j, "master_seed", 1.0));
    cfg.sim.ring_count = static_cast<int>(num_or(j, "ring_count", 1024));
    if (j.contains("amplitude_law")) {
        const std::string law = j["amplitude_law"].get<std::string>();
        if (law == "deterministic")
            cfg.sim.amplitude_law = AmplitudeLaw::Deterministic;
        else if (law == "rayleigh")
            cfg.sim.amplitude_law = AmplitudeLaw::Rayleigh;
        else
            fail("amplitude_law must be 'deterministic' or 'rayleigh'");
    }
    cfg.sim.n_threads = static_cast<int>(num_or(j, "n_threads", 0.0));
    if (j.contains("output_dir"))
        cfg.output_dir = j["output_dir"].get<std::string>();
    cfg.sim.validate();

    if (j.contains("analysis")) {
        const json& a = j["analysis"];
        check_keys(a, "analysis", {"pdt", "cv", "dv", "nonclassicality"});
        if (a.contains("pdt")) {
            check_keys(a["pdt"], "pdt", {"eta_min", "bins"});
            PdtAnalysisConfig p;
            p.eta_min = num_or(a["pdt"], "eta_min", p.eta_min);
            p.bins = static_cast<int>(num_or(a["pdt"], "bins", p.bins));
            cfg.pdt = p;
        }
        if (a.contains("cv")) {
            check_keys(a["cv"], "cv", {"xi_values", "losses"});
            CvAnalysisConfig c;
            if (a["cv"].contains("xi_values"))
                c.xi_values = a["cv"]["xi_values"].get<std::vector<double>>();
            if (a["cv"].contains("losses"))
                c.losses = parse_losses(a["cv"]["losses"]);
            cfg.cv = c;
        }
        if (a.contains("dv")) {
            DvAnalysisConfig d;
            d.experiment = parse_dv_experiment(a["dv"]);
            if (a["dv"].contains("xi_grid"))
                d.xi_grid = a["dv"]["xi_grid"].get<std::vector<double>>();
            cfg.dv = d;
        }
        if (a.contains("nonclassicality")) {
            const json& n = a["nonclassicality"];
            check_keys(n, "nonclassicality",
                       {"alpha0", "xi", "eta_min", "t_det_db",
                        "detector_counts", "cutoff", "ci_events",
                        "ci_resamples", "ci_seed"});
            NclAnalysisConfig nc;
            nc.state.alpha0 = num_or(n, "alpha0", nc.state.alpha0);
            nc.state.xi = num_or(n, "xi", nc.state.xi);
            nc.options.eta_min = num_or(n, "eta_min", nc.options.eta_min);
            nc.options.t_det =
                std::pow(10.0, -num_or(n, "t_det_db", 0.0) / 10.0);
            if (n.contains("detector_counts"))
                nc.detector_counts =
                    n["detector_counts"].get<std::vector<int>>();
            nc.options.cutoff =
                static_cast<int>(num_or(n, "cutoff", nc.options.cutoff));
            nc.options.ci_events = static_cast<std::size_t>(
                num_or(n, "ci_events",
                       static_cast<double>(nc.options.ci_events)));
            nc.options.ci_resamples = static_cast<int>(
                num_or(n, "ci_resamples", nc.options.ci_resamples));
            nc.options.ci_seed = static_cast<std::uint64_t>(
                num_or(n, "ci_seed",
                       static_cast<double>(nc.options.ci_seed)));
            cfg.nonclassicality = nc;
        }
    }
    cfg.config_hash = fnv1a(serialize_config(cfg));
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail("cannot open config file: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_json(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
    json j;
    j["turbulence"] = {{"cn2", cfg.sim.turbulence.cn2},
                       {"l0", cfg.sim.turbulence.l0},
                       {"L0", cfg.sim.turbulence.L0},
                       {"kmin", cfg.sim.turbulence.kmin},
                       {"kmax", cfg.sim.turbulence.kmax}};
    j["geometry"] = {{"wavelength", cfg.sim.geometry.wavelength},
                     {"z_ap", cfg.sim.geometry.z_ap},
                     {"n_screens", cfg.sim.geometry.n_screens},
                     {"grid_n", cfg.sim.geometry.grid_n},
                     {"grid_step", cfg.sim.geometry.grid_step},
                     {"aperture_radius", cfg.sim.geometry.aperture_radius}};
    if (std::isinf(cfg.sim.beam.focal_range))
        j["beam"] = {{"waist", cfg.sim.beam.waist}, {"focal_range", "inf"}};
    else
        j["beam"] = {{"waist", cfg.sim.beam.waist},
                     {"focal_range", cfg.sim.beam.focal_range}};
    j["shifts"] = cfg.sim.shifts;
    j["n_samples"] = cfg.sim.n_samples;
    j["master_seed"] = cfg.sim.master_seed;
    j["ring_count"] = cfg.sim.ring_count;
    j["amplitude_law"] =
        cfg.sim.amplitude_law == AmplitudeLaw::Deterministic ? "deterministic"
                                                             : "rayleigh";
    j["output_dir"] = cfg.output_dir;
    json a = json::object();
    if (cfg.pdt)
        a["pdt"] = {{"eta_min", cfg.pdt->eta_min}, {"bins", cfg.pdt->bins}};
    if (cfg.cv)
        a["cv"] = {
            {"xi_values", cfg.cv->xi_values},
            {"losses",
             {{"atmospheric_db_per_km", cfg.cv->losses.atmospheric_db_per_km},
              {"channel_length_km", cfg.cv->losses.channel_length_km},
              {"optics_db", cfg.cv->losses.optics_db},
              {"memory_write_db", cfg.cv->losses.memory_write_db},
              {"memory_read_db", cfg.cv->losses.memory_read_db}}}};
    if (cfg.dv) {
        const DvExperiment& e = cfg.dv->experiment;
        a["dv"] = {{"source", e.source == DvSource::Bell ? "bell" : "pdc"},
                   {"xi", e.xi},
                   {"angles",
                    {e.angle_a, e.angle_a_prime, e.angle_b, e.angle_b_prime}},
                   {"noise_mean", e.noise_mean},
                   {"deterministic_db", e.deterministic_db},
                   {"splitter_db", e.splitter_db},
                   {"memory_decay_db_per_ms", e.memory_decay_db_per_ms},
                   {"wind_v", e.wind_v},
                   {"memory_on_early_arm", e.memory_on_early_arm},
                   {"fock_cutoff", e.fock_cutoff}};
        if (!cfg.dv->xi_grid.empty()) a["dv"]["xi_grid"] = cfg.dv->xi_grid;
    }
    if (cfg.nonclassicality) {
        const auto& n = *cfg.nonclassicality;
        a["nonclassicality"] = {
            {"alpha0", n.state.alpha0},
            {"xi", n.state.xi},
            {"eta_min", n.options.eta_min},
            {"t_det_db", -10.0 * std::log10(n.options.t_det)},
            {"detector_counts", n.detector_counts},
            {"cutoff", n.options.cutoff},
            {"ci_events", n.options.ci_events},
            {"ci_resamples", n.options.ci_resamples},
            {"ci_seed", n.options.ci_seed}};
    }
    if (!a.empty()) j["analysis"] = a;
    return j.dump(2);
}

}  // namespace aqc
