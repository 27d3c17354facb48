#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aqc/cv_entanglement.hpp"
#include "aqc/dv_entanglement.hpp"
#include "aqc/nonclassicality.hpp"
#include "aqc/statistics.hpp"

namespace aqc {

struct CvAnalysisConfig {
    std::vector<double> xi_values = {0.5, 1.0, 2.0};
    DeterministicLosses losses{};
};

struct DvAnalysisConfig {
    DvExperiment experiment{};
    std::vector<double> xi_grid;  // non-empty: maximize over xi (PDC)
};

struct NclAnalysisConfig {
    SqueezedCoherentState state{1.15, 0.59};
    ScanOptions options{};
    std::vector<int> detector_counts = {2, 3, 5};
};

struct PdtAnalysisConfig {
    double eta_min = 0.5;
    int bins = 100;
};

// Resolved run configuration; strict JSON schema, unknown keys rejected.
struct RunConfig {
    SimulationConfig sim{};
    std::string output_dir = ".";
    std::optional<PdtAnalysisConfig> pdt;
    std::optional<CvAnalysisConfig> cv;
    std::optional<DvAnalysisConfig> dv;
    std::optional<NclAnalysisConfig> nonclassicality;

    // FNV-1a hash of the canonical serialized form.
    std::string config_hash;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config_json(const std::string& text);
std::string serialize_config(const RunConfig& cfg);

extern const char* const kCodeVersion;

}  // namespace aqc
