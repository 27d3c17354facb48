#pragma once

#include <string>
#include <vector>

#include "aqc/statistics.hpp"

namespace aqc {

// Sample persistence.  CSV: `# key=value` header block, then
// `realization_id,shift_m,eta` rows.  Binary: raw little-endian f64
// record-major eta matrix plus a JSON sidecar at <path>.json.
// Both round-trip bit-exactly.
void save_samples_csv(const SampleSet& s, const std::string& path);
SampleSet load_samples_csv(const std::string& path);

void save_samples_binary(const SampleSet& s, const std::string& path);
SampleSet load_samples_binary(const std::string& path);

// Screen / field dumps: row-major f64 LE binary plus JSON sidecar.
void save_grid_dump(const std::vector<double>& values, int grid_n,
                    double grid_step, std::uint64_t seed, double shift,
                    const std::string& path);

// Generic CSV table with a comment header block.
void save_table_csv(
    const std::string& path, const std::vector<std::string>& columns,
    const std::vector<std::vector<double>>& rows,
    const std::vector<std::pair<std::string, std::string>>& meta = {});

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace aqc
