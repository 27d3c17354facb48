#pragma once

#include <cmath>
#include <vector>

#include "aqc/statistics.hpp"

namespace aqc {

// Deterministic (non-fluctuating) loss budget, folded into the
// transmittance moments as multiplicative factors.  Memory write/read
// losses act on the stored arm only.
struct DeterministicLosses {
    double atmospheric_db_per_km = 0.1;
    double channel_length_km = 0.0;
    double optics_db = 0.0;
    double memory_write_db = 0.0;
    double memory_read_db = 0.0;

    // Early (directly sent) arm.
    double t_early() const {
        return std::pow(10.0, -(atmospheric_db_per_km * channel_length_km +
                                optics_db) /
                                  10.0);
    }
    // Stored arm: same path losses plus the memory mapping losses.
    double t_stored() const {
        return t_early() *
               std::pow(10.0, -(memory_write_db + memory_read_db) / 10.0);
    }
};

struct SimonResult {
    double certifier = 0.0;  // W; negative witnesses Gaussian entanglement
    double bracket1 = 0.0;   // sinh^2(xi) * [first bracket]; carries the sign
    double bracket2 = 0.0;   // second bracket; positive under normal moments
};

// Simon certifier for a TMSVS distributed over two time-separated pulses,
// evaluated directly from transmittance moments.
SimonResult simon_certifier(const MomentsRow& m, double xi,
                            const DeterministicLosses& losses);

enum class ThresholdStatus {
    Crossed,             // W changes sign; s_th valid
    EntangledThroughout, // W < 0 on the whole grid
    NeverEntangled,      // W >= 0 on the whole grid
    Degenerate           // xi == 0, W identically zero
};

struct ThresholdResult {
    ThresholdStatus status = ThresholdStatus::Degenerate;
    double s_th = 0.0;
    double bracket_lo = 0.0;  // grid cell containing the crossing
    double bracket_hi = 0.0;
    double w_min = 0.0;
    double w_max = 0.0;
};

// Wind-shift threshold where W crosses zero, by bisection on the linear
// interpolation of W over the sampled shift grid.
ThresholdResult threshold_shift(const std::vector<MomentsRow>& curve,
                                double xi, const DeterministicLosses& losses);

}  // namespace aqc
