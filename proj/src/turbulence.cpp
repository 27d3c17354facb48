#include "aqc/turbulence.hpp"

#include <cmath>

namespace aqc {

double phase_psd(double kappa, const TurbulenceParams& p) {
    if (!std::isfinite(kappa) || kappa < 0.0)
        throw std::invalid_argument("phase_psd: kappa must be finite and >= 0");
    const double km = 5.92 / p.l0;
    const double k0 = 2.0 * M_PI / p.L0;
    return 0.033 * p.cn2 * std::exp(-(kappa * kappa) / (km * km)) /
           std::pow(kappa * kappa + k0 * k0, 11.0 / 6.0);
}

double rytov_variance(const TurbulenceParams& p, const ChannelGeometry& g) {
    p.validate();
    g.validate();
    return 1.23 * p.cn2 * std::pow(g.wavenumber(), 7.0 / 6.0) *
           std::pow(g.z_ap, 11.0 / 6.0);
}

}  // namespace aqc
