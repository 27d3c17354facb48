#include "aqc/cv_entanglement.hpp"

#include <algorithm>
#include <stdexcept>

namespace aqc {

SimonResult simon_certifier(const MomentsRow& m, double xi,
                            const DeterministicLosses& losses) {
    if (xi < 0.0)
        throw std::invalid_argument("simon_certifier: xi must be >= 0");
    const double t0 = losses.t_early();
    const double ts = losses.t_stored();
    const double e0 = t0 * m.mean0;
    const double es = ts * m.mean_s;
    const double cross = std::sqrt(t0 * ts) * m.cross;

    const double sh = std::sinh(xi), ch = std::cosh(xi);
    const double sh2 = sh * sh, ch2 = ch * ch;
    const double sh2_2xi = std::pow(std::sinh(2.0 * xi), 2);

    SimonResult r;
    r.bracket1 = sh2 * (-cross * cross * ch2 + e0 * es * sh2);
    r.bracket2 = 1.0 - 0.25 * cross * cross * sh2_2xi +
                 sh2 * (e0 + es + e0 * es * sh2);
    r.certifier = r.bracket1 * r.bracket2;
    return r;
}

ThresholdResult threshold_shift(const std::vector<MomentsRow>& curve,
                                double xi, const DeterministicLosses& losses) {
    if (curve.size() < 2)
        throw std::invalid_argument("threshold_shift: need >= 2 grid points");
    ThresholdResult res;
    if (xi == 0.0) {
        res.status = ThresholdStatus::Degenerate;
        return res;
    }

    std::vector<double> w(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i)
        w[i] = simon_certifier(curve[i], xi, losses).certifier;
    res.w_min = *std::min_element(w.begin(), w.end());
    res.w_max = *std::max_element(w.begin(), w.end());

    for (std::size_t i = 1; i < curve.size(); ++i) {
        if ((w[i - 1] < 0.0) == (w[i] < 0.0)) continue;
        double lo = curve[i - 1].shift, hi = curve[i].shift;
        res.bracket_lo = lo;
        res.bracket_hi = hi;
        const double wlo = w[i - 1], whi = w[i];
        // Bisection on the chord; converges to the linear-interpolation root.
        double a = lo, b = hi, fa = wlo;
        for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, hi); ++it) {
            const double mid = 0.5 * (a + b);
            const double fm = wlo + (whi - wlo) * (mid - lo) / (hi - lo);
            if ((fm < 0.0) == (fa < 0.0)) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        res.s_th = 0.5 * (a + b);
        res.status = ThresholdStatus::Crossed;
        return res;
    }
    res.status = res.w_max < 0.0 ? ThresholdStatus::EntangledThroughout
                                 : ThresholdStatus::NeverEntangled;
    return res;
}

}  // namespace aqc
