#include "aqc/dv_entanglement.hpp"

#include <algorithm>
#include <stdexcept>

#include "aqc/errors.hpp"

namespace aqc {

namespace {

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
    return r;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

}  // namespace

Eigen::MatrixXd polarization_rotation(double theta, int n) {
    // h -> cos(theta) d+ - sin(theta) d-,  v -> sin(theta) d+ + cos(theta) d-
    // expanded on the symmetric subspace of total photon number n.
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n + 1, n + 1);
    const double c = std::cos(theta), s = std::sin(theta);
    for (int a = 0; a <= n; ++a) {          // h photons in
        for (int i = 0; i <= a; ++i) {      // h factors going to d+
            for (int l = 0; l + i <= n; ++l) {  // v factors going to d+
                if (l > n - a) continue;
                const int ap = i + l;       // d+ photons out
                const double coef = binomial(a, i) * binomial(n - a, l) *
                                    std::pow(c, i) *
                                    std::pow(-s, a - i) * std::pow(s, l) *
                                    std::pow(c, n - a - l);
                r(ap, a) += coef *
                            std::sqrt(factorial(ap) * factorial(n - ap) /
                                      (factorial(a) * factorial(n - a)));
            }
        }
    }
    return r;
}

RotatedSource rotate_source(const DvExperiment& exp, double theta_a,
                            double theta_b) {
    // Sector amplitudes in the h/v basis: C_n(a, b) with b = n - a,
    // value w_n (-1)^(n-a) / sqrt(n+1).
    int nmax;
    std::vector<double> w;  // sector weights w_n
    if (exp.source == DvSource::Bell) {
        nmax = 1;
        w = {0.0, 1.0};
    } else {
        if (exp.fock_cutoff < 2)
            throw std::invalid_argument("PDC needs fock_cutoff >= 2");
        nmax = exp.fock_cutoff;
        w.resize(nmax + 1);
        const double th = std::tanh(exp.xi);
        const double norm0 = 1.0 / std::pow(std::cosh(exp.xi), 2);
        double norm = 0.0;
        for (int n = 0; n <= nmax; ++n) {
            w[n] = norm0 * std::sqrt(n + 1.0) * std::pow(th, n);
            norm += w[n] * w[n];
        }
        if (norm < 1.0 - 1e-6)
            throw cutoff_error("PDC truncation too small for this xi",
                               1.0 - norm);
    }

    RotatedSource src;
    src.weights.resize(nmax + 1);
    for (int n = 0; n <= nmax; ++n) {
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n + 1, n + 1);
        for (int a = 0; a <= n; ++a)
            c(a, n - a) = w[n] * (((n - a) % 2) ? -1.0 : 1.0) /
                          std::sqrt(n + 1.0);
        const Eigen::MatrixXd rot =
            polarization_rotation(theta_a, n) * c *
            polarization_rotation(theta_b, n).transpose();
        src.weights[n] = rot.array().square();
    }
    return src;
}

namespace {

// Joint no-click generating function: sum of weights times
// x_pa^a x_ma^(n-a) x_pb^b x_mb^(n-b), with 0^0 == 1.
double no_click_gen(const RotatedSource& src, double x_pa, double x_ma,
                    double x_pb, double x_mb) {
    double total = 0.0;
    for (int n = 0; n < static_cast<int>(src.weights.size()); ++n) {
        const auto& wn = src.weights[n];
        for (int a = 0; a <= n; ++a) {
            const double fa = std::pow(x_pa, a) * std::pow(x_ma, n - a);
            if (fa == 0.0) continue;
            for (int b = 0; b <= n; ++b) {
                const double v = wn(a, b);
                if (v == 0.0) continue;
                total += v * fa * std::pow(x_pb, b) * std::pow(x_mb, n - b);
            }
        }
    }
    return total;
}

}  // namespace

std::array<double, 16> click_pattern_probabilities(const RotatedSource& src,
                                                   double t_arm_a,
                                                   double t_arm_b,
                                                   double p_noise) {
    // f[S] = probability of no clicks on every detector in subset S.
    const double xa = 1.0 - t_arm_a;
    const double xb = 1.0 - t_arm_b;
    std::array<double, 16> f{};
    for (int s = 0; s < 16; ++s) {
        const double x_pa = (s & 1) ? xa : 1.0;
        const double x_ma = (s & 2) ? xa : 1.0;
        const double x_pb = (s & 4) ? xb : 1.0;
        const double x_mb = (s & 8) ? xb : 1.0;
        const int bits = __builtin_popcount(static_cast<unsigned>(s));
        f[s] = std::pow(1.0 - p_noise, bits) *
               no_click_gen(src, x_pa, x_ma, x_pb, x_mb);
    }
    // Inclusion-exclusion: P[no-click exactly on D] = sum_{S >= D}
    // (-1)^(|S|-|D|) f[S]; pattern index stores the click set K = ~D.
    std::array<double, 16> p{};
    for (int d = 0; d < 16; ++d) {
        double acc = 0.0;
        const int free = ~d & 15;
        for (int sub = free;; sub = (sub - 1) & free) {
            const int s = d | sub;
            const int extra = __builtin_popcount(static_cast<unsigned>(sub));
            acc += (extra % 2 ? -1.0 : 1.0) * f[s];
            if (sub == 0) break;
        }
        p[~d & 15] = std::max(0.0, acc);
    }
    return p;
}

double squash_correlation(const std::array<double, 16>& patterns) {
    double num = 0.0, den = 0.0;
    for (int k = 0; k < 16; ++k) {
        const bool pa = k & 1, ma = k & 2, pb = k & 4, mb = k & 8;
        if (!(pa || ma) || !(pb || mb)) continue;  // a side saw nothing
        const double oa = (pa && ma) ? 0.0 : (pa ? 1.0 : -1.0);
        const double ob = (pb && mb) ? 0.0 : (pb ? 1.0 : -1.0);
        num += patterns[k] * oa * ob;
        den += patterns[k];
    }
    return den > 0.0 ? num / den : 0.0;
}

namespace {

void arm_transmittances(const DvExperiment& exp, double eta0, double eta_tau,
                        double tau_s, double& t_a, double& t_b) {
    const double td = exp.t_deterministic();
    const double tm = exp.t_memory(tau_s);
    t_a = eta0 * td * (exp.memory_on_early_arm ? tm : 1.0);
    t_b = eta_tau * td * (exp.memory_on_early_arm ? 1.0 : tm);
}

}  // namespace

double correlation_given_eta(const DvExperiment& exp, double eta0,
                             double eta_tau, double tau_s, double theta_a,
                             double theta_b) {
    if (!(eta0 >= 0.0 && eta0 <= 1.0 && eta_tau >= 0.0 && eta_tau <= 1.0))
        throw std::invalid_argument("correlation_given_eta: eta outside [0,1]");
    const RotatedSource src = rotate_source(exp, theta_a, theta_b);
    double t_a, t_b;
    arm_transmittances(exp, eta0, eta_tau, tau_s, t_a, t_b);
    return squash_correlation(
        click_pattern_probabilities(src, t_a, t_b, exp.p_noise()));
}

ChshEstimate chsh_parameter(const DvExperiment& exp, const SampleSet& samples,
                            double shift) {
    if (samples.records.empty())
        throw std::invalid_argument("chsh_parameter: empty samples");
    const std::size_t j = samples.shift_index(shift);
    const double tau_s = exp.wind_v > 0.0 ? shift / exp.wind_v : 0.0;
    const double pn = exp.p_noise();

    const std::array<std::pair<double, double>, 4> angle_pairs = {{
        {exp.angle_a, exp.angle_b},
        {exp.angle_a, exp.angle_b_prime},
        {exp.angle_a_prime, exp.angle_b},
        {exp.angle_a_prime, exp.angle_b_prime},
    }};
    std::array<RotatedSource, 4> sources;
    for (int q = 0; q < 4; ++q)
        sources[q] = rotate_source(exp, angle_pairs[q].first,
                                   angle_pairs[q].second);

    // Average pattern probabilities over sample pairs; batch means give the
    // standard error of the nonlinear combination.
    const std::size_t nrec = samples.records.size();
    const std::size_t nbatch = std::min<std::size_t>(20, nrec);
    std::vector<std::array<std::array<double, 16>, 4>> batch(
        nbatch, {{{}, {}, {}, {}}});
    std::vector<std::size_t> batch_n(nbatch, 0);

    for (std::size_t i = 0; i < nrec; ++i) {
        const auto& r = samples.records[i];
        double t_a, t_b;
        arm_transmittances(exp, r.etas[0], r.etas[j], tau_s, t_a, t_b);
        const std::size_t bidx = i * nbatch / nrec;
        ++batch_n[bidx];
        for (int q = 0; q < 4; ++q) {
            const auto p =
                click_pattern_probabilities(sources[q], t_a, t_b, pn);
            for (int k = 0; k < 16; ++k) batch[bidx][q][k] += p[k];
        }
    }

    const auto bell_from = [](const std::array<std::array<double, 16>, 4>& p) {
        const double e_ab = squash_correlation(p[0]);
        const double e_abp = squash_correlation(p[1]);
        const double e_apb = squash_correlation(p[2]);
        const double e_apbp = squash_correlation(p[3]);
        return std::abs(e_ab - e_abp + e_apb + e_apbp);
    };

    std::array<std::array<double, 16>, 4> total{};
    for (std::size_t bi = 0; bi < nbatch; ++bi)
        for (int q = 0; q < 4; ++q)
            for (int k = 0; k < 16; ++k) total[q][k] += batch[bi][q][k];

    ChshEstimate est;
    est.value = bell_from(total);
    if (nbatch > 1) {
        double mean = 0.0, m2 = 0.0;
        std::vector<double> bvals;
        for (std::size_t bi = 0; bi < nbatch; ++bi)
            if (batch_n[bi] > 0) bvals.push_back(bell_from(batch[bi]));
        for (double v : bvals) mean += v;
        mean /= static_cast<double>(bvals.size());
        for (double v : bvals) m2 += (v - mean) * (v - mean);
        if (bvals.size() > 1)
            est.std_error = std::sqrt(
                m2 / (static_cast<double>(bvals.size()) *
                      static_cast<double>(bvals.size() - 1)));
    }
    return est;
}

ChshMaxResult chsh_max_over_xi(const DvExperiment& exp_template,
                               const SampleSet& samples, double shift,
                               const std::vector<double>& xi_grid) {
    if (xi_grid.size() < 3)
        throw std::invalid_argument("chsh_max_over_xi: need >= 3 grid points");
    DvExperiment exp = exp_template;
    exp.source = DvSource::Pdc;

    const auto eval = [&](double xi) {
        exp.xi = xi;
        return chsh_parameter(exp, samples, shift);
    };

    std::size_t best = 0;
    std::vector<ChshEstimate> coarse(xi_grid.size());
    for (std::size_t i = 0; i < xi_grid.size(); ++i) {
        coarse[i] = eval(xi_grid[i]);
        if (coarse[i].value > coarse[best].value) best = i;
    }

    ChshMaxResult res;
    if (best == 0 || best + 1 == xi_grid.size()) {
        res.at_grid_edge = true;
        res.b_max = coarse[best].value;
        res.xi_star = xi_grid[best];
        res.std_error = coarse[best].std_error;
        return res;
    }

    // Golden-section refinement inside the bracketing cell.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = xi_grid[best - 1], b = xi_grid[best + 1];
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    ChshEstimate f1 = eval(x1), f2 = eval(x2);
    for (int it = 0; it < 40 && b - a > 1e-4 * (1.0 + b); ++it) {
        if (f1.value < f2.value) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = eval(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = eval(x1);
        }
    }
    const ChshEstimate& fbest = f1.value > f2.value ? f1 : f2;
    res.b_max = fbest.value;
    res.xi_star = f1.value > f2.value ? x1 : x2;
    res.std_error = fbest.std_error;
    return res;
}

}  // namespace aqc
