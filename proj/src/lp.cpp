#include "aqc/lp.hpp"

#include <stdexcept>

namespace aqc {

LpResult simplex_maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& c, int max_iter) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    if (b.size() != m || c.size() != n)
        throw std::invalid_argument("simplex_maximize: dimension mismatch");
    if ((b.array() < 0.0).any())
        throw std::invalid_argument("simplex_maximize: requires b >= 0");

    // Tableau: [A | I | b] with the objective row [-c | 0 | 0] at the bottom.
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
    t.topLeftCorner(m, n) = A;
    t.block(0, n, m, m).setIdentity();
    t.col(n + m).head(m) = b;
    t.row(m).head(n) = -c.transpose();

    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;

    const double eps = 1e-11;
    const int bland_after = 4 * (m + n);

    LpResult res;
    for (int iter = 0; iter < max_iter; ++iter) {
        // Entering column.
        int enter = -1;
        if (iter < bland_after) {
            double best = -eps;
            for (int j = 0; j < n + m; ++j)
                if (t(m, j) < best) {
                    best = t(m, j);
                    enter = j;
                }
        } else {
            for (int j = 0; j < n + m; ++j)
                if (t(m, j) < -eps) {
                    enter = j;
                    break;
                }
        }
        if (enter < 0) break;  // optimal

        // Ratio test.
        int leave = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < m; ++i) {
            const double a = t(i, enter);
            if (a <= eps) continue;
            const double ratio = t(i, n + m) / a;
            if (leave < 0 || ratio < best_ratio - eps ||
                (ratio < best_ratio + eps && basis[i] < basis[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave < 0) {
            res.bounded = false;
            return res;
        }

        // Pivot.
        t.row(leave) /= t(leave, enter);
        for (int i = 0; i <= m; ++i) {
            if (i == leave) continue;
            const double f = t(i, enter);
            if (f != 0.0) t.row(i) -= f * t.row(leave);
        }
        basis[leave] = enter;
    }

    res.x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i)
        if (basis[i] < n) res.x[basis[i]] = t(i, n + m);
    res.value = t(m, n + m);
    return res;
}

}  // namespace aqc
