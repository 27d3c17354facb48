#pragma once

#include <Eigen/Dense>
#include <vector>

namespace aqc {

struct LpResult {
    double value = 0.0;
    Eigen::VectorXd x;
    bool bounded = true;
};

// Dense tableau simplex: maximize c.x subject to A x <= b, x >= 0, with
// b >= 0 (the all-slack basis is feasible).  Bland's rule kicks in after a
// burn-in of Dantzig pivots to rule out cycling.
LpResult simplex_maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& c, int max_iter = 50000);

}  // namespace aqc
