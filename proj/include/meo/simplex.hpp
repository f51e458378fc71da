#pragma once

// Dense tableau simplex for  max c'x  s.t.  A x <= b, x >= 0  with b >= 0,
// so the slack basis is an initial feasible vertex and no phase one is needed.

#include <Eigen/Dense>

namespace meo {

struct LpResult {
    Eigen::VectorXd x;
    double objective{0};
    int iterations{0};
};

/// Throws std::runtime_error on an unbounded problem or when the iteration
/// limit is hit; DomainError if some b_i is negative.
LpResult solve_lp_max(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c);

}  // namespace meo
