#include "meo/simplex.hpp"

#include "meo/errors.hpp"

#include <stdexcept>
#include <vector>

namespace meo {

LpResult solve_lp_max(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
    const Eigen::Index rows = a.rows();
    const Eigen::Index vars = a.cols();
    if ((b.array() < 0).any()) throw DomainError("solve_lp_max: right-hand side must be non-negative");

    const Eigen::Index cols = vars + rows;
    using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Tableau tab = Tableau::Zero(rows + 1, cols + 1);
    tab.topLeftCorner(rows, vars) = a;
    tab.block(0, vars, rows, rows).setIdentity();
    tab.topRightCorner(rows, 1) = b;
    tab.bottomLeftCorner(1, vars) = -c.transpose();

    std::vector<Eigen::Index> basis(static_cast<std::size_t>(rows));
    for (Eigen::Index i = 0; i < rows; ++i) basis[static_cast<std::size_t>(i)] = vars + i;

    const double eps = 1e-11;
    const int max_iterations = 100 * static_cast<int>(cols + rows + 10);
    int stalled = 0;
    LpResult result;
    for (int it = 0;; ++it) {
        if (it >= max_iterations) throw std::runtime_error("solve_lp_max: iteration limit reached");

        // Dantzig pricing; Bland's rule once degenerate pivots pile up
        Eigen::Index enter = -1;
        if (stalled < 50) {
            double most = -eps;
            for (Eigen::Index j = 0; j < cols; ++j) {
                if (tab(rows, j) < most) {
                    most = tab(rows, j);
                    enter = j;
                }
            }
        } else {
            for (Eigen::Index j = 0; j < cols; ++j) {
                if (tab(rows, j) < -eps) {
                    enter = j;
                    break;
                }
            }
        }
        if (enter < 0) {
            result.iterations = it;
            break;
        }

        Eigen::Index leave = -1;
        double best_ratio = 0.0;
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double coef = tab(i, enter);
            if (coef <= eps) continue;
            const double ratio = tab(i, cols) / coef;
            if (leave < 0 || ratio < best_ratio - 1e-15 ||
                (ratio <= best_ratio + 1e-15 &&
                 basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave < 0) throw std::runtime_error("solve_lp_max: problem is unbounded");

        stalled = best_ratio <= 1e-15 ? stalled + 1 : 0;

        tab.row(leave) /= tab(leave, enter);
        for (Eigen::Index i = 0; i <= rows; ++i) {
            if (i == leave) continue;
            const double f = tab(i, enter);
            if (f != 0.0) tab.row(i) -= f * tab.row(leave);
        }
        basis[static_cast<std::size_t>(leave)] = enter;
    }

    result.x = Eigen::VectorXd::Zero(vars);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Eigen::Index v = basis[static_cast<std::size_t>(i)];
        if (v < vars) result.x[v] = std::max(0.0, tab(i, cols));
    }
    result.objective = c.dot(result.x);
    return result;
}

}  // namespace meo
