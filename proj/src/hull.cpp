#include "pieq/hull.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

namespace pieq {

namespace {

// Dense simplex, Bland's rule. Minimizes c'x s.t. Ax = b, x >= 0 starting
// from a given feasible basis (one basic column per row).
double simplex_min(std::vector<std::vector<double>>& A, std::vector<double>& b,
                   const std::vector<double>& c, std::vector<int>& basis) {
    const std::size_t rows = A.size();
    const std::size_t cols = A.empty() ? 0 : A[0].size();
    const double eps = 1e-11;

    for (int iter = 0; iter < 100000; ++iter) {
        // Reduced costs via basis multipliers: solve y'B = c_B by direct
        // elimination (the tableau is kept in reduced form, so B = I).
        // We maintain the tableau explicitly: A is always reduced so that
        // basic columns are unit vectors.
        int entering = -1;
        for (std::size_t j = 0; j < cols; ++j) {
            double red = c[j];
            for (std::size_t r = 0; r < rows; ++r)
                red -= c[static_cast<std::size_t>(basis[r])] * A[r][j];
            if (red < -eps) {
                entering = static_cast<int>(j);
                break;  // Bland: first improving column
            }
        }
        if (entering < 0) break;

        int leaving = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < rows; ++r) {
            double a = A[r][static_cast<std::size_t>(entering)];
            if (a > eps) {
                double ratio = b[r] / a;
                if (ratio < best_ratio - eps ||
                    (ratio < best_ratio + eps &&
                     (leaving < 0 || basis[r] < basis[static_cast<std::size_t>(leaving)]))) {
                    best_ratio = ratio;
                    leaving = static_cast<int>(r);
                }
            }
        }
        if (leaving < 0) throw std::runtime_error("simplex: unbounded phase-1 problem");

        auto lr = static_cast<std::size_t>(leaving);
        double pivot = A[lr][static_cast<std::size_t>(entering)];
        for (std::size_t j = 0; j < cols; ++j) A[lr][j] /= pivot;
        b[lr] /= pivot;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == lr) continue;
            double f = A[r][static_cast<std::size_t>(entering)];
            if (std::abs(f) < eps) continue;
            for (std::size_t j = 0; j < cols; ++j) A[r][j] -= f * A[lr][j];
            b[r] -= f * b[lr];
        }
        basis[lr] = entering;
    }

    double obj = 0.0;
    for (std::size_t r = 0; r < rows; ++r) obj += c[static_cast<std::size_t>(basis[r])] * b[r];
    return obj;
}

}  // namespace

double hull_l1_distance(const std::vector<std::vector<double>>& points,
                        const std::vector<double>& target) {
    if (points.empty()) throw std::invalid_argument("hull_l1_distance: no points");
    const std::size_t dim = target.size();
    for (const auto& p : points)
        if (p.size() != dim) throw std::invalid_argument("hull_l1_distance: dimension mismatch");

    const std::size_t m = points.size();
    const std::size_t rows = dim + 1;
    const std::size_t cols = m + 2 * rows;  // weights + signed residuals per row

    std::vector<std::vector<double>> A(rows, std::vector<double>(cols, 0.0));
    std::vector<double> b(rows, 0.0);
    std::vector<double> c(cols, 0.0);

    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t j = 0; j < m; ++j) A[r][j] = points[j][r];
        b[r] = target[r];
    }
    for (std::size_t j = 0; j < m; ++j) A[dim][j] = 1.0;
    b[dim] = 1.0;
    for (std::size_t r = 0; r < rows; ++r) {
        A[r][m + 2 * r] = 1.0;
        A[r][m + 2 * r + 1] = -1.0;
        c[m + 2 * r] = 1.0;
        c[m + 2 * r + 1] = 1.0;
    }

    // Initial basis: the residual column matching the sign of b, after
    // flipping rows so b >= 0.
    std::vector<int> basis(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        if (b[r] >= 0) {
            basis[r] = static_cast<int>(m + 2 * r);
        } else {
            for (std::size_t j = 0; j < cols; ++j) A[r][j] = -A[r][j];
            b[r] = -b[r];
            basis[r] = static_cast<int>(m + 2 * r);
            // After the flip the +residual column has coefficient -1; use
            // the -residual column, whose coefficient is now +1.
            basis[r] = static_cast<int>(m + 2 * r + 1);
        }
    }

    double obj = simplex_min(A, b, c, basis);
    return obj < 0 ? 0.0 : obj;
}

bool in_hull(const std::vector<std::vector<double>>& points, const std::vector<double>& target,
             double tol) {
    return hull_l1_distance(points, target) <= tol;
}

}  // namespace pieq
