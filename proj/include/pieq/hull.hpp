#pragma once

#include <vector>

namespace pieq {

/// L1 distance from `target` to the convex hull of `points` (each point a
/// coordinate vector of equal length), computed by a phase-1 style simplex
/// over min sum|r| s.t. P w + r = target, sum w = 1, w >= 0. Deterministic
/// (Bland pivoting). Returns 0 when the target is in the hull.
double hull_l1_distance(const std::vector<std::vector<double>>& points,
                        const std::vector<double>& target);

bool in_hull(const std::vector<std::vector<double>>& points, const std::vector<double>& target,
             double tol);

}  // namespace pieq
