#pragma once

#include <cstdint>

namespace pieq {

/// Solver knobs shared by the game and economy searches. Defaults match
/// the instance-file defaults.
struct SolveConfig {
    std::int64_t budget = 1000000;
    double tol = 1e-9;      // fixed-point / distribution matching tolerance
    double eps = 1e-9;      // Nash deviation slack
    int max_iters = 200;
    std::uint64_t seed = 0;
    int refine = 1;
    bool theorem4 = false;
    int mesh = 16;          // hull-grid mesh denominator for iterative search
};

}  // namespace pieq
