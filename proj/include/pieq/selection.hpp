#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pieq/correspondence.hpp"
#include "pieq/measure.hpp"

namespace pieq {

/// Measurable selection: one action per atom, constant on sigma cells.
struct Selection {
    std::vector<int> choice;  // atom index -> codomain index
};

/// Per-cell value sets of F under the space's sigma partition. Requires F
/// to be defined on the space's atoms and constant on each cell.
std::vector<std::vector<int>> cell_values(const Correspondence& F, const FiniteProbSpace& space);

/// Number of measurable selections, Prod over cells of |F(cell)|.
/// Saturates at INT64_MAX.
std::int64_t selection_count(const Correspondence& F, const FiniteProbSpace& space);

/// Streams every measurable selection in deterministic order (odometer
/// over cells, lowest action index first). Stops early when the visitor
/// returns false. Yields nothing when some cell value is empty.
void for_each_selection(const Correspondence& F, const FiniteProbSpace& space,
                        const std::function<bool(const Selection&)>& visit);

Distribution selection_pushforward(const FiniteProbSpace& space, const Selection& g,
                                   const Correspondence& F);

struct DistributionSet {
    std::vector<Distribution> members;  // deduplicated, sorted lexicographically
    bool exact = true;
};

/// The set of pushforward distributions over measurable selections of F.
/// Exact when the selection count fits the budget; otherwise a seeded
/// sample plus deterministic extreme selections, flagged non-exact.
DistributionSet distribution_set(const Correspondence& F, const FiniteProbSpace& space,
                                 std::int64_t budget, std::uint64_t seed = 0);

/// Hausdorff-style distance (tv metric) between the member list and its
/// convex hull. Exact for supports of size <= 2; a deterministic
/// candidate-search lower bound otherwise. Requires an exact set.
double convexification_gap(const DistributionSet& D);

/// Finite sets are compact; the checkable content is exactness and
/// nonemptiness.
bool is_compact_closed(const DistributionSet& D);

struct PurifyResult {
    Selection selection;
    double error;  // tv distance between the pushforward and the target
};

/// Realizes a hull point of the distribution set as a pure selection by a
/// greedy fill over cells (heaviest first, largest remaining deficit)
/// followed by single-cell swap improvement.
PurifyResult purify(const Correspondence& F, const FiniteProbSpace& space,
                    const Distribution& target, double tol);

/// Largest violation of the transportation feasibility condition for the
/// target against conv(D_F); <= tol means the target is in the hull.
double hull_membership_violation(const Correspondence& F, const FiniteProbSpace& space,
                                 const Distribution& target);

/// A correspondence depending on a parameter from a metric grid; all
/// slices share domain and codomain. The dominating correspondence H with
/// F(t,x) subset of H(t) is a hypothesis of the usc check and must be
/// supplied.
struct ParamCorrespondence {
    MetricGrid params;
    std::vector<Correspondence> slices;  // one per parameter point
    std::optional<Correspondence> dominating;
};

/// Finite form of upper semicontinuity of x -> D_{F_x}: for parameter
/// pairs closer than delta, every member on the second side has a member
/// within eps on the first side.
bool dmap_usc_check(const ParamCorrespondence& pc, const FiniteProbSpace& space, double delta,
                    double eps, std::int64_t budget = 1000000);

}  // namespace pieq
