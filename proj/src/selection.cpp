#include "pieq/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace pieq {

namespace {

bool mass_less(const Distribution& a, const Distribution& b) {
    return std::lexicographical_compare(a.mass().begin(), a.mass().end(), b.mass().begin(),
                                        b.mass().end());
}

void sort_dedupe(std::vector<Distribution>& members) {
    std::sort(members.begin(), members.end(), mass_less);
    std::vector<Distribution> out;
    for (auto& d : members) {
        if (out.empty() || tv_distance(out.back(), d) > kMassTol) out.push_back(std::move(d));
    }
    members = std::move(out);
}

Selection expand_cells(const FiniteProbSpace& space, const std::vector<int>& cell_choice) {
    Selection g;
    g.choice.assign(static_cast<std::size_t>(space.size()), -1);
    for (int c = 0; c < space.num_cells(); ++c)
        for (int atom : space.cells()[static_cast<std::size_t>(c)])
            g.choice[static_cast<std::size_t>(atom)] = cell_choice[static_cast<std::size_t>(c)];
    return g;
}

}  // namespace

std::vector<std::vector<int>> cell_values(const Correspondence& F, const FiniteProbSpace& space) {
    if (F.domain_size() != space.size())
        throw std::invalid_argument("cell_values: correspondence not over the space's atoms");
    std::vector<std::vector<int>> out(static_cast<std::size_t>(space.num_cells()));
    for (int c = 0; c < space.num_cells(); ++c) {
        const auto& cell = space.cells()[static_cast<std::size_t>(c)];
        const auto& first = F.value(cell.front());
        for (int atom : cell)
            if (F.value(atom) != first)
                throw std::invalid_argument(
                    "cell_values: correspondence not measurable (not cell-constant)");
        out[static_cast<std::size_t>(c)] = first;
    }
    return out;
}

std::int64_t selection_count(const Correspondence& F, const FiniteProbSpace& space) {
    auto values = cell_values(F, space);
    std::int64_t count = 1;
    for (const auto& v : values) {
        if (v.empty()) return 0;
        if (count > std::numeric_limits<std::int64_t>::max() / static_cast<std::int64_t>(v.size()))
            return std::numeric_limits<std::int64_t>::max();
        count *= static_cast<std::int64_t>(v.size());
    }
    return count;
}

void for_each_selection(const Correspondence& F, const FiniteProbSpace& space,
                        const std::function<bool(const Selection&)>& visit) {
    auto values = cell_values(F, space);
    for (const auto& v : values)
        if (v.empty()) return;
    std::vector<std::size_t> odo(values.size(), 0);
    std::vector<int> cell_choice(values.size());
    while (true) {
        for (std::size_t c = 0; c < values.size(); ++c) cell_choice[c] = values[c][odo[c]];
        if (!visit(expand_cells(space, cell_choice))) return;
        std::size_t c = values.size();
        while (c > 0) {
            --c;
            if (++odo[c] < values[c].size()) break;
            odo[c] = 0;
            if (c == 0) return;
        }
    }
}

Distribution selection_pushforward(const FiniteProbSpace& space, const Selection& g,
                                   const Correspondence& F) {
    return pushforward(space, g.choice, F.codomain());
}

DistributionSet distribution_set(const Correspondence& F, const FiniteProbSpace& space,
                                 std::int64_t budget, std::uint64_t seed) {
    auto values = cell_values(F, space);
    std::int64_t count = selection_count(F, space);
    DistributionSet out;
    if (count <= budget) {
        out.exact = true;
        for_each_selection(F, space, [&](const Selection& g) {
            out.members.push_back(selection_pushforward(space, g, F));
            return true;
        });
        sort_dedupe(out.members);
        return out;
    }

    out.exact = false;
    auto push_cells = [&](const std::vector<int>& cell_choice) {
        out.members.push_back(selection_pushforward(space, expand_cells(space, cell_choice), F));
    };
    // Extreme selections: per codomain action, prefer it wherever allowed.
    std::vector<int> cc(values.size());
    for (int y = 0; y < F.codomain_size(); ++y) {
        for (std::size_t c = 0; c < values.size(); ++c) {
            auto it = std::find(values[c].begin(), values[c].end(), y);
            cc[c] = it != values[c].end() ? y : values[c].front();
        }
        push_cells(cc);
    }
    for (std::size_t c = 0; c < values.size(); ++c) cc[c] = values[c].back();
    push_cells(cc);

    std::mt19937_64 rng(seed);
    std::int64_t samples = std::min<std::int64_t>(budget, 2048);
    for (std::int64_t s = 0; s < samples; ++s) {
        for (std::size_t c = 0; c < values.size(); ++c) {
            std::uniform_int_distribution<std::size_t> pick(0, values[c].size() - 1);
            cc[c] = values[c][pick(rng)];
        }
        push_cells(cc);
    }
    sort_dedupe(out.members);
    return out;
}

double convexification_gap(const DistributionSet& D) {
    if (!D.exact) throw std::invalid_argument("convexification_gap: sampled set rejected");
    if (D.members.empty()) throw std::invalid_argument("convexification_gap: empty set");
    const int dim = D.members.front().size();
    if (D.members.size() == 1) return 0.0;

    if (dim <= 2) {
        // One-dimensional: members are points on a segment; the farthest
        // hull point from the member list is the midpoint of the widest
        // gap between consecutive members.
        std::vector<double> pos;
        pos.reserve(D.members.size());
        for (const auto& m : D.members) pos.push_back(m.mass(0));
        std::sort(pos.begin(), pos.end());
        double gap = 0.0;
        for (std::size_t i = 0; i + 1 < pos.size(); ++i)
            gap = std::max(gap, (pos[i + 1] - pos[i]) / 2.0);
        return gap;
    }

    // Higher-dimensional supports: deterministic candidate search over
    // pairwise midpoints and triple centroids (a lower bound on the true
    // Hausdorff distance).
    auto min_dist = [&](const std::vector<double>& mass) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& m : D.members) {
            double d = 0.0;
            for (int i = 0; i < dim; ++i)
                d += std::abs(mass[static_cast<std::size_t>(i)] - m.mass(i));
            best = std::min(best, 0.5 * d);
        }
        return best;
    };
    const std::size_t n = std::min<std::size_t>(D.members.size(), 48);
    double gap = 0.0;
    std::vector<double> cand(static_cast<std::size_t>(dim));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            for (int i = 0; i < dim; ++i)
                cand[static_cast<std::size_t>(i)] =
                    0.5 * (D.members[a].mass(i) + D.members[b].mass(i));
            gap = std::max(gap, min_dist(cand));
            for (std::size_t c = b + 1; c < n; ++c) {
                for (int i = 0; i < dim; ++i)
                    cand[static_cast<std::size_t>(i)] =
                        (D.members[a].mass(i) + D.members[b].mass(i) + D.members[c].mass(i)) / 3.0;
                gap = std::max(gap, min_dist(cand));
            }
        }
    }
    return gap;
}

bool is_compact_closed(const DistributionSet& D) {
    if (!D.exact) throw std::invalid_argument("is_compact_closed: sampled set rejected");
    return !D.members.empty();
}

double hull_membership_violation(const Correspondence& F, const FiniteProbSpace& space,
                                 const Distribution& target) {
    auto values = cell_values(F, space);
    const int ny = F.codomain_size();
    if (ny > 20)
        throw std::invalid_argument("hull_membership_violation: codomain too large for subset scan");
    // Gale/Hall condition on the transportation polytope: for each action
    // subset S, the weight of cells forced into S must not exceed the
    // target mass of S.
    double worst = 0.0;
    for (std::uint32_t S = 0; S < (1u << ny); ++S) {
        double forced = 0.0;
        for (int c = 0; c < space.num_cells(); ++c) {
            const auto& v = values[static_cast<std::size_t>(c)];
            if (v.empty()) throw std::invalid_argument("hull_membership_violation: empty value set");
            bool inside = std::all_of(v.begin(), v.end(),
                                      [&](int y) { return (S >> y) & 1u; });
            if (inside) forced += space.cell_weight(c);
        }
        double cap = 0.0;
        for (int y = 0; y < ny; ++y)
            if ((S >> y) & 1u) cap += target.mass(y);
        worst = std::max(worst, forced - cap);
    }
    return worst;
}

PurifyResult purify(const Correspondence& F, const FiniteProbSpace& space,
                    const Distribution& target, double tol) {
    auto values = cell_values(F, space);
    for (const auto& v : values)
        if (v.empty()) throw std::invalid_argument("purify: correspondence has an empty value");
    if (target.support() != F.codomain())
        throw std::invalid_argument("purify: target support mismatch");
    if (F.codomain_size() <= 20 && hull_membership_violation(F, space, target) > tol)
        throw std::invalid_argument("purify: target outside the hull of the distribution set");

    const int ncells = space.num_cells();
    std::vector<int> order(static_cast<std::size_t>(ncells));
    for (int c = 0; c < ncells; ++c) order[static_cast<std::size_t>(c)] = c;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return space.cell_weight(a) > space.cell_weight(b);
    });

    std::vector<double> deficit(target.mass().begin(), target.mass().end());
    std::vector<int> cell_choice(static_cast<std::size_t>(ncells), -1);
    for (int c : order) {
        const auto& v = values[static_cast<std::size_t>(c)];
        int best = v.front();
        for (int y : v)
            if (deficit[static_cast<std::size_t>(y)] >
                deficit[static_cast<std::size_t>(best)] + 1e-15)
                best = y;
        cell_choice[static_cast<std::size_t>(c)] = best;
        deficit[static_cast<std::size_t>(best)] -= space.cell_weight(c);
    }

    auto error_of = [&](const std::vector<int>& cc) {
        std::vector<double> mass(target.support().size(), 0.0);
        for (int c = 0; c < ncells; ++c)
            mass[static_cast<std::size_t>(cc[static_cast<std::size_t>(c)])] +=
                space.cell_weight(c);
        double e = 0.0;
        for (std::size_t y = 0; y < mass.size(); ++y) e += std::abs(mass[y] - target.mass(static_cast<int>(y)));
        return 0.5 * e;
    };

    double err = error_of(cell_choice);
    bool improved = true;
    while (improved && err > tol) {
        improved = false;
        for (int c = 0; c < ncells && !improved; ++c) {
            int old = cell_choice[static_cast<std::size_t>(c)];
            for (int y : values[static_cast<std::size_t>(c)]) {
                if (y == old) continue;
                cell_choice[static_cast<std::size_t>(c)] = y;
                double e = error_of(cell_choice);
                if (e < err - 1e-15) {
                    err = e;
                    improved = true;
                    break;
                }
                cell_choice[static_cast<std::size_t>(c)] = old;
            }
        }
    }

    PurifyResult result;
    result.selection = expand_cells(space, cell_choice);
    result.error = err;
    return result;
}

bool dmap_usc_check(const ParamCorrespondence& pc, const FiniteProbSpace& space, double delta,
                    double eps, std::int64_t budget) {
    if (pc.slices.size() != pc.params.points.size())
        throw std::invalid_argument("dmap_usc_check: one slice per parameter point required");
    if (!pc.dominating)
        throw std::invalid_argument("dmap_usc_check: missing dominating correspondence");
    for (const auto& slice : pc.slices)
        for (int t = 0; t < slice.domain_size(); ++t)
            if (!subset_of(slice.value(t), pc.dominating->value(t)))
                throw std::invalid_argument(
                    "dmap_usc_check: slice not dominated by the stated correspondence");

    std::vector<DistributionSet> sets;
    sets.reserve(pc.slices.size());
    for (const auto& slice : pc.slices) sets.push_back(distribution_set(slice, space, budget));

    const auto n = pc.params.points.size();
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t xp = 0; xp < n; ++xp) {
            if (x == xp || pc.params.dist[x][xp] >= delta) continue;
            for (const auto& member : sets[xp].members) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& ref : sets[x].members)
                    best = std::min(best, tv_distance(member, ref));
                if (best > eps) return false;
            }
        }
    }
    return true;
}

}  // namespace pieq
