#include "pieq/economy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pieq {

namespace {

double tuple_distance(std::span<const Distribution> a, std::span<const Distribution> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, tv_distance(a[i], b[i]));
    return d;
}

std::string lambda_key(std::span<const Distribution> lambdas) {
    std::ostringstream oss;
    oss.precision(15);
    for (const auto& l : lambdas) {
        for (double m : l.mass()) oss << m << ',';
        oss << ';';
    }
    return oss.str();
}

}  // namespace

Economy::Economy(std::vector<EconomyPlayer> players, ProductSpace joint)
    : players_(std::move(players)), joint_(std::move(joint)) {
    const int n = num_players();
    if (n == 0) throw std::invalid_argument("economy needs at least one player");
    if (joint_.num_factors() != n)
        throw std::invalid_argument("joint must have one type factor per player");
    for (int i = 0; i < n; ++i) {
        const auto& pl = players_[static_cast<std::size_t>(i)];
        if (joint_.factor(i) != pl.types)
            throw std::invalid_argument("joint type factor mismatch for player " + pl.name);
        if (!pl.constraint.all_values_nonempty())
            throw std::invalid_argument("constraint D has an empty value for player " + pl.name);
        if (pl.cell_names.size() != pl.type_cells.size())
            throw std::invalid_argument("cell name list mismatch for player " + pl.name);
        if (pl.alpha.per_action.size() != pl.actions.size() ||
            pl.pref.per_action.size() != pl.actions.size())
            throw std::invalid_argument("correspondence spec not total on actions for player " +
                                        pl.name);
        if (pl.selector && pl.selector->per_action.size() != pl.actions.size())
            throw std::invalid_argument("selector spec not total on actions for player " + pl.name);
    }
    for (int i = 0; i < n; ++i) {
        Distribution m = joint_.marginal(i);
        type_spaces_.emplace_back(m.support(), m.mass(),
                                  players_[static_cast<std::size_t>(i)].type_cells);
        // D_i must be measurable for selections to exist.
        cell_values(players_[static_cast<std::size_t>(i)].constraint, type_spaces_.back());
    }
}

DistributionSet Economy::build_DDi(int i, std::int64_t budget, std::uint64_t seed) const {
    return distribution_set(players_.at(static_cast<std::size_t>(i)).constraint, type_space(i),
                            budget, seed);
}

std::vector<int> Economy::eval_spec(const CorrespondenceSpec& spec, int i, int cell,
                                    std::span<const Distribution> lambdas) const {
    const auto& pl = players_.at(static_cast<std::size_t>(i));
    const std::string& cell_name = pl.cell_names.at(static_cast<std::size_t>(cell));
    std::vector<int> out;
    for (std::size_t a = 0; a < spec.per_action.size(); ++a)
        if (dsl::eval(spec.per_action[a], cell_name, lambdas)) out.push_back(static_cast<int>(a));
    return out;
}

std::vector<int> Economy::eval_correspondence(Which which, int i, int cell,
                                              std::span<const Distribution> lambdas) const {
    const auto& pl = players_.at(static_cast<std::size_t>(i));
    switch (which) {
        case Which::Alpha:
            return eval_spec(pl.alpha, i, cell, lambdas);
        case Which::Pref:
            return eval_spec(pl.pref, i, cell, lambdas);
        case Which::Selector: {
            if (!pl.selector)
                throw std::invalid_argument("no selector G declared for player " + pl.name);
            auto g = eval_spec(*pl.selector, i, cell, lambdas);
            auto cap = set_intersection(eval_spec(pl.alpha, i, cell, lambdas),
                                        eval_spec(pl.pref, i, cell, lambdas));
            if (!subset_of(g, cap))
                throw std::runtime_error("selector G not contained in alpha cap P for player " +
                                         pl.name);
            return g;
        }
    }
    throw std::logic_error("unreachable");
}

bool Economy::in_Ui(int i, int cell, std::span<const Distribution> lambdas) const {
    auto alpha = eval_correspondence(Which::Alpha, i, cell, lambdas);
    auto pref = eval_correspondence(Which::Pref, i, cell, lambdas);
    return set_intersection(alpha, pref).empty();
}

std::vector<int> Economy::switch_F(int i, int cell, std::span<const Distribution> lambdas,
                                   bool theorem4) const {
    auto alpha = eval_correspondence(Which::Alpha, i, cell, lambdas);
    auto pref = eval_correspondence(Which::Pref, i, cell, lambdas);
    auto inter = set_intersection(alpha, pref);
    std::vector<int> result;
    if (inter.empty()) {
        result = alpha;  // on U_i
    } else if (theorem4) {
        result = eval_correspondence(Which::Selector, i, cell, lambdas);
    } else {
        result = inter;
    }
    if (result.empty())
        throw std::runtime_error("switching correspondence empty for player " +
                                 players_.at(static_cast<std::size_t>(i)).name +
                                 " (nonemptiness hypothesis violated)");
    return result;
}

Correspondence Economy::switched_correspondence(int i, std::span<const Distribution> lambdas,
                                                bool theorem4) const {
    const auto& pl = players_.at(static_cast<std::size_t>(i));
    const auto& space = type_space(i);
    std::vector<std::vector<int>> values(pl.types.size());
    for (int c = 0; c < space.num_cells(); ++c) {
        auto v = switch_F(i, c, lambdas, theorem4);
        for (int atom : space.cells()[static_cast<std::size_t>(c)])
            values[static_cast<std::size_t>(atom)] = v;
    }
    return Correspondence(pl.types, pl.actions, std::move(values), std::nullopt, pl.type_cells);
}

std::vector<DistributionSet> Economy::phi(std::span<const Distribution> lambdas,
                                          std::int64_t budget, bool theorem4,
                                          std::uint64_t seed) const {
    std::vector<DistributionSet> out;
    out.reserve(static_cast<std::size_t>(num_players()));
    for (int i = 0; i < num_players(); ++i)
        out.push_back(
            distribution_set(switched_correspondence(i, lambdas, theorem4), type_space(i), budget,
                             seed));
    return out;
}

std::vector<UiEntry> Economy::build_Ui(int i,
                                       const std::vector<std::vector<Distribution>>& lambda_grid,
                                       double delta) const {
    const auto& space = type_space(i);
    std::vector<std::vector<bool>> member(static_cast<std::size_t>(space.num_cells()),
                                          std::vector<bool>(lambda_grid.size(), false));
    for (int c = 0; c < space.num_cells(); ++c)
        for (std::size_t g = 0; g < lambda_grid.size(); ++g)
            member[static_cast<std::size_t>(c)][g] = in_Ui(i, c, lambda_grid[g]);

    std::vector<UiEntry> out;
    for (int c = 0; c < space.num_cells(); ++c) {
        for (std::size_t g = 0; g < lambda_grid.size(); ++g) {
            if (!member[static_cast<std::size_t>(c)][g]) continue;
            bool open = true;
            for (std::size_t h = 0; h < lambda_grid.size(); ++h) {
                if (h == g) continue;
                if (tuple_distance(lambda_grid[g], lambda_grid[h]) < delta &&
                    !member[static_cast<std::size_t>(c)][h])
                    open = false;
            }
            out.push_back(UiEntry{c, static_cast<int>(g), open});
        }
    }
    return out;
}

void Economy::validate_profile(const StrategyProfile& profile) const {
    if (static_cast<int>(profile.strategies.size()) != num_players())
        throw std::invalid_argument("profile: one strategy per player required");
    for (int i = 0; i < num_players(); ++i) {
        const auto& g = profile.strategies[static_cast<std::size_t>(i)];
        const auto& space = type_space(i);
        const auto& pl = players_[static_cast<std::size_t>(i)];
        if (static_cast<int>(g.choice.size()) != space.size())
            throw std::invalid_argument("profile: strategy not total on types");
        for (const auto& cell : space.cells()) {
            int first = g.choice[static_cast<std::size_t>(cell.front())];
            for (int atom : cell)
                if (g.choice[static_cast<std::size_t>(atom)] != first)
                    throw std::invalid_argument("profile: strategy not constant on a sigma cell");
        }
        for (int t = 0; t < space.size(); ++t) {
            int a = g.choice[static_cast<std::size_t>(t)];
            if (a < 0 || a >= static_cast<int>(pl.actions.size()))
                throw std::invalid_argument("profile: action index out of range");
            if (space.weight(t) > 0) {
                const auto& allowed = pl.constraint.value(t);
                if (std::find(allowed.begin(), allowed.end(), a) == allowed.end())
                    throw std::invalid_argument("profile: strategy leaves D on a positive type");
            }
        }
    }
}

std::vector<Distribution> Economy::lambdas_of(const StrategyProfile& profile) const {
    std::vector<Distribution> out;
    out.reserve(static_cast<std::size_t>(num_players()));
    for (int i = 0; i < num_players(); ++i)
        out.push_back(pushforward(type_space(i), profile.strategies[static_cast<std::size_t>(i)].choice,
                                  players_[static_cast<std::size_t>(i)].actions));
    return out;
}

EquilibriumCheck Economy::is_equilibrium(const StrategyProfile& profile) const {
    validate_profile(profile);
    EquilibriumCheck check;
    auto lambdas = lambdas_of(profile);
    std::vector<CheckRecord> records;
    bool ok = true;
    for (int i = 0; i < num_players(); ++i) {
        const auto& space = type_space(i);
        const auto& g = profile.strategies[static_cast<std::size_t>(i)];
        for (int c = 0; c < space.num_cells(); ++c) {
            if (space.cell_weight(c) <= 0) continue;  // null types unconstrained
            auto alpha = eval_correspondence(Which::Alpha, i, c, lambdas);
            auto pref = eval_correspondence(Which::Pref, i, c, lambdas);
            int a = g.choice[static_cast<std::size_t>(
                space.cells()[static_cast<std::size_t>(c)].front())];
            CheckRecord rec;
            rec.player = i;
            rec.cell = c;
            rec.cond1 = std::find(alpha.begin(), alpha.end(), a) != alpha.end();
            rec.cond2 = set_intersection(alpha, pref).empty();
            records.push_back(rec);
            if (!rec.cond1 || !rec.cond2) {
                ok = false;
                check.failures.push_back(rec);
            }
        }
    }
    check.ok = ok;
    if (ok) {
        EquilibriumCertificate cert;
        cert.profile = profile;
        cert.lambdas = std::move(lambdas);
        cert.checks = std::move(records);
        check.certificate = std::move(cert);
    }
    return check;
}

std::optional<EquilibriumCertificate> Economy::exhaustive_profile_scan(std::int64_t budget) const {
    const int n = num_players();
    std::int64_t total = 1;
    std::vector<std::vector<Selection>> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::int64_t c = selection_count(players_[static_cast<std::size_t>(i)].constraint,
                                         type_space(i));
        if (c == 0) return std::nullopt;
        total = (total > budget / std::max<std::int64_t>(c, 1) + 1) ? budget + 1 : total * c;
        if (total > budget)
            throw std::runtime_error("exhaustive_profile_scan: profile space exceeds budget");
        for_each_selection(players_[static_cast<std::size_t>(i)].constraint, type_space(i),
                           [&](const Selection& g) {
                               all[static_cast<std::size_t>(i)].push_back(g);
                               return true;
                           });
    }
    std::vector<std::size_t> odo(static_cast<std::size_t>(n), 0);
    while (true) {
        StrategyProfile candidate;
        for (int i = 0; i < n; ++i)
            candidate.strategies.push_back(
                all[static_cast<std::size_t>(i)][odo[static_cast<std::size_t>(i)]]);
        auto check = is_equilibrium(candidate);
        if (check.ok) return check.certificate;
        int c = n;
        while (c > 0) {
            --c;
            if (++odo[static_cast<std::size_t>(c)] < all[static_cast<std::size_t>(c)].size())
                break;
            odo[static_cast<std::size_t>(c)] = 0;
            if (c == 0) return std::nullopt;
        }
    }
}

FindEqResult Economy::find_equilibrium(const SolveConfig& config) const {
    FindEqResult result;
    const int n = num_players();
    const bool theorem4 = config.theorem4;

    std::vector<DistributionSet> base_sets;
    base_sets.reserve(static_cast<std::size_t>(n));
    bool all_exact = true;
    std::int64_t tuple_count = 1;
    for (int i = 0; i < n; ++i) {
        base_sets.push_back(build_DDi(i, config.budget, config.seed));
        all_exact = all_exact && base_sets.back().exact;
        auto m = static_cast<std::int64_t>(base_sets.back().members.size());
        tuple_count = (m != 0 && tuple_count > config.budget / m + 1) ? config.budget + 1
                                                                      : tuple_count * m;
    }

    // Extract a profile realizing the lambda tuple from the switching
    // correspondences; confirmation is always via is_equilibrium.
    auto extract = [&](std::span<const Distribution> lambdas)
        -> std::optional<StrategyProfile> {
        StrategyProfile profile;
        for (int i = 0; i < n; ++i) {
            const auto& space = type_space(i);
            Correspondence Fi = switched_correspondence(i, lambdas, theorem4);
            const auto& target = lambdas[static_cast<std::size_t>(i)];
            std::optional<Selection> found;
            auto scan = [&](const Correspondence& corr) {
                if (selection_count(corr, space) > config.budget) return;
                for_each_selection(corr, space, [&](const Selection& g) {
                    if (tv_distance(selection_pushforward(space, g, corr), target) <= config.tol) {
                        found = g;
                        return false;
                    }
                    return true;
                });
            };
            // Prefer selections that are also feasible under D_i, matching
            // the profile space of the equilibrium definition.
            bool have_inter = true;
            Correspondence inter = Fi.intersect(players_[static_cast<std::size_t>(i)].constraint);
            if (!inter.all_values_nonempty()) have_inter = false;
            if (have_inter) scan(inter);
            if (!found) scan(Fi);
            if (!found && Fi.all_values_nonempty()) {
                auto purified = purify(Fi, space, target, config.tol);
                found = purified.selection;
            }
            if (!found) return std::nullopt;
            profile.strategies.push_back(*found);
        }
        return profile;
    };

    auto try_lambda = [&](std::span<const Distribution> lambdas) -> bool {
        ++result.report.lambda_tuples_scanned;
        std::vector<DistributionSet> image;
        try {
            image = phi(lambdas, config.budget, theorem4, config.seed);
        } catch (const std::runtime_error& e) {
            result.report.hypothesis_violations.push_back(e.what());
            return false;
        }
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& m : image[static_cast<std::size_t>(i)].members)
                best = std::min(best, tv_distance(m, lambdas[static_cast<std::size_t>(i)]));
            if (best > config.tol) return false;
        }
        ++result.report.fixed_points_found;
        auto profile = extract(lambdas);
        if (!profile) return false;
        EquilibriumCheck check;
        try {
            check = is_equilibrium(*profile);
        } catch (const std::invalid_argument&) {
            return false;  // extracted profile not feasible under D
        }
        if (check.ok) {
            result.certificate = std::move(check.certificate);
            return true;
        }
        return false;
    };

    if (all_exact && tuple_count <= config.budget) {
        result.report.strategy = "exhaustive";
        std::vector<std::size_t> odo(static_cast<std::size_t>(n), 0);
        while (true) {
            std::vector<Distribution> lambdas;
            for (int i = 0; i < n; ++i)
                lambdas.push_back(base_sets[static_cast<std::size_t>(i)]
                                      .members[odo[static_cast<std::size_t>(i)]]);
            if (try_lambda(lambdas)) {
                result.report.complete = true;
                return result;
            }
            int c = n;
            bool done = false;
            while (c > 0) {
                --c;
                if (++odo[static_cast<std::size_t>(c)] <
                    base_sets[static_cast<std::size_t>(c)].members.size())
                    break;
                odo[static_cast<std::size_t>(c)] = 0;
                if (c == 0) done = true;
            }
            if (done) break;
        }
        result.report.complete = true;
        return result;
    }

    // Iterative search: damped fixed-point iteration from every extreme
    // starting corner (first/last member per component).
    result.report.strategy = "iterative";
    std::vector<std::vector<Distribution>> starts;
    std::int64_t corners = std::int64_t{1} << std::min(n, 16);
    for (std::int64_t mask = 0; mask < corners; ++mask) {
        std::vector<Distribution> start;
        for (int i = 0; i < n; ++i) {
            const auto& members = base_sets[static_cast<std::size_t>(i)].members;
            start.push_back(((mask >> i) & 1) != 0 ? members.back() : members.front());
        }
        starts.push_back(std::move(start));
    }
    std::set<std::string> tried;
    for (auto& lambdas : starts) {
        std::set<std::string> visited;
        for (int iter = 0; iter < config.max_iters; ++iter) {
            std::string key = lambda_key(lambdas);
            if (!visited.insert(key).second) break;
            std::vector<DistributionSet> image;
            try {
                image = phi(lambdas, config.budget, theorem4, config.seed);
            } catch (const std::runtime_error& e) {
                result.report.hypothesis_violations.push_back(e.what());
                break;
            }
            std::vector<Distribution> next;
            double move = 0.0;
            for (int i = 0; i < n; ++i) {
                const auto& members = image[static_cast<std::size_t>(i)].members;
                const Distribution* nearest = &members.front();
                double best = std::numeric_limits<double>::infinity();
                for (const auto& m : members) {
                    double d = tv_distance(m, lambdas[static_cast<std::size_t>(i)]);
                    if (d < best) {
                        best = d;
                        nearest = &m;
                    }
                }
                move = std::max(move, best);
                next.push_back(*nearest);
            }
            if (move <= config.tol) {
                if (tried.insert(key).second && try_lambda(lambdas)) return result;
                break;
            }
            lambdas = std::move(next);
        }
    }
    return result;
}

EconomyHypothesisAudit Economy::audit_hypotheses(const SolveConfig& config) const {
    EconomyHypothesisAudit audit;
    audit.theorem4_mode = config.theorem4;
    const int n = num_players();

    // Lambda grid: product of the (possibly sampled) distribution sets,
    // capped deterministically.
    std::vector<DistributionSet> sets;
    for (int i = 0; i < n; ++i) sets.push_back(build_DDi(i, config.budget, config.seed));
    std::vector<std::vector<Distribution>> grid;
    {
        std::vector<std::size_t> odo(static_cast<std::size_t>(n), 0);
        const std::size_t cap = 512;
        while (grid.size() < cap) {
            std::vector<Distribution> tuple;
            for (int i = 0; i < n; ++i)
                tuple.push_back(
                    sets[static_cast<std::size_t>(i)].members[odo[static_cast<std::size_t>(i)]]);
            grid.push_back(std::move(tuple));
            int c = n;
            bool done = false;
            while (c > 0) {
                --c;
                if (++odo[static_cast<std::size_t>(c)] <
                    sets[static_cast<std::size_t>(c)].members.size())
                    break;
                odo[static_cast<std::size_t>(c)] = 0;
                if (c == 0) done = true;
            }
            if (done) break;
        }
    }
    double min_dist = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < grid.size(); ++a)
        for (std::size_t b = a + 1; b < grid.size(); ++b) {
            double d = tuple_distance(grid[a], grid[b]);
            if (d > 0) min_dist = std::min(min_dist, d);
        }
    if (!std::isfinite(min_dist)) min_dist = 1.0;
    const double delta = min_dist * 1.5;

    for (int i = 0; i < n; ++i) {
        EconomyPlayerAudit pa;
        pa.atomicity = type_space(i).max_atom_weight();
        pa.alpha_closed_form = players_[static_cast<std::size_t>(i)].alpha.closed_form;
        pa.pref_closed_form = players_[static_cast<std::size_t>(i)].pref.closed_form;

        pa.alpha_nonempty = true;
        pa.pref_nonempty = true;
        pa.alpha_usc = true;
        pa.pref_usc = true;
        const auto& space = type_space(i);
        for (int c = 0; c < space.num_cells(); ++c) {
            std::vector<std::vector<int>> alpha_vals, pref_vals;
            for (const auto& tuple : grid) {
                alpha_vals.push_back(eval_correspondence(Which::Alpha, i, c, tuple));
                pref_vals.push_back(eval_correspondence(Which::Pref, i, c, tuple));
                if (alpha_vals.back().empty()) pa.alpha_nonempty = false;
                if (pref_vals.back().empty()) pa.pref_nonempty = false;
            }
            // Containment form of usc in the lambda argument over the grid.
            for (std::size_t a = 0; a < grid.size(); ++a)
                for (std::size_t b = 0; b < grid.size(); ++b) {
                    if (a == b || tuple_distance(grid[a], grid[b]) >= delta) continue;
                    if (!subset_of(alpha_vals[b], alpha_vals[a])) pa.alpha_usc = false;
                    if (!subset_of(pref_vals[b], pref_vals[a])) pa.pref_usc = false;
                }
        }

        // Hypothesis (e): no profile may choose an action it prefers
        // (the selector G when the theorem4 flag is set). Budgeted scan; violations capped.
        try {
            const int cap = 20;
            std::int64_t scanned = 0;
            std::vector<std::vector<Selection>> all(static_cast<std::size_t>(n));
            std::int64_t total = 1;
            for (int j = 0; j < n; ++j) {
                std::int64_t cj = selection_count(players_[static_cast<std::size_t>(j)].constraint,
                                                  type_space(j));
                total = cj == 0 ? 0 : total * cj;
                if (total > config.budget) throw std::runtime_error("profile scan over budget");
                for_each_selection(players_[static_cast<std::size_t>(j)].constraint, type_space(j),
                                   [&](const Selection& g) {
                                       all[static_cast<std::size_t>(j)].push_back(g);
                                       return true;
                                   });
            }
            if (total > 0) {
                std::vector<std::size_t> odo(static_cast<std::size_t>(n), 0);
                bool done = false;
                while (!done) {
                    StrategyProfile prof;
                    for (int j = 0; j < n; ++j)
                        prof.strategies.push_back(
                            all[static_cast<std::size_t>(j)][odo[static_cast<std::size_t>(j)]]);
                    auto lambdas = lambdas_of(prof);
                    for (int c = 0; c < space.num_cells(); ++c) {
                        if (space.cell_weight(c) <= 0) continue;
                        auto banned = config.theorem4
                                          ? eval_correspondence(Which::Selector, i, c, lambdas)
                                          : eval_correspondence(Which::Pref, i, c, lambdas);
                        int a = prof.strategies[static_cast<std::size_t>(i)]
                                    .choice[static_cast<std::size_t>(
                                        space.cells()[static_cast<std::size_t>(c)].front())];
                        if (std::find(banned.begin(), banned.end(), a) != banned.end() &&
                            static_cast<int>(pa.irreflexivity_violations.size()) < cap) {
                            pa.irreflexivity_violations.push_back(
                                "player " + std::to_string(i + 1) + " cell " +
                                players_[static_cast<std::size_t>(i)]
                                    .cell_names[static_cast<std::size_t>(c)] +
                                " profile " + std::to_string(scanned));
                        }
                    }
                    ++scanned;
                    int c = n;
                    while (c > 0) {
                        --c;
                        if (++odo[static_cast<std::size_t>(c)] <
                            all[static_cast<std::size_t>(c)].size())
                            break;
                        odo[static_cast<std::size_t>(c)] = 0;
                        if (c == 0) done = true;
                    }
                }
            }
        } catch (const std::runtime_error&) {
            pa.irreflexivity_violations.push_back("(scan truncated: over budget)");
        }

        auto entries = build_Ui(i, grid, delta);
        pa.ui_size = static_cast<int>(entries.size());
        pa.ui_open_violations = static_cast<int>(
            std::count_if(entries.begin(), entries.end(),
                          [](const UiEntry& e) { return !e.neighbors_inside; }));
        audit.players.push_back(std::move(pa));
    }
    return audit;
}

}  // namespace pieq
