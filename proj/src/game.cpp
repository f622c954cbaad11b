#include "pieq/game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace pieq {

namespace {

std::string profile_key(const StrategyProfile& p) {
    std::string key;
    for (const auto& g : p.strategies) {
        for (int c : g.choice) {
            key += std::to_string(c);
            key += ',';
        }
        key += ';';
    }
    return key;
}

}  // namespace

PrivateInfoGame::PrivateInfoGame(std::vector<GamePlayer> players, ProductSpace joint)
    : players_(std::move(players)), joint_(std::move(joint)) {
    const int n = num_players();
    if (n == 0) throw std::invalid_argument("game needs at least one player");
    if (joint_.num_factors() != 2 * n)
        throw std::invalid_argument("joint must have a type and a shock factor per player");
    for (int i = 0; i < n; ++i) {
        const auto& pl = players_[static_cast<std::size_t>(i)];
        if (joint_.factor(type_factor(i)) != pl.types)
            throw std::invalid_argument("joint type factor mismatch for player " + pl.name);
        if (joint_.factor(shock_factor(i)) != pl.shocks)
            throw std::invalid_argument("joint shock factor mismatch for player " + pl.name);
        if (!pl.constraint.all_values_nonempty())
            throw std::invalid_argument("constraint D has an empty value for player " + pl.name);
        std::int64_t expected = static_cast<std::int64_t>(pl.shocks.size());
        for (int j = 0; j < n; ++j)
            expected *= static_cast<std::int64_t>(players_[static_cast<std::size_t>(j)].actions.size());
        if (static_cast<std::int64_t>(pl.payoff.size()) != expected)
            throw std::invalid_argument("payoff table incomplete for player " + pl.name);
    }
    for (int i = 0; i < n; ++i) {
        Distribution m = joint_.marginal(type_factor(i));
        type_spaces_.emplace_back(m.support(), m.mass(),
                                  players_[static_cast<std::size_t>(i)].type_cells);
    }
}

double PrivateInfoGame::payoff(int i, std::span<const int> actions, int shock) const {
    const auto& pl = players_.at(static_cast<std::size_t>(i));
    std::int64_t idx = 0;
    for (int j = 0; j < num_players(); ++j) {
        const auto& nj = players_[static_cast<std::size_t>(j)].actions.size();
        int a = actions[static_cast<std::size_t>(j)];
        if (a < 0 || a >= static_cast<int>(nj))
            throw std::out_of_range("payoff: action index out of range");
        idx = idx * static_cast<std::int64_t>(nj) + a;
    }
    idx = idx * static_cast<std::int64_t>(pl.shocks.size()) + shock;
    return pl.payoff.at(static_cast<std::size_t>(idx));
}

void PrivateInfoGame::validate_profile(const StrategyProfile& profile) const {
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

double PrivateInfoGame::expected_payoff(const StrategyProfile& profile, int i) const {
    const int n = num_players();
    std::vector<int> actions(static_cast<std::size_t>(n));
    double total = 0.0;
    for (std::int64_t w = 0; w < joint_.size(); ++w) {
        double mu = joint_.weight(w);
        if (mu == 0.0) continue;
        for (int j = 0; j < n; ++j)
            actions[static_cast<std::size_t>(j)] =
                profile.strategies[static_cast<std::size_t>(j)]
                    .choice[static_cast<std::size_t>(joint_.project(w, type_factor(j)))];
        total += mu * payoff(i, actions, joint_.project(w, shock_factor(i)));
    }
    return total;
}

NashReport PrivateInfoGame::check_nash(const StrategyProfile& profile, double eps,
                                       std::int64_t budget) const {
    validate_profile(profile);
    NashReport report;
    report.is_nash = true;
    for (int i = 0; i < num_players(); ++i) {
        double base = expected_payoff(profile, i);
        const auto& space = type_space(i);
        const auto& D = players_[static_cast<std::size_t>(i)].constraint;
        StrategyProfile dev = profile;
        auto consider = [&](const Selection& gi) {
            dev.strategies[static_cast<std::size_t>(i)] = gi;
            double gain = expected_payoff(dev, i) - base;
            if (gain > report.worst_gain) {
                report.worst_gain = gain;
                report.worst_player = i;
            }
        };
        if (selection_count(D, space) <= budget) {
            for_each_selection(D, space, [&](const Selection& gi) {
                consider(gi);
                return true;
            });
        } else {
            // Pointwise fallback: one cell changed at a time.
            report.exhaustive = false;
            auto values = cell_values(D, space);
            for (int c = 0; c < space.num_cells(); ++c) {
                for (int a : values[static_cast<std::size_t>(c)]) {
                    Selection gi = profile.strategies[static_cast<std::size_t>(i)];
                    for (int atom : space.cells()[static_cast<std::size_t>(c)])
                        gi.choice[static_cast<std::size_t>(atom)] = a;
                    consider(gi);
                }
            }
        }
    }
    report.is_nash = report.worst_gain <= eps;
    return report;
}

FindNashResult PrivateInfoGame::find_nash(const SolveConfig& config) const {
    FindNashResult result;
    const int n = num_players();

    std::int64_t total = 1;
    bool overflow = false;
    for (int i = 0; i < n; ++i) {
        std::int64_t c = selection_count(players_[static_cast<std::size_t>(i)].constraint,
                                         type_space(i));
        if (c == 0) {
            result.status = "none-exhaustive";
            result.exhaustive = true;
            return result;
        }
        if (total > config.budget / c + 1) overflow = true;
        total *= c;
        if (total > config.budget) overflow = true;
    }

    if (!overflow && total <= config.budget) {
        // Exhaustive scan in deterministic enumeration order.
        std::vector<std::vector<Selection>> all(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            for_each_selection(players_[static_cast<std::size_t>(i)].constraint, type_space(i),
                               [&](const Selection& g) {
                                   all[static_cast<std::size_t>(i)].push_back(g);
                                   return true;
                               });
        std::vector<std::size_t> odo(static_cast<std::size_t>(n), 0);
        while (true) {
            StrategyProfile candidate;
            for (int i = 0; i < n; ++i)
                candidate.strategies.push_back(all[static_cast<std::size_t>(i)][odo[static_cast<std::size_t>(i)]]);
            ++result.profiles_scanned;
            NashReport rep = check_nash(candidate, config.eps, config.budget);
            if (rep.is_nash) {
                result.profile = std::move(candidate);
                result.status = "found";
                result.exhaustive = true;
                return result;
            }
            int c = n;
            bool done = false;
            while (c > 0) {
                --c;
                if (++odo[static_cast<std::size_t>(c)] < all[static_cast<std::size_t>(c)].size())
                    break;
                odo[static_cast<std::size_t>(c)] = 0;
                if (c == 0) done = true;
            }
            if (done) break;
        }
        result.status = "none-exhaustive";
        result.exhaustive = true;
        return result;
    }

    // Best-response iteration, ascending player order, cycle detection by
    // profile hashing.
    StrategyProfile current;
    for (int i = 0; i < n; ++i) {
        bool taken = false;
        for_each_selection(players_[static_cast<std::size_t>(i)].constraint, type_space(i),
                           [&](const Selection& g) {
                               current.strategies.push_back(g);
                               taken = true;
                               return false;
                           });
        if (!taken) {
            result.status = "none-exhaustive";
            return result;
        }
    }
    std::unordered_set<std::string> visited;
    for (int iter = 0; iter < config.max_iters; ++iter) {
        if (!visited.insert(profile_key(current)).second) break;
        bool improved = false;
        for (int i = 0; i < n; ++i) {
            double base = expected_payoff(current, i);
            const auto& space = type_space(i);
            const auto& D = players_[static_cast<std::size_t>(i)].constraint;
            Selection best = current.strategies[static_cast<std::size_t>(i)];
            double best_gain = 0.0;
            StrategyProfile dev = current;
            auto consider = [&](const Selection& gi) {
                dev.strategies[static_cast<std::size_t>(i)] = gi;
                double gain = expected_payoff(dev, i) - base;
                if (gain > best_gain + config.eps) {
                    best_gain = gain;
                    best = gi;
                }
            };
            if (selection_count(D, space) <= config.budget) {
                for_each_selection(D, space, [&](const Selection& gi) {
                    consider(gi);
                    return true;
                });
            } else {
                auto values = cell_values(D, space);
                for (int c = 0; c < space.num_cells(); ++c)
                    for (int a : values[static_cast<std::size_t>(c)]) {
                        Selection gi = current.strategies[static_cast<std::size_t>(i)];
                        for (int atom : space.cells()[static_cast<std::size_t>(c)])
                            gi.choice[static_cast<std::size_t>(atom)] = a;
                        consider(gi);
                    }
            }
            if (best_gain > 0.0) {
                current.strategies[static_cast<std::size_t>(i)] = best;
                improved = true;
            }
        }
        ++result.profiles_scanned;
        if (!improved) {
            NashReport rep = check_nash(current, config.eps, config.budget);
            if (rep.is_nash) {
                result.profile = std::move(current);
                result.status = "found";
                return result;
            }
            break;
        }
    }
    result.status = "none-iterative";
    return result;
}

GameHypothesisAudit PrivateInfoGame::audit_hypotheses() const {
    GameHypothesisAudit audit;
    const int n = num_players();
    audit.continuity_note =
        "hypothesis (c) holds at finite scale: payoff tables are continuous on discrete sets";
    for (int i = 0; i < n; ++i) {
        audit.atomicity.push_back(type_space(i).max_atom_weight());

        // Hypothesis (b): {tau_j : j != i} together with xi_i = (tau_i,
        // chi_i); shock coordinates of other players are marginalized out.
        std::vector<int> keep;
        std::vector<std::vector<int>> grouping;
        int pos = 0;
        for (int j = 0; j < n; ++j) {
            if (j == i) {
                keep.push_back(type_factor(j));
                keep.push_back(shock_factor(j));
                grouping.push_back({pos, pos + 1});
                pos += 2;
            } else {
                keep.push_back(type_factor(j));
                grouping.push_back({pos});
                pos += 1;
            }
        }
        ProductSpace reduced = marginalize(joint_, keep);
        double dev = 0.0;
        reduced.is_mutually_independent(grouping, 0.0, &dev);
        audit.independence_deviation.push_back(dev);

        // Condition (UI): E[max_a |u_i(a, chi_i)|].
        std::vector<std::int64_t> action_sizes;
        std::int64_t tuples = 1;
        for (int j = 0; j < n; ++j) {
            action_sizes.push_back(
                static_cast<std::int64_t>(players_[static_cast<std::size_t>(j)].actions.size()));
            tuples *= action_sizes.back();
        }
        double bound = 0.0;
        for (std::int64_t w = 0; w < joint_.size(); ++w) {
            double mu = joint_.weight(w);
            if (mu == 0.0) continue;
            int shock = joint_.project(w, shock_factor(i));
            double h = 0.0;
            std::vector<int> actions(static_cast<std::size_t>(n), 0);
            for (std::int64_t a = 0; a < tuples; ++a) {
                std::int64_t rem = a;
                for (int j = n - 1; j >= 0; --j) {
                    actions[static_cast<std::size_t>(j)] =
                        static_cast<int>(rem % action_sizes[static_cast<std::size_t>(j)]);
                    rem /= action_sizes[static_cast<std::size_t>(j)];
                }
                h = std::max(h, std::abs(payoff(i, actions, shock)));
            }
            bound += mu * h;
        }
        audit.ui_bound.push_back(bound);
    }
    return audit;
}

}  // namespace pieq
