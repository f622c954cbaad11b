#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pieq/config.hpp"
#include "pieq/correspondence.hpp"
#include "pieq/measure.hpp"
#include "pieq/selection.hpp"

namespace pieq {

/// Per-player data of a finite game with private information. The payoff
/// table is flat over (a_1, ..., a_n, x_i), last index fastest.
struct GamePlayer {
    std::string name;
    std::vector<std::string> types;
    std::vector<std::string> shocks;   // a single atom when trivial
    std::vector<std::string> actions;
    std::vector<std::vector<int>> type_cells;
    std::vector<std::string> cell_names;
    Correspondence constraint;  // D_i : types -> actions
    std::vector<double> payoff;
};

struct StrategyProfile {
    std::vector<Selection> strategies;  // one per player, over type atoms
};

struct NashReport {
    bool is_nash = false;
    double worst_gain = 0.0;
    int worst_player = -1;
    bool exhaustive = true;  // false when deviations were truncated to pointwise
};

struct FindNashResult {
    std::optional<StrategyProfile> profile;
    std::string status;  // "found" | "none-exhaustive" | "none-iterative"
    bool exhaustive = false;
    std::int64_t profiles_scanned = 0;
};

struct GameHypothesisAudit {
    std::vector<double> atomicity;              // per player, max atom weight of mu tau_i^-1
    std::vector<double> independence_deviation; // per player, hypothesis (b) tv deviation
    std::vector<double> ui_bound;               // per player, E[max_a |u_i(a, chi_i)|]
    std::string continuity_note;                // hypothesis (c) at finite scale
};

class PrivateInfoGame {
public:
    /// Joint factors are ordered Z_1, X_1, ..., Z_n, X_n.
    PrivateInfoGame(std::vector<GamePlayer> players, ProductSpace joint);

    int num_players() const { return static_cast<int>(players_.size()); }
    const GamePlayer& player(int i) const { return players_.at(static_cast<std::size_t>(i)); }
    const ProductSpace& joint() const { return joint_; }
    int type_factor(int i) const { return 2 * i; }
    int shock_factor(int i) const { return 2 * i + 1; }

    /// Marginal type space of player i (mu tau_i^-1) carrying the
    /// player's sigma partition.
    const FiniteProbSpace& type_space(int i) const {
        return type_spaces_.at(static_cast<std::size_t>(i));
    }

    double payoff(int i, std::span<const int> actions, int shock) const;

    /// Throws when some strategy is not a measurable selection of D_i.
    void validate_profile(const StrategyProfile& profile) const;

    double expected_payoff(const StrategyProfile& profile, int i) const;

    /// Nash check: quantifies deviations over all measurable
    /// selections of D_i when the count fits the budget, else falls back
    /// to pointwise per-cell deviations and flags the report.
    NashReport check_nash(const StrategyProfile& profile, double eps,
                          std::int64_t budget = 1000000) const;

    FindNashResult find_nash(const SolveConfig& config) const;

    GameHypothesisAudit audit_hypotheses() const;

private:
    std::vector<GamePlayer> players_;
    ProductSpace joint_;
    std::vector<FiniteProbSpace> type_spaces_;
    std::vector<std::int64_t> payoff_strides_;  // per player index stride into payoff tables
};

}  // namespace pieq
