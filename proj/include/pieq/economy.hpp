#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pieq/config.hpp"
#include "pieq/correspondence.hpp"
#include "pieq/dsl.hpp"
#include "pieq/game.hpp"
#include "pieq/measure.hpp"
#include "pieq/selection.hpp"

namespace pieq {

/// Parameterized correspondence defined per action by a DSL predicate
/// over (zcell, lambda tuple).
struct CorrespondenceSpec {
    std::vector<dsl::ExprPtr> per_action;  // aligned with the player's action list
    std::vector<std::string> texts;        // source form, for serialization
    bool closed_form = true;               // all predicates free of strict comparisons
};

struct EconomyPlayer {
    std::string name;
    std::vector<std::string> types;
    std::vector<std::string> actions;
    std::vector<std::vector<int>> type_cells;
    std::vector<std::string> cell_names;
    Correspondence constraint;  // D_i : types -> actions
    CorrespondenceSpec alpha;
    CorrespondenceSpec pref;                      // P_i
    std::optional<CorrespondenceSpec> selector;   // G, used when theorem4 is set
};

struct CheckRecord {
    int player;
    int cell;
    bool cond1;  // g(z) in alpha(z, lambda*)
    bool cond2;  // alpha(z, lambda*) meets P(z, lambda*) nowhere
};

struct EquilibriumCertificate {
    StrategyProfile profile;
    std::vector<Distribution> lambdas;
    std::vector<CheckRecord> checks;
};

struct EquilibriumCheck {
    bool ok = false;
    std::optional<EquilibriumCertificate> certificate;
    std::vector<CheckRecord> failures;
};

struct UiEntry {
    int cell;
    int grid_index;
    bool neighbors_inside;  // openness diagnostic at the stated delta
};

struct FindEqReport {
    std::string strategy;  // "exhaustive" | "iterative"
    bool complete = false;
    std::int64_t lambda_tuples_scanned = 0;
    int fixed_points_found = 0;
    std::vector<std::string> hypothesis_violations;
};

struct FindEqResult {
    std::optional<EquilibriumCertificate> certificate;
    FindEqReport report;
};

struct EconomyPlayerAudit {
    double atomicity;
    bool alpha_nonempty;
    bool pref_nonempty;          // hypothesis (d) requires P_i nonempty-valued
    bool alpha_usc;              // grid containment check over the lambda grid
    bool pref_usc;
    bool alpha_closed_form;
    bool pref_closed_form;
    std::vector<std::string> irreflexivity_violations;  // hypothesis (e), capped
    int ui_size;                 // members of U_i over the grid
    int ui_open_violations;      // grid-openness diagnostic of hypothesis (f)
};

struct EconomyHypothesisAudit {
    std::vector<EconomyPlayerAudit> players;
    bool theorem4_mode = false;
};

class Economy {
public:
    enum class Which { Alpha, Pref, Selector };

    /// Joint factors are ordered Z_1, ..., Z_n.
    Economy(std::vector<EconomyPlayer> players, ProductSpace joint);

    int num_players() const { return static_cast<int>(players_.size()); }
    const EconomyPlayer& player(int i) const { return players_.at(static_cast<std::size_t>(i)); }
    const ProductSpace& joint() const { return joint_; }
    const FiniteProbSpace& type_space(int i) const {
        return type_spaces_.at(static_cast<std::size_t>(i));
    }

    DistributionSet build_DDi(int i, std::int64_t budget, std::uint64_t seed = 0) const;

    /// Evaluates alpha_i / P_i / G_i at (cell of z_i, lambda tuple).
    std::vector<int> eval_correspondence(Which which, int i, int cell,
                                         std::span<const Distribution> lambdas) const;

    /// True iff (z_i, lambda) lies in U_i: alpha_i and P_i intersect in
    /// the empty set there.
    bool in_Ui(int i, int cell, std::span<const Distribution> lambdas) const;

    /// The switching correspondence F_i: alpha_i on U_i, alpha_i cap P_i
    /// (or the selector G when theorem4 is set) off U_i.
    std::vector<int> switch_F(int i, int cell, std::span<const Distribution> lambdas,
                              bool theorem4) const;

    /// switch_F packaged as a correspondence over player i's types.
    Correspondence switched_correspondence(int i, std::span<const Distribution> lambdas,
                                           bool theorem4) const;

    /// Per-player distribution sets of the switching correspondences.
    std::vector<DistributionSet> phi(std::span<const Distribution> lambdas, std::int64_t budget,
                                     bool theorem4, std::uint64_t seed = 0) const;

    /// U_i membership over an explicit lambda grid, with an openness
    /// diagnostic at scale delta (max-component tv metric).
    std::vector<UiEntry> build_Ui(int i, const std::vector<std::vector<Distribution>>& lambda_grid,
                                  double delta) const;

    void validate_profile(const StrategyProfile& profile) const;

    /// Induced lambda tuple (mu tau_i^-1) g_i^-1 of a profile.
    std::vector<Distribution> lambdas_of(const StrategyProfile& profile) const;

    /// Equilibrium verification. Conditions quantify over positive-weight
    /// cells only.
    EquilibriumCheck is_equilibrium(const StrategyProfile& profile) const;

    FindEqResult find_equilibrium(const SolveConfig& config) const;

    EconomyHypothesisAudit audit_hypotheses(const SolveConfig& config) const;

    /// Independent brute force over all profiles; used as the search
    /// oracle and by audits. Returns the first certifying profile.
    std::optional<EquilibriumCertificate> exhaustive_profile_scan(std::int64_t budget) const;

private:
    std::vector<int> eval_spec(const CorrespondenceSpec& spec, int i, int cell,
                               std::span<const Distribution> lambdas) const;

    std::vector<EconomyPlayer> players_;
    ProductSpace joint_;
    std::vector<FiniteProbSpace> type_spaces_;
};

}  // namespace pieq
