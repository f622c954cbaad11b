#include <random>
#include <stdexcept>

#include <doctest.h>

#include "pieq/economy.hpp"

using namespace pieq;

namespace {

CorrespondenceSpec spec(std::vector<std::string> texts) {
    CorrespondenceSpec s;
    s.texts = texts;
    s.closed_form = true;
    for (const auto& t : texts) {
        auto e = dsl::parse(t);
        s.closed_form = s.closed_form && dsl::is_closed_form(e);
        s.per_action.push_back(std::move(e));
    }
    return s;
}

// One player, two uniform type cells (lo, hi), actions {a, b}, full D.
Economy one_player(std::vector<std::string> alpha, std::vector<std::string> pref,
                   std::optional<std::vector<std::string>> selector = std::nullopt) {
    std::vector<std::string> types{"lo", "hi"};
    Correspondence d(types, {"a", "b"}, {{0, 1}, {0, 1}}, std::nullopt,
                     std::vector<std::vector<int>>{{0}, {1}});
    EconomyPlayer pl{"p1",
                     types,
                     {"a", "b"},
                     {{0}, {1}},
                     {"lo", "hi"},
                     d,
                     spec(std::move(alpha)),
                     spec(std::move(pref)),
                     selector ? std::optional<CorrespondenceSpec>(spec(*selector)) : std::nullopt};
    ProductSpace joint({types}, {0.5, 0.5});
    return Economy({pl}, std::move(joint));
}

Economy trivial_two_player() {
    auto make = [&](const std::string& name, std::vector<std::string> types) {
        Correspondence d(types, {"a", "b"}, {{0, 1}, {0, 1}});
        return EconomyPlayer{name,          types, {"a", "b"},
                             {{0}, {1}},    types, d,
                             spec({"true", "true"}), spec({"false", "false"}),
                             std::nullopt};
    };
    ProductSpace joint({{"z1", "z2"}, {"w1", "w2"}}, {0.25, 0.25, 0.25, 0.25});
    return Economy({make("p1", {"z1", "z2"}), make("p2", {"w1", "w2"})}, std::move(joint));
}

}  // namespace

TEST_CASE("distribution sets of the constraint") {
    auto econ = one_player({"true", "true"}, {"false", "false"});
    auto dd = econ.build_DDi(0, 1000);
    REQUIRE(dd.exact);
    CHECK(dd.members.size() == 3);  // 4 selections dedupe to 3
    CHECK(convexification_gap(dd) == doctest::Approx(0.25));
}

TEST_CASE("correspondence evaluation") {
    auto econ = one_player({"true", "true"}, {"false", "lam[1][b] < 0.5"});
    std::vector<Distribution> low{Distribution({"a", "b"}, {1.0, 0.0})};
    std::vector<Distribution> high{Distribution({"a", "b"}, {0.0, 1.0})};
    CHECK(econ.eval_correspondence(Economy::Which::Alpha, 0, 0, low) ==
          std::vector<int>{0, 1});
    CHECK(econ.eval_correspondence(Economy::Which::Pref, 0, 0, low) == std::vector<int>{1});
    CHECK(econ.eval_correspondence(Economy::Which::Pref, 0, 0, high) == std::vector<int>{});
}

TEST_CASE("threshold predicates exclude actions by induced mass") {
    // alpha admits a only while player 2 puts at most half on b.
    auto make = [&](const std::string& name, std::vector<std::string> types,
                    std::vector<std::string> alpha) {
        Correspondence d(types, {"a", "b"}, {{0, 1}, {0, 1}});
        return EconomyPlayer{name,       types, {"a", "b"}, {{0}, {1}}, types, d,
                             spec(alpha), spec({"false", "false"}), std::nullopt};
    };
    ProductSpace joint({{"z1", "z2"}, {"w1", "w2"}}, {0.25, 0.25, 0.25, 0.25});
    Economy econ({make("p1", {"z1", "z2"}, {"lam[2][b] <= 0.5", "true"}),
                  make("p2", {"w1", "w2"}, {"true", "true"})},
                 std::move(joint));
    std::vector<Distribution> lams{Distribution({"a", "b"}, {0.5, 0.5}),
                                   Distribution({"a", "b"}, {0.0, 1.0})};  // delta_b
    CHECK(econ.eval_correspondence(Economy::Which::Alpha, 0, 0, lams) == std::vector<int>{1});
}

TEST_CASE("equilibrium verification conditions") {
    SUBCASE("empty preference certifies every profile") {
        auto econ = one_player({"true", "true"}, {"false", "false"});
        for (int a0 = 0; a0 < 2; ++a0)
            for (int a1 = 0; a1 < 2; ++a1) {
                StrategyProfile prof{{Selection{{a0, a1}}}};
                auto check = econ.is_equilibrium(prof);
                CHECK(check.ok);
                REQUIRE(check.certificate.has_value());
                CHECK(tv_distance(check.certificate->lambdas[0],
                                  econ.lambdas_of(prof)[0]) == doctest::Approx(0.0));
            }
    }
    SUBCASE("full preference never certifies") {
        auto econ = one_player({"true", "true"}, {"true", "true"});
        for (int a0 = 0; a0 < 2; ++a0)
            for (int a1 = 0; a1 < 2; ++a1) {
                StrategyProfile prof{{Selection{{a0, a1}}}};
                CHECK_FALSE(econ.is_equilibrium(prof).ok);
            }
    }
    SUBCASE("threshold economy certifies exactly above the threshold") {
        auto econ = one_player({"true", "true"}, {"false", "lam[1][b] < 0.5"});
        CHECK_FALSE(econ.is_equilibrium(StrategyProfile{{Selection{{0, 0}}}}).ok);  // mass 0
        CHECK(econ.is_equilibrium(StrategyProfile{{Selection{{0, 1}}}}).ok);        // mass .5
        CHECK(econ.is_equilibrium(StrategyProfile{{Selection{{1, 1}}}}).ok);        // mass 1
    }
    SUBCASE("invalid profiles are rejected") {
        auto econ = one_player({"true", "true"}, {"false", "false"});
        StrategyProfile bad{{Selection{{0}}}};  // wrong length
        CHECK_THROWS_AS((void)econ.is_equilibrium(bad), std::invalid_argument);
    }
}

TEST_CASE("switching correspondence") {
    SUBCASE("empty preference makes the switch identical to alpha") {
        auto econ = one_player({"true", "true"}, {"false", "false"});
        std::vector<Distribution> lams{Distribution({"a", "b"}, {0.5, 0.5})};
        CHECK(econ.in_Ui(0, 0, lams));
        CHECK(econ.switch_F(0, 0, lams, false) == std::vector<int>{0, 1});
    }
    SUBCASE("off U the switch takes the intersection") {
        auto econ = one_player({"true", "true"}, {"false", "lam[1][b] < 0.5"});
        std::vector<Distribution> low{Distribution({"a", "b"}, {1.0, 0.0})};
        CHECK_FALSE(econ.in_Ui(0, 0, low));
        CHECK(econ.switch_F(0, 0, low, false) == std::vector<int>{1});
        std::vector<Distribution> high{Distribution({"a", "b"}, {0.0, 1.0})};
        CHECK(econ.in_Ui(0, 0, high));
        CHECK(econ.switch_F(0, 0, high, false) == std::vector<int>{0, 1});
    }
    SUBCASE("selector mode substitutes G off U") {
        auto econ = one_player({"true", "true"}, {"false", "lam[1][b] < 0.5"},
                               std::vector<std::string>{{"false"}, {"lam[1][b] < 0.5"}});
        std::vector<Distribution> low{Distribution({"a", "b"}, {1.0, 0.0})};
        CHECK(econ.switch_F(0, 0, low, true) == std::vector<int>{1});
    }
    SUBCASE("switch is always contained in alpha") {
        auto econ = one_player({"true", "lam[1][b] <= 0.5"}, {"false", "lam[1][b] < 0.5"});
        std::mt19937_64 rng(59);
        for (int trial = 0; trial < 1000; ++trial) {
            double mb = static_cast<double>(rng() % 101) / 100.0;
            std::vector<Distribution> lams{Distribution({"a", "b"}, {1.0 - mb, mb})};
            for (int cell = 0; cell < 2; ++cell) {
                std::vector<int> alpha =
                    econ.eval_correspondence(Economy::Which::Alpha, 0, cell, lams);
                std::vector<int> f;
                try {
                    f = econ.switch_F(0, cell, lams, false);
                } catch (const std::runtime_error&) {
                    continue;  // hypothesis violation: nothing to contain
                }
                CHECK(subset_of(f, alpha));
            }
        }
    }
}

TEST_CASE("phi is constant when preferences are empty") {
    auto econ = trivial_two_player();
    std::vector<DistributionSet> dd;
    for (int i = 0; i < 2; ++i) dd.push_back(econ.build_DDi(i, 1000));
    for (const auto& m1 : dd[0].members) {
        for (const auto& m2 : dd[1].members) {
            std::vector<Distribution> lams{m1, m2};
            auto ph = econ.phi(lams, 1000, false);
            REQUIRE(ph.size() == 2);
            for (int i = 0; i < 2; ++i) {
                REQUIRE(ph[static_cast<std::size_t>(i)].members.size() ==
                        dd[static_cast<std::size_t>(i)].members.size());
                for (std::size_t k = 0; k < ph[static_cast<std::size_t>(i)].members.size(); ++k)
                    CHECK(tv_distance(ph[static_cast<std::size_t>(i)].members[k],
                                      dd[static_cast<std::size_t>(i)].members[k]) ==
                          doctest::Approx(0.0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("U sets over the lambda grid") {
    auto econ = one_player({"true", "true"}, {"false", "lam[1][b] < 0.5"});
    auto dd = econ.build_DDi(0, 1000);
    std::vector<std::vector<Distribution>> grid;
    for (const auto& m : dd.members) grid.push_back({m});
    auto entries = econ.build_Ui(0, grid, 0.6);
    // Members sorted lexicographically: (0,1), (0.5,0.5), (1,0) by mass on a.
    // U holds when mass on b >= 0.5 → first two grid points, both cells.
    REQUIRE(entries.size() == 4);  // 2 cells x 2 qualifying grid points
    for (const auto& e : entries) CHECK(e.grid_index <= 1);
}

TEST_CASE("find_equilibrium agrees with the exhaustive oracle") {
    struct Case {
        Economy econ;
        bool expect;
    };
    std::vector<Case> cases;
    cases.push_back({one_player({"true", "true"}, {"false", "false"}), true});
    cases.push_back({one_player({"true", "true"}, {"true", "true"}), false});
    cases.push_back({one_player({"true", "true"}, {"false", "lam[1][b] < 0.5"}), true});
    cases.push_back({one_player({"true", "true"}, {"lam[1][a] < 2.0", "lam[1][b] < 2.0"}), false});
    cases.push_back({trivial_two_player(), true});
    cases.push_back({one_player({"true", "true"}, {"false", "lam[1][b] < 0.5"},
                                std::vector<std::string>{{"false"}, {"lam[1][b] < 0.5"}}),
                     true});
    for (auto& c : cases) {
        SolveConfig cfg;
        cfg.budget = 100000;
        auto res = c.econ.find_equilibrium(cfg);
        auto oracle = c.econ.exhaustive_profile_scan(cfg.budget);
        CHECK(res.certificate.has_value() == c.expect);
        CHECK(oracle.has_value() == c.expect);
        if (res.certificate) {
            // Certificates re-verify from scratch.
            auto again = c.econ.is_equilibrium(res.certificate->profile);
            CHECK(again.ok);
        }
    }
}

TEST_CASE("selector mode via the theorem4 config flag") {
    auto econ = one_player({"true", "true"}, {"false", "lam[1][b] < 0.75"},
                           std::vector<std::string>{{"false"}, {"lam[1][b] < 0.75"}});
    SolveConfig cfg;
    cfg.theorem4 = true;
    auto res = econ.find_equilibrium(cfg);
    REQUIRE(res.certificate.has_value());
    // Only lambda(b) = 1 clears the 0.75 threshold on the half grid.
    CHECK(res.certificate->lambdas[0].mass(1) == doctest::Approx(1.0));
}

TEST_CASE("hypothesis audit") {
    SUBCASE("empty preference fails the nonemptiness hypothesis") {
        auto econ = one_player({"true", "true"}, {"false", "false"});
        auto audit = econ.audit_hypotheses(SolveConfig{});
        REQUIRE(audit.players.size() == 1);
        CHECK(audit.players[0].atomicity == doctest::Approx(0.5));
        CHECK(audit.players[0].alpha_nonempty);
        CHECK_FALSE(audit.players[0].pref_nonempty);
        CHECK(audit.players[0].alpha_usc);  // constant in lambda
        CHECK(audit.players[0].alpha_closed_form);
        CHECK(audit.players[0].ui_open_violations == 0);
    }
    SUBCASE("strict predicates are flagged as not closed-form") {
        auto econ = one_player({"true", "true"}, {"false", "lam[1][b] < 0.5"});
        auto audit = econ.audit_hypotheses(SolveConfig{});
        CHECK_FALSE(audit.players[0].pref_closed_form);
    }
    SUBCASE("irreflexivity scan lists profiles choosing preferred actions") {
        // P admits b whenever mass on b is positive, so the all-b profile
        // has g(z) in P(z, lambda) and is reported.
        auto econ = one_player({"true", "true"}, {"false", "lam[1][b] >= 0.5"});
        auto audit = econ.audit_hypotheses(SolveConfig{});
        CHECK_FALSE(audit.players[0].irreflexivity_violations.empty());
    }
}

TEST_CASE("atomicity level falls linearly under refinement") {
    // Hand-refined version of the one-player economy: k = 8.
    int k = 8;
    std::vector<std::string> types;
    std::vector<std::vector<int>> cells;
    std::vector<std::string> cell_names;
    std::vector<std::vector<int>> dvals;
    for (int c = 0; c < 2; ++c)
        for (int j = 0; j < k; ++j) {
            cells.push_back({static_cast<int>(types.size())});
            cell_names.push_back("c" + std::to_string(c) + "_" + std::to_string(j));
            types.push_back("t" + std::to_string(c) + "_" + std::to_string(j));
            dvals.push_back({0, 1});
        }
    Correspondence d(types, {"a", "b"}, dvals, std::nullopt, cells);
    EconomyPlayer pl{"p1",  types, {"a", "b"},          cells,
                     cell_names, d, spec({"true", "true"}), spec({"false", "false"}),
                     std::nullopt};
    ProductSpace joint({types}, std::vector<double>(types.size(), 1.0 / (2 * k)));
    Economy econ({pl}, std::move(joint));
    auto audit = econ.audit_hypotheses(SolveConfig{});
    CHECK(audit.players[0].atomicity == doctest::Approx(0.5 / k));
}
