#include <random>
#include <set>
#include <stdexcept>

#include <doctest.h>

#include "pieq/selection.hpp"

using namespace pieq;

namespace {

FiniteProbSpace uniform_space(int n) {
    std::vector<std::string> atoms;
    std::vector<double> w;
    for (int i = 0; i < n; ++i) {
        atoms.push_back("t" + std::to_string(i));
        w.push_back(1.0 / n);
    }
    return FiniteProbSpace(atoms, w);
}

Correspondence full_binary(const FiniteProbSpace& s) {
    std::vector<std::vector<int>> values(static_cast<std::size_t>(s.size()), {0, 1});
    return Correspondence(s.atoms(), {"0", "1"}, values, std::nullopt, s.cells());
}

}  // namespace

TEST_CASE("selection counts") {
    auto s1 = uniform_space(3);
    std::vector<std::vector<int>> singleton(3, std::vector<int>{0});
    Correspondence f(s1.atoms(), {"a"}, singleton);
    CHECK(selection_count(f, s1) == 1);

    auto s2 = uniform_space(2);
    Correspondence g(s2.atoms(), {"0", "1"}, {{0, 1}, {0}});
    CHECK(selection_count(g, s2) == 2);

    Correspondence h(s2.atoms(), {"0", "1"}, {{0, 1}, {}});
    CHECK(selection_count(h, s2) == 0);
}

TEST_CASE("selection enumeration is deterministic and complete") {
    auto s = uniform_space(2);
    auto f = full_binary(s);
    std::vector<std::vector<int>> seen;
    for_each_selection(f, s, [&](const Selection& g) {
        seen.push_back(g.choice);
        return true;
    });
    // Odometer order, lowest action first, last cell fastest.
    REQUIRE(seen.size() == 4);
    CHECK(seen[0] == std::vector<int>{0, 0});
    CHECK(seen[1] == std::vector<int>{0, 1});
    CHECK(seen[2] == std::vector<int>{1, 0});
    CHECK(seen[3] == std::vector<int>{1, 1});
}

TEST_CASE("distribution sets at small scale") {
    auto s1 = uniform_space(1);
    auto d1 = distribution_set(full_binary(s1), s1, 1000);
    REQUIRE(d1.exact);
    REQUIRE(d1.members.size() == 2);
    CHECK(d1.members[0].mass(1) == doctest::Approx(1.0));  // sorted lexicographically
    CHECK(d1.members[1].mass(0) == doctest::Approx(1.0));

    auto s2 = uniform_space(2);
    auto d2 = distribution_set(full_binary(s2), s2, 1000);
    REQUIRE(d2.exact);
    CHECK(d2.members.size() == 3);  // 4 selections dedupe to 3 distributions

    std::vector<std::vector<int>> singleton(2, std::vector<int>{0});
    Correspondence c(s2.atoms(), {"0", "1"}, singleton);
    CHECK(distribution_set(c, s2, 1000).members.size() == 1);
}

TEST_CASE("selection existence iff values nonempty on random instances") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 500; ++trial) {
        int n = 1 + static_cast<int>(rng() % 4);
        auto s = uniform_space(n);
        std::vector<std::vector<int>> values(static_cast<std::size_t>(n));
        for (auto& v : values)
            for (int y = 0; y < 3; ++y)
                if (rng() % 3) v.push_back(y);
        Correspondence f(s.atoms(), {"0", "1", "2"}, values);
        bool nonempty = f.all_values_nonempty();
        auto d = distribution_set(f, s, 1 << 20);
        CHECK(nonempty == !d.members.empty());
        CHECK(is_compact_closed(d) == nonempty);
    }
}

TEST_CASE("convexification gap on the canonical family") {
    CHECK(convexification_gap(distribution_set(full_binary(uniform_space(1)), uniform_space(1),
                                               1000)) == doctest::Approx(0.5));
    CHECK(convexification_gap(distribution_set(full_binary(uniform_space(2)), uniform_space(2),
                                               1000)) == doctest::Approx(0.25));
    for (int n : {4, 8, 16}) {
        auto s = uniform_space(n);
        CHECK(convexification_gap(distribution_set(full_binary(s), s, 1 << 20)) ==
              doctest::Approx(1.0 / (2 * n)));
    }
    // One-member sets are their own hull.
    auto s = uniform_space(2);
    std::vector<std::vector<int>> singleton(2, std::vector<int>{0});
    Correspondence c(s.atoms(), {"0", "1"}, singleton);
    CHECK(convexification_gap(distribution_set(c, s, 1000)) == doctest::Approx(0.0));
}

TEST_CASE("gap bound and monotonicity under refinement") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 1 + static_cast<int>(rng() % 3);
        auto s = uniform_space(n);
        double prev = 1e9;
        for (int k : {1, 2, 4}) {
            auto fine = s.refine(k);
            // Refinement of the sigma algebra too: finest cells.
            FiniteProbSpace fs(fine.atoms(), fine.weights());
            auto f = full_binary(fs);
            auto d = distribution_set(f, fs, 1 << 22);
            REQUIRE(d.exact);
            double gap = convexification_gap(d);
            CHECK(gap <= prev + 1e-12);
            CHECK(gap <= fs.max_atom_weight() / 2.0 * 2 + 1e-12);
            prev = gap;
        }
    }
}

TEST_CASE("sampled sets flag inexactness") {
    auto s = uniform_space(24);
    auto f = full_binary(s);
    auto d = distribution_set(f, s, 1000, 42);
    CHECK_FALSE(d.exact);
    CHECK_FALSE(d.members.empty());
    CHECK_THROWS_AS((void)convexification_gap(d), std::invalid_argument);
}

TEST_CASE("purify exact and bounded cases") {
    auto s10 = uniform_space(10);
    auto f10 = full_binary(s10);
    {
        // Constant target delta_0 is realizable exactly.
        auto res = purify(f10, s10, Distribution::point({"0", "1"}, 0), 1e-9);
        CHECK(res.error == doctest::Approx(0.0));
    }
    {
        // (0.3, 0.7) lies on the 1/10 grid: exact.
        auto res = purify(f10, s10, Distribution({"0", "1"}, {0.3, 0.7}), 1e-9);
        CHECK(res.error == doctest::Approx(0.0).epsilon(1e-12));
        int zeros = 0;
        for (int v : res.selection.choice) zeros += v == 0;
        CHECK(zeros == 3);
    }
    {
        auto s2 = uniform_space(2);
        auto res = purify(full_binary(s2), s2, Distribution({"0", "1"}, {0.25, 0.75}), 1e-9);
        CHECK(res.error == doctest::Approx(0.25));
        CHECK(res.error <= 0.5 + 1e-12);  // w_max/2 * |Y| = 0.5
    }
}

TEST_CASE("purify respects the correspondence and the cells") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 100; ++trial) {
        auto s = uniform_space(10);
        std::vector<std::vector<int>> values(10);
        for (auto& v : values) {
            for (int y = 0; y < 2; ++y)
                if (rng() % 2) v.push_back(y);
            if (v.empty()) v.push_back(static_cast<int>(rng() % 2));
        }
        Correspondence f(s.atoms(), {"0", "1"}, values);
        // A target inside the hull: pushforward of a random selection.
        Selection pick;
        for (const auto& v : values)
            pick.choice.push_back(v[rng() % v.size()]);
        auto target = selection_pushforward(s, pick, f);
        auto res = purify(f, s, target, 1e-9);
        for (int x = 0; x < 10; ++x) {
            const auto& v = values[static_cast<std::size_t>(x)];
            CHECK(std::find(v.begin(), v.end(),
                            res.selection.choice[static_cast<std::size_t>(x)]) != v.end());
        }
        CHECK(res.error <= 0.1 / 2.0 * 2 + 1e-12);  // w_max/2 * |Y|
    }
}

TEST_CASE("parameterized distribution-map usc checks") {
    MetricGrid params;
    params.points = {"x0", "x1", "x2"};
    params.dist = {{0, 1, 2}, {1, 0, 1}, {2, 1, 0}};
    auto s = uniform_space(2);
    auto make = [&](std::vector<std::vector<int>> values) {
        return Correspondence(s.atoms(), {"0", "1"}, std::move(values), std::nullopt, s.cells());
    };
    Correspondence dominating = full_binary(s);

    SUBCASE("constant in the parameter") {
        ParamCorrespondence pc{params,
                               {full_binary(s), full_binary(s), full_binary(s)},
                               dominating};
        CHECK(dmap_usc_check(pc, s, 1.5, 0.0));
        CHECK(dmap_usc_check(pc, s, 2.5, 0.0));
    }
    SUBCASE("shrinking to the middle point needs slack to pass") {
        // The check compares every close pair in both directions, so the
        // large neighbouring sets must be approximable from the shrunken
        // middle one: exact matching fails, an eps of 1 absorbs the gap.
        ParamCorrespondence pc{params,
                               {full_binary(s), make({{0}, {0}}), full_binary(s)},
                               dominating};
        CHECK_FALSE(dmap_usc_check(pc, s, 1.5, 0.0));
        CHECK(dmap_usc_check(pc, s, 1.5, 1.0));
        CHECK(dmap_usc_check(pc, s, 0.5, 0.0));  // vacuous at small delta
    }
    SUBCASE("expanding at an isolated point is not usc") {
        ParamCorrespondence pc{params,
                               {make({{0}, {0}}), full_binary(s), make({{0}, {0}})},
                               dominating};
        CHECK_FALSE(dmap_usc_check(pc, s, 1.5, 0.5));
        // Monotonicity: shrinking delta below every positive distance
        // makes the check vacuous.
        CHECK(dmap_usc_check(pc, s, 0.5, 0.5));
        // And growing eps to 1 makes every member close enough.
        CHECK(dmap_usc_check(pc, s, 1.5, 1.0));
    }
    SUBCASE("missing dominating correspondence is an error") {
        ParamCorrespondence pc{params,
                               {full_binary(s), full_binary(s), full_binary(s)},
                               std::nullopt};
        CHECK_THROWS((void)dmap_usc_check(pc, s, 1.5, 0.0));
    }
}

TEST_CASE("hull membership violation detects points outside the hull") {
    auto s = uniform_space(2);
    auto f = full_binary(s);
    CHECK(hull_membership_violation(f, s, Distribution({"0", "1"}, {0.3, 0.7})) <= 1e-12);
    // Restrict one cell to action 0: mass on 1 can be at most 0.5.
    Correspondence g(s.atoms(), {"0", "1"}, {{0}, {0, 1}}, std::nullopt, s.cells());
    CHECK(hull_membership_violation(g, s, Distribution({"0", "1"}, {0.0, 1.0})) >
          0.4);
    CHECK(hull_membership_violation(g, s, Distribution({"0", "1"}, {0.5, 0.5})) <= 1e-12);
}
