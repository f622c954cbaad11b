#include <doctest.h>

#include "pieq/instance_io.hpp"
#include "pieq/selection.hpp"

using namespace pieq;
using pieq::io::Json;

#ifndef PIEQ_DATA_DIR
#define PIEQ_DATA_DIR "data"
#endif

namespace {

std::string data_path(const std::string& name) { return std::string(PIEQ_DATA_DIR) + "/" + name; }

}  // namespace

TEST_CASE("all shipped instances load") {
    for (const char* name :
         {"econ_trivial.json", "econ_threshold.json", "econ_unsat.json", "econ_selector.json",
          "econ_canonical.json", "game_coordination.json", "game_correlated.json"}) {
        auto inst = io::load(data_path(name));
        CHECK((inst.economy != nullptr) == (inst.kind == "economy"));
        CHECK((inst.game != nullptr) == (inst.kind == "game"));
        CHECK_FALSE(io::instance_hash(inst).empty());
    }
}

TEST_CASE("save then load is the identity on the normalized form") {
    for (const char* name :
         {"econ_trivial.json", "econ_threshold.json", "econ_selector.json",
          "game_correlated.json"}) {
        auto inst = io::load(data_path(name));
        auto again = io::load_document(Json::parse(io::save(inst)));
        CHECK(inst.normalized == again.normalized);
        CHECK(io::instance_hash(inst) == io::instance_hash(again));
    }
    // Also with refinement applied at load.
    auto refined = io::load(data_path("econ_threshold.json"), 2);
    auto again = io::load_document(Json::parse(io::save(refined)));
    CHECK(refined.normalized == again.normalized);
}

TEST_CASE("hashes distinguish different instances") {
    auto a = io::load(data_path("econ_trivial.json"));
    auto b = io::load(data_path("econ_threshold.json"));
    CHECK(io::instance_hash(a) != io::instance_hash(b));
}

TEST_CASE("refinement at load refines weights and the sigma algebra") {
    auto inst = io::load(data_path("econ_canonical.json"), 4);
    REQUIRE(inst.economy);
    const auto& space = inst.economy->type_space(0);
    REQUIRE(space.size() == 4);
    CHECK(space.num_cells() == 4);
    CHECK(space.max_atom_weight() == doctest::Approx(0.25));
    auto dd = inst.economy->build_DDi(0, 100000);
    REQUIRE(dd.exact);
    CHECK(convexification_gap(dd) == doctest::Approx(0.125));
}

TEST_CASE("refinement rewrites zcell references consistently") {
    Json doc = Json::parse(R"({
      "kind": "economy",
      "players": [{
        "name": "p1",
        "types": {"atoms": ["z1", "z2"], "cells": {"c1": ["z1"], "c2": ["z2"]}},
        "actions": ["a", "b"],
        "D": {"c1": ["a", "b"], "c2": ["a", "b"]},
        "alpha": {"a": "true", "b": "zcell in {c1}"},
        "P": {"a": "false", "b": "false"}
      }],
      "mu": [{"atoms": ["z1"], "weight": 0.5}, {"atoms": ["z2"], "weight": 0.5}]
    })");
    auto base = io::load_document(doc);
    auto fine = io::load_document(doc, 2);
    std::vector<Distribution> lams{Distribution({"a", "b"}, {0.5, 0.5})};
    // Original: alpha admits b only on cell c1 (cell index 0).
    CHECK(base.economy->eval_correspondence(Economy::Which::Alpha, 0, 0, lams) ==
          std::vector<int>{0, 1});
    CHECK(base.economy->eval_correspondence(Economy::Which::Alpha, 0, 1, lams) ==
          std::vector<int>{0});
    // Refined: the two sub-cells of c1 behave like c1, those of c2 like c2.
    REQUIRE(fine.economy->type_space(0).num_cells() == 4);
    CHECK(fine.economy->eval_correspondence(Economy::Which::Alpha, 0, 0, lams) ==
          std::vector<int>{0, 1});
    CHECK(fine.economy->eval_correspondence(Economy::Which::Alpha, 0, 1, lams) ==
          std::vector<int>{0, 1});
    CHECK(fine.economy->eval_correspondence(Economy::Which::Alpha, 0, 2, lams) ==
          std::vector<int>{0});
}

TEST_CASE("schema errors are distinguished from semantic errors") {
    CHECK_THROWS_AS((void)io::load_document(Json::parse(R"({"kind": "nope"})")),
                    io::SchemaError);
    CHECK_THROWS_AS((void)io::load_document(Json::parse(R"({"kind": "economy"})")),
                    io::SchemaError);
    // Undeclared action inside D: semantic.
    Json bad_action = Json::parse(R"({
      "kind": "economy",
      "players": [{
        "name": "p1",
        "types": {"atoms": ["z"]},
        "actions": ["a"],
        "D": {"z": ["zz"]},
        "alpha": {"a": "true"},
        "P": {"a": "false"}
      }],
      "mu": [{"atoms": ["z"], "weight": 1.0}]
    })");
    CHECK_THROWS_AS((void)io::load_document(bad_action), io::SemanticError);
    // DSL type error: semantic.
    Json bad_dsl = Json::parse(R"({
      "kind": "economy",
      "players": [{
        "name": "p1",
        "types": {"atoms": ["z"]},
        "actions": ["a"],
        "D": {"z": ["a"]},
        "alpha": {"a": "lam[5][a] >= 0"},
        "P": {"a": "false"}
      }],
      "mu": [{"atoms": ["z"], "weight": 1.0}]
    })");
    CHECK_THROWS_AS((void)io::load_document(bad_dsl), io::SemanticError);
    // Weights not summing to one: semantic.
    Json bad_mass = Json::parse(R"({
      "kind": "economy",
      "players": [{
        "name": "p1",
        "types": {"atoms": ["z"]},
        "actions": ["a"],
        "D": {"z": ["a"]},
        "alpha": {"a": "true"},
        "P": {"a": "false"}
      }],
      "mu": [{"atoms": ["z"], "weight": 0.5}]
    })");
    CHECK_THROWS_AS((void)io::load_document(bad_mass), io::SemanticError);
}

TEST_CASE("games require a total payoff table") {
    Json doc = Json::parse(R"({
      "kind": "game",
      "players": [{
        "name": "p1",
        "types": {"atoms": ["z"]},
        "actions": ["H", "T"],
        "D": {"z": ["H", "T"]},
        "payoff": [{"actions": ["H"], "shock": "x", "value": 1.0}]
      }],
      "mu": [{"atoms": ["z", "x"], "weight": 1.0}]
    })");
    CHECK_THROWS_AS((void)io::load_document(doc), io::SemanticError);
}

TEST_CASE("profile files load against the instance shape") {
    auto inst = io::load(data_path("econ_threshold.json"));
    auto good = io::load_profile(data_path("profile_threshold_good.json"), inst);
    CHECK(inst.economy->is_equilibrium(good).ok);
    auto bad = io::load_profile(data_path("profile_threshold_bad.json"), inst);
    auto check = inst.economy->is_equilibrium(bad);
    CHECK_FALSE(check.ok);
    REQUIRE_FALSE(check.failures.empty());
    CHECK(check.failures[0].cond1);        // membership holds
    CHECK_FALSE(check.failures[0].cond2);  // emptiness fails
}

TEST_CASE("profile round trip through the serializer") {
    auto inst = io::load(data_path("game_coordination.json"));
    auto res = inst.game->find_nash(inst.config);
    REQUIRE(res.profile.has_value());
    Json pj = io::profile_json(inst, *res.profile);
    CHECK(pj["p1"]["z"] == "H");
    CHECK(pj["p2"]["w"] == "H");
}

TEST_CASE("zero-weight atoms survive loading") {
    Json doc = Json::parse(R"({
      "kind": "economy",
      "players": [{
        "name": "p1",
        "types": {"atoms": ["z1", "z2"]},
        "actions": ["a"],
        "D": {"z1": ["a"], "z2": ["a"]},
        "alpha": {"a": "true"},
        "P": {"a": "false"}
      }],
      "mu": [{"atoms": ["z1"], "weight": 1.0}]
    })");
    auto inst = io::load_document(doc);
    CHECK(inst.economy->type_space(0).size() == 2);
    CHECK(inst.economy->type_space(0).weight(1) == doctest::Approx(0.0));
    CHECK(inst.economy->find_equilibrium(inst.config).certificate.has_value());
}
