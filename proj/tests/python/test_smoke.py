"""Smoke tests for the python bindings."""

import os

import pytest

import pieq

DATA = os.path.join(os.path.dirname(__file__), "..", "..", "data")


def path(name):
    return os.path.join(DATA, name)


def test_load_and_hash():
    inst = pieq.load(path("econ_trivial.json"))
    assert inst.kind == "economy"
    assert inst.num_players == 2
    assert inst.hash.startswith("fnv1a64-")
    assert pieq.load(path("econ_trivial.json")).hash == inst.hash


def test_load_document_round_trip():
    inst = pieq.load(path("econ_threshold.json"))
    again = pieq.load_document(inst.save())
    assert again.hash == inst.hash


def test_solve_economy():
    res = pieq.solve(pieq.load(path("econ_trivial.json")))
    assert res["status"] == "found"
    assert res["complete"]
    profile = res["certificate"]["profile"]
    assert set(profile) == {"p1", "p2"}

    none = pieq.solve(pieq.load(path("econ_unsat.json")))
    assert none["status"] == "none"
    assert none["certificate"] is None


def test_solve_game_and_verify():
    inst = pieq.load(path("game_coordination.json"))
    res = pieq.solve_game(inst)
    assert res["status"] == "found"
    assert res["profile"] == {"p1": {"z": "H"}, "p2": {"w": "H"}}
    assert pieq.verify(inst, res["profile"])["valid"]
    assert not pieq.verify(inst, {"p1": {"z": "H"}, "p2": {"w": "T"}})["valid"]


def test_verify_economy_failures():
    inst = pieq.load(path("econ_threshold.json"))
    good = pieq.verify(inst, {"p1": {"lo": "a", "hi": "b"}})
    assert good["valid"]
    bad = pieq.verify(inst, {"p1": {"lo": "a", "hi": "a"}})
    assert not bad["valid"]
    assert bad["failures"][0]["cell"] == "lo"


def test_audit():
    audit = pieq.audit(pieq.load(path("game_correlated.json")))
    assert audit["independence_deviation"] == [0.25, 0.25]

    econ_audit = pieq.audit(pieq.load(path("econ_threshold.json")))
    assert econ_audit["players"][0]["alpha_nonempty"]


def test_purify():
    res = pieq.purify(pieq.load(path("econ_trivial.json")), "p1", [0.25, 0.75])
    assert res["error"] == pytest.approx(0.25)
    assert set(res["selection"]) == {"c1", "c2"}


def test_refine_load():
    inst = pieq.load(path("econ_canonical.json"), refine=4)
    assert inst.config["refine"] == 1  # refinement is applied, not deferred


def test_dsl_canonical():
    text = pieq.dsl_canonical("zcell in {c1, c2} and lam[1][a] + lam[1][b] >= 1.0")
    assert pieq.dsl_canonical(text) == text


def test_errors():
    with pytest.raises(pieq.SchemaError):
        pieq.load_document('{"kind": "nope"}')
    with pytest.raises(Exception):
        pieq.load_document("not json")
