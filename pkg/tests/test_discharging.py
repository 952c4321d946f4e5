"""Exact discharging: initial charges, rule transfers, conservation and audits."""

from __future__ import annotations

from fractions import Fraction

import pytest

from src.configurations import ConfigKind, Configuration
from src.discharging import (
    ELEMENT_CLASSES,
    HALF,
    THIRD,
    Transfer,
    _claim_checks,
    apply_rules,
    audit,
    face,
    initial_charges,
    recheck_transfers,
    structural_blocker,
    vertex,
)
from src.errors import NotInClass
from src.genlab import GeneratorSpec, enumerate_class


def test_k4_initial_charges(k4):
    ledger = initial_charges(k4)
    assert set(ledger.initial.values()) == {Fraction(-1)}
    assert ledger.total_initial == -8


def test_c6_initial_charges(c6):
    ledger = initial_charges(c6)
    assert ledger.initial[vertex(0)] == -2
    assert [ledger.initial[face(f.id)] for f in c6.faces] == [2, 2]
    assert ledger.total_initial == -8


def test_single_vertex_total(k1):
    assert initial_charges(k1).total_initial == -8


def test_triangle_rules(k3):
    ledger = apply_rules(k3, 5)
    f0 = k3.outer_face_id
    inner = next(f.id for f in k3.faces if f.id != f0)
    assert ledger.transfers == [Transfer(face(f0), face(inner), THIRD, "R4")]
    final = ledger.charge
    assert final[face(inner)] == Fraction(-2, 3)
    assert final[face(f0)] == Fraction(-4, 3)
    assert ledger.total_final == -8


def test_triangle_with_three_distinct_neighbours_gains_one(eared_triangle):
    ledger = apply_rules(eared_triangle, 7)
    tri = next(f.id for f in eared_triangle.faces if f.degree == 3)
    incoming = [t for t in ledger.transfers if t.target == face(tri)]
    assert len(incoming) == 3
    assert all(t.rule == "R1" and t.amount == THIRD for t in incoming)
    assert ledger.received(face(tri)) == 1
    assert ledger.charge[face(tri)] == 0


def test_minor_three_vertex_gets_half_from_each_big_face(sun):
    ledger = apply_rules(sun, 5)
    incoming = [t for t in ledger.transfers if t.target == vertex(0)]
    assert sorted(t.rule for t in incoming) == ["R2", "R4"]
    assert all(t.amount == HALF for t in incoming)
    assert ledger.charge[vertex(0)] == 0


def test_no_triangles_no_threes_means_no_transfers(c5):
    ledger = apply_rules(c5, 6)
    assert ledger.transfers == []
    assert ledger.charge == ledger.initial


def test_l6_uses_r3_for_outer_face(bowtie):
    ledger = apply_rules(bowtie, 6)
    assert {t.rule for t in ledger.transfers if t.source == face(bowtie.outer_face_id)} == {"R3"}


def test_root_pays_pentagons_for_l7(eared_triangle):
    ledger = apply_rules(eared_triangle, 7)
    paid = [t for t in ledger.transfers if t.source == vertex(eared_triangle.root)]
    assert len(paid) == 1
    assert paid[0].rule == "R4" and paid[0].amount == THIRD
    assert eared_triangle.face(paid[0].target[1]).degree == 5


def test_apply_rules_rejects_bad_input(c5):
    with pytest.raises(NotInClass):
        apply_rules(c5, 5)
    with pytest.raises(ValueError):
        apply_rules(c5, 8)


@pytest.mark.parametrize("name, l", [("sun", 5), ("special_five_cycle", 7), ("eared_triangle", 7),
                                     ("chain_two_minor", 6), ("bowtie", 5)])
def test_rules_respect_their_guards(request, name, l):
    G = request.getfixturevalue(name)
    ledger = apply_rules(G, l)
    assert recheck_transfers(ledger, G, l) == []
    assert all(12 % t.amount.denominator == 0 for t in ledger.transfers)


def test_recheck_catches_forged_transfer(sun):
    ledger = apply_rules(sun, 5)
    ledger.transfers.append(Transfer(face(sun.outer_face_id), vertex(1), HALF, "R4"))
    ledger.transfers.append(ledger.transfers[0])
    problems = [p["problem"] for p in recheck_transfers(ledger, sun, 5)]
    assert problems == ["guard fails", "duplicate"]


# ── Audit ────────────────────────────────────────────────────────


def test_audit_of_fixture(sun):
    ledger = apply_rules(sun, 5)
    report = audit(ledger, sun, 5)
    assert report.passed
    assert report.check("conservation").status == "pass"
    assert report.check("rule_guards").status == "pass"
    assert report.check("v0_lower_bound").status == "skipped"
    assert report.check("configuration_present").status == "pass"
    assert report.total_final == -8
    assert report.rest_total == report.total_final - report.v0_charge - report.f0_charge
    assert all(report.check(name).status == "skipped" for name, _, _ in ELEMENT_CLASSES)


def test_structural_blocker(c6, bowtie, bridged_triangles, p3):
    assert structural_blocker(p3) == "not 2-connected"
    assert structural_blocker(bowtie) == "not 2-connected"
    assert structural_blocker(c6).kind.value == "LowDegreeVertex"
    assert structural_blocker(bridged_triangles) == "not 2-connected"


def test_audit_report_serializes(k3):
    report = audit(apply_rules(k3, 6), k3, 6)
    data = report.to_dict()
    assert data["total_final"] == "-8"
    assert data["passed"] is True
    assert {c["name"] for c in data["checks"]} >= {"conservation", "rule_guards", "v0_payment_cap"}


@pytest.mark.parametrize("l", [5, 6, 7])
def test_conservation_over_small_corpus(l):
    for G in enumerate_class(GeneratorSpec(max_vertices=5, l=l)):
        ledger = apply_rules(G, l)
        report = audit(ledger, G, l)
        assert ledger.total_final == -8
        assert report.passed, report.to_dict()


# ── Per-element bounds ───────────────────────────────────────────


def _hexagon(G):
    return next(f for f in G.faces if f.vertex_set == frozenset(range(6)))


@pytest.mark.parametrize(
    "name, check, bound",
    [
        ("three_minor_hexagon", "six_face_three_minor", "1/2"),
        ("four_triangle_hexagon", "six_face_four_triangles", "1/3"),
    ],
)
def test_six_face_claims(request, name, check, bound):
    G = request.getfixturevalue(name)
    ledger = apply_rules(G, 5)
    hexagon = _hexagon(G)

    # nothing pays the hexagon: no 5+-vertices and v0 is a leaf
    (graded,) = _claim_checks(G, ledger, [], None)
    assert graded.name == check
    assert graded.status == "fail"
    assert graded.witness["face"] == f"f{hexagon.id}"
    assert graded.witness["received"] == "0"
    assert graded.witness["bound"] == bound

    apex = Configuration(ConfigKind.LOW_DEGREE_VERTEX, {"v": (6,)})
    (nearby,) = _claim_checks(G, ledger, [apex], None)
    assert nearby.status == "skipped"
    assert nearby.witness["configuration"] == apex.to_dict()

    (blocked,) = _claim_checks(G, ledger, [], "not 2-connected")
    assert blocked.status == "skipped"
    assert blocked.witness["reason"] == "not 2-connected"

    assert audit(ledger, G, 5).check(check).status == "skipped"


def test_element_bounds_fail_without_configurations(three_minor_hexagon, monkeypatch):
    G = three_minor_hexagon
    hexagon = _hexagon(G)
    monkeypatch.setattr("src.discharging.structural_blocker", lambda G: None)
    monkeypatch.setattr("src.discharging.iter_configurations", lambda G, l: iter(()))

    report = audit(apply_rules(G, 5), G, 5)
    assert not report.passed
    # 2 - 3 * 1/3 - 3 * 1/2
    assert report.check("six_face_charges").status == "fail"
    assert report.check("six_face_charges").witness["violations"] == [
        {"element": f"f{hexagon.id}", "final": "-1/2"}
    ]
    # each triangle hears from the hexagon and once from f0
    triangles = report.check("triangle_charges")
    assert triangles.status == "fail"
    assert triangles.witness["elements"] == 3
    assert {v["final"] for v in triangles.witness["violations"]} == {"-1/3"}
    assert report.check("three_vertex_charges").status == "pass"
    assert report.check("six_face_three_minor").status == "fail"
    assert report.check("configuration_present").status == "fail"


def test_element_bounds_excuse_nearby_configuration(three_minor_hexagon, monkeypatch):
    G = three_minor_hexagon
    apex = Configuration(ConfigKind.LOW_DEGREE_VERTEX, {"v": (6,)})
    monkeypatch.setattr("src.discharging.structural_blocker", lambda G: None)
    monkeypatch.setattr("src.discharging.iter_configurations", lambda G, l: iter([apex]))

    report = audit(apply_rules(G, 5), G, 5)
    six = report.check("six_face_charges")
    assert six.status == "pass"
    assert [e["configuration"] for e in six.witness["excused"]] == [apex.to_dict()]
    # only the triangle at the apex is excused
    triangles = report.check("triangle_charges")
    assert triangles.status == "fail"
    assert len(triangles.witness["excused"]) == 1
    assert len(triangles.witness["violations"]) == 2


def test_forged_transfer_pushes_three_vertex_below_zero(three_minor_hexagon, monkeypatch):
    G = three_minor_hexagon
    monkeypatch.setattr("src.discharging.structural_blocker", lambda G: None)
    monkeypatch.setattr("src.discharging.iter_configurations", lambda G, l: iter(()))
    ledger = apply_rules(G, 5)
    assert ledger.charge[vertex(0)] == 0
    ledger.transfers.append(Transfer(vertex(0), face(_hexagon(G).id), HALF, "R3"))

    report = audit(ledger, G, 5)
    threes = report.check("three_vertex_charges")
    assert threes.status == "fail"
    assert threes.witness["violations"] == [{"element": "v0", "final": "-1/2"}]
    assert ("v0", Fraction(-1, 2)) in report.negatives
    assert report.check("rule_guards").status == "fail"
