"""Exact discharging: initial charges d(x) - 4, the rule systems for l = 5, 6, 7, and audits.

Rules read the initial snapshot only (simultaneous semantics), so the final charge of an
element is its initial charge minus what it sends plus what it receives. All amounts are
Fractions with denominators dividing 12.

Rule ids per l:
  - all l:  R1 (faces -> adjacent 3-face), R2 (faces -> 3-vertex)
  - l = 5:  R3 (5+-vertex -> 6-face, s/6), R4 (f0 payments, v0 -> 6-faces)
  - l = 6:  R3 (f0 payments)
  - l = 7:  R3 (5+-vertex -> 5-face, 1/6), R4 (f0 payments, v0 -> 5-faces)
The f0 clause replaces the payments f0 would otherwise make under R1 and R2.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from .configurations import ConfigKind, Configuration, find_configurations, iter_configurations
from .errors import NotInClass
from .plane_graph import PlaneGraph, in_class, is_two_connected

logger = logging.getLogger(__name__)

Element = tuple[str, int]  # ("v", vertex id) or ("f", face id)

THIRD = Fraction(1, 3)
HALF = Fraction(1, 2)
SIXTH = Fraction(1, 6)

# (v0 lower bound, f0 lower bound, contradiction bound) per l
BOUNDS: dict[int, tuple[Fraction, Fraction, Fraction]] = {
    5: (Fraction(-7, 3), Fraction(-11, 4), Fraction(-35, 12)),
    6: (Fraction(-2), Fraction(-11, 4), Fraction(-13, 4)),
    7: (Fraction(-7, 3), Fraction(-11, 4), Fraction(-35, 12)),
}

RULES: dict[int, tuple[str, ...]] = {5: ("R1", "R2", "R3", "R4"), 6: ("R1", "R2", "R3"), 7: ("R1", "R2", "R3", "R4")}

# element classes held to ch* >= 0 (v0 and f0 excluded): (check name, kind, degree test)
ELEMENT_CLASSES: tuple[tuple[str, str, Callable[[int], bool]], ...] = (
    ("three_vertex_charges", "v", lambda d: d == 3),
    ("big_vertex_charges", "v", lambda d: d >= 5),
    ("triangle_charges", "f", lambda d: d == 3),
    ("five_face_charges", "f", lambda d: d == 5),
    ("six_face_charges", "f", lambda d: d == 6),
    ("big_face_charges", "f", lambda d: d >= 7),
)


def vertex(v: int) -> Element:
    return ("v", v)


def face(f: int) -> Element:
    return ("f", f)


def label(e: Element) -> str:
    return f"{e[0]}{e[1]}"


def _f0_rule(l: int) -> str:
    return "R3" if l == 6 else "R4"


# ── Ledger ───────────────────────────────────────────────────────


@dataclass(frozen=True)
class Transfer:
    source: Element
    target: Element
    amount: Fraction
    rule: str

    def to_dict(self) -> dict[str, str]:
        return {
            "from": label(self.source),
            "to": label(self.target),
            "amount": str(self.amount),
            "rule": self.rule,
        }


@dataclass
class ChargeLedger:
    initial: dict[Element, Fraction]
    transfers: list[Transfer] = field(default_factory=list)
    l: int | None = None

    def sent(self, e: Element) -> Fraction:
        return sum((t.amount for t in self.transfers if t.source == e), Fraction(0))

    def received(self, e: Element) -> Fraction:
        return sum((t.amount for t in self.transfers if t.target == e), Fraction(0))

    @property
    def charge(self) -> dict[Element, Fraction]:
        """Final charges ch* = ch - sent + received."""
        final = dict(self.initial)
        for t in self.transfers:
            final[t.source] -= t.amount
            final[t.target] += t.amount
        return final

    @property
    def total_initial(self) -> Fraction:
        return sum(self.initial.values(), Fraction(0))

    @property
    def total_final(self) -> Fraction:
        return sum(self.charge.values(), Fraction(0))

    def to_dict(self) -> dict[str, Any]:
        final = self.charge
        return {
            "l": self.l,
            "elements": [
                {"element": label(e), "initial": str(self.initial[e]), "final": str(final[e])}
                for e in sorted(self.initial)
            ],
            "transfers": [t.to_dict() for t in self.transfers],
            "total_initial": str(self.total_initial),
            "total_final": str(self.total_final),
        }


def initial_charges(G: PlaneGraph) -> ChargeLedger:
    """ch(x) = d(x) - 4 for every vertex and face."""
    initial: dict[Element, Fraction] = {}
    for v in G.vertices:
        initial[vertex(v)] = Fraction(G.degree(v) - 4)
    for f in G.faces:
        initial[face(f.id)] = Fraction(f.degree - 4)
    return ChargeLedger(initial=initial)


# ── Rules ────────────────────────────────────────────────────────


def _faces_near(G: PlaneGraph, u: int) -> set[int]:
    """Faces incident to u or adjacent to a triangle incident to u."""
    near = set(G.faces_at(u))
    for t in G.triangles_at(u):
        near.update(G.adjacent_faces(t))
    return near


def _rule_triangles(G: PlaneGraph, f0: int) -> list[Transfer]:
    out = []
    for t in G.triangle_ids:
        if t == f0:
            continue
        for g in G.adjacent_faces(t):
            if g != f0:
                out.append(Transfer(face(g), face(t), THIRD, "R1"))
    return out


def _rule_three_vertices(G: PlaneGraph, v0: int, f0: int) -> list[Transfer]:
    out = []
    for v in G.vertices:
        if v == v0 or G.degree(v) != 3:
            continue
        triangles = G.triangles_at(v)
        amount = HALF if triangles else THIRD
        for f in G.faces_at(v):
            if f != f0 and f not in triangles:
                out.append(Transfer(face(f), vertex(v), amount, "R2"))
    return out


def _rule_outer_face(G: PlaneGraph, v0: int, f0: int, rule: str) -> list[Transfer]:
    out = [
        Transfer(face(f0), face(t), THIRD, rule)
        for t in G.adjacent_faces(f0)
        if G.is_triangle(t)
    ]
    out += [
        Transfer(face(f0), vertex(v), HALF, rule)
        for v in sorted(G.outer_face.vertex_set)
        if v != v0 and G.degree(v) == 3
    ]
    return out


def _rule_big_to_hexagons(G: PlaneGraph, v0: int, f0: int) -> list[Transfer]:
    out = []
    for u in G.vertices:
        if u == v0 or G.degree(u) < 5:
            continue
        s = Counter(
            g
            for t in G.triangles_at(u)
            for g in G.adjacent_faces(t)
            if g != f0 and G.face(g).degree == 6
        )
        out += [Transfer(vertex(u), face(g), Fraction(n, 6), "R3") for g, n in sorted(s.items())]
    return out


def _rule_big_to_pentagons(G: PlaneGraph, v0: int, f0: int) -> list[Transfer]:
    out = []
    for u in G.vertices:
        if u == v0 or G.degree(u) < 5:
            continue
        for g in sorted(_faces_near(G, u)):
            if g != f0 and G.face(g).degree == 5:
                out.append(Transfer(vertex(u), face(g), SIXTH, "R3"))
    return out


def _rule_root(G: PlaneGraph, v0: int, f0: int, size: int) -> list[Transfer]:
    return [
        Transfer(vertex(v0), face(g), THIRD, "R4")
        for g in sorted(_faces_near(G, v0))
        if g != f0 and G.face(g).degree == size
    ]


def apply_rules(G: PlaneGraph, l: int) -> ChargeLedger:
    if l not in RULES:
        raise ValueError(f"l must be one of {tuple(RULES)}, got {l}")
    if not in_class(G, l):
        raise NotInClass(f"graph contains a 4-cycle or a {l}-cycle")
    ledger = initial_charges(G)
    ledger.l = l
    v0, f0 = G.root, G.outer_face_id

    transfers = _rule_triangles(G, f0) + _rule_three_vertices(G, v0, f0)
    if l == 5:
        transfers += _rule_big_to_hexagons(G, v0, f0)
    elif l == 7:
        transfers += _rule_big_to_pentagons(G, v0, f0)
    transfers += _rule_outer_face(G, v0, f0, _f0_rule(l))
    if l in (5, 7):
        transfers += _rule_root(G, v0, f0, 6 if l == 5 else 5)
    ledger.transfers = transfers
    return ledger


# ── Guard re-check ───────────────────────────────────────────────


def _expected_amount(G: PlaneGraph, l: int, t: Transfer) -> Fraction | None:
    """The amount t's rule prescribes from t.source to t.target, or None if its guard fails."""
    v0, f0 = G.root, G.outer_face_id
    (skind, s), (tkind, x) = t.source, t.target

    if skind == "f" and s == f0 and t.rule == _f0_rule(l):
        if tkind == "f" and G.is_triangle(x) and x in G.adjacent_faces(f0):
            return THIRD
        if tkind == "v" and x != v0 and G.degree(x) == 3 and x in G.outer_face.vertex_set:
            return HALF
        return None
    if t.rule == "R1" and skind == tkind == "f":
        ok = x != f0 and s != f0 and G.is_triangle(x) and s in G.adjacent_faces(x)
        return THIRD if ok else None
    if t.rule == "R2" and (skind, tkind) == ("f", "v"):
        if x == v0 or G.degree(x) != 3 or s == f0 or s not in G.faces_at(x):
            return None
        triangles = G.triangles_at(x)
        if s in triangles:
            return None
        return HALF if triangles else THIRD
    if (skind, tkind) != ("v", "f") or x == f0:
        return None
    if s == v0 and t.rule == "R4" and l in (5, 7):
        size = 6 if l == 5 else 5
        return THIRD if G.face(x).degree == size and x in _faces_near(G, v0) else None
    if s == v0 or G.degree(s) < 5 or t.rule != "R3":
        return None
    if l == 5 and G.face(x).degree == 6:
        n = sum(1 for tri in G.triangles_at(s) if x in G.adjacent_faces(tri))
        return Fraction(n, 6) if n else None
    if l == 7 and G.face(x).degree == 5:
        return SIXTH if x in _faces_near(G, s) else None
    return None


def recheck_transfers(ledger: ChargeLedger, G: PlaneGraph, l: int) -> list[dict[str, str]]:
    """Transfers whose rule guard or amount does not hold on G, plus duplicated ones."""
    bad = []
    seen: set[tuple[Element, Element, str]] = set()
    for t in ledger.transfers:
        key = (t.source, t.target, t.rule)
        if key in seen:
            bad.append(t.to_dict() | {"problem": "duplicate"})
            continue
        seen.add(key)
        expected = _expected_amount(G, l, t)
        if expected is None:
            bad.append(t.to_dict() | {"problem": "guard fails"})
        elif expected != t.amount:
            bad.append(t.to_dict() | {"problem": f"expected {expected}"})
    return bad


# ── Audit ────────────────────────────────────────────────────────


@dataclass
class AuditCheck:
    name: str
    status: str  # "pass", "fail" or "skipped"
    witness: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "status": self.status, "witness": self.witness}


@dataclass
class AuditReport:
    l: int
    total_initial: Fraction
    total_final: Fraction
    v0_charge: Fraction
    f0_charge: Fraction
    negatives: list[tuple[str, Fraction]] = field(default_factory=list)
    checks: list[AuditCheck] = field(default_factory=list)
    configuration_free: bool = False

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    @property
    def rest_total(self) -> Fraction:
        """Total final charge of everything except v0 and f0."""
        return self.total_final - self.v0_charge - self.f0_charge

    def check(self, name: str) -> AuditCheck:
        return next(c for c in self.checks if c.name == name)

    def to_dict(self) -> dict[str, Any]:
        return {
            "l": self.l,
            "passed": self.passed,
            "total_initial": str(self.total_initial),
            "total_final": str(self.total_final),
            "v0_final": str(self.v0_charge),
            "f0_final": str(self.f0_charge),
            "rest_total": str(self.rest_total),
            "configuration_free": self.configuration_free,
            "negatives": [{"element": e, "final": str(c)} for e, c in self.negatives],
            "checks": [c.to_dict() for c in self.checks],
        }


def structural_blocker(G: PlaneGraph) -> Configuration | str | None:
    """Why the per-element bounds do not apply to G, or None if they do.

    The bounds assume a 2-connected graph with d(v0) >= 2 and none of the basic
    reducible configurations.
    """
    if not is_two_connected(G):
        return "not 2-connected"
    if G.degree(G.root) < 2:
        return "root degree below 2"
    for kind in (ConfigKind.PENDANT_BLOCK, ConfigKind.LOW_DEGREE_VERTEX, ConfigKind.ADJACENT_THREES):
        found = find_configurations(G, kind)
        if found:
            return found[0]
    return None


def _blocker_witness(blocker: Configuration | str) -> dict[str, Any]:
    if isinstance(blocker, Configuration):
        return {"configuration": blocker.to_dict()}
    return {"reason": blocker}


def _bound_check(name: str, value: Fraction, bound: Fraction, blocker) -> AuditCheck:
    witness: dict[str, Any] = {"value": str(value), "bound": str(bound)}
    if blocker is not None:
        return AuditCheck(name, "skipped", witness | _blocker_witness(blocker))
    return AuditCheck(name, "pass" if value >= bound else "fail", witness)


def _minor_three(G: PlaneGraph, v: int) -> bool:
    return v != G.root and G.degree(v) == 3 and bool(G.triangles_at(v))


def _claim_checks(
    G: PlaneGraph, ledger: ChargeLedger, configs: list[Configuration], blocker
) -> list[AuditCheck]:
    """Lower bounds on what a 6-face receives, checked where no configuration is nearby."""
    checks = []
    v0, f0 = G.root, G.outer_face_id
    for f in G.faces:
        if f.id == f0 or f.degree != 6 or not f.is_cycle():
            continue
        threes = [v for v in f.vertices if v != v0 and G.degree(v) == 3]
        triangles = [t for t in G.adjacent_faces(f.id) if G.is_triangle(t)]
        minors = [v for v in threes if _minor_three(G, v)]
        if len(minors) == 3:
            name, bound = "six_face_three_minor", HALF
        elif len(threes) == 2 and len(triangles) == 4:
            name, bound = "six_face_four_triangles", THIRD
        else:
            continue
        received = ledger.received(face(f.id))
        witness: dict[str, Any] = {
            "face": label(face(f.id)),
            "boundary": list(f.vertices),
            "received": str(received),
            "bound": str(bound),
        }
        if blocker is not None:
            checks.append(AuditCheck(name, "skipped", witness | _blocker_witness(blocker)))
            continue
        nearby = set(f.vertex_set)
        for t in triangles:
            nearby |= G.face(t).vertex_set
        touching = next((c for c in configs if c.vertices & nearby), None)
        if touching is not None:
            checks.append(AuditCheck(name, "skipped", witness | _blocker_witness(touching)))
            continue
        checks.append(AuditCheck(name, "pass" if received >= bound else "fail", witness))
    return checks


def _element_degree(G: PlaneGraph, e: Element) -> int:
    return G.degree(e[1]) if e[0] == "v" else G.face(e[1]).degree


def _nearby(G: PlaneGraph, e: Element) -> frozenset[int]:
    """Vertices a configuration must meet to explain a low charge on e."""
    if e[0] == "v":
        return frozenset((e[1], *G.neighbors(e[1])))
    near = set(G.face(e[1]).vertex_set)
    for t in G.adjacent_faces(e[1]):
        if G.is_triangle(t):
            near |= G.face(t).vertex_set
    return frozenset(near)


def _element_checks(
    G: PlaneGraph, final: dict[Element, Fraction], configs: list[Configuration], blocker
) -> list[AuditCheck]:
    """ch* >= 0 per element class, excusing elements with a configuration nearby."""
    skip = (vertex(G.root), face(G.outer_face_id))
    checks = []
    for name, kind, member in ELEMENT_CLASSES:
        elements = [
            e for e in sorted(final)
            if e[0] == kind and e not in skip and member(_element_degree(G, e))
        ]
        low = [e for e in elements if final[e] < 0]
        witness: dict[str, Any] = {"elements": len(elements), "bound": "0"}
        if blocker is not None:
            witness["below"] = [{"element": label(e), "final": str(final[e])} for e in low]
            checks.append(AuditCheck(name, "skipped", witness | _blocker_witness(blocker)))
            continue
        excused, violations = [], []
        for e in low:
            entry = {"element": label(e), "final": str(final[e])}
            touching = next((c for c in configs if c.vertices & _nearby(G, e)), None)
            if touching is None:
                violations.append(entry)
            else:
                excused.append(entry | {"configuration": touching.to_dict()})
        if excused:
            witness["excused"] = excused
        if violations:
            witness["violations"] = violations
        checks.append(AuditCheck(name, "fail" if violations else "pass", witness))
    return checks


def audit(ledger: ChargeLedger, G: PlaneGraph, l: int) -> AuditReport:
    """Conservation, rule guards, and the per-element bounds where their hypotheses hold."""
    final = ledger.charge
    v0, f0 = G.root, G.outer_face_id
    v0_bound, f0_bound, contradiction = BOUNDS[l]
    report = AuditReport(
        l=l,
        total_initial=ledger.total_initial,
        total_final=sum(final.values(), Fraction(0)),
        v0_charge=final[vertex(v0)],
        f0_charge=final[face(f0)],
    )
    report.negatives = [
        (label(e), c)
        for e, c in sorted(final.items())
        if c < 0 and e not in (vertex(v0), face(f0))
    ]

    expected_total = Fraction(-8) if G.is_connected() else report.total_initial
    odd = [t.to_dict() for t in ledger.transfers if 12 % t.amount.denominator]
    report.checks.append(
        AuditCheck(
            "conservation",
            "pass"
            if report.total_initial == report.total_final == expected_total and not odd
            else "fail",
            {
                "total_initial": str(report.total_initial),
                "total_final": str(report.total_final),
                "expected": str(expected_total),
            }
            | ({"bad_denominators": odd} if odd else {}),
        )
    )
    bad = recheck_transfers(ledger, G, l)
    report.checks.append(
        AuditCheck("rule_guards", "fail" if bad else "pass", {"violations": bad} if bad else {})
    )

    blocker = structural_blocker(G)
    report.checks.append(_bound_check("v0_lower_bound", report.v0_charge, v0_bound, blocker))
    report.checks.append(_bound_check("f0_lower_bound", report.f0_charge, f0_bound, blocker))
    paid = ledger.sent(vertex(v0))
    cap = Fraction(G.degree(v0) - 1, 3)
    cap_check = _bound_check("v0_payment_cap", cap - paid, Fraction(0), blocker)
    cap_check.witness.update({"paid": str(paid), "cap": str(cap)})
    report.checks.append(cap_check)

    configs = list(iter_configurations(G, l))
    report.checks.extend(_element_checks(G, final, configs, blocker))
    if l == 5:
        report.checks.extend(_claim_checks(G, ledger, configs, blocker))

    report.configuration_free = not configs
    if len(G) >= 2:
        witness = {"rest_total": str(report.rest_total), "contradiction_bound": str(contradiction)}
        if configs:
            report.checks.append(AuditCheck("configuration_present", "pass", witness))
        else:
            logger.error("configuration-free class member on %d vertices (l=%d)", len(G), l)
            report.checks.append(AuditCheck("configuration_present", "fail", witness))
    return report
