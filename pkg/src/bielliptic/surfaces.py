"""The seven types of bielliptic surface (E1 x E2)/G and their covers.

G acts on E1 by translation by a rational torsion point and on E2 by an
automorphism with E2/G = P^1.  Only Types 1, 3 and 5 have explicit actions
here; the others are handled through their intermediate covers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .elliptic import O, EllipticCurve, torsion_point_order
from .errors import InputError
from .numeric import FinAbGroup, PadicField, PrimeField, RationalField


def _grp(*orders):
    return FinAbGroup(invariant_factors=tuple(orders))


@dataclass(frozen=True)
class BiellipticType:
    type_number: int
    group: FinAbGroup
    ord_K: int
    h2_torsion: FinAbGroup

    @property
    def group_order(self) -> int:
        return self.group.order

    @property
    def lam(self) -> int:
        """|G| / ord(K_S)."""
        return self.group_order // self.ord_K


TABLE = {
    1: BiellipticType(1, _grp(2), 2, _grp(2, 2)),
    2: BiellipticType(2, _grp(2, 2), 2, _grp(2)),
    3: BiellipticType(3, _grp(4), 4, _grp(2)),
    4: BiellipticType(4, _grp(2, 4), 4, _grp()),
    5: BiellipticType(5, _grp(3), 3, _grp(3)),
    6: BiellipticType(6, _grp(3, 3), 3, _grp()),
    7: BiellipticType(7, _grp(6), 6, _grp()),
}

# translation order and E2 automorphism for the explicitly described types
EXPLICIT_ACTIONS = {1: (2, "neg"), 3: (4, "i"), 5: (3, "omega")}


def _check_type(t) -> int:
    if not isinstance(t, int) or isinstance(t, bool) or t not in TABLE:
        raise InputError(f"bielliptic type must be one of 1..7, got {t!r}")
    return t


def table_row(t: int) -> BiellipticType:
    return TABLE[_check_type(t)]


def self_test():
    """Internal consistency of the compiled-in table."""
    for row in TABLE.values():
        assert row.lam * row.ord_K == row.group_order, row
        assert row.ord_K == row.group.exponent, row


@dataclass(frozen=True)
class CoverStep:
    source_type: int
    target_type: int
    degree: int


# composite |G|: cyclic of non-prime order through ord(K_S) having a proper
# divisor; non-cyclic through lambda_S > 1
_COVERS = {3: 1, 7: 1, 2: 1, 4: 3, 6: 5}


def intermediate_cover(t: int) -> CoverStep | None:
    t = _check_type(t)
    target = _COVERS.get(t)
    if target is None:
        return None
    return CoverStep(t, target, TABLE[t].group_order // TABLE[target].group_order)


def cover_chain(t: int) -> list[CoverStep]:
    """Cover steps from type t down to Type 1 or Type 5."""
    steps = []
    step = intermediate_cover(t)
    while step is not None:
        steps.append(step)
        step = intermediate_cover(step.target_type)
    return steps


def epsilon(t: int) -> int:
    return 2 if TABLE[_check_type(t)].group_order % 2 == 0 else 3


def exponent_bound(t: int) -> int:
    """Exponent of the Albanese kernel: 4|G| if 2 divides |G|, else 9|G|."""
    n = TABLE[_check_type(t)].group_order
    return 4 * n if n % 2 == 0 else 9 * n


# ---------------------------------------------------------------------------
# action validation


@dataclass(frozen=True)
class ActionSpec:
    E1: EllipticCurve
    P0: object
    E2: EllipticCurve
    automorphism: str  # "neg", "i" or "omega"
    field: object = RationalField()


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass
class ValidationResult:
    violations: list[Violation] = field(default_factory=list)
    facts: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code, message):
        self.violations.append(Violation(code, message))


def _root_of_unity_available(fld, n: int) -> bool:
    # primitive n-th roots of unity for n = 4 or 3 (n = 2 is always there)
    if isinstance(fld, (PrimeField, PadicField)):
        return fld.p % n == 1
    return n <= 2


def validate_action(spec: ActionSpec, t: int) -> ValidationResult:
    """Check the data of an explicit Type 1, 3 or 5 action.  Never raises on bad data."""
    t = _check_type(t)
    res = ValidationResult()
    if t not in EXPLICIT_ACTIONS:
        res.add("not-materialized", f"Type {t} has no explicit action; use its intermediate cover")
        return res
    order, aut = EXPLICIT_ACTIONS[t]
    fld = spec.field
    if isinstance(fld, PrimeField):
        for name, E in (("E1", spec.E1), ("E2", spec.E2)):
            if E.p != fld.p:
                res.add("field-mismatch", f"{name} is not defined over {fld}")
    if spec.automorphism != aut:
        res.add("wrong-automorphism", f"Type {t} needs the automorphism {aut!r}, got {spec.automorphism!r}")

    P0 = spec.P0
    if P0 is O:
        res.add("zero-translation", "P0 is the identity")
    elif not spec.E1.contains(P0):
        res.add("not-on-curve", f"P0 = {P0} is not a rational point of E1")
    else:
        n = torsion_point_order(spec.E1, P0, bound=max(order, 12))
        if n != order:
            res.add("wrong-order", f"P0 has order {n if n else '> 12'}, Type {t} needs {order}")

    j2 = spec.E2.j_invariant
    if aut == "i":
        if j2 != spec.E2._norm(1728):
            res.add("no-cm", f"j(E2) = {j2}, automorphism i needs j = 1728")
        if not _root_of_unity_available(fld, 4):
            res.add("no-root-of-unity", f"no primitive fourth root of unity in {fld}")
    elif aut == "omega":
        if j2 != 0:
            res.add("no-cm", f"j(E2) = {j2}, automorphism omega needs j = 0")
        if not _root_of_unity_available(fld, 3):
            res.add("no-root-of-unity", f"no primitive third root of unity in {fld}")

    if res.ok:
        res.facts.append(
            f"translation by the nonzero point P0 has no fixed points on E1, so G = Z/{order} acts freely on E1 x E2"
        )
        res.facts.append(f"|G| = {order}, exponent bound {exponent_bound(t)}")
    return res
