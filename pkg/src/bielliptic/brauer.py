"""2-torsion Brauer classes on E1 x E2 and the witness for nontrivial 2-torsion in T(S).

Br(X-bar)[2] is modelled by Hom(E1[2], E2[2]), written as 2x2 matrices over
F_2 whose columns are the images of (P1, P2).  For a Tate curve P1 spans the
mu_2 line.  A Galois-equivariant g that kills the translation point P2 and
does not send mu_2 into mu_2 pairs nontrivially with pi_*(z), which is
therefore a nonzero 2-torsion element of T(S).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from . import localdata, numeric
from .elliptic import EllipticCurve
from .errors import PreconditionError, UnsupportedPrimeError
from .localdata import Reduction, TwoTorsionStatus, WorkingField

DIVISIBILITY_CITATION = "T(X) is 2-divisible"

HomMatrix = tuple[tuple[int, int], tuple[int, int]]
IDENTITY: HomMatrix = ((1, 0), (0, 1))
SWAP_UP: HomMatrix = ((1, 1), (0, 1))  # P1 -> P1, P2 -> P1 + P2


def mat_mul(A, B) -> HomMatrix:
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(2)) % 2 for j in range(2)) for i in range(2))


def mat_add(A, B) -> HomMatrix:
    return tuple(tuple((A[i][j] + B[i][j]) % 2 for j in range(2)) for i in range(2))


def apply(g: HomMatrix, v) -> tuple[int, int]:
    return tuple(sum(g[i][k] * v[k] for k in range(2)) % 2 for i in range(2))


@dataclass(frozen=True)
class QuadraticPoint:
    """(x, 0) with x = (-r + sqrt(disc)) / 2, defined over Q_p(sqrt(disc))."""

    r: int
    disc: int

    def __str__(self):
        return f"((-{self.r} + sqrt({self.disc}))/2, 0)"


@dataclass(frozen=True)
class TwoTorsionBasis:
    label: str | None
    p: int
    P1: tuple
    P2: object
    radicand_class: numeric.SquareClass  # E[2] is rational over Q_p(sqrt(radicand_class))
    status: TwoTorsionStatus
    base_change: str = ""  # working field the basis is used over

    def as_dict(self):
        return {
            "working_field": self.base_change,
            "P1": [str(c) for c in self.P1],
            "P2": str(self.P2) if isinstance(self.P2, QuadraticPoint) else [str(c) for c in self.P2],
            "two_torsion": self.status.value,
            "field_of_definition": str(WorkingField.adjoining(self.p, [self.radicand_class])),
        }


@dataclass(frozen=True)
class GaloisAction:
    """Matrices of the Galois generators on E[2] in the basis (P1, P2); empty when trivial."""

    matrices: tuple[HomMatrix, ...] = ()

    @property
    def trivial(self) -> bool:
        return not self.matrices


def _require_split(E: EllipticCurve, p: int):
    if p < 5:
        raise UnsupportedPrimeError(f"the witness search needs p >= 5 (got {p})")
    data = localdata.reduction_type(E, p)
    name = E.label or str(E)
    if data.reduction is Reduction.GOOD:
        raise PreconditionError(
            f"{name} has good reduction at {p}; over such a field {DIVISIBILITY_CITATION}, "
            f"so no 2-torsion witness exists",
            subject=E.label,
            citation=DIVISIBILITY_CITATION,
        )
    if data.reduction is not Reduction.SPLIT:
        raise PreconditionError(
            f"{name} has {data.reduction} reduction at {p}; split multiplicative reduction is required",
            subject=E.label,
        )
    return data


def minimal_working_field(E: EllipticCurve, p: int) -> WorkingField:
    tf = localdata.full_two_torsion_field(E, p)
    return WorkingField.adjoining(p, [tf.radicand_class])


def two_torsion_basis(E: EllipticCurve, p: int, working_field: WorkingField | None = None) -> TwoTorsionBasis:
    """P1 on the mu_2 line, P2 the complementary point with least canonical x.

    Points live on the minimal model at p; x-coordinates are residues mod
    p^precision.  When E[2] needs sqrt(D), P2 is the root with +sqrt(D).
    """
    _require_split(E, p)
    tf = localdata.full_two_torsion_field(E, p)
    if tf.status is TwoTorsionStatus.CUBIC:
        raise PreconditionError(f"{E.label or E}: no rational 2-torsion point over Q_{p}", subject=E.label)
    P1 = localdata.mu2_point(E, p)
    if tf.status is TwoTorsionStatus.RATIONAL:
        others = sorted(r for r in tf.roots if r != P1[0])
        P2 = (others[0], 0)
    else:
        Emin, _ = localdata.minimal_at_p(E, p)
        mod = p**localdata.DEFAULT_PRECISION
        r = P1[0]
        P2 = QuadraticPoint(r, (-3 * r * r - 4 * numeric.residue(Emin.A, mod)) % mod)
    wf = working_field or WorkingField.adjoining(p, [tf.radicand_class])
    return TwoTorsionBasis(E.label, p, P1, P2, tf.radicand_class, tf.status, str(wf))


def galois_action(basis: TwoTorsionBasis, working_field: WorkingField) -> GaloisAction:
    """A generator chi moves sqrt(D) iff chi(D) = 1; it then swaps P2 and P1 + P2."""
    mats = []
    for chi in working_field.galois_characters():
        if localdata.character_value(chi, basis.radicand_class):
            mats.append(SWAP_UP)
    return GaloisAction(tuple(mats))


def all_homs() -> list[HomMatrix]:
    return [((a, b), (c, d)) for a, b, c, d in product((0, 1), repeat=4)]


def hom_module(E1, E2, p, working_field: WorkingField | None = None):
    """All 16 matrices and the Galois-equivariant ones, g M1 = M2 g for every generator."""
    wf = working_field or minimal_working_field(E1, p).compositum(minimal_working_field(E2, p))
    b1, b2 = two_torsion_basis(E1, p, wf), two_torsion_basis(E2, p, wf)
    homs = all_homs()
    return homs, _equivariant(homs, b1, b2, wf)


def _equivariant(homs, b1, b2, wf):
    chars = wf.galois_characters()
    m1 = [SWAP_UP if localdata.character_value(c, b1.radicand_class) else IDENTITY for c in chars]
    m2 = [SWAP_UP if localdata.character_value(c, b2.radicand_class) else IDENTITY for c in chars]
    return [g for g in homs if all(mat_mul(g, x) == mat_mul(y, g) for x, y in zip(m1, m2))]


def h2_subgroup(homs, translation_index: int = 1) -> list[HomMatrix]:
    """Homomorphisms killing the translation point (the basis vector at ``translation_index``)."""
    e = tuple(int(i == translation_index) for i in range(2))
    return [g for g in homs if apply(g, e) == (0, 0)]


def class_in_Q(g: HomMatrix) -> int:
    """Restrict g to the mu_2 line <P1> and project onto E2[2] / <P1'>."""
    return g[1][0]


@dataclass(frozen=True)
class ObstructionReport:
    labels: tuple[str | None, str | None]
    p: int
    reductions: tuple[dict, dict]
    nonisogeny: dict | None
    working_field: str
    bases: tuple[dict, dict]
    hom_count: int
    hom_gal_count: int
    h2_count: int
    nontrivial_count: int
    witness: HomMatrix | None
    conclusion: bool
    caveats: tuple[str, ...] = field(default=())

    @property
    def verdict(self) -> str:
        if self.witness is None:
            return "refuted"
        return "verified" if self.conclusion else "conditional"

    def as_dict(self):
        return {
            "e1": self.labels[0],
            "e2": self.labels[1],
            "p": self.p,
            "reduction": {"e1": self.reductions[0], "e2": self.reductions[1]},
            "nonisogeny_certificate": self.nonisogeny,
            "working_field": self.working_field,
            "bases": {"e1": self.bases[0], "e2": self.bases[1]},
            "counts": {
                "hom": self.hom_count,
                "hom_gal": self.hom_gal_count,
                "h2": self.h2_count,
                "nontrivial_class": self.nontrivial_count,
            },
            "witness": [list(r) for r in self.witness] if self.witness else None,
            "conclusion": self.conclusion,
            "caveats": list(self.caveats),
        }


def obstruction_witness(E1: EllipticCurve, E2: EllipticCurve, p: int) -> ObstructionReport:
    numeric.require_prime(p)
    d1, d2 = _require_split(E1, p), _require_split(E2, p)
    cert = localdata.geometric_nonisogeny_certificate(E1, E2)
    caveats = []
    if cert is None:
        caveats.append("non-isogeny not certified: potential reduction types agree at every tested prime")
    wf = minimal_working_field(E1, p).compositum(minimal_working_field(E2, p))
    b1, b2 = two_torsion_basis(E1, p, wf), two_torsion_basis(E2, p, wf)
    homs = all_homs()
    gal = _equivariant(homs, b1, b2, wf)
    h2 = h2_subgroup(gal)
    hits = [g for g in h2 if class_in_Q(g)]
    return ObstructionReport(
        labels=(E1.label, E2.label),
        p=p,
        reductions=(d1.as_dict(), d2.as_dict()),
        nonisogeny=cert.as_dict() if cert else None,
        working_field=str(wf),
        bases=(b1.as_dict(), b2.as_dict()),
        hom_count=len(homs),
        hom_gal_count=len(gal),
        h2_count=len(h2),
        nontrivial_count=len(hits),
        witness=hits[0] if hits else None,
        conclusion=bool(hits) and cert is not None,
        caveats=tuple(caveats),
    )
