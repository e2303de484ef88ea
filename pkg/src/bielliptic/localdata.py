"""Local analysis of a rational elliptic curve at a prime.

Reduction classification is offered for p >= 5 only.  At 2 and 3 the only
supported question is whether the curve has potentially multiplicative
reduction, read off from v_p(j).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

from sympy import factorint

from . import numeric
from .elliptic import O, EllipticCurve, two_torsion
from .errors import InputError, PreconditionError, UnsupportedPrimeError
from .numeric import INF, PadicField, SquareClass, padic_valuation, square_class

DEFAULT_PRECISION = 20


class Reduction(str, enum.Enum):
    GOOD = "good"
    SPLIT = "split-multiplicative"
    NONSPLIT = "nonsplit-multiplicative"
    ADDITIVE = "additive"

    @property
    def multiplicative(self) -> bool:
        return self in (Reduction.SPLIT, Reduction.NONSPLIT)

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ReductionData:
    p: int
    v_delta_min: int
    v_c4: object  # int or INF
    v_j: object  # int or INF
    reduction: Reduction
    scale_exponent: int = 0  # minimal model = original rescaled by u = p^scale_exponent

    def as_dict(self):
        return {
            "p": self.p,
            "v_delta_min": self.v_delta_min,
            "v_c4": _jsonable(self.v_c4),
            "v_j": _jsonable(self.v_j),
            "class": self.reduction.value,
            "scale_exponent": self.scale_exponent,
        }


def _jsonable(v):
    return "inf" if v == INF else v


@dataclass(frozen=True)
class TateData:
    v_q: int
    q_square_class: SquareClass


class TwoTorsionStatus(str, enum.Enum):
    RATIONAL = "rational"
    UNRAMIFIED = "unramified-quadratic"
    RAMIFIED = "ramified-quadratic"
    # no root of the cubic in Q_p: splitting field of degree 3 or 6
    CUBIC = "cubic"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class TwoTorsionField:
    status: TwoTorsionStatus
    # square class to adjoin for the quadratic cases, None otherwise
    radicand_class: SquareClass | None
    description: str
    roots: tuple[int, ...] = ()  # Z_p roots on the minimal model, mod p^precision


def _require_local_prime(p: int):
    numeric.require_prime(p)
    if p < 5:
        raise UnsupportedPrimeError(
            f"reduction analysis needs p >= 5 (got {p}); use potentially_multiplicative"
        )


def minimal_at_p(E: EllipticCurve, p: int):
    """Rescale by a power of p to a p-integral model minimal at p (p >= 5).

    Returns ``(E_min, ReductionData)``; on the result either v(A) < 4 or v(B) < 6,
    equivalently v(c4) < 4 or v(Delta) < 12.
    """
    _require_local_prime(p)
    if E.p is not None:
        raise InputError("local analysis needs a curve over Q")
    vA, vB = padic_valuation(E.A, p), padic_valuation(E.B, p)
    k = min(math.floor(vA / 4) if vA != INF else INF, math.floor(vB / 6) if vB != INF else INF)
    Emin = E.rescale(Fraction(p) ** k) if k else E
    return Emin, _classify(Emin, p, k)


def _classify(Emin: EllipticCurve, p: int, k: int) -> ReductionData:
    vd = padic_valuation(Emin.discriminant, p)
    vc4 = padic_valuation(Emin.c4, p)
    vj = padic_valuation(Emin.j_invariant, p)
    if vd == 0:
        kind = Reduction.GOOD
    elif vc4 == 0:
        neg_c6 = numeric.residue(-Emin.c6, p)
        kind = Reduction.SPLIT if numeric.is_square_mod(neg_c6, p) else Reduction.NONSPLIT
    else:
        kind = Reduction.ADDITIVE
    return ReductionData(p, vd, vc4, vj, kind, k)


def reduction_type(E: EllipticCurve, p: int) -> ReductionData:
    return minimal_at_p(E, p)[1]


def potentially_multiplicative(E: EllipticCurve, p: int) -> bool:
    """True iff v_p(j) < 0.  Valid at every prime, including 2 and 3."""
    numeric.require_prime(p)
    return padic_valuation(E.j_invariant, p) < 0


@dataclass(frozen=True)
class NonIsogenyCertificate:
    """A prime where exactly one curve has potentially multiplicative reduction.

    Curves isogenous over an algebraic closure share potential reduction type
    at every prime, so such a prime rules out any geometric isogeny.
    """

    p: int
    v_j1: object
    v_j2: object

    def as_dict(self):
        return {"p": self.p, "v_j1": _jsonable(self.v_j1), "v_j2": _jsonable(self.v_j2)}


def _support(x) -> set[int]:
    x = numeric.as_rational(x)
    primes = set()
    for n in (x.numerator, x.denominator):
        if abs(n) > 1:
            primes |= set(factorint(abs(n)))
    return primes


def geometric_nonisogeny_certificate(E1: EllipticCurve, E2: EllipticCurve):
    """Certificate, or None when the potential-reduction test is inconclusive."""
    candidates = set()
    for E in (E1, E2):
        candidates |= _support(E.j_invariant) | _support(E.discriminant)
    for p in sorted(candidates):
        if potentially_multiplicative(E1, p) != potentially_multiplicative(E2, p):
            return NonIsogenyCertificate(
                p,
                padic_valuation(E1.j_invariant, p),
                padic_valuation(E2.j_invariant, p),
            )
    return None


def tate_valuation(E: EllipticCurve, p: int) -> TateData:
    """Valuation and square class of the Tate parameter q.

    v(q) = -v(j).  Since 1/j = q (1 + 744 q + ...) and the bracket is a
    1-unit, q and 1/j have the same square class.
    """
    data = reduction_type(E, p)
    if not data.reduction.multiplicative:
        raise PreconditionError(
            f"{E.label or E}: {data.reduction} reduction at {p}, not multiplicative",
            subject=E.label,
        )
    j = E.j_invariant
    return TateData(-padic_valuation(j, p), square_class(1 / j, p))


def full_two_torsion_field(E: EllipticCurve, p: int, precision: int = DEFAULT_PRECISION) -> TwoTorsionField:
    """Where E[2] becomes rational over Q_p.

    The cubic x^3 + Ax + B of the minimal model is factored over Z_p by
    root lifting.  With one root r, the cofactor x^2 + r x + (r^2 + A) has
    discriminant -3 r^2 - 4A, whose square class names the extension.
    """
    Emin, _ = minimal_at_p(E, p)
    roots = tuple(P[0] for P in two_torsion(Emin, PadicField(p, precision))[1:])
    if len(roots) == 3:
        return TwoTorsionField(TwoTorsionStatus.RATIONAL, SquareClass.ONE, f"Q_{p}", roots)
    if len(roots) == 1:
        r = roots[0]
        disc = (-3 * r * r - 4 * Emin.A) % p**precision
        if disc == 0:
            raise InputError("precision too low to separate the remaining roots")
        cls = square_class(disc, p)
        status = TwoTorsionStatus.UNRAMIFIED if cls is SquareClass.U else TwoTorsionStatus.RAMIFIED
        return TwoTorsionField(status, cls, f"Q_{p}(sqrt({cls.tag}))", roots)
    if len(roots) == 0:
        cls = square_class(Emin.discriminant, p)
        degree = 3 if cls is SquareClass.ONE else 6
        return TwoTorsionField(TwoTorsionStatus.CUBIC, None, f"degree {degree} extension of Q_{p}", roots)
    raise AssertionError(f"cubic cannot have exactly {len(roots)} roots")


def node(E: EllipticCurve, p: int) -> int:
    """x-coordinate of the node of the reduction of the minimal model (multiplicative case).

    For a nodal cubic (x - x0)^2 (x + 2 x0) mod p one has A = -3 x0^2 and
    B = 2 x0^3, hence x0 = -3B / (2A).
    """
    Emin, data = minimal_at_p(E, p)
    if not data.reduction.multiplicative:
        raise PreconditionError(f"{E.label or E}: no node, reduction is {data.reduction}", subject=E.label)
    a, b = numeric.residue(Emin.A, p), numeric.residue(Emin.B, p)
    x0 = -3 * b * pow(2 * a, -1, p) % p
    assert (x0**3 + a * x0 + b) % p == 0 and (3 * x0 * x0 + a) % p == 0
    return x0


def mu2_point(E: EllipticCurve, p: int, precision: int = DEFAULT_PRECISION):
    """The 2-torsion point of the mu_2 line, on the minimal model at p.

    For a Tate curve the 2-torsion is {1, -1, sqrt(q), -sqrt(q)}; -1 is a unit
    and reduces into the smooth locus, while the square roots of q reduce to
    the node.  So mu_2 is spanned by the unique rational 2-torsion point whose
    reduction is nonsingular.  x is an integer mod p^precision.
    """
    data = reduction_type(E, p)
    if data.reduction is not Reduction.SPLIT:
        raise PreconditionError(
            f"{E.label or E}: mu_2 point needs split multiplicative reduction at {p}, got {data.reduction}",
            subject=E.label,
        )
    Emin, _ = minimal_at_p(E, p)
    pts = two_torsion(Emin, PadicField(p, precision))[1:]
    if not pts:
        raise PreconditionError(f"{E.label or E}: no rational 2-torsion point over Q_{p}", subject=E.label)
    x0 = node(E, p)
    smooth = [P for P in pts if P[0] % p != x0]
    if len(smooth) != 1:
        raise AssertionError(f"expected exactly one 2-torsion point off the node, found {len(smooth)}")
    return smooth[0]


# ---------------------------------------------------------------------------
# working fields: Q_p adjoined square roots, tracked by square classes


def _span(classes) -> frozenset:
    group = {SquareClass.ONE}
    for c in classes:
        group |= {g * c for g in group}
    return frozenset(group)


@dataclass(frozen=True)
class WorkingField:
    """Q_p(sqrt(c) : c in classes), stored as the subgroup of square classes made square."""

    p: int
    squares: frozenset = field(default_factory=lambda: frozenset({SquareClass.ONE}))

    def __post_init__(self):
        object.__setattr__(self, "squares", _span(self.squares))

    @classmethod
    def adjoining(cls, p: int, classes) -> "WorkingField":
        return cls(p, frozenset(c for c in classes if c is not None))

    def contains_sqrt(self, c: SquareClass) -> bool:
        return c in self.squares

    def compositum(self, other: "WorkingField") -> "WorkingField":
        if other.p != self.p:
            raise InputError("fields over different primes")
        return WorkingField(self.p, self.squares | other.squares)

    @property
    def degree(self) -> int:
        return len(self.squares)

    def galois_characters(self) -> list[tuple[int, int]]:
        """Generators of Gal(M / self) for M the maximal elementary 2-extension of Q_p.

        A character is a pair (chi(u), chi(p)) in F_2^2, acting on sqrt(c)
        through the bilinear pairing with the exponents of c.
        """
        annihilator = [
            chi for chi in ((1, 0), (0, 1), (1, 1))
            if all(character_value(chi, c) == 0 for c in self.squares)
        ]
        basis = []
        for chi in annihilator:
            if chi not in _f2_span(basis):
                basis.append(chi)
        return basis

    def __str__(self):
        gens = []
        for c in (SquareClass.U, SquareClass.P, SquareClass.UP):
            if c in self.squares and c not in _span(gens):
                gens.append(c)
        if not gens:
            return f"Q_{self.p}"
        return f"Q_{self.p}(" + ", ".join(f"sqrt({g.tag})" for g in gens) + ")"


def character_value(chi, c: SquareClass) -> int:
    return (chi[0] * c.value[0] + chi[1] * c.value[1]) % 2


def _f2_span(vectors):
    span = {(0, 0)}
    for v in vectors:
        span |= {((a + v[0]) % 2, (b + v[1]) % 2) for a, b in span}
    return span
