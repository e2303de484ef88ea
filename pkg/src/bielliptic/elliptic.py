"""Elliptic curves y^2 = x^3 + Ax + B over Q and over prime fields.

Points are plain tuples ``(x, y)``; the identity is the module constant
:data:`O`.  Over Q coordinates are Fractions, over F_p they are ints in
``range(p)``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction

from sympy import divisors, factorint

from . import numeric
from .errors import InputError, ResourceError, SingularCurveError
from .numeric import PadicField, PrimeField, RationalField, as_rational

DEFAULT_ENUM_BOUND = 10**4
ENUM_BOUND_ENV = "BIELLIPTIC_ENUM_BOUND"


class _Identity:
    __slots__ = ()

    def __repr__(self):
        return "O"

    def __reduce__(self):
        return "O"


O = _Identity()


def enumeration_bound() -> int:
    raw = os.environ.get(ENUM_BOUND_ENV)
    if raw is None:
        return DEFAULT_ENUM_BOUND
    try:
        return int(raw)
    except ValueError as exc:
        raise InputError(f"{ENUM_BOUND_ENV}={raw!r} is not an integer") from exc


@dataclass(frozen=True)
class CurveInvariants:
    c4: Fraction
    c6: Fraction
    discriminant: Fraction
    j: Fraction


@dataclass(frozen=True)
class EllipticCurve:
    """y^2 = x^3 + A x + B.  ``p=None`` means the curve is over Q."""

    A: object
    B: object
    p: int | None = None
    label: str | None = None

    def __post_init__(self):
        if self.p is None:
            A, B = as_rational(self.A), as_rational(self.B)
        else:
            numeric.require_prime(self.p)
            if self.p < 5:
                raise InputError("curve arithmetic over F_2 and F_3 is not supported")
            A, B = numeric.residue(self.A, self.p), numeric.residue(self.B, self.p)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        if self._disc_core() == 0:
            name = self.label or f"y^2 = x^3 + {A}x + {B}"
            raise SingularCurveError(f"{name} is singular (discriminant 0)")

    @classmethod
    def from_ainvariants(cls, a, label=None):
        """Short model of the long Weierstrass equation with a-invariants a1..a6.

        Uses y^2 = x^3 - 27 c4 x - 54 c6, the standard char-0 reduction.
        """
        if len(a) != 5:
            raise InputError("need five a-invariants")
        a1, a2, a3, a4, a6 = (as_rational(t) for t in a)
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        c4 = b2 * b2 - 24 * b4
        c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
        return cls(-27 * c4, -54 * c6, label=label)

    # -- field helpers

    @property
    def field(self):
        return RationalField() if self.p is None else PrimeField(self.p)

    def _norm(self, x):
        return as_rational(x) if self.p is None else numeric.residue(x, self.p)

    def _div(self, a, b):
        if self.p is None:
            return a / b
        return a * pow(b, -1, self.p) % self.p

    def _disc_core(self):
        v = 4 * self.A**3 + 27 * self.B**2
        return v if self.p is None else v % self.p

    # -- invariants

    @property
    def discriminant(self):
        return self._norm(-16 * self._disc_core())

    @property
    def c4(self):
        return self._norm(-48 * self.A)

    @property
    def c6(self):
        return self._norm(-864 * self.B)

    @property
    def j_invariant(self):
        return self._div(self._norm(self.c4**3), self.discriminant)

    def rhs(self, x):
        v = x**3 + self.A * x + self.B
        return v if self.p is None else v % self.p

    def rescale(self, u) -> "EllipticCurve":
        """Model with x = u^2 x', y = u^3 y': A' = A/u^4, B' = B/u^6."""
        u = as_rational(u)
        return EllipticCurve(self.A / u**4, self.B / u**6, p=self.p, label=self.label)

    def reduce(self, p: int) -> "EllipticCurve":
        if self.p is not None:
            raise InputError("curve is already over a finite field")
        return EllipticCurve(self.A, self.B, p=p, label=self.label)

    # -- points

    def contains(self, P) -> bool:
        if P is O:
            return True
        x, y = P
        if self.p is None:
            return as_rational(y) ** 2 == self.rhs(as_rational(x))
        return (y * y - self.rhs(x)) % self.p == 0

    def point(self, x, y):
        P = (self._norm(x), self._norm(y))
        if not self.contains(P):
            raise InputError(f"{P} is not on {self}")
        return P

    def neg(self, P):
        if P is O:
            return O
        return (P[0], self._norm(-P[1]))

    def add(self, P, Q):
        if P is O:
            return Q
        if Q is O:
            return P
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2:
            if self._norm(y1 + y2) == 0:
                return O
            lam = self._div(self._norm(3 * x1 * x1 + self.A), self._norm(2 * y1))
        else:
            lam = self._div(self._norm(y2 - y1), self._norm(x2 - x1))
        x3 = self._norm(lam * lam - x1 - x2)
        y3 = self._norm(lam * (x1 - x3) - y1)
        return (x3, y3)

    def mul(self, n: int, P):
        if n < 0:
            return self.mul(-n, self.neg(P))
        R = O
        while n:
            if n & 1:
                R = self.add(R, P)
            P = self.add(P, P)
            n >>= 1
        return R

    def points(self) -> list:
        """All F_p-points, O first, then sorted by (x, y)."""
        p = self._require_finite()
        roots: dict[int, list[int]] = {}
        for y in range(p):
            roots.setdefault(y * y % p, []).append(y)
        pts = [O]
        for x in range(p):
            for y in roots.get(self.rhs(x), ()):
                pts.append((x, y))
        return pts

    def _require_finite(self, bound=None) -> int:
        if self.p is None:
            raise InputError("operation needs a curve over a prime field")
        bound = enumeration_bound() if bound is None else bound
        if self.p > bound:
            raise ResourceError(f"p = {self.p} exceeds the enumeration bound {bound}")
        return self.p

    def __str__(self):
        s = f"y^2 = x^3 + ({self.A})x + ({self.B})"
        if self.p is not None:
            s += f" over F_{self.p}"
        return f"{self.label}: {s}" if self.label else s


# ---------------------------------------------------------------------------
# module-level operations


def invariants(E: EllipticCurve) -> CurveInvariants:
    return CurveInvariants(E.c4, E.c6, E.discriminant, E.j_invariant)


def add(E: EllipticCurve, P, Q):
    for R in (P, Q):
        if not E.contains(R):
            raise InputError(f"{R} is not on {E}")
    return E.add(P, Q)


def _rational_cubic_roots(A: Fraction, B: Fraction) -> list[Fraction]:
    # scale x = t/u^2 so that t^3 + A u^4 t + B u^6 has integer coefficients
    u = math.lcm(A.denominator, B.denominator)
    a, b = A * u**4, B * u**6
    assert a.denominator == 1 and b.denominator == 1
    a, b = int(a), int(b)
    if b == 0:
        cands = {0}
        if a <= 0:
            r = math.isqrt(-a)
            if r * r == -a:
                cands |= {r, -r}
    else:
        cands = {s * d for d in divisors(abs(b)) for s in (1, -1)}
    roots = [t for t in cands if t**3 + a * t + b == 0]
    return sorted(Fraction(t, u * u) for t in roots)


def two_torsion(E: EllipticCurve, field=None) -> list:
    """O followed by the points (x0, 0) defined over ``field``, sorted by x0.

    ``field`` defaults to the curve's own field.  For a :class:`PadicField`
    the curve must be over Q and p-integral; x-coordinates are then integers
    modulo p^precision (canonical residues).
    """
    if field is None or isinstance(field, RationalField) and E.p is None:
        if E.p is None:
            xs = _rational_cubic_roots(E.A, E.B)
        else:
            p = E._require_finite()
            xs = [x for x in range(p) if E.rhs(x) == 0]
    elif isinstance(field, PrimeField):
        Ep = E if E.p == field.p else E.reduce(field.p)
        return two_torsion(Ep)
    elif isinstance(field, PadicField):
        if E.p is not None:
            raise InputError("p-adic 2-torsion needs a curve over Q")
        p = field.p
        if numeric.padic_valuation(E.A, p) < 0 or numeric.padic_valuation(E.B, p) < 0:
            raise InputError(f"model is not {p}-integral; rescale first")
        if E.A.denominator == 1 and E.B.denominator == 1:
            a, b = int(E.A), int(E.B)
        else:
            # p-integral but not integral: replace by integers congruent far
            # beyond the root separation
            work = p ** (field.precision + 2 * numeric.padic_valuation(E.discriminant, p) + 4)
            a, b = numeric.residue(E.A, work), numeric.residue(E.B, work)
        xs = numeric.zp_roots([b, a, 0, 1], p, field.precision)
        return [O] + [(x, 0) for x in xs]
    else:
        raise InputError(f"unsupported field {field!r}")
    return [O] + [(x, E._norm(0)) for x in xs]


def count_points(E: EllipticCurve, bound: int | None = None) -> int:
    """#E(F_p) = 1 + sum over x of (1 + chi(x^3 + Ax + B))."""
    p = E._require_finite(bound)
    half = (p - 1) // 2
    total = 1
    for x in range(p):
        v = E.rhs(x)
        if v == 0:
            total += 1
        elif pow(v, half, p) == 1:
            total += 2
    return total


def point_order(E: EllipticCurve, P, group_order: int) -> int:
    """Order of P, given any multiple of it (typically #E(F_p))."""
    n = group_order
    for q in factorint(group_order):
        while n % q == 0 and E.mul(n // q, P) is O:
            n //= q
    return n


@dataclass(frozen=True)
class CurveGroup:
    """E(F_p) as an abstract group together with generator points.

    ``generators[i]`` has order ``structure.invariant_factors[i]``.
    """

    curve: EllipticCurve
    structure: numeric.FinAbGroup
    generators: tuple

    @property
    def order(self) -> int:
        return self.structure.order

    def coordinate_table(self) -> dict:
        """Map every point to its coefficient tuple in the generators."""
        table = {}
        facs = self.structure.invariant_factors

        def walk(i, acc, coeffs):
            if i == len(facs):
                table[acc] = tuple(coeffs)
                return
            G = self.generators[i]
            pt = acc
            for c in range(facs[i]):
                walk(i + 1, pt, coeffs + [c])
                pt = self.curve.add(pt, G)

        walk(0, O, [])
        return table


def group_structure(E: EllipticCurve, bound: int | None = None) -> CurveGroup:
    """Z/d1 x Z/d2 with d1 | d2, via a maximal-order point and a complement."""
    E._require_finite(bound)
    pts = E.points()
    N = len(pts)
    orders = {P: point_order(E, P, N) for P in pts}
    big = max(pts[1:], key=lambda P: orders[P], default=O)
    d2 = orders[big] if big is not O else 1
    d1 = N // d2
    if d1 == 1:
        facs, gens = ((d2,), (big,)) if d2 > 1 else ((), ())
        return CurveGroup(E, numeric.FinAbGroup(invariant_factors=facs), gens)
    multiples = set()
    R = O
    for _ in range(d2):
        multiples.add(R)
        R = E.add(R, big)
    for Q in pts:
        if orders[Q] != d1:
            continue
        R, ok = Q, True
        for _ in range(1, d1):
            if R in multiples:
                ok = False
                break
            R = E.add(R, Q)
        if ok:
            return CurveGroup(E, numeric.FinAbGroup(invariant_factors=(d1, d2)), (Q, big))
    raise AssertionError("no complement found; group law is broken")


def torsion_point_order(E: EllipticCurve, P, bound: int = 100):
    """Least n <= bound with nP = O, or None when the order exceeds the bound."""
    if not E.contains(P):
        raise InputError(f"{P} is not on {E}")
    R = P
    for n in range(1, bound + 1):
        if R is O:
            return n
        R = E.add(R, P)
    return None
