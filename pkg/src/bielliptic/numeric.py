"""Exact arithmetic foundation.

Rationals are ``fractions.Fraction``; integers are Python ints.  Nothing in
this package touches floating point.  This module provides p-adic valuations,
quadratic residues and square classes, p-adic roots of integer polynomials,
Smith normal form, and finitely generated abelian groups given by
generators and relations.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from sympy import isprime

from .errors import InputError

INF = math.inf
PRIME_LIMIT = 2**64

Matrix = list[list[int]]


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and strings like ``"-3/4"`` to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool) or isinstance(x, float):
        raise InputError(f"refusing non-exact value {x!r}")
    try:
        return Fraction(x)
    except (TypeError, ValueError) as exc:
        raise InputError(f"not a rational number: {x!r}") from exc


def require_prime(p: int) -> int:
    if not isinstance(p, int) or isinstance(p, bool):
        raise InputError(f"prime must be an integer, got {p!r}")
    if p >= PRIME_LIMIT:
        raise InputError(f"p = {p} is outside the supported range p < 2^64")
    if not isprime(p):
        raise InputError(f"{p} is not prime")
    return p


# ---------------------------------------------------------------------------
# field descriptors


@dataclass(frozen=True)
class RationalField:
    def __str__(self):
        return "Q"


QQ = RationalField()


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        require_prime(self.p)

    def __str__(self):
        return f"F_{self.p}"


@dataclass(frozen=True)
class PadicField:
    """The field Q_p, with the precision used for Hensel-lifted roots."""

    p: int
    precision: int = 20

    def __post_init__(self):
        require_prime(self.p)
        if self.precision < 1:
            raise InputError("p-adic precision must be positive")

    def __str__(self):
        return f"Q_{self.p}"


# ---------------------------------------------------------------------------
# valuations and residues


def padic_valuation(x, p: int):
    """v_p(x) for a nonzero rational, ``math.inf`` for zero."""
    x = as_rational(x)
    if x == 0:
        return INF
    return _vint(x.numerator, p) - _vint(x.denominator, p)


def _vint(n: int, p: int) -> int:
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def unit_part(x, p: int) -> Fraction:
    """x / p^v_p(x)."""
    x = as_rational(x)
    v = padic_valuation(x, p)
    return x / Fraction(p) ** v


def residue(x, p: int) -> int:
    """Image of a p-integral rational in Z/p."""
    x = as_rational(x)
    if x.denominator % p == 0:
        raise InputError(f"{x} is not {p}-integral")
    return x.numerator * pow(x.denominator, -1, p) % p


def is_square_mod(u: int, p: int) -> bool:
    """Euler's criterion.  ``u`` must be coprime to the odd prime ``p``."""
    if p % 2 == 0:
        raise InputError("is_square_mod needs an odd prime")
    require_prime(p)
    if u % p == 0:
        raise InputError(f"{u} is divisible by {p}")
    return pow(u, (p - 1) // 2, p) == 1


class SquareClass(enum.Enum):
    """Q_p^x modulo squares for odd p: generated by a nonsquare unit u and p.

    The value is the pair of exponents (e_u, e_p) in {0, 1}.
    """

    ONE = (0, 0)
    U = (1, 0)
    P = (0, 1)
    UP = (1, 1)

    @property
    def tag(self) -> str:
        return {(0, 0): "1", (1, 0): "u", (0, 1): "p", (1, 1): "up"}[self.value]

    @classmethod
    def from_tag(cls, tag: str) -> "SquareClass":
        for c in cls:
            if c.tag == tag:
                return c
        raise InputError(f"unknown square class {tag!r}")

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        a, b = self.value
        c, d = other.value
        return SquareClass(((a + c) % 2, (b + d) % 2))

    def __str__(self):
        return self.tag


def square_class(x, p: int) -> SquareClass:
    x = as_rational(x)
    if x == 0:
        raise InputError("zero has no square class")
    if p == 2:
        raise InputError("square classes are only implemented for odd p")
    v = padic_valuation(x, p)
    u = residue(unit_part(x, p), p)
    return SquareClass((0 if is_square_mod(u, p) else 1, v % 2))


# ---------------------------------------------------------------------------
# p-adic roots


def _poly_eval(coeffs: Sequence[int], x: int) -> int:
    # coeffs in increasing degree
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _poly_deriv(coeffs: Sequence[int]) -> list[int]:
    return [i * c for i, c in enumerate(coeffs)][1:]


def zp_roots(coeffs: Sequence[int], p: int, precision: int = 20) -> list[int]:
    """Roots in Z_p of a squarefree integer polynomial, each reduced mod p^precision.

    ``coeffs`` lists coefficients in increasing degree.  Roots are found by
    branching on residues until the Hensel condition v(f(r)) > 2 v(f'(r))
    holds on a disc small enough to contain a single root, then lifted by
    Newton iteration.  Returned sorted.
    """
    coeffs = [int(c) for c in coeffs]
    deriv = _poly_deriv(coeffs)
    if not any(deriv):
        raise InputError("polynomial must be nonconstant")
    mod = p**precision
    found = set()
    stack = [(r, 1) for r in range(p) if _poly_eval(coeffs, r) % p == 0]
    while stack:
        r, k = stack.pop()
        fr = _poly_eval(coeffs, r)
        vf = INF if fr == 0 else _vint(fr, p)
        dr = _poly_eval(deriv, r)
        vd = INF if dr == 0 else _vint(dr, p)
        # the disc r + p^k Z_p holds exactly one root once k > v(f'(r))
        if vf > 2 * vd and k > vd:
            found.add(r % mod if fr == 0 else _newton_lift(coeffs, deriv, r, p, vd, precision))
            continue
        if k > 4 * precision + 64:
            raise InputError("root search did not separate; polynomial not squarefree?")
        pk = p**k
        for t in range(p):
            s = r + t * pk
            if _poly_eval(coeffs, s) % (pk * p) == 0:
                stack.append((s, k + 1))
    return sorted(found)


def _newton_lift(coeffs, deriv, r, p, vd, precision):
    work = p ** (precision + 2 * vd + 2)
    pv = p**vd
    while True:
        fr = _poly_eval(coeffs, r) % work
        if fr == 0 or _vint(fr, p) - vd >= precision:
            return r % p**precision
        dr = _poly_eval(deriv, r)
        unit = (dr // pv) % work
        step = (fr // pv) * pow(unit, -1, work) % work
        r = (r - step) % work


# ---------------------------------------------------------------------------
# Smith normal form


class SmithForm(NamedTuple):
    diagonal: list[int]
    U: Matrix
    V: Matrix
    D: Matrix


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if not A:
        return []
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(cols)] for i in range(len(A))]


def determinant(M: Matrix) -> int:
    """Integer determinant by fraction-free (Bareiss) elimination."""
    n = len(M)
    if n == 0:
        return 1
    A = [row[:] for row in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def smith_normal_form(M: Sequence[Sequence[int]], ncols: int | None = None) -> SmithForm:
    """Return D = U·M·V diagonal with d1 | d2 | ..., U and V unimodular.

    Pivot: the entry of least nonzero absolute value in the active block,
    ties broken by lowest row and then lowest column.  ``ncols`` is needed
    only when M has no rows.
    """
    A = [[int(x) for x in row] for row in M]
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    U, V = _identity(m), _identity(n)

    def row_op(dst, src, q):  # row_dst -= q * row_src
        A[dst] = [a - q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    def col_op(dst, src, q):  # col_dst -= q * col_src
        for row in A:
            row[dst] -= q * row[src]
        for row in V:
            row[dst] -= q * row[src]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def pick_pivot(t):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                a = abs(A[i][j])
                if a and (best is None or a < best[0]):
                    best = (a, i, j)
        return best

    for t in range(min(m, n)):
        while True:
            piv = pick_pivot(t)
            if piv is None:
                break
            _, i, j = piv
            swap_rows(t, i)
            swap_cols(t, j)
            p = A[t][t]
            for i in range(t + 1, m):
                if A[i][t]:
                    row_op(i, t, A[i][t] // p)
            for j in range(t + 1, n):
                if A[t][j]:
                    col_op(j, t, A[t][j] // p)
            if any(A[i][t] for i in range(t + 1, m)) or any(A[t][j] for j in range(t + 1, n)):
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            # pull a non-divisible row into the pivot row and reduce again
            row_op(t, bad, -1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
        if A[t][t] == 0:
            break
    diagonal = [A[i][i] for i in range(min(m, n))]
    return SmithForm(diagonal, U, V, A)


# ---------------------------------------------------------------------------
# finitely generated abelian groups


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


@dataclass(frozen=True)
class FinAbGroup:
    """Z^rank x Z/d1 x ... x Z/dk with d1 | d2 | ... | dk and every di >= 2.

    Groups built by :func:`quotient_group` remember the change of basis, so
    elements of the ambient Z^n can be mapped to coordinates and their orders
    computed.
    """

    rank: int = 0
    invariant_factors: tuple[int, ...] = ()
    _diagonal: tuple[int, ...] | None = field(default=None, compare=False, repr=False)
    _basis: tuple[tuple[int, ...], ...] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        inv = tuple(int(d) for d in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", inv)
        if self.rank < 0 or any(d < 2 for d in inv):
            raise InputError(f"bad invariant factors {inv}")
        if any(inv[i + 1] % inv[i] for i in range(len(inv) - 1)):
            raise InputError(f"invariant factors {inv} do not form a divisibility chain")

    @classmethod
    def cyclic(cls, n: int) -> "FinAbGroup":
        if n == 0:
            return cls(rank=1)
        return cls(invariant_factors=(n,) if n > 1 else ())

    @property
    def order(self):
        """Number of elements, ``math.inf`` when the rank is positive."""
        if self.rank:
            return INF
        return math.prod(self.invariant_factors)

    @property
    def exponent(self) -> int:
        """Least common multiple of element orders; 0 for infinite groups."""
        if self.rank:
            return 0
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.invariant_factors

    def __str__(self):
        parts = ["Z"] * self.rank + [f"Z/{d}" for d in self.invariant_factors]
        return " x ".join(parts) if parts else "0"

    # -- element-level queries (need presentation data)

    def _require_presentation(self):
        if self._basis is None:
            raise InputError("group has no presentation attached")

    def coordinates(self, vector: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of the image of ``vector`` in the cyclic decomposition.

        Torsion coordinates come first (reduced mod their invariant factor),
        then the free ones.
        """
        self._require_presentation()
        V = self._basis
        if len(vector) != len(V):
            raise InputError(f"expected a vector of length {len(V)}")
        y = [sum(vector[k] * V[k][i] for k in range(len(V))) for i in range(len(V))]
        torsion, free = [], []
        for yi, d in zip(y, self._diagonal):
            if d == 0:
                free.append(yi)
            elif d > 1:
                torsion.append(yi % d)
        return tuple(torsion + free)

    def element_order(self, vector: Sequence[int]):
        coords = self.coordinates(vector)
        k = len(self.invariant_factors)
        if any(coords[k:]):
            return INF
        order = 1
        for c, d in zip(coords, self.invariant_factors):
            order = _lcm(order, d // math.gcd(c, d))
        return order

    def is_zero(self, vector: Sequence[int]) -> bool:
        return not any(self.coordinates(vector))


def quotient_group(n_generators: int, relations: Sequence[Sequence[int]]) -> FinAbGroup:
    """Z^n modulo the row span of ``relations``."""
    rows = [list(r) for r in relations]
    for r in rows:
        if len(r) != n_generators:
            raise InputError(f"relation {r} does not have {n_generators} entries")
    snf = smith_normal_form(rows, ncols=n_generators)
    diag = list(snf.diagonal) + [0] * (n_generators - len(snf.diagonal))
    diag = [abs(d) for d in diag]
    return FinAbGroup(
        rank=sum(1 for d in diag if d == 0),
        invariant_factors=tuple(d for d in diag if d > 1),
        _diagonal=tuple(diag),
        _basis=tuple(tuple(row) for row in snf.V),
    )


def in_row_lattice(vector: Sequence[int], rows: Sequence[Sequence[int]]) -> bool:
    """True iff ``vector`` is an integer combination of ``rows``."""
    n = len(vector)
    if not rows:
        return not any(vector)
    return quotient_group(n, rows).is_zero(vector)
