from fractions import Fraction

import pytest
import sympy

from bielliptic import elliptic as ec
from bielliptic.elliptic import O, EllipticCurve
from bielliptic.errors import InputError, ResourceError, SingularCurveError
from bielliptic.numeric import PadicField, PrimeField


def _long_form_j(a):
    # independent route: the classical b/c-invariant formulas for a long Weierstrass equation
    a1, a2, a3, a4, a6 = (Fraction(x) for x in a)
    b2 = a1**2 + 4 * a2
    b4 = a1 * a3 + 2 * a4
    b6 = a3**2 + 4 * a6
    b8 = a1**2 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3**2 - a4**2
    c4 = b2**2 - 24 * b4
    disc = -(b2**2) * b8 - 8 * b4**3 - 27 * b6**2 + 9 * b2 * b4 * b6
    return c4**3 / disc


def test_long_form_conversion_33a2():
    E = EllipticCurve.from_ainvariants([1, 1, 0, -11, 0], label="33.a2")
    assert (E.A, E.B) == (-14931, 220590)
    assert E.j_invariant == _long_form_j([1, 1, 0, -11, 0])


def test_long_form_is_isomorphic_by_substitution():
    # substitute the completing-the-square/cube change of variables symbolically
    x, y = sympy.symbols("x y")
    a1, a2, a3, a4, a6 = 1, 1, 0, -11, 0
    long_eq = y**2 + a1 * x * y + a3 * y - (x**3 + a2 * x**2 + a4 * x + a6)
    b2 = a1**2 + 4 * a2
    X, Y = sympy.symbols("X Y")
    # x = (X - 3 b2) / 36, y = (Y - 108 (a1 x + a3)) / 216 maps the long form to Y^2 = X^3 + A X + B
    xs = (X - 3 * b2) / 36
    ys = (Y - 108 * (a1 * xs + a3)) / 216
    E = EllipticCurve.from_ainvariants([a1, a2, a3, a4, a6])
    transformed = sympy.expand(long_eq.subs({x: xs, y: ys}) * 216**2)
    target = sympy.expand(Y**2 - (X**3 + int(E.A) * X + int(E.B)))
    assert sympy.simplify(transformed - target) == 0


@pytest.mark.parametrize("A,B,j", [(0, 1, 0), (1, 0, 1728), (-1, 0, 1728)])
def test_j_invariant_special_values(A, B, j):
    assert EllipticCurve(A, B).j_invariant == j


def test_invariants_relation():
    E = EllipticCurve(Fraction(-3, 4), 5)
    inv = ec.invariants(E)
    assert inv.c4**3 - inv.c6**2 == 1728 * inv.discriminant


def test_singular_and_unsupported():
    with pytest.raises(SingularCurveError):
        EllipticCurve(-3, 2)
    with pytest.raises(SingularCurveError):
        EllipticCurve(0, 0, p=7)
    with pytest.raises(InputError):
        EllipticCurve(1, 1, p=3)
    with pytest.raises(InputError):
        EllipticCurve(1, 1, p=9)
    with pytest.raises(InputError):
        EllipticCurve(0.5, 1)


def test_point_validation():
    E = EllipticCurve(0, 1)
    with pytest.raises(InputError):
        ec.add(E, (1, 1), O)
    assert ec.add(E, (2, 3), O) == (2, 3)


def test_rational_arithmetic():
    E = EllipticCurve(0, 1)
    P = E.point(2, 3)
    assert ec.torsion_point_order(E, P) == 6
    assert E.mul(3, P) == (-1, 0)
    assert E.add(P, E.neg(P)) is O
    assert ec.torsion_point_order(EllipticCurve(-2, 1), (0, 1)) == 4
    E2 = EllipticCurve(0, -2)  # (3, 5) has infinite order
    assert ec.torsion_point_order(E2, (3, 5), bound=30) is None
    Q = E2.mul(2, (3, 5))
    assert E2.contains(Q) and isinstance(Q[0], Fraction)


def test_rational_two_torsion():
    assert ec.two_torsion(EllipticCurve(-1, 0)) == [O, (-1, 0), (0, 0), (1, 0)]
    assert ec.two_torsion(EllipticCurve(0, 2)) == [O]
    assert ec.two_torsion(EllipticCurve(Fraction(-1, 16), 0))[1:] == [(Fraction(-1, 4), 0), (0, 0), (Fraction(1, 4), 0)]
    E = EllipticCurve.from_ainvariants([1, 1, 0, -11, 0])
    assert [P[0] for P in ec.two_torsion(E)[1:]] == [-129, 15, 114]


def test_prime_field_two_torsion():
    E = EllipticCurve(1, 0, p=5)
    assert ec.two_torsion(E) == [O, (0, 0), (2, 0), (3, 0)]
    assert ec.two_torsion(EllipticCurve(1, 0), PrimeField(5)) == [O, (0, 0), (2, 0), (3, 0)]


def test_padic_two_torsion_needs_integral_model():
    with pytest.raises(InputError):
        ec.two_torsion(EllipticCurve(Fraction(1, 5), 1), PadicField(5))
    pts = ec.two_torsion(EllipticCurve(-47, -14), PadicField(5, 6))
    assert len(pts) == 4
    for _, (x, _y) in zip(range(3), pts[1:]):
        assert (x**3 - 47 * x - 14) % 5**6 == 0


def _naive_count(A, B, p):
    return 1 + sum(1 for x in range(p) for y in range(p) if (y * y - x**3 - A * x - B) % p == 0)


@pytest.mark.parametrize("A,B,p", [(0, 1, 5), (1, 0, 5), (2, 3, 7), (1, 1, 101), (-1, 0, 97), (5, 7, 31)])
def test_point_count_matches_naive(A, B, p):
    E = EllipticCurve(A, B, p=p)
    n = ec.count_points(E)
    assert n == _naive_count(A, B, p) == len(E.points())
    assert (n - p - 1) ** 2 <= 4 * p


def test_group_structure_examples():
    g = ec.group_structure(EllipticCurve(0, 1, p=5))
    assert str(g.structure) == "Z/6"
    g = ec.group_structure(EllipticCurve(1, 0, p=5))
    assert str(g.structure) == "Z/2 x Z/2"
    g = ec.group_structure(EllipticCurve(0, 1, p=7))
    assert g.structure.invariant_factors == (2, 6)


@pytest.mark.parametrize("A,B,p", [(0, 1, 7), (-1, 0, 13), (3, 0, 23), (-4, 0, 47), (0, 1, 97), (2, 3, 17)])
def test_group_structure_is_consistent(A, B, p):
    E = EllipticCurve(A, B, p=p)
    g = ec.group_structure(E)
    table = g.coordinate_table()
    assert len(table) == g.order == ec.count_points(E)
    assert set(table) == set(E.points())
    for G, n in zip(g.generators, g.structure.invariant_factors):
        assert ec.point_order(E, G, g.order) == n
    # the coordinate map is a homomorphism
    pts = E.points()[:12]
    facs = g.structure.invariant_factors
    for P in pts:
        for Q in pts:
            lhs = table[E.add(P, Q)]
            rhs = tuple((a + b) % n for a, b, n in zip(table[P], table[Q], facs))
            assert lhs == rhs


def test_enumeration_bound(monkeypatch):
    monkeypatch.setenv(ec.ENUM_BOUND_ENV, "50")
    with pytest.raises(ResourceError):
        ec.count_points(EllipticCurve(1, 1, p=101))
    monkeypatch.setenv(ec.ENUM_BOUND_ENV, "lots")
    with pytest.raises(InputError):
        ec.enumeration_bound()


def test_associativity_and_hasse_random(rng):
    primes = [p for p in range(5, 102) if sympy.isprime(p)]
    for _ in range(10):
        p = rng.choice(primes)
        while True:
            A, B = rng.randrange(p), rng.randrange(p)
            if (4 * A**3 + 27 * B**2) % p:
                break
        E = EllipticCurve(A, B, p=p)
        pts = E.points()
        assert (len(pts) - p - 1) ** 2 <= 4 * p
        for _ in range(30):
            P, Q, R = (rng.choice(pts) for _ in range(3))
            assert E.add(E.add(P, Q), R) == E.add(P, E.add(Q, R))
            assert E.add(P, Q) == E.add(Q, P)
