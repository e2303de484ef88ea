"""Tensor-group models of the Albanese kernel of E1 x E2 and their push-forward quotients.

T(X) is modelled by A1 (x) A2 with A_i a group of points of E_i; the special
cycle z_{P,Q} = [P,Q] - [P,O] - [O,Q] + [O,O] maps to P (x) Q.  For the
quotient map pi: X -> S = X/G one has pi_* = pi_* sigma_*, so the image of
z under pi_* factors through the quotient of the tensor model by the
relations z - sigma_*(z).  Orders computed there bound orders in pi_*(T(X)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

from . import surfaces
from .elliptic import O, EllipticCurve, group_structure
from .errors import InputError
from .numeric import FinAbGroup, quotient_group

Vector = tuple[int, ...]


def _red(v, orders) -> Vector:
    return tuple(x % n if n else x for x, n in zip(v, orders))


@dataclass(frozen=True)
class MarkedGroup:
    """Z/n_1 x ... x Z/n_k (n_i = 0 for a free summand) with optional extra data.

    ``marked`` is the translation point P0 in coordinates.  ``automorphism``
    is an integer matrix whose j-th column is the image of the j-th generator.
    """

    orders: tuple[int, ...]
    names: tuple[str, ...] = ()
    marked: Vector | None = None
    marked_order: int | None = None
    automorphism: tuple[tuple[int, ...], ...] | None = None
    automorphism_order: int | None = None

    def __post_init__(self):
        orders = tuple(int(n) for n in self.orders)
        object.__setattr__(self, "orders", orders)
        if not self.names:
            object.__setattr__(self, "names", tuple(f"g{i}" for i in range(len(orders))))
        if len(self.names) != len(orders):
            raise InputError("one name per generator")
        if self.marked is not None:
            m = self.reduce(self.marked)
            object.__setattr__(self, "marked", m)
            if self.marked_order is not None and self.order_of(m) != self.marked_order:
                raise InputError(f"marked point has order {self.order_of(m)}, declared {self.marked_order}")
        if self.automorphism is not None:
            M = tuple(tuple(int(x) for x in row) for row in self.automorphism)
            object.__setattr__(self, "automorphism", M)
            self._check_automorphism()

    @property
    def rank(self) -> int:
        return len(self.orders)

    def basis(self, i) -> Vector:
        return tuple(int(k == i) for k in range(self.rank))

    def reduce(self, v) -> Vector:
        if len(v) != self.rank:
            raise InputError(f"expected {self.rank} coordinates, got {v}")
        return _red(v, self.orders)

    def add(self, a, b) -> Vector:
        return self.reduce(tuple(x + y for x, y in zip(a, b)))

    def scale(self, k, a) -> Vector:
        return self.reduce(tuple(k * x for x in a))

    def order_of(self, v):
        v = self.reduce(v)
        n = 1
        for x, o in zip(v, self.orders):
            if x == 0:
                continue
            if o == 0:
                return math.inf
            n = math.lcm(n, o // math.gcd(x, o))
        return n

    def apply(self, v) -> Vector:
        M = self.automorphism
        if M is None:
            raise InputError("group carries no automorphism")
        v = self.reduce(v)
        return self.reduce(tuple(sum(M[i][j] * v[j] for j in range(self.rank)) for i in range(self.rank)))

    def _check_automorphism(self):
        M = self.automorphism
        if len(M) != self.rank or any(len(r) != self.rank for r in M):
            raise InputError("automorphism matrix has the wrong shape")
        # well defined: n_j times the image of generator j must vanish
        for j, n in enumerate(self.orders):
            if n and any(self.scale(n, tuple(M[i][j] for i in range(self.rank)))):
                raise InputError(f"automorphism does not respect the order of generator {self.names[j]}")
        k = self.automorphism_order
        if k is not None:
            for j in range(self.rank):
                v = self.basis(j)
                for _ in range(k):
                    v = self.apply(v)
                if v != self.reduce(self.basis(j)):
                    raise InputError(f"automorphism does not have order dividing {k}")

    def satisfies_cyclotomic(self) -> bool:
        """alpha^2 + alpha + 1 = 0 on every generator."""
        for j in range(self.rank):
            e = self.basis(j)
            a1 = self.apply(e)
            a2 = self.apply(a1)
            if any(self.reduce(tuple(x + y + z for x, y, z in zip(e, a1, a2)))):
                return False
        return True

    def is_negation(self) -> bool:
        return all(self.apply(self.basis(j)) == self.scale(-1, self.basis(j)) for j in range(self.rank))


# ---------------------------------------------------------------------------
# tensor model


@dataclass(frozen=True)
class TensorModel:
    A1: MarkedGroup
    A2: MarkedGroup
    relations: tuple[Vector, ...]
    group: FinAbGroup

    @property
    def size(self) -> int:
        return self.A1.rank * self.A2.rank

    def index(self, i, j) -> int:
        return i * self.A2.rank + j

    def vector(self, a, b) -> Vector:
        """Coordinates of a (x) b in the generator-pair basis."""
        return tuple(x * y for x in a for y in b)

    def label(self, k) -> str:
        i, j = divmod(k, self.A2.rank)
        return f"{self.A1.names[i]}(x){self.A2.names[j]}"


def tensor_model(A1: MarkedGroup, A2: MarkedGroup) -> TensorModel:
    """Presentation of A1 (x) A2: generator pairs modulo the order relations."""
    size = A1.rank * A2.rank
    rows = []
    for i, n in enumerate(A1.orders):
        for j, m in enumerate(A2.orders):
            k = i * A2.rank + j
            for o in (n, m):
                if o:
                    rows.append(tuple(o if t == k else 0 for t in range(size)))
    return TensorModel(A1, A2, tuple(rows), quotient_group(size, rows))


class FormalCycleExpr:
    """Integer combination of point classes [a, b] on E1 x E2.

    Points are coordinate vectors in the two marked groups.  Normalisation
    sends [a, b] to a (x) b, which on the special cycles z_{a,b} is the
    bilinear symbol a (x) b.
    """

    def __init__(self, terms=None):
        self.terms = {k: c for k, c in (terms or {}).items() if c}

    @classmethod
    def point(cls, A1, A2, a, b, coeff=1):
        return cls({(A1.reduce(a), A2.reduce(b)): coeff})

    @classmethod
    def z(cls, A1, A2, a, b):
        o1, o2 = (0,) * A1.rank, (0,) * A2.rank
        return (
            cls.point(A1, A2, a, b)
            - cls.point(A1, A2, a, o2)
            - cls.point(A1, A2, o1, b)
            + cls.point(A1, A2, o1, o2)
        )

    def __add__(self, other):
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) + c
        return FormalCycleExpr(terms)

    def __neg__(self):
        return FormalCycleExpr({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, n: int):
        return FormalCycleExpr({k: n * c for k, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, FormalCycleExpr) and self.terms == other.terms

    def __repr__(self):
        return f"FormalCycleExpr({self.terms})"

    def pushforward(self, A1: MarkedGroup, A2: MarkedGroup):
        """sigma_* for sigma(P, Q) = (P + P0, alpha Q), point class by point class."""
        if A1.marked is None or A2.automorphism is None:
            raise InputError("push-forward needs a marked point on A1 and an automorphism on A2")
        out = FormalCycleExpr()
        for (a, b), c in self.terms.items():
            out = out + FormalCycleExpr.point(A1, A2, A1.add(a, A1.marked), A2.apply(b), c)
        return out

    def normalize(self, model: TensorModel) -> Vector:
        acc = [0] * model.size
        for (a, b), c in self.terms.items():
            for k, x in enumerate(model.vector(a, b)):
                acc[k] += c * x
        return tuple(acc)


# ---------------------------------------------------------------------------
# push-forward relations and quotients


@dataclass(frozen=True)
class RelationSet:
    rows: tuple[Vector, ...]
    provenance: tuple[str, ...]


def _check_roles(t, A1, A2):
    if t not in (1, 5):
        raise InputError("push-forward relations exist for Types 1 and 5 only")
    want = 2 if t == 1 else 3
    if A1.marked is None or A1.order_of(A1.marked) != want:
        raise InputError(f"Type {t} needs a marked point of order {want} on A1")
    if A2.automorphism is None:
        raise InputError(f"Type {t} needs an automorphism on A2")
    if t == 1 and not A2.is_negation():
        raise InputError("Type 1 acts on E2 by -1")
    if t == 5 and not A2.satisfies_cyclotomic():
        raise InputError("Type 5 needs alpha^2 + alpha + 1 = 0 on A2")


def pushforward_relations(t: int, A1: MarkedGroup, A2: MarkedGroup, model: TensorModel | None = None) -> RelationSet:
    _check_roles(t, A1, A2)
    model = model or tensor_model(A1, A2)
    rows, prov = [], []
    for i in range(A1.rank):
        for j in range(A2.rank):
            a, b = A1.basis(i), A2.basis(j)
            z = FormalCycleExpr.z(A1, A2, a, b)
            rows.append((z - z.pushforward(A1, A2)).normalize(model))
            prov.append(f"pushforward-functoriality: z({A1.names[i]},{A2.names[j]}) - sigma_* z")
    return RelationSet(tuple(rows), tuple(prov))


@dataclass(frozen=True)
class QuotientResult:
    group: FinAbGroup
    exponent: int  # 0 when infinite
    z_order: object  # int or math.inf


def quotient_exponent(model: TensorModel, relations: RelationSet, z) -> QuotientResult:
    """Quotient of the tensor model by the relations, plus the order of z's image."""
    rows = list(model.relations) + list(relations.rows)
    G = quotient_group(model.size, rows)
    return QuotientResult(G, G.exponent, G.element_order(list(z)))


def coset_enumeration(model: TensorModel, relation_rows, z):
    """Brute-force check of a finite tensor quotient.

    Elements of A1 (x) A2 are enumerated through its cyclic decomposition
    Z/gcd(n_i, m_j) over generator pairs; the relation subgroup is closed
    by breadth-first search.  Returns (quotient order, exponent, order of z).
    """
    mods = [math.gcd(n, m) for n in model.A1.orders for m in model.A2.orders]
    if any(d == 0 for d in mods):
        raise InputError("tensor group is infinite; coset enumeration needs a finite model")

    def red(v):
        return tuple(x % d for x, d in zip(v, mods))

    gens = [red(r) for r in relation_rows]
    zero = tuple(0 for _ in mods)
    sub = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = red(tuple(x + y for x, y in zip(v, g)))
                if w not in sub:
                    sub.add(w)
                    nxt.append(w)
        frontier = nxt

    def order(v):
        k, w = 1, red(v)
        while w not in sub:
            w = red(tuple(x + y for x, y in zip(w, v)))
            k += 1
        return k

    total = math.prod(mods)
    exponent = 1
    for v in product(*(range(d) for d in mods)):
        exponent = math.lcm(exponent, order(v))
    return total // len(sub), exponent, order(z)


# ---------------------------------------------------------------------------
# models


def universal_model(t: int):
    """A1 = Z<P> + Z/e<P0>, A2 = Z<Q> (Type 1) or Z[omega]<Q> (Type 5)."""
    if t == 1:
        A1 = MarkedGroup((0, 2), ("P", "P0"), marked=(0, 1), marked_order=2)
        A2 = MarkedGroup((0,), ("Q",), automorphism=((-1,),), automorphism_order=2)
    elif t == 5:
        A1 = MarkedGroup((0, 3), ("P", "P0"), marked=(0, 1), marked_order=3)
        A2 = MarkedGroup((0, 0), ("Q", "wQ"), automorphism=((0, -1), (1, -1)), automorphism_order=3)
    else:
        raise InputError("universal models exist for Types 1 and 5")
    return A1, A2


def primitive_cube_root(p: int) -> int:
    if p % 3 != 1:
        raise InputError(f"F_{p} has no primitive cube root of unity")
    return min(x for x in range(2, p) if pow(x, 3, p) == 1)


def curve_automorphism(E: EllipticCurve, kind: str):
    """The automorphism -1 or omega: (x, y) -> (zeta x, y) of a j = 0 curve."""
    if kind == "neg":
        return E.neg
    if kind == "omega":
        if E.p is None or E.A != 0:
            raise InputError("omega needs a curve y^2 = x^3 + B over F_p")
        zeta = primitive_cube_root(E.p)
        return lambda P: O if P is O else (zeta * P[0] % E.p, P[1])
    raise InputError(f"unknown automorphism {kind!r}")


@dataclass
class CurveInstance:
    """Finite-field instance: A1 = E1(F_p) with P0, A2 = E2(F_p) with alpha."""

    t: int
    E1: EllipticCurve
    E2: EllipticCurve
    P0: object
    A1: MarkedGroup
    A2: MarkedGroup
    coords1: dict = field(repr=False)
    coords2: dict = field(repr=False)
    alpha: object = field(repr=False)


def _pick_translation(E1, cg, n):
    for P, c in sorted(cg.coordinate_table().items(), key=lambda kv: (kv[0] is not O, kv[0] if kv[0] is not O else ())):
        if P is not O and E1.mul(n, P) is O:
            return P
    raise InputError(f"{E1} has no rational point of order {n}")


def curve_instance(t: int, E1: EllipticCurve, E2: EllipticCurve, P0=None) -> CurveInstance:
    if t not in (1, 5):
        raise InputError("finite-field models exist for Types 1 and 5")
    kind = "neg" if t == 1 else "omega"
    n = 2 if t == 1 else 3
    if E1.p is None or E1.p != E2.p:
        raise InputError("both curves must be over the same prime field")
    g1, g2 = group_structure(E1), group_structure(E2)
    P0 = _pick_translation(E1, g1, n) if P0 is None else P0
    spec = surfaces.ActionSpec(E1, P0, E2, kind, E1.field)
    check = surfaces.validate_action(spec, t)
    if not check.ok:
        raise InputError("; ".join(v.message for v in check.violations))
    c1, c2 = g1.coordinate_table(), g2.coordinate_table()
    alpha = curve_automorphism(E2, kind)
    cols = [c2[alpha(G)] for G in g2.generators]
    M = tuple(tuple(cols[j][i] for j in range(len(cols))) for i in range(len(cols)))
    A1 = MarkedGroup(g1.structure.invariant_factors, tuple(f"G{i+1}" for i in range(len(g1.generators))),
                     marked=c1[P0], marked_order=n)
    A2 = MarkedGroup(g2.structure.invariant_factors, tuple(f"H{i+1}" for i in range(len(g2.generators))),
                     automorphism=M, automorphism_order=n)
    return CurveInstance(t, E1, E2, P0, A1, A2, c1, c2, alpha)


@dataclass(frozen=True)
class VerifyReport:
    t: int
    tensor: FinAbGroup
    quotient: FinAbGroup
    exponent: int
    z_label: str
    z_order: object
    per_cycle_bound: int  # epsilon^2
    pair_orders: dict

    @property
    def divides(self) -> bool:
        orders = [self.z_order, *self.pair_orders.values()]
        return all(o != math.inf and self.per_cycle_bound % o == 0 for o in orders) and (
            self.exponent != 0 and self.per_cycle_bound % self.exponent == 0
        )


def verify_model(t: int, A1: MarkedGroup, A2: MarkedGroup) -> VerifyReport:
    """Quotient the tensor model by the push-forward relations and bound every generator pair."""
    model = tensor_model(A1, A2)
    rels = pushforward_relations(t, A1, A2, model)
    res = quotient_exponent(model, rels, model.vector(A1.basis(0), A2.basis(0)) if A1.rank and A2.rank else ())
    G = quotient_group(model.size, list(model.relations) + list(rels.rows))
    pair_orders = {
        model.label(model.index(i, j)): G.element_order(model.vector(A1.basis(i), A2.basis(j)))
        for i in range(A1.rank)
        for j in range(A2.rank)
    }
    eps = 2 if t == 1 else 3
    z_label = model.label(0) if model.size else "0"
    z_order = res.z_order if model.size else 1
    return VerifyReport(t, model.group, res.group, res.exponent, z_label, z_order, eps * eps, pair_orders)


# ---------------------------------------------------------------------------
# composed certificate


@dataclass(frozen=True)
class BoundFactor:
    source: str
    value: int
    verified: bool
    detail: str = ""


@dataclass(frozen=True)
class BoundCertificate:
    t: int
    base_type: int
    factors: tuple[BoundFactor, ...]
    bound: int

    @property
    def total(self) -> int:
        return math.prod(f.value for f in self.factors)

    @property
    def ok(self) -> bool:
        return all(f.verified for f in self.factors) and self.bound % self.total == 0

    def as_dict(self):
        return {
            "type": self.t,
            "base_type": self.base_type,
            "factors": [
                {"source": f.source, "value": f.value, "verified": f.verified, "detail": f.detail}
                for f in self.factors
            ],
            "total": self.total,
            "bound": self.bound,
            "ok": self.ok,
        }


def full_bound_certificate(t: int) -> BoundCertificate:
    """Exponent of T(S) for type t, assembled from covers, cokernels and the base replay.

    Along a cover of degree m, m kills T(S) modulo push-forwards (degree
    identity), so exp T(S) divides m * exp T(S~).  At the base (Type 1 or 5,
    epsilon = |G|) the same argument for X -> S~ contributes epsilon, and the
    replayed derivation contributes epsilon^2 for pi_*(z).
    """
    from . import replay

    chain = surfaces.cover_chain(t)
    base = chain[-1].target_type if chain else t
    factors = []

    def coker(m, what):
        v = replay.replay_derivation(replay.load_script("composite_reduction", degree=m))
        factors.append(BoundFactor(what, m, v.ok, v.certificate or v.reason))

    for step in chain:
        coker(step.degree, f"cover Type {step.source_type} -> Type {step.target_type}")
    eps = surfaces.epsilon(base)
    coker(eps, f"cokernel of push-forward from E1 x E2 to Type {base}")
    script = replay.load_script("type1_main" if base == 1 else "type5_main")
    v = replay.replay_derivation(script)
    # the multiplier certified by the replay, read off the claim 'n * pi(z(P,Q)) => 0'
    n = max((abs(c) for c in script.claim[0].values()), default=0) if script.claim else 0
    ok = v.ok and not script.claim[1] and n == eps * eps
    factors.append(BoundFactor(f"Type {base} special cycles", n, ok, v.certificate or v.reason))
    return BoundCertificate(t, base, tuple(factors), surfaces.exponent_bound(t))
