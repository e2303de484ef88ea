"""Replay of zero-cycle derivations written as small text scripts.

A script declares the two point groups, the group action and the claim, then
lists rewrite steps.  Each step ``lhs => rhs`` is licensed by exactly one
rule, checked on the difference D = lhs - rhs by exact integer algebra:

``bilinearity``
    D is a combination of special cycles z(a, b) whose tensor a (x) b vanishes.
``torsion-equivalence``
    on each fibre E1 x {b}, D is sum c_a ([a,b] - [O,b]) with ord(a) | c_a.
``pushforward-functoriality``
    D lies under pi and its coefficients sum to zero on every orbit of sigma.
``degree-identity``
    D is a combination of push(pull(x)) - m x.
``combine(refs)``
    D is an integer combination of the differences of the cited steps.

Grammar, one item per line (``#`` starts a comment)::

    @e1 P P0:2          generators of E1 (":n" marks torsion of order n)
    @e2 Q               generators of E2
    @translate P0       translation point of the action on E1
    @aut neg|omega      automorphism of E2
    @degree m           degree of a cover, for degree-identity
    @class c            opaque class symbol
    @modulo push        ignore push(...) terms in combine and in the claim
    @claim lhs => rhs
    let name = expr
    (label) tag : lhs => rhs
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

from .cycles import MarkedGroup, tensor_model
from .errors import ScriptParseError
from .numeric import in_row_lattice

AXIOMS = ("bilinearity", "torsion-equivalence", "pushforward-functoriality", "degree-identity")
COMBINE = "combine"
FUNCTORS = ("pi", "push", "pull")
BUILTINS = ("type1_main", "type5_main", "composite_reduction")

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(=>|[-+*()\[\],]))")
_STEP = re.compile(r"^(?:\((?P<label>[A-Za-z0-9_]+)\)\s*)?(?P<tag>[a-z-]+)(?:\((?P<refs>[^)]*)\))?\s*:(?P<body>.*)$")


# ---------------------------------------------------------------------------
# expressions: dicts atom -> nonzero int


def _add(*terms):
    out = {}
    for c, e in terms:
        for k, v in e.items():
            out[k] = out.get(k, 0) + c * v
    return {k: v for k, v in out.items() if v}


def _wrap(name, e):
    return {(name, k): v for k, v in e.items()}


def _split(atom):
    """(functor path, base atom)."""
    path = []
    while atom[0] in FUNCTORS:
        path.append(atom[0])
        atom = atom[1]
    return tuple(path), atom


def _drop_push(e):
    return {k: v for k, v in e.items() if k[0] != "push"}


def render_atom(atom, ctx=None) -> str:
    if atom[0] in FUNCTORS:
        return f"{atom[0]}({render_atom(atom[1], ctx)})"
    if atom[0] == "cls":
        return atom[1]
    _, a, b = atom
    if ctx is None:
        return f"[{a},{b}]"
    return f"[{_render_pt(a, ctx.A1)},{_render_pt(b, ctx.A2)}]"


def _render_pt(v, G):
    parts = []
    for c, name in zip(v, G.names):
        if c:
            parts.append(name if c == 1 else f"-{name}" if c == -1 else f"{c}*{name}")
    return "+".join(parts).replace("+-", "-") or "O"


def render(e, ctx=None) -> str:
    if not e:
        return "0"
    out = ""
    for atom, c in sorted(e.items(), key=lambda kv: repr(kv[0])):
        sym = render_atom(atom, ctx)
        sign = "-" if c < 0 else "+"
        mag = "" if abs(c) == 1 else f"{abs(c)}*"
        out += f" {sign} {mag}{sym}"
    out = out.strip()
    return out[2:] if out.startswith("+ ") else "-" + out[2:]


# ---------------------------------------------------------------------------
# parsing


@dataclass(frozen=True)
class Step:
    line: int
    label: str
    tag: str
    refs: tuple[str, ...]
    lhs: dict
    rhs: dict
    text: str

    @property
    def difference(self):
        return _add((1, self.lhs), (-1, self.rhs))


@dataclass
class DerivationScript:
    name: str
    A1: MarkedGroup
    A2: MarkedGroup
    aut: str | None
    degree: int | None
    modulo_push: bool
    claim: tuple[dict, dict] | None
    claim_text: str
    steps: list[Step]
    classes: tuple[str, ...] = ()


class _Context:
    def __init__(self):
        self.e1: list[tuple[str, int]] = []
        self.e2: list[str] = []
        self.translate = None
        self.aut = None
        self.degree = None
        self.classes: list[str] = []
        self.modulo_push = False
        self.lets: dict[str, dict] = {}
        self._groups = None

    def groups(self, line):
        if self._groups is None:
            self._groups = self._build(line)
        return self._groups

    def _build(self, line):
        names1 = tuple(n for n, _ in self.e1)
        A1 = MarkedGroup(tuple(o for _, o in self.e1), names1) if names1 else MarkedGroup((), ())
        if self.translate is not None:
            v = self.translate
            A1 = MarkedGroup(A1.orders, A1.names, marked=v)
        if self.aut == "omega":
            names2 = tuple(x for n in self.e2 for x in (n, "w" + n))
            k = len(names2)
            M = [[0] * k for _ in range(k)]
            for i in range(0, k, 2):
                # Q -> wQ, wQ -> -Q - wQ
                M[i + 1][i] = 1
                M[i][i + 1] = -1
                M[i + 1][i + 1] = -1
            A2 = MarkedGroup((0,) * k, names2, automorphism=tuple(map(tuple, M)), automorphism_order=3)
        else:
            names2 = tuple(self.e2)
            k = len(names2)
            M = None
            if self.aut == "neg":
                M = tuple(tuple(-int(i == j) for j in range(k)) for i in range(k))
            A2 = MarkedGroup((0,) * k, names2, automorphism=M, automorphism_order=2 if M else None)
        return A1, A2


class _Parser:
    def __init__(self, text, ctx: _Context, line: int):
        self.toks = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ScriptParseError(f"unexpected character {text[pos:pos + 1]!r}", line)
            self.toks.append(int(m.group(1)) if m.group(1) is not None else m.group(2) or m.group(3))
            pos = m.end()
        self.i = 0
        self.ctx = ctx
        self.line = line

    def err(self, msg):
        return ScriptParseError(msg, self.line)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, want=None):
        t = self.peek()
        if t is None or (want is not None and t != want):
            raise self.err(f"expected {want!r}, found {t!r}" if want else "unexpected end of expression")
        self.i += 1
        return t

    def done(self):
        if self.peek() is not None:
            raise self.err(f"unexpected token {self.peek()!r}")

    # cycle expressions

    def expr(self):
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
        acc = _add((sign, self.term()))
        while self.peek() in ("+", "-"):
            s = -1 if self.take() == "-" else 1
            acc = _add((1, acc), (s, self.term()))
        return acc

    def term(self):
        t = self.peek()
        if isinstance(t, int):
            n = self.take()
            if self.peek() != "*":
                if n != 0:
                    raise self.err("a bare integer other than 0 is not a cycle")
                return {}
            self.take("*")
            return _add((n, self.factor()))
        return self.factor()

    def factor(self):
        t = self.take()
        if t == "(":
            e = self.expr()
            self.take(")")
            return e
        if t == "[":
            a = self.point(1)
            self.take(",")
            b = self.point(2)
            self.take("]")
            return {("pt", a, b): 1}
        if t == "z":
            self.take("(")
            a = self.point(1)
            self.take(",")
            b = self.point(2)
            self.take(")")
            return _special(a, b, *self.ctx.groups(self.line))
        if t in FUNCTORS:
            self.take("(")
            e = self.expr()
            self.take(")")
            return _wrap(t, e)
        if isinstance(t, str) and t in self.ctx.lets:
            return dict(self.ctx.lets[t])
        if isinstance(t, str) and t in self.ctx.classes:
            return {("cls", t): 1}
        raise self.err(f"unknown symbol {t!r}")

    # points

    def point(self, side):
        A = self.ctx.groups(self.line)[side - 1]
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
        acc = A.scale(sign, self.pterm(side, A))
        while self.peek() in ("+", "-"):
            s = -1 if self.take() == "-" else 1
            acc = A.add(acc, A.scale(s, self.pterm(side, A)))
        return acc

    def pterm(self, side, A):
        n = 1
        if isinstance(self.peek(), int):
            n = self.take()
            self.take("*")
        return A.scale(n, self.pfactor(side, A))

    def pfactor(self, side, A):
        t = self.take()
        if t == "O":
            return (0,) * A.rank
        if t == "(":
            v = self.point(side)
            self.take(")")
            return v
        if t == "w":
            if side != 2 or A.automorphism is None:
                raise self.err("w(...) applies to E2 points under a declared automorphism")
            self.take("(")
            v = self.point(side)
            self.take(")")
            return A.apply(v)
        if isinstance(t, str) and t in A.names:
            return A.basis(A.names.index(t))
        raise self.err(f"unknown E{side} point {t!r}")


def _special(a, b, A1, A2):
    o1, o2 = (0,) * A1.rank, (0,) * A2.rank
    return _add(
        (1, {("pt", a, b): 1}),
        (-1, {("pt", a, o2): 1}),
        (-1, {("pt", o1, b): 1}),
        (1, {("pt", o1, o2): 1}),
    )


def _parse_pair(body, ctx, line):
    if "=>" not in body:
        raise ScriptParseError("expected 'lhs => rhs'", line)
    lhs, rhs = body.split("=>", 1)
    out = []
    for side in (lhs, rhs):
        p = _Parser(side, ctx, line)
        e = p.expr()
        p.done()
        out.append(e)
    return out[0], out[1]


def parse_script(text: str, name: str = "<script>", degree: int | None = None) -> DerivationScript:
    """Parse script text.  ``degree`` overrides any ``@degree`` directive."""
    ctx = _Context()
    steps: list[Step] = []
    claim = None
    claim_text = ""
    labels = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("@"):
            word, _, rest = line[1:].partition(" ")
            rest = rest.strip()
            if word == "e1":
                for item in rest.split():
                    nm, _, order = item.partition(":")
                    ctx.e1.append((nm, int(order) if order else 0))
            elif word == "e2":
                ctx.e2.extend(rest.split())
            elif word == "translate":
                A1 = MarkedGroup(tuple(o for _, o in ctx.e1), tuple(n for n, _ in ctx.e1))
                ctx.translate = _Parser(rest, _PointOnly(A1), lineno).point(1)
            elif word == "aut":
                if rest not in ("neg", "omega"):
                    raise ScriptParseError(f"unknown automorphism {rest!r}", lineno)
                ctx.aut = rest
            elif word == "degree":
                ctx.degree = int(rest)
            elif word == "class":
                ctx.classes.extend(rest.split())
            elif word == "modulo":
                if rest != "push":
                    raise ScriptParseError(f"can only work modulo push, not {rest!r}", lineno)
                ctx.modulo_push = True
            elif word == "claim":
                claim = _parse_pair(rest, ctx, lineno)
                claim_text = rest
            else:
                raise ScriptParseError(f"unknown directive @{word}", lineno)
            if word in ("e1", "e2", "translate", "aut"):
                if ctx._groups is not None:
                    raise ScriptParseError("group declarations must precede their first use", lineno)
            continue
        if line.startswith("let "):
            m = re.match(r"let\s+([A-Za-z_][A-Za-z0-9_]*)\s*=(.*)$", line)
            if not m:
                raise ScriptParseError("malformed let", lineno)
            p = _Parser(m.group(2), ctx, lineno)
            e = p.expr()
            p.done()
            ctx.lets[m.group(1)] = e
            continue
        m = _STEP.match(line)
        if not m:
            raise ScriptParseError(f"cannot parse step {line!r}", lineno)
        tag = m.group("tag")
        if tag not in AXIOMS and tag != COMBINE:
            raise ScriptParseError(f"unknown axiom tag {tag!r}", lineno)
        refs = tuple(r.strip() for r in (m.group("refs") or "").split(",") if r.strip())
        if tag == COMBINE and not refs:
            raise ScriptParseError("combine needs at least one reference", lineno)
        if tag != COMBINE and m.group("refs") is not None:
            raise ScriptParseError(f"{tag} takes no references", lineno)
        label = m.group("label") or f"step{len(steps) + 1}"
        if label in labels:
            raise ScriptParseError(f"duplicate label {label!r}", lineno)
        labels.add(label)
        lhs, rhs = _parse_pair(m.group("body"), ctx, lineno)
        steps.append(Step(lineno, label, tag, refs, lhs, rhs, line))
    A1, A2 = ctx.groups(0)
    if degree is not None:
        ctx.degree = degree
    return DerivationScript(name, A1, A2, ctx.aut, ctx.degree, ctx.modulo_push, claim, claim_text,
                            steps, tuple(ctx.classes))


class _PointOnly(_Context):
    def __init__(self, A1):
        super().__init__()
        self._groups = (A1, MarkedGroup((), ()))


# ---------------------------------------------------------------------------
# checking


@dataclass(frozen=True)
class Verdict:
    ok: bool
    script: str
    steps_checked: int
    failing_step: str | None = None
    failing_line: int | None = None
    reason: str = ""
    certificate: str | None = None
    trace: tuple = field(default=(), repr=False)

    def as_dict(self):
        return {
            "script": self.script,
            "pass": self.ok,
            "steps_checked": self.steps_checked,
            "failing_step": self.failing_step,
            "failing_line": self.failing_line,
            "reason": self.reason,
            "certificate": self.certificate,
            "trace": list(self.trace),
        }


class _Fail(Exception):
    pass


def _by_path(D):
    groups = {}
    for atom, c in D.items():
        path, base = _split(atom)
        groups.setdefault(path, {})[base] = c
    return groups


def _check_bilinearity(D, s: DerivationScript):
    model = tensor_model(s.A1, s.A2)
    for path, part in _by_path(D).items():
        rest = dict(part)
        tensor = [0] * model.size
        for base, c in part.items():
            if base[0] != "pt":
                raise _Fail(f"bilinearity does not apply to the class {base[1]}")
            _, a, b = base
            if any(a) and any(b):
                rest = _add((1, rest), (-c, _special(a, b, s.A1, s.A2)))
                for k, x in enumerate(model.vector(a, b)):
                    tensor[k] += c * x
        if rest:
            raise _Fail(f"not a combination of special cycles; leftover {render(rest, s)}")
        if not model.group.is_zero(tensor):
            raise _Fail("tensor image of the difference is nonzero")


def _check_torsion(D, s: DerivationScript):
    for path, part in _by_path(D).items():
        fibres = {}
        for base, c in part.items():
            if base[0] != "pt":
                raise _Fail(f"torsion-equivalence does not apply to the class {base[1]}")
            fibres.setdefault(base[2], {})[base[1]] = c
        zero = (0,) * s.A1.rank
        for b, terms in fibres.items():
            total = 0
            for a, c in terms.items():
                if a == zero:
                    continue
                n = s.A1.order_of(a)
                if n == float("inf") or c % n:
                    raise _Fail(f"coefficient {c} of [{_render_pt(a, s.A1)},{_render_pt(b, s.A2)}] "
                                f"is not a multiple of the order of the point")
                total += c
            if terms.get(zero, 0) != -total:
                raise _Fail(f"fibre over {_render_pt(b, s.A2)} has degree {total + terms.get(zero, 0)}, not 0")


def _check_functoriality(D, s: DerivationScript):
    if s.A1.marked is None or s.A2.automorphism is None:
        raise _Fail("functoriality needs @translate and @aut")
    sums = {}
    for atom, c in D.items():
        if atom[0] != "pi" or atom[1][0] != "pt":
            raise _Fail(f"{render_atom(atom, s)} is not the image of a point class under pi")
        _, a, b = atom[1]
        orbit = [(a, b)]
        while True:
            a, b = s.A1.add(a, s.A1.marked), s.A2.apply(b)
            if (a, b) == orbit[0]:
                break
            orbit.append((a, b))
            if len(orbit) > 64:
                raise _Fail("group action orbit is not finite")
        key = min(orbit)
        sums[key] = sums.get(key, 0) + c
    bad = [k for k, v in sums.items() if v]
    if bad:
        a, b = bad[0]
        raise _Fail(f"coefficients do not cancel on the orbit of [{_render_pt(a, s.A1)},{_render_pt(b, s.A2)}]")


def _check_degree(D, s: DerivationScript):
    if s.degree is None:
        raise _Fail("degree-identity needs @degree")
    rest = dict(D)
    for atom, c in D.items():
        if atom[0] == "push" and atom[1][0] == "pull":
            x = atom[1][1]
            rest = _add((1, rest), (-c, {atom: 1}), (c * s.degree, {x: 1}))
    if rest:
        raise _Fail(f"not a combination of push(pull(x)) - {s.degree}x; leftover {render(rest, s)}")


def _check_combine(D, refs, facts, s: DerivationScript):
    cited = []
    for r in refs:
        if r not in facts:
            raise _Fail(f"reference {r!r} is not an earlier step")
        cited.append(facts[r])
    if s.modulo_push:
        D = _drop_push(D)
        cited = [_drop_push(c) for c in cited]
    atoms = sorted({k for e in [D, *cited] for k in e}, key=repr)
    target = [D.get(k, 0) for k in atoms]
    rows = [[e.get(k, 0) for k in atoms] for e in cited]
    if not in_row_lattice(target, rows):
        raise _Fail("difference is not an integer combination of the cited steps")


_CHECKS = {
    "bilinearity": _check_bilinearity,
    "torsion-equivalence": _check_torsion,
    "pushforward-functoriality": _check_functoriality,
    "degree-identity": _check_degree,
}


def replay_derivation(script: DerivationScript) -> Verdict:
    facts = {}
    trace = []
    for k, step in enumerate(script.steps):
        D = step.difference
        try:
            if step.tag == COMBINE:
                _check_combine(D, step.refs, facts, script)
            else:
                _CHECKS[step.tag](D, script)
        except _Fail as exc:
            return Verdict(False, script.name, k, step.label, step.line, str(exc), trace=tuple(trace))
        facts[step.label] = D
        trace.append(f"{step.label}: {step.tag}" + (f"({', '.join(step.refs)})" if step.refs else "") + " ok")
    n = len(script.steps)
    if script.claim is None:
        return Verdict(False, script.name, n, None, None, "script has no @claim", trace=tuple(trace))
    if not script.steps:
        return Verdict(False, script.name, 0, None, None, "script has no steps", trace=tuple(trace))
    last = script.steps[-1]
    got, want = (last.lhs, last.rhs), script.claim
    if script.modulo_push:
        got = tuple(_drop_push(e) for e in got)
        want = tuple(_drop_push(e) for e in want)
    if got != want:
        return Verdict(False, script.name, n, last.label, last.line,
                       f"final step {render(last.lhs, script)} => {render(last.rhs, script)} "
                       f"does not match the claim", trace=tuple(trace))
    cert = script.claim_text.replace("=>", "=").strip()
    return Verdict(True, script.name, n, certificate=cert, trace=tuple(trace))


# ---------------------------------------------------------------------------
# shipped scripts and mutants


def builtin_text(name: str) -> str:
    if name not in BUILTINS:
        raise ScriptParseError(f"no built-in script {name!r}; choose from {', '.join(BUILTINS)}")
    return resources.files("bielliptic").joinpath("scripts").joinpath(f"{name}.drv").read_text()


def load_script(name_or_path: str, degree: int | None = None) -> DerivationScript:
    """Built-in script by name, or a script file by path."""
    if name_or_path in BUILTINS:
        text, name = builtin_text(name_or_path), name_or_path
        if name == "composite_reduction" and degree is None:
            degree = 2
    else:
        try:
            with open(name_or_path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ScriptParseError(f"cannot read script {name_or_path!r}: {exc.strerror}") from exc
        name = name_or_path
    if "{m}" in text:
        if degree is None:
            raise ScriptParseError("script is a template in m; pass a degree")
        text = text.replace("{m}", str(degree))
    return parse_script(text, name, degree)


def step_lines(text: str) -> list[int]:
    """0-based indices of the lines holding rewrite steps."""
    out = []
    for i, raw in enumerate(text.splitlines()):
        line = raw.split("#", 1)[0].strip()
        if line and not line.startswith("@") and not line.startswith("let "):
            out.append(i)
    return out


def deletion_mutants(text: str):
    """Yield (deleted line, mutated text) for every single-step deletion."""
    lines = text.splitlines()
    for i in step_lines(text):
        yield lines[i].strip(), "\n".join(lines[:i] + lines[i + 1:]) + "\n"


def replay_text(text: str, name: str = "<script>", degree: int | None = None) -> Verdict:
    """Parse and replay; a parse error becomes a failing verdict."""
    try:
        script = parse_script(text, name, degree)
    except ScriptParseError as exc:
        return Verdict(False, name, 0, None, exc.line, f"parse error: {exc}")
    return replay_derivation(script)
