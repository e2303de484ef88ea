"""Command-line interface.

Every command produces a :class:`Report`.  ``--json`` prints it as sorted,
indented JSON; otherwise a short human-readable rendering is printed.
Exit status: 0 verified, 1 refuted or conditional, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__, brauer, catalog, cycles, elliptic, localdata, replay, surfaces
from .errors import BiellipticError, InputError, PreconditionError
from .numeric import PrimeField, padic_valuation, require_prime

VERDICTS = ("verified", "refuted", "conditional", "error")
EXIT_CODES = {"verified": 0, "refuted": 1, "conditional": 1, "error": 2}


@dataclass
class Report:
    command: list
    result: dict
    verdict: str
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"bad verdict {self.verdict!r}")

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def as_dict(self):
        return {
            "command": list(self.command),
            "result": jsonable(self.result),
            "verdict": self.verdict,
            "provenance": jsonable(self.provenance),
        }

    def to_json(self) -> str:
        return dumps(self.as_dict())


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)


def jsonable(x):
    """Convert results to plain JSON values: Fractions and big objects become strings."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        return "inf" if math.isinf(x) else x
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    return str(x)


def _provenance(*uses):
    return {"tool": "bielliptic", "version": __version__, "uses": list(uses)}


class _UsageError(Exception):
    def __init__(self, message, usage):
        super().__init__(message)
        self.usage = usage


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let inline coefficients such as "-4,0" or "-1/2,3" parse as values
        self._negative_number_matcher = re.compile(r"^-\d[\d,/\s-]*$")

    def error(self, message):
        raise _UsageError(message, self.format_usage())


# ---------------------------------------------------------------------------
# commands


def _curve(args):
    entries = catalog.ingest_catalog(args.catalog) if args.catalog else None
    return catalog.resolve_curve(args.curve, entries)


def _curve_dict(E):
    return {"label": E.label, "A": E.A, "B": E.B}


def cmd_curve_info(args):
    E = _curve(args)
    inv = elliptic.invariants(E)
    tors = elliptic.two_torsion(E)
    res = {
        "curve": _curve_dict(E),
        "c4": inv.c4,
        "c6": inv.c6,
        "discriminant": inv.discriminant,
        "j": inv.j,
        "rational_two_torsion": [list(P) for P in tors[1:]],
    }
    return res, "verified", ["short Weierstrass invariants"]


def cmd_curve_reduction(args):
    E = _curve(args)
    p = require_prime(args.p)
    if p < 5:
        vj = padic_valuation(E.j_invariant, p)
        res = {
            "curve": _curve_dict(E),
            "p": p,
            "v_j": vj,
            "potentially_multiplicative": localdata.potentially_multiplicative(E, p),
            "note": "at p = 2, 3 only potential reduction is reported",
        }
        return res, "verified", ["potential reduction from v_p(j)"]
    data = localdata.reduction_type(E, p)
    res = {"curve": _curve_dict(E), **data.as_dict()}
    res["summary"] = f"{data.reduction.value.replace('-', ' ')} reduction at p={p}"
    if data.reduction.multiplicative:
        tate = localdata.tate_valuation(E, p)
        res["tate"] = {"v_q": tate.v_q, "q_square_class": tate.q_square_class.tag}
        tf = localdata.full_two_torsion_field(E, p)
        res["two_torsion_field"] = tf.description
        res["node_x"] = localdata.node(E, p)
        if data.reduction is localdata.Reduction.SPLIT:
            res["mu2_point_x_mod_p"] = localdata.mu2_point(E, p)[0] % p
    return res, "verified", ["minimal model at p", "reduction from v(Delta), v(c4), -c6 mod p"]


def cmd_curve_torsion(args):
    E = _curve(args)
    if args.p is None:
        pts = elliptic.two_torsion(E)[1:]
        return {"curve": _curve_dict(E), "field": "Q", "two_torsion": [list(P) for P in pts]}, "verified", []
    p = require_prime(args.p)
    if args.padic:
        tf = localdata.full_two_torsion_field(E, p)
        res = {"curve": _curve_dict(E), "p": p, "status": tf.status.value, "field": tf.description,
               "roots_mod_p": sorted(r % p for r in tf.roots)}
        return res, "verified", ["Hensel lifting on the minimal model"]
    pts = elliptic.two_torsion(E, PrimeField(p))[1:]
    return {"curve": _curve_dict(E), "field": f"F_{p}", "two_torsion": [list(P) for P in pts]}, "verified", []


def cmd_curve_count(args):
    E = _curve(args).reduce(require_prime(args.p))
    n = elliptic.count_points(E)
    g = elliptic.group_structure(E)
    hasse = (n - E.p - 1) ** 2 <= 4 * E.p
    res = {"curve": str(E), "p": E.p, "points": n, "group": str(g.structure),
           "generators": [list(P) for P in g.generators], "hasse_bound_holds": hasse}
    return res, "verified" if hasse else "refuted", ["exhaustive enumeration"]


def _types(args):
    return [args.type] if args.type else list(range(1, 8))


def cmd_surface_table(args):
    rows = []
    for t in _types(args):
        r = surfaces.table_row(t)
        rows.append({"type": t, "G": str(r.group), "ord_K": r.ord_K, "lambda": r.lam,
                     "H2_torsion": str(r.h2_torsion)})
    surfaces.self_test()
    return {"rows": rows}, "verified", ["bielliptic classification table"]


def cmd_surface_covers(args):
    rows = []
    for t in _types(args):
        step = surfaces.intermediate_cover(t)
        rows.append({
            "type": t,
            "cover": None if step is None else {"to": step.target_type, "degree": step.degree},
            "chain": [[s.source_type, s.target_type, s.degree] for s in surfaces.cover_chain(t)],
        })
    return {"covers": rows}, "verified", ["intermediate etale covers"]


def cmd_surface_bound(args):
    rows, ok = [], True
    for t in _types(args):
        cert = cycles.full_bound_certificate(t)
        ok &= cert.ok and cert.total == cert.bound
        rows.append({"type": t, "epsilon": surfaces.epsilon(t), "bound": surfaces.exponent_bound(t),
                     "certificate": cert.as_dict()})
    res = {"bounds": rows}
    if args.type:
        res["bound"] = rows[0]["bound"]
    return res, "verified" if ok else "refuted", ["cover degrees", "degree identity", "replayed derivations"]


def cmd_cycles_verify(args):
    t = args.type
    if args.universal:
        A1, A2 = cycles.universal_model(t)
        model_desc = "universal"
    else:
        if args.fp is None or args.curve1 is None or args.curve2 is None:
            raise InputError("either --universal or all of --fp, --curve1, --curve2 are required")
        p = require_prime(args.fp)
        entries = catalog.ingest_catalog(args.catalog) if args.catalog else None
        E1 = catalog.resolve_curve(args.curve1, entries).reduce(p)
        E2 = catalog.resolve_curve(args.curve2, entries).reduce(p)
        inst = cycles.curve_instance(t, E1, E2)
        A1, A2 = inst.A1, inst.A2
        model_desc = f"E1(F_{p}) x E2(F_{p}), P0 = {inst.P0}"
    rep = cycles.verify_model(t, A1, A2)
    res = {
        "type": t,
        "model": model_desc,
        "A1": {"orders": list(A1.orders), "names": list(A1.names)},
        "A2": {"orders": list(A2.orders), "names": list(A2.names)},
        "tensor": str(rep.tensor),
        "quotient": str(rep.quotient),
        "exponent": rep.exponent,
        "z": rep.z_label,
        "z_order": rep.z_order,
        "pair_orders": rep.pair_orders,
        "bound": rep.per_cycle_bound,
        "divides_bound": rep.divides,
    }
    if rep.tensor.rank == 0 and rep.tensor.order <= 256:
        model = cycles.tensor_model(A1, A2)
        rels = cycles.pushforward_relations(t, A1, A2, model)
        z = model.vector(A1.basis(0), A2.basis(0))
        order, expo, zo = cycles.coset_enumeration(model, list(model.relations) + list(rels.rows), z)
        agree = order == rep.quotient.order and expo == rep.exponent and zo == rep.z_order
        res["coset_enumeration"] = {"order": order, "exponent": expo, "z_order": zo, "agrees": agree}
        ok = rep.divides and agree
    else:
        ok = rep.divides
    return res, "verified" if ok else "refuted", ["bilinearity", "pushforward-functoriality", "Smith normal form"]


def cmd_cycles_replay(args):
    script = replay.load_script(args.script, degree=args.degree)
    v = replay.replay_derivation(script)
    return v.as_dict(), "verified" if v.ok else "refuted", list(replay.AXIOMS) + [replay.COMBINE]


def cmd_brauer_witness(args):
    entries = catalog.ingest_catalog(args.catalog) if args.catalog else None
    E1 = catalog.resolve_curve(args.e1, entries)
    E2 = catalog.resolve_curve(args.e2, entries)
    rep = brauer.obstruction_witness(E1, E2, require_prime(args.p))
    return rep.as_dict(), rep.verdict, ["Tate uniformization", "Hom(E1[2], E2[2])", "potential reduction"]


def cmd_catalog_check(args):
    entries = catalog.ingest_catalog(args.path)
    rows = [{"label": e.label, "form": "long" if e.long_form else "short", "A": e.curve.A, "B": e.curve.B,
             "j": e.curve.j_invariant, "discriminant": e.curve.discriminant} for e in entries]
    return {"count": len(entries), "entries": rows}, "verified", ["JSON lines catalog"]


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")
    common.add_argument("--catalog", default=argparse.SUPPRESS, help="JSON-lines catalog to resolve labels")

    top = _Parser(prog="bielliptic", description="Zero-cycles on bielliptic surfaces.")
    top.add_argument("--json", action="store_true", default=False, help="machine-readable output")
    top.add_argument("--catalog", default=None, help="JSON-lines catalog to resolve labels")
    top.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    groups = top.add_subparsers(dest="group", required=True, parser_class=_Parser)

    curve = groups.add_parser("curve", help="elliptic curve data").add_subparsers(dest="cmd", required=True)
    p = curve.add_parser("info", parents=[common], help="invariants and rational 2-torsion")
    p.add_argument("curve", help="catalog label, 'A,B' or 'a1,a2,a3,a4,a6'")
    p.set_defaults(func=cmd_curve_info)
    p = curve.add_parser("reduction", parents=[common], help="reduction type at a prime")
    p.add_argument("curve")
    p.add_argument("-p", type=int, required=True)
    p.set_defaults(func=cmd_curve_reduction)
    p = curve.add_parser("torsion", parents=[common], help="2-torsion over Q, F_p or Q_p")
    p.add_argument("curve")
    p.add_argument("-p", type=int, default=None)
    p.add_argument("--padic", action="store_true", help="work over Q_p instead of F_p")
    p.set_defaults(func=cmd_curve_torsion)
    p = curve.add_parser("count", parents=[common], help="#E(F_p) and group structure")
    p.add_argument("curve")
    p.add_argument("-p", type=int, required=True)
    p.set_defaults(func=cmd_curve_count)

    surface = groups.add_parser("surface", help="bielliptic types").add_subparsers(dest="cmd", required=True)
    for name, func, hlp in (
        ("table", cmd_surface_table, "classification table"),
        ("covers", cmd_surface_covers, "intermediate covers"),
        ("bound", cmd_surface_bound, "exponent bound with certificate"),
    ):
        p = surface.add_parser(name, parents=[common], help=hlp)
        p.add_argument("--type", type=int, choices=range(1, 8), default=None)
        p.set_defaults(func=func)

    cyc = groups.add_parser("cycles", help="zero-cycle models").add_subparsers(dest="cmd", required=True)
    p = cyc.add_parser("verify", parents=[common], help="push-forward quotient of the tensor model")
    p.add_argument("--type", type=int, choices=(1, 5), required=True)
    p.add_argument("--universal", action="store_true")
    p.add_argument("--fp", type=int, default=None, help="prime for a finite-field instance")
    p.add_argument("--curve1", default=None)
    p.add_argument("--curve2", default=None)
    p.set_defaults(func=cmd_cycles_verify)
    p = cyc.add_parser("replay", parents=[common], help="replay a derivation script")
    p.add_argument("--script", required=True, help=f"one of {', '.join(replay.BUILTINS)} or a file path")
    p.add_argument("--degree", type=int, default=None, help="degree m for template scripts")
    p.set_defaults(func=cmd_cycles_replay)

    br = groups.add_parser("brauer", help="Brauer witness").add_subparsers(dest="cmd", required=True)
    p = br.add_parser("witness", parents=[common], help="nontrivial 2-torsion witness in T(S)")
    p.add_argument("--e1", required=True)
    p.add_argument("--e2", required=True)
    p.add_argument("-p", type=int, required=True)
    p.set_defaults(func=cmd_brauer_witness)

    cat = groups.add_parser("catalog", help="curve catalogs").add_subparsers(dest="cmd", required=True)
    p = cat.add_parser("check", parents=[common], help="validate a JSON-lines catalog")
    p.add_argument("path")
    p.set_defaults(func=cmd_catalog_check)
    return top


def run_command(argv) -> tuple[int, Report]:
    argv = list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        result, verdict, uses = args.func(args)
        report = Report(argv, result, verdict, _provenance(*uses))
    except _UsageError as exc:
        report = Report(argv, {"error": str(exc), "usage": exc.usage.strip()}, "error", _provenance())
    except PreconditionError as exc:
        res = {"error": str(exc), "kind": type(exc).__name__, "subject": exc.subject}
        if exc.citation:
            res["citation"] = exc.citation
        report = Report(argv, res, "error", _provenance())
    except BiellipticError as exc:
        report = Report(argv, {"error": str(exc), "kind": type(exc).__name__}, "error", _provenance())
    return report.exit_code, report


def render_text(report: Report) -> str:
    lines = [f"{' '.join(report.command)}: {report.verdict}"]

    def walk(obj, indent):
        pad = "  " * indent
        if isinstance(obj, dict):
            for k, v in obj.items():
                if isinstance(v, (dict, list)) and v and not _flat(v):
                    lines.append(f"{pad}{k}:")
                    walk(v, indent + 1)
                else:
                    lines.append(f"{pad}{k}: {_short(v)}")
        elif isinstance(obj, list):
            for v in obj:
                if isinstance(v, (dict, list)) and not _flat(v):
                    lines.append(f"{pad}-")
                    walk(v, indent + 1)
                else:
                    lines.append(f"{pad}- {_short(v)}")

    walk(report.as_dict()["result"], 1)
    return "\n".join(lines)


def _flat(v):
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _short(v):
    return json.dumps(v) if isinstance(v, (list, dict)) else str(v)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        code, report = run_command(argv)
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    want_json = "--json" in argv
    out = report.to_json() if want_json else render_text(report)
    stream = sys.stderr if report.verdict == "error" and not want_json else sys.stdout
    print(out, file=stream)
    return code
