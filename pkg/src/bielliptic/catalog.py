"""JSON-lines curve catalog: one ``{"label": ..., "a": [...]}`` object per line.

``a`` holds either the five long-form coefficients a1, a2, a3, a4, a6 or the
two short-form coefficients A, B.  Entries may be integers or strings such as
"3/4".  Long forms are converted to short form over Q.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .elliptic import EllipticCurve
from .errors import InputError, SingularCurveError


class CatalogError(InputError):
    def __init__(self, message, line=None, label=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
        self.label = label


@dataclass(frozen=True)
class CatalogEntry:
    label: str
    a_invariants: tuple[Fraction, ...]
    curve: EllipticCurve

    @property
    def long_form(self) -> bool:
        return len(self.a_invariants) == 5


def _coeff(x, lineno):
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise CatalogError(f"coefficient {x!r} must be an integer or a fraction string", lineno)
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise CatalogError(f"bad coefficient {x!r}", lineno) from exc


def make_curve(label, coeffs) -> EllipticCurve:
    if len(coeffs) == 5:
        return EllipticCurve.from_ainvariants(coeffs, label=label)
    if len(coeffs) == 2:
        return EllipticCurve(coeffs[0], coeffs[1], label=label)
    raise InputError(f"{label}: expected 5 long-form or 2 short-form coefficients, got {len(coeffs)}")


def parse_line(text: str, lineno: int | None = None) -> CatalogEntry:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"malformed JSON ({exc.msg})", lineno) from exc
    if not isinstance(obj, dict) or "label" not in obj or "a" not in obj:
        raise CatalogError("expected an object with fields 'label' and 'a'", lineno)
    label, a = obj["label"], obj["a"]
    if not isinstance(label, str) or not label:
        raise CatalogError("label must be a nonempty string", lineno)
    if not isinstance(a, list) or len(a) not in (2, 5):
        raise CatalogError(f"{label}: 'a' must list 5 or 2 coefficients", lineno, label)
    coeffs = tuple(_coeff(x, lineno) for x in a)
    try:
        curve = make_curve(label, coeffs)
    except SingularCurveError as exc:
        raise CatalogError(f"{label}: singular curve, discriminant 0", lineno, label) from exc
    return CatalogEntry(label, coeffs, curve)


def ingest_catalog(path) -> list[CatalogEntry]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CatalogError(f"cannot read catalog {str(path)!r}: {exc.strerror}") from exc
    return ingest_text(text)


def ingest_text(text: str) -> list[CatalogEntry]:
    entries, seen = [], set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        entry = parse_line(line, lineno)
        if entry.label in seen:
            raise CatalogError(f"duplicate label {entry.label}", lineno, entry.label)
        seen.add(entry.label)
        entries.append(entry)
    return entries


def default_catalog() -> list[CatalogEntry]:
    return ingest_text(resources.files("bielliptic").joinpath("data").joinpath("curves.jsonl").read_text())


def resolve_curve(spec: str, entries=None) -> EllipticCurve:
    """A catalog label, or inline coefficients "A,B" / "a1,a2,a3,a4,a6"."""
    entries = default_catalog() if entries is None else entries
    for e in entries:
        if e.label == spec:
            return e.curve
    parts = [s.strip() for s in spec.strip("[]").split(",")]
    if len(parts) in (2, 5):
        try:
            coeffs = [Fraction(s) for s in parts]
        except (ValueError, ZeroDivisionError):
            pass
        else:
            return make_curve(spec, coeffs)
    raise InputError(f"unknown curve {spec!r}: not a catalog label and not 'A,B' or 'a1,a2,a3,a4,a6'")
