"""JSON formats: system files in, report files out.

Rationals travel as strings ``"p/q"`` (bare JSON integers are accepted on
input). JSON floats are refused unless approximate ingest is requested, in
which case the literal is read as the exact decimal it spells.
"""
from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any

from .criteria import ImpulseWitness, ObservabilityReport, RankRow, Strategy
from .linalg import RationalMatrix, RationalPolynomial
from .system import DescriptorSystem, DimensionMismatch, validate

__all__ = [
    "SystemFileError",
    "fmt_rational",
    "parse_rational",
    "matrix_to_json",
    "matrix_from_json",
    "load_system",
    "loads_system",
    "system_to_json",
    "witness_to_json",
    "witness_from_json",
    "report_to_json",
    "report_from_json",
    "write_atomic",
    "det_pencil_from_json",
    "dumps",
]


class SystemFileError(ValueError):
    pass


def fmt_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(x: Any) -> Fraction:
    if isinstance(x, bool):
        raise SystemFileError(f"boolean is not a rational: {x!r}")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise SystemFileError(f"not a rational literal: {x!r}") from None
    raise SystemFileError(f"not a rational literal: {x!r}")


def matrix_to_json(M: RationalMatrix) -> list[list[str]]:
    return [[fmt_rational(x) for x in row] for row in M.to_rows()]


def matrix_from_json(rows: Any, name: str, cols: int | None = None) -> RationalMatrix:
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise SystemFileError(f"{name} must be a list of rows")
    try:
        return RationalMatrix.from_rows([[parse_rational(x) for x in r] for r in rows], cols=cols)
    except ValueError as exc:
        if isinstance(exc, SystemFileError):
            raise
        raise DimensionMismatch(f"{name}: {exc}") from None


def _refuse_float(literal: str):
    raise SystemFileError(f"floating-point literal {literal} refused in exact mode "
                          "(write it as a \"p/q\" string or pass --approximate)")


def loads_system(text: str, approximate: bool = False) -> tuple[DescriptorSystem, str | None]:
    """Parse and validate a system document. Returns (system, name)."""
    try:
        doc = json.loads(text, parse_float=Fraction if approximate else _refuse_float)
    except json.JSONDecodeError as exc:
        raise SystemFileError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SystemFileError("system file must be a JSON object")
    missing = [k for k in ("E", "A", "C") if k not in doc]
    if missing:
        raise SystemFileError(f"missing keys: {', '.join(missing)}")
    E = matrix_from_json(doc["E"], "E")
    A = matrix_from_json(doc["A"], "A")
    C = matrix_from_json(doc["C"], "C", cols=E.cols) if doc["C"] else RationalMatrix(0, E.cols)
    return validate(E, A, C), doc.get("name")


def load_system(path, approximate: bool = False) -> tuple[DescriptorSystem, str | None]:
    return loads_system(Path(path).read_text(encoding="utf-8"), approximate=approximate)


def system_to_json(sys: DescriptorSystem, name: str | None = None) -> dict:
    doc = {"E": matrix_to_json(sys.E), "A": matrix_to_json(sys.A), "C": matrix_to_json(sys.C)}
    if name is not None:
        doc["name"] = name
    return doc


def _vec(v) -> list[str]:
    return [fmt_rational(x) for x in v]


def witness_to_json(w: ImpulseWitness) -> dict:
    return {
        "v": _vec(w.v),
        "order": w.order,
        "coefficients": [_vec(p) for p in w.coeffs],
        "power_coefficients": [_vec(c) for c in w.power_coefficients()],
    }


def witness_from_json(doc: dict) -> ImpulseWitness:
    w = ImpulseWitness(tuple(parse_rational(x) for x in doc["v"]),
                       tuple(tuple(parse_rational(x) for x in p) for p in doc["coefficients"]))
    if w.order != doc.get("order", w.order):
        raise SystemFileError("witness order does not match its coefficients")
    if "power_coefficients" in doc:
        plain = tuple(tuple(parse_rational(x) for x in c) for c in doc["power_coefficients"])
        if plain != w.power_coefficients():
            raise SystemFileError("witness coefficient tables disagree")
    return w


def report_to_json(report: ObservabilityReport, sys: DescriptorSystem | None = None,
                   name: str | None = None) -> dict:
    doc: dict[str, Any] = {
        "verdict": report.verdict,
        "strategy": str(report.strategy),
        "rank_table": [{"r": row.r, "rank": row.rank, "required": row.required} for row in report.rank_table],
    }
    if sys is not None:
        doc["n"] = sys.n
        doc["m"] = sys.m
        doc["rank_E"] = sys.rank_E
        doc["det_pencil"] = _vec(sys.det_pencil.coeffs)
    if name is not None:
        doc["name"] = name
    doc["witness"] = witness_to_json(report.witness) if report.witness is not None else None
    return doc


def report_from_json(doc: dict) -> ObservabilityReport:
    table = tuple(RankRow(int(row["r"]), int(row["rank"]), int(row["required"])) for row in doc["rank_table"])
    witness = witness_from_json(doc["witness"]) if doc.get("witness") else None
    return ObservabilityReport(bool(doc["verdict"]), table, witness, Strategy.parse(doc["strategy"]))


def det_pencil_from_json(doc: dict) -> RationalPolynomial:
    return RationalPolynomial(parse_rational(x) for x in doc["det_pencil"])


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2) + "\n"


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
