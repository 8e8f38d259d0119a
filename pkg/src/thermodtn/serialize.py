"""Deterministic JSON/CSV output and the table and jet file formats.

Floats are written with 17 significant digits and object keys are sorted,
so identical inputs give byte-identical files.  Complex numbers are
``[re, im]`` pairs; exact entries are ``["p/q", "p/q"]`` strings.
"""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction

import numpy as np

from .algebra.rational import GaussianRational


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def to_plain(obj):
    """Convert numpy arrays, complex and exact scalars to JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()] if obj.ndim else to_plain(obj.item())
    if isinstance(obj, GaussianRational):
        return [str(obj.re), str(obj.im)]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(k)}: {_encode(obj[k], indent, level + 1)}" for k in sorted(obj)]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        return "[" + pad + ("," + pad).join(_encode(v, indent, level + 1) for v in obj) + end + "]"
    if isinstance(obj, float):
        return _fmt_float(obj)
    return json.dumps(obj)


def dumps(obj, indent: int = 1) -> str:
    """Sorted-key JSON with 17 significant digits for floats."""
    return _encode(to_plain(obj), indent, 0) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps(obj))


def read_json(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def csv_text(header, rows, comment: str | None = None) -> str:
    """CSV with 17-digit floats; an optional ``# comment`` first line."""
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt_float(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def write_csv(path, header, rows, comment: str | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(csv_text(header, rows, comment))


def read_csv(path) -> list:
    """Rows as dicts, skipping ``#`` comment lines."""
    with open(path, encoding="utf-8") as f:
        lines = [ln for ln in f if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def parse_scalar(v, exact: bool = False):
    """``[re, im]``, a bare number or a fraction string to complex or GaussianRational."""
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"complex literal must be [re, im], got {v!r}")
        re, im = v
    else:
        re, im = v, 0
    if exact:
        return GaussianRational(Fraction(str(re)), Fraction(str(im)))
    return complex(float(Fraction(str(re)) if isinstance(re, str) else re),
                   float(Fraction(str(im)) if isinstance(im, str) else im))


def matrix_from_plain(rows, exact: bool = False) -> np.ndarray:
    arr = np.asarray(rows, dtype=object)
    out = np.empty(arr.shape[:-1], dtype=object if exact else complex)
    for idx in np.ndindex(out.shape):
        out[idx] = parse_scalar(list(arr[idx]), exact)
    return out


def table_to_plain(table, extra: dict | None = None) -> dict:
    """JSON form of a :class:`SymbolTable` at the base point."""
    exact = table.provenance.get("exact", False)

    def vals(tab):
        if exact:
            return {str(j): np.asarray(v.value, dtype=object) for j, v in tab.items()}
        return {str(j): np.asarray(v.to_float().value) for j, v in tab.items()}

    prov = dict(table.provenance)
    prov.update(extra or {})
    return {"depth": table.depth, "provenance": prov, "p": vals(table.p), "q": vals(table.q)}


def symbol_data_from_plain(obj):
    """Read a table file into :class:`~thermodtn.reconstruction.SymbolData`."""
    from .reconstruction import SymbolData

    prov = obj["provenance"]
    exact = bool(prov.get("exact", False))
    p = {}
    for j, rows in obj["p"].items():
        m = matrix_from_plain(rows, exact)
        if exact:
            m = np.vectorize(lambda z: complex(z), otypes=[complex])(m)
        p[int(j)] = m
    xi = np.asarray([[float(Fraction(str(x))) for x in np.atleast_1d(r)]
                     for r in np.atleast_2d(np.asarray(prov["xi0"], dtype=object))])
    return SymbolData(xi, p, dict(prov.get("constants", {})))


def jet_to_plain(rec) -> dict:
    """JSON form of a :class:`RecoveredJet`."""
    return {
        "derivatives": {k: [float(x) for x in v] for k, v in rec.derivs.items()},
        "taylor": {k: rec.taylor(k) for k in rec.derivs},
        "constants": rec.constants,
        "diagnostics": rec.diagnostics,
    }
