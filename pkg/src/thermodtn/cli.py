"""Command-line driver: ``thermodtn <command> --manifest m.json --out file``.

Exit codes: 0 success, 1 validation error, 2 tolerance failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .algebra.jets import Jet
from .dtn_assembly import build_table, table_residuals
from .errors import (
    IllConditionedFit,
    InconsistentSymbol,
    ManifestError,
    ModeDeficiency,
    NearDefectiveModes,
    NotConverged,
    RankDeficientLayer,
    ResidualTooLarge,
    SolverSingular,
    ThermoDtnError,
    ToleranceExceeded,
)
from .geometry import covector_package
from .manifest import COEFF_KEYS, DEFAULT_TOLERANCES, Manifest, load_manifest, parse_metric
from .oracle import SlabMaterial, halfspace_multiplier, slab_dtn
from .reconstruction import RecoveredJet, SymbolData, layer_strip
from .serialize import (
    jet_to_plain,
    read_json,
    symbol_data_from_plain,
    table_to_plain,
    write_csv,
    write_json,
)
from .symbol_calculus import build_structure, sylvester_bruteforce, sylvester_residual, sylvester_solve

EXIT_OK, EXIT_VALIDATION, EXIT_TOLERANCE, EXIT_IO = 0, 1, 2, 3
COMMANDS = ("symbols", "residual", "sylvester-check", "oracle-compare", "reconstruct", "round-trip")
_TOLERANCE_ERRORS = (
    ResidualTooLarge, ToleranceExceeded, InconsistentSymbol, RankDeficientLayer, IllConditionedFit,
    NotConverged, ModeDeficiency, NearDefectiveModes, SolverSingular,
)


class ToleranceFailure(Exception):
    """A computed quantity is outside the manifest tolerance."""


def _header(command: str, tol: dict, names) -> str:
    parts = ";".join(f"{k}={tol[k]:g}" for k in names)
    return f"thermodtn {__version__} {command} tolerances: {parts}"


def _pmap(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _depth(man: Manifest, args) -> int:
    return man.depth if args.depth is None else args.depth


def cmd_symbols(man, args):
    depth = _depth(man, args)
    g, m = man.metric(depth), man.material(depth)
    table = build_table(g, m, man.covector_array(), depth)
    res = table_residuals(g, m, man.covector_array(), table)
    worst = max(float(v) for v in res.values())
    out = table_to_plain(table, {"metric": man.metric_block, "tolerances": man.tolerances})
    out["residuals"] = {str(k): float(v) for k, v in res.items()}
    write_json(args.out, out)
    print(f"symbols: depth {depth}, {len(man.covectors)} covector(s), worst residual {worst:.3e}")
    if worst > man.tolerances["residual"]:
        raise ToleranceFailure(f"worst residual {worst:.3e} > {man.tolerances['residual']:g}")


def cmd_residual(man, args):
    depth = _depth(man, args)
    g, m = man.metric(depth), man.material(depth)
    table = build_table(g, m, man.covector_array(), depth, check=False)
    res = table_residuals(g, m, man.covector_array(), table)
    rows = [(d, float(res[d])) for d in sorted(res, reverse=True)]
    write_csv(args.out, ["degree", "norm"], rows, _header("residual", man.tolerances, ["residual"]))
    worst = max(r[1] for r in rows)
    print(f"residual: degrees {rows[0][0]}..{rows[-1][0]}, worst {worst:.3e}")
    if worst > man.tolerances["residual"]:
        raise ToleranceFailure(f"worst residual {worst:.3e} > {man.tolerances['residual']:g}")


def cmd_sylvester(man, args):
    g, m = man.metric(0), man.material(0)
    rows = []
    worst_plus, best_minus = 0.0, np.inf
    xs = man.covector_array()
    for cid, xi in enumerate(xs):
        st = build_structure(g, m, covector_package(g, xi, 0))
        size = man.dim + 1
        E = Jet.constant(st.s.space, np.eye(size).astype(object if man.exact else complex))
        for sign in (1, -1):
            X = sylvester_solve(E, st, sign=sign, check=False)
            r = float(sylvester_residual(E, X, st))
            rows.append((cid, "+" if sign > 0 else "-", r))
            if sign > 0:
                worst_plus = max(worst_plus, r)
                left = np.asarray(st.left.to_float().value, dtype=complex)
                right = np.asarray(st.q1.to_float().value, dtype=complex)
                ref = sylvester_bruteforce(np.eye(size), left, right)
                dev = float(np.max(np.abs(np.asarray(X.to_float().value) - ref)))
                rows.append((cid, "+bruteforce", dev))
            else:
                best_minus = min(best_minus, r)
    names = ["sylvester", "sylvester_minus_min"]
    write_csv(args.out, ["case-id", "sign", "residual"], rows, _header("sylvester-check", man.tolerances, names))
    print(f"sylvester-check: plus residual {worst_plus:.3e}, minus residual {best_minus:.3e}")
    if worst_plus > man.tolerances["sylvester"]:
        raise ToleranceFailure(f"plus-sign residual {worst_plus:.3e} > {man.tolerances['sylvester']:g}")


def _oracle_sample(task):
    kind, payload, xi = task
    if kind == "halfspace":
        return halfspace_multiplier(xi, **payload).Lam
    return slab_dtn(payload, xi).Lam


def _is_constant(jet: Jet) -> bool:
    return bool(np.all(np.asarray(jet.to_float().c)[1:] == 0))


def cmd_oracle_compare(man, args):
    depth = _depth(man, args)
    g, m = man.metric(depth), man.material(depth)
    if not _is_constant(g.g - Jet.constant(g.space, np.eye(man.dim - 1))):
        raise ManifestError("oracle-compare needs the euclidean metric")
    xi0 = np.asarray(man.covectors[0], dtype=float)
    ladder = [float(t) for t in args.ladder.split(",")] if args.ladder else [8.0, 16.0, 32.0, 64.0]
    table = build_table(g, m, xi0, depth)
    P = {j: np.asarray(v) for j, v in table.values("p").items()}
    consts = {k: float(getattr(m, k)) for k in ("rho", "omega", "theta0", "c_heat")}
    if all(_is_constant(j) for j in m.coefficients.values()):
        kind = "halfspace"
        payload = {k: float(np.real(v.to_float().value)) for k, v in m.coefficients.items()}
        payload.update(consts)
    else:
        kind = "slab"
        payload = SlabMaterial.from_material(m)
    lams = _pmap(_oracle_sample, [(kind, payload, t * xi0) for t in ladder], args.jobs)
    rows, errs = [], []
    size = man.dim + 1
    for t, L in zip(ladder, lams):
        S = sum(t**j * P[j] for j in P)
        errs.append(float(np.max(np.abs(L - S))))
        for a in range(size):
            for b in range(size):
                rows.append((t * float(np.linalg.norm(xi0)), f"{a},{b}", L[a, b].real, L[a, b].imag,
                             S[a, b].real, S[a, b].imag, float(abs(L[a, b] - S[a, b]))))
    slope = float(np.polyfit(np.log(ladder), np.log(errs), 1)[0]) if len(ladder) > 1 else float("nan")
    header = ["magnitude", "entry", "oracle_re", "oracle_im", "symbolsum_re", "symbolsum_im", "abs_err"]
    write_csv(args.out, header, rows, _header("oracle-compare", man.tolerances, ["slope"]) + f";oracle={kind}")
    print(f"oracle-compare: {kind} oracle, max abs_err {max(errs):.3e}, log-log slope {slope:.3f} (target {-depth})")
    if not abs(slope + depth) <= man.tolerances["slope"]:
        raise ToleranceFailure(f"slope {slope:.3f} not within {man.tolerances['slope']:g} of {-depth}")


def _reconstruct(data: SymbolData, g, tol: dict, depth=None) -> RecoveredJet:
    return layer_strip(data, g, depth=depth, rtol=tol["layer"], order0_rtol=tol["order0"])


def cmd_reconstruct(man, args):
    obj = read_json(args.table)
    data = symbol_data_from_plain(obj)
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(man.tolerances if man is not None else obj["provenance"].get("tolerances", {}))
    depth = data.depth if args.depth is None else args.depth
    block = man.metric_block if man is not None else obj["provenance"].get("metric", {"preset": "euclidean"})
    space = Manifest(data.dim, depth, "float", block, {}, data.xi).space(depth + 2)
    g = parse_metric(block, space)
    rec = _reconstruct(data, g, tol, depth)
    out = jet_to_plain(rec)
    out["tolerances"] = tol
    write_json(args.out, out)
    worst = max(d.get("residual", 0.0) for d in rec.diagnostics)
    print(f"reconstruct: depth {depth}, worst layer residual {worst:.3e}")


def _truth(m, depth: int) -> dict:
    n = m.space.dim
    out = {}
    for k in COEFF_KEYS:
        jet = getattr(m, k).to_float()
        top = depth if k in ("lam", "mu") else depth - 1
        out[k] = [float(np.real(jet.derivative((0,) * (n - 1) + (j,)))) for j in range(top + 1)]
    return out


def cmd_round_trip(man, args):
    depth = _depth(man, args)
    g, m = man.metric(depth), man.material(depth)
    if man.exact:
        raise ManifestError("round-trip runs in float mode")
    table = build_table(g, m, man.covector_array(), depth)
    data = SymbolData.from_table(table)
    rec = _reconstruct(data, g, man.tolerances, depth)
    rows = rec.errors_against(_truth(m, depth))
    names = ["round_trip", "layer", "order0"]
    write_csv(args.out, ["order", "coefficient", "abs_err", "rel_err"], rows,
              _header("round-trip", man.tolerances, names))
    worst = max(r[3] for r in rows) if rows else 0.0
    print(f"round-trip: depth {depth}, worst rel_err {worst:.3e}")
    if not worst <= man.tolerances["round_trip"]:
        raise ToleranceFailure(f"worst rel_err {worst:.3e} > {man.tolerances['round_trip']:g}")


HANDLERS = {
    "symbols": cmd_symbols,
    "residual": cmd_residual,
    "sylvester-check": cmd_sylvester,
    "oracle-compare": cmd_oracle_compare,
    "reconstruct": cmd_reconstruct,
    "round-trip": cmd_round_trip,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thermodtn", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--manifest", help="manifest JSON (all commands except reconstruct)")
    p.add_argument("--table", help="table JSON written by `symbols` (reconstruct)")
    p.add_argument("--out", required=True, help="output file")
    p.add_argument("--depth", type=int, help="override the manifest depth")
    p.add_argument("--ladder", help="comma-separated magnitudes for oracle-compare")
    p.add_argument("--mode", choices=("float", "rational"), help="override the manifest mode")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for independent samples")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        man = None
        if args.manifest:
            man = load_manifest(args.manifest)
            if args.mode:
                man.mode = args.mode
        elif args.command != "reconstruct":
            raise ManifestError("--manifest is required")
        if args.command == "reconstruct" and not args.table:
            raise ManifestError("--table is required for reconstruct")
        tol_names = list(man.tolerances) if man is not None else []
        if man is not None:
            print(_header(args.command, man.tolerances, sorted(tol_names)))
        HANDLERS[args.command](man, args)
    except (OSError, json.JSONDecodeError) as err:
        print(f"error [io]: {err}", file=sys.stderr)
        return EXIT_IO
    except ToleranceFailure as err:
        print(f"error [tolerance]: {err}", file=sys.stderr)
        return EXIT_TOLERANCE
    except _TOLERANCE_ERRORS as err:
        print(f"error [tolerance] {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (ThermoDtnError, ValueError, KeyError, TypeError) as err:
        print(f"error [validation] {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
