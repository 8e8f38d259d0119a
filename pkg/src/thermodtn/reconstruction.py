"""Recovery of ``lam, mu, alpha, beta`` and their normal jets from DtN symbol data.

Order zero is read off ``p1`` and ``p0`` in closed form.  Higher normal
derivatives are stripped layer by layer: the level ``p_{1-s}`` is affine in
the ``s``-th normal derivatives of ``lam, mu`` and the ``(s-1)``-th of
``alpha, beta`` once every lower derivative is fixed, so each layer is a
small real least-squares problem whose columns come from unit perturbations
run through the forward engine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .algebra.jets import Jet, JetSpace, monomial_index
from .dtn_assembly import SymbolTable, build_table
from .errors import (
    IllConditionedFit,
    InconsistentSymbol,
    RankDeficientLayer,
    ToleranceExceeded,
)
from .geometry import MetricJet, covector_package
from .material import MaterialJet
from .symbol_calculus import build_structure

COEFFS = ("lam", "mu", "alpha", "beta")
CONSTANTS = ("rho", "omega", "theta0", "c_heat")
ORDER0_RTOL = 1e-8
LAYER_RTOL = 1e-6
RANK_RTOL = 1e-10
DEAD_RTOL = 1e-13
FIT_COND_LIMIT = 1e12


@dataclass
class SymbolData:
    """Base-point values of ``p_j`` at a batch of covectors.

    Attributes
    ----------
    xi : ndarray, shape (C, n-1)
    p : dict
        ``{j: ndarray (C, n+1, n+1)}`` for ``j = 1, 0, ..., 1 - depth``.
    constants : dict
        ``rho, omega, theta0, c_heat``.
    """

    xi: np.ndarray
    p: dict
    constants: dict = field(default_factory=dict)

    def __post_init__(self):
        self.xi = np.atleast_2d(np.asarray(self.xi, dtype=float))
        C = self.xi.shape[0]
        self.p = {int(j): np.asarray(v, dtype=complex).reshape(C, *np.shape(v)[-2:])
                  for j, v in self.p.items()}

    @property
    def dim(self) -> int:
        return self.xi.shape[-1] + 1

    @property
    def depth(self) -> int:
        return 1 - min(self.p)

    @classmethod
    def from_table(cls, table: SymbolTable, constants: dict | None = None) -> "SymbolData":
        consts = dict(table.provenance.get("constants", {}))
        consts.update(constants or {})
        return cls(np.asarray(table.provenance["xi0"], dtype=float), table.values("p"), consts)

    def truncated(self, depth: int) -> "SymbolData":
        return SymbolData(self.xi, {j: v for j, v in self.p.items() if j >= 1 - depth},
                          dict(self.constants))


@dataclass
class RecoveredJet:
    """Normal derivatives ``[f, d_n f, d_n^2 f, ...]`` of each coefficient at the base point."""

    derivs: dict
    constants: dict = field(default_factory=dict)
    diagnostics: list = field(default_factory=list)

    def order(self, name: str) -> int:
        return len(self.derivs[name]) - 1

    def taylor(self, name: str) -> np.ndarray:
        d = np.asarray(self.derivs[name], dtype=float)
        return d / np.array([factorial(k) for k in range(len(d))])

    def to_material(self, space: JetSpace) -> MaterialJet:
        jets = [_normal_jet(space, np.asarray(self.derivs[k], dtype=float)) for k in COEFFS]
        return MaterialJet(*jets, **{k: self.constants[k] for k in CONSTANTS if k in self.constants})

    def errors_against(self, truth: dict) -> list:
        """Rows ``(order, coefficient, abs_err, rel_err)`` against true derivative lists.

        ``rel_err`` is relative to ``|truth|``; a zero true value makes it absolute.
        """
        rows = []
        for name in COEFFS:
            for k, v in enumerate(self.derivs[name]):
                if k >= len(truth[name]):
                    break
                t = float(truth[name][k])
                err = abs(float(v) - t)
                rows.append((k, name, err, err / abs(t) if t != 0 else err))
        return sorted(rows)


def _normal_jet(space: JetSpace, derivs: np.ndarray) -> Jet:
    """Jet with normal derivatives ``derivs[k]`` (leading axis) and no tangential dependence."""
    derivs = np.asarray(derivs)
    n = space.dim
    index = monomial_index(space.nx, space.xorder)
    c = np.zeros((space.size_x, space.size_xi) + derivs.shape[1:], dtype=space.dtype)
    for k in range(min(len(derivs), space.xorder + 1)):
        J = (0,) * (n - 1) + (k,)
        sub = tuple(J[i] for i in space.coords)
        if k and (n - 1) not in space.coords:
            break
        c[index[sub], 0] = derivs[k] / factorial(k)
    return Jet(space, c)


def _frames(xi: np.ndarray, g0: np.ndarray | None):
    n1 = xi.shape[-1]
    g0 = np.eye(n1) if g0 is None else np.asarray(g0, dtype=float)
    up = xi @ np.linalg.inv(g0)
    s = np.sqrt(np.einsum("ca,ca->c", xi, up))
    return up, s


def recover_order0(p1, p0, xi, g0=None, rtol: float = ORDER0_RTOL) -> dict:
    """Boundary values of ``lam, mu, alpha, beta`` from ``p1`` and ``p0``.

    Parameters
    ----------
    p1, p0 : array_like, shape (C, n+1, n+1)
        Symbol values at ``C`` covectors.
    xi : array_like, shape (C, n-1)
        Covectors with lower indices.
    g0 : array_like, optional
        Tangential metric at the base point, default identity.
    rtol : float
        Allowed relative spread across covectors and relative violation of the
        algebraic relations among entries.

    Returns
    -------
    dict
        ``lam, mu, alpha, beta`` and ``spread`` (worst relative inconsistency).

    Raises
    ------
    InconsistentSymbol
        When entries disagree with each other or across covectors.
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    C, n1 = xi.shape
    n = n1 + 1
    N, T = n1, n
    p1 = np.asarray(p1, dtype=complex).reshape(C, n + 1, n + 1)
    p0 = np.asarray(p0, dtype=complex).reshape(C, n + 1, n + 1)
    up, s = _frames(xi, g0)
    alpha = p1[:, T, T].real / s
    a = p1[:, N, N].real / s
    c = np.einsum("ca,ca->c", p1[:, N, :n1].imag, xi) / np.einsum("ca,ca->c", xi, xi)
    tang = p1[:, :n1, :n1]
    along = np.einsum("ca,cab,cb->c", xi, tang, up).real / s**3
    checks = [np.abs(along - a) / np.abs(a)]
    if n == 2:
        if np.any(c <= 0):
            raise InconsistentSymbol("off-diagonal entry of p1 has the wrong sign")
        r = a / c
        mu = a * (r + 1) / (2 * r)
        lam = mu * (r - 2)
    else:
        mu = np.empty(C)
        for i in range(C):
            # complement {eta : eta^a xi_a = 0} is an eigenspace of the tangential block
            _, _, vh = np.linalg.svd(xi[i][None, :])
            Z = vh[1:].T
            mu[i] = np.trace(Z.T @ tang[i].real @ Z) / ((n - 2) * s[i])
        lam = mu * (4 * mu - 3 * a) / (a - 2 * mu)
        checks.append(np.abs(c - 2 * mu**2 / (lam + 3 * mu)) / np.abs(c))
    beta = (lam + 3 * mu) / mu * p0[:, N, T].real
    vals = {"lam": lam, "mu": mu, "alpha": alpha, "beta": beta}
    out = {}
    spread = max(float(np.max(ck)) for ck in checks)
    for k, v in vals.items():
        mean = float(np.mean(v))
        scale = max(abs(mean), float(np.mean(mu)))
        spread = max(spread, float(np.max(np.abs(v - mean))) / scale)
        out[k] = mean
    if not np.isfinite(spread) or spread > rtol:
        raise InconsistentSymbol(f"symbol entries inconsistent (relative spread {spread:.3e} > {rtol:g})")
    if out["mu"] <= 0 or out["alpha"] <= 0 or out["lam"] + out["mu"] < -rtol * out["mu"]:
        raise InconsistentSymbol("recovered order-zero values are not admissible")
    out["spread"] = spread
    return out


def _stage_unknowns(s: int) -> list:
    if s == 1:
        return [("lam", 1), ("mu", 1)]
    return [("lam", s), ("mu", s), ("alpha", s - 1), ("beta", s - 1)]


def _forward_level(g: MetricJet, derivs: dict, constants: dict, xi: np.ndarray, level: int):
    """``p_level`` at covectors ``xi`` for batched derivative lists ``derivs[name] (K+1, V)``."""
    depth = 1 - level
    morder = depth + 1
    gorder = depth + 2
    if g.space.xorder > gorder:
        g = g.with_order(gorder)
    space = g.space.with_orders(xorder=morder, xiorder=0)
    jets = [_normal_jet(space, derivs[k]) for k in COEFFS]
    m = MaterialJet(*jets, **constants)
    V = np.shape(derivs["lam"])[1]
    xib = xi[:, None, :] if V else xi
    table = build_table(g, m, xib, depth)
    return table.values("p")[level]


def _variants(known: dict, unknowns: list, base: dict, order: int, h=None) -> dict:
    """Derivative arrays ``(order+1, V)``: column 0 is the base, then unit steps."""
    V = 1 + len(unknowns)
    out = {}
    for name in COEFFS:
        arr = np.zeros((order + 1, V))
        lst = np.nan_to_num(np.asarray(known[name], dtype=float)[: order + 1])
        arr[: len(lst)] = lst[:, None]
        out[name] = arr
    for (name, k), v in base.items():
        out[name][k, :] = v
    for i, (name, k) in enumerate(unknowns):
        out[name][k, 1 + i] += 1.0 if h is None else h
    return out


def _affine_system(g, known, unknowns, constants, xi, level, order):
    base = {u: 0.0 for u in unknowns}
    der = _variants(known, unknowns, base, order)
    pv = _forward_level(g, der, constants, xi, level)   # (C, V, n+1, n+1)
    p_base = pv[:, 0]
    cols = pv[:, 1:] - p_base[:, None]
    return p_base, cols


def _real_lstsq(cols: np.ndarray, rhs: np.ndarray, names: list):
    """Least squares on stacked real and imaginary parts; ``cols`` is (C, U, n+1, n+1).

    Columns with no influence on the level are left out and reported by
    index; their entries of the solution are NaN.
    """
    U = cols.shape[1]
    A = np.moveaxis(cols, 1, -1).reshape(-1, U)
    b = rhs.reshape(-1)
    A = np.concatenate([A.real, A.imag])
    b = np.concatenate([b.real, b.imag])
    scale = np.linalg.norm(A, axis=0)
    dead = np.flatnonzero(scale <= DEAD_RTOL * max(scale.max(initial=0.0), np.finfo(float).tiny))
    live = np.setdiff1d(np.arange(U), dead)
    x = np.full(U, np.nan)
    if live.size == 0:
        return x, float(np.linalg.norm(b)), 1.0, list(dead)
    As = A[:, live] / scale[live]
    _, sv, vh = np.linalg.svd(As, full_matrices=False)
    if sv[-1] < RANK_RTOL * sv[0]:
        null = np.abs(vh[-1])
        dep = [names[live[i]] for i in np.flatnonzero(null > 0.1 * null.max())]
        raise RankDeficientLayer(
            f"covectors do not separate unknowns {', '.join(dep)} (singular ratio {sv[-1] / sv[0]:.2e})"
        )
    y, *_ = np.linalg.lstsq(As, b, rcond=None)
    x[live] = y / scale[live]
    res = float(np.linalg.norm(A[:, live] @ x[live] - b))
    return x, res, float(sv[0] / sv[-1]), list(dead)


def _unknown_name(u) -> str:
    name, k = u
    return f"d^{k} {name}" if k else name


def layer_strip(
    data: SymbolData,
    g: MetricJet,
    order0: dict | None = None,
    depth: int | None = None,
    rtol: float = LAYER_RTOL,
    order0_rtol: float = ORDER0_RTOL,
    cross_check: bool = True,
) -> RecoveredJet:
    """Recover normal jets of ``lam, mu`` to order ``depth`` and of ``alpha, beta`` to ``depth - 1``.

    Parameters
    ----------
    data : SymbolData
        Symbol values at one or more covectors.
    g : MetricJet
        Known metric jet at the base point (x_n-dependence only is supported
        for the material; tangential derivatives are taken as zero).
    order0 : dict, optional
        Known boundary values; recovered with :func:`recover_order0` if absent.
    depth : int, optional
        Number of layers, default ``data.depth``.
    rtol : float
        Bound on the relative least-squares residual of each layer.
    cross_check : bool
        Record the closed-form thermal derivatives next to the affine values.

    Raises
    ------
    RankDeficientLayer
        When the covectors cannot separate the unknowns of a layer.
    ToleranceExceeded
        When a layer residual exceeds ``rtol``.
    """
    depth = data.depth if depth is None else depth
    if depth > data.depth:
        raise ValueError(f"data holds {data.depth} levels, {depth} requested")
    consts = {k: data.constants.get(k, 1.0 if k != "omega" else 0.0) for k in CONSTANTS}
    g0 = np.asarray(g.g.to_float().value).real
    if order0 is None:
        order0 = recover_order0(data.p[1], data.p[0], data.xi, g0, rtol=order0_rtol)
    known = {k: [float(order0[k])] for k in COEFFS}
    diags = [{"layer": 0, "level": 1, "spread": float(order0.get("spread", 0.0))}]
    # residuals are measured against the whole table: a level may vanish identically
    table_scale = max(float(np.sqrt(sum(np.linalg.norm(v) ** 2 for v in data.p.values()))),
                      np.finfo(float).tiny)
    pending = []
    for s in range(1, depth + 1):
        level = 1 - s
        fresh = _stage_unknowns(s)
        for name, k in fresh:
            known[name].append(np.nan)
        unknowns = pending + fresh
        names = [_unknown_name(u) for u in unknowns]
        p_base, cols = _affine_system(g, known, unknowns, consts, data.xi, level, s)
        rhs = data.p[level] - p_base
        x, res, cond, dead = _real_lstsq(cols, rhs, names)
        rel = res / table_scale
        if rel > rtol:
            raise ToleranceExceeded(f"layer {s} residual {rel:.3e} exceeds {rtol:g}")
        for (name, k), v in zip(unknowns, x):
            known[name][k] = float(v)
        # unknowns without influence here are retried one level down
        pending = [unknowns[i] for i in dead]
        diag = {"layer": s, "level": level, "residual": rel, "cond": cond,
                "unknowns": {nm: float(v) for nm, v in zip(names, x) if np.isfinite(v)},
                "deferred": [names[i] for i in dead]}
        if cross_check and s >= 2:
            try:
                th = recover_normal_derivative_thermal(
                    data, g, {k: v[: s if k in ("alpha", "beta") else s + 1] for k, v in known.items()},
                    order=s - 1,
                )
                diag["closed_form"] = {"alpha": th.dalpha, "beta": th.dbeta}
            except RankDeficientLayer as err:
                diag["closed_form"] = {"error": str(err)}
        diags.append(diag)
    if pending:
        diags.append({"unidentifiable": [_unknown_name(u) for u in pending]})
    return RecoveredJet({k: v for k, v in known.items()}, consts, diags)


@dataclass
class ThermalDerivatives:
    """Closed-form normal derivatives of ``alpha`` and ``beta`` of a given order."""

    order: int
    dalpha: float
    dbeta: float
    dalpha_printed: complex | None = None
    entries: dict = field(default_factory=dict)


def _sylvester_apply(g, m, xi, X):
    st = build_structure(g, m, covector_package(g, xi, 0))
    left = np.asarray(st.left.to_float().value)
    right = np.asarray(st.q1.to_float().value)
    return left @ X + X @ right


def recover_normal_derivative_thermal(
    data: SymbolData, g: MetricJet, lower: dict, order: int = 1
) -> ThermalDerivatives:
    """Closed-form ``d_n^k alpha`` and ``d_n^k beta`` from the level ``p_{-k}``.

    ``q_{-k} = A^{-1} p_{-k}`` gives ``E_{1-k}`` through the Sylvester
    operator.  Its change relative to the forward engine with the two target
    derivatives zeroed is pushed up ``k - 1`` times through the same operator
    to the change of ``d_n^k q0``, whose ``(N, T)`` and ``(T, N)`` entries are

        -d^k beta / (lam + 3 mu)
        i mu omega theta0 / (lam + 3 mu) * (d^k beta / alpha - beta d^k alpha / alpha^2).

    Parameters
    ----------
    data : SymbolData
        Must contain ``p_{-k}``.
    g : MetricJet
    lower : dict
        Derivative lists; ``lam, mu`` to order ``k + 1`` (order ``k`` suffices
        when ``k = 1``, missing entries count as zero) and ``alpha, beta`` to
        order ``k - 1``.
    order : int
        ``k >= 1``.

    Raises
    ------
    RankDeficientLayer
        When ``omega * beta * theta0 = 0``, so that ``d^k alpha`` does not
        enter the ``(T, N)`` entry.
    """
    k = order
    level = -k
    if level not in data.p:
        raise ValueError(f"data lacks level {level}")
    consts = {c: data.constants.get(c, 1.0 if c != "omega" else 0.0) for c in CONSTANTS}
    n = data.dim
    N, T = n - 1, n
    lam, mu, alpha, beta = (float(lower[c][0]) for c in COEFFS)
    unknowns = [("alpha", k), ("beta", k)]
    base = {u: 0.0 for u in unknowns}
    lo = {c: list(lower[c])[: k + 2] for c in COEFFS}
    der = _variants(lo, [], base, k + 1)
    p_ref = _forward_level(g, der, consts, data.xi, level)[:, 0]
    A = np.diag([mu] * (n - 1) + [lam + 2 * mu, alpha]).astype(complex)
    gs = g.with_order(1) if g.space.xorder > 1 else g
    space0 = gs.space.with_orders(xiorder=0)
    m0 = MaterialJet(*(Jet.constant(space0, v) for v in (lam, mu, alpha, beta)), **consts)
    dq = np.einsum("ab,cbd->cad", np.linalg.inv(A), data.p[level] - p_ref)
    X = np.stack([_sylvester_apply(gs, m0, data.xi[i], dq[i]) for i in range(len(data.xi))])
    for _ in range(k - 1):
        X = np.stack([_sylvester_apply(gs, m0, data.xi[i], X[i]) for i in range(len(data.xi))])
    xnt = complex(np.mean(X[:, N, T]))
    xtn = complex(np.mean(X[:, T, N]))
    dbeta = -(lam + 3 * mu) * xnt.real
    coupling = mu * consts["omega"] * consts["theta0"] / (lam + 3 * mu)
    printed = None
    if k == 1 and beta != 0:
        # printed form without the i omega theta0 factor, kept as a diagnostic
        printed = (mu * dbeta / (alpha * (lam + 3 * mu)) - xtn) * alpha**2 * (lam + 3 * mu) / (beta * mu)
    if coupling * beta == 0:
        raise RankDeficientLayer(
            f"d^{k} alpha does not enter the (T, N) entry when omega * beta * theta0 = 0"
        )
    dalpha = (alpha / beta) * (dbeta - alpha * (xtn / (1j * coupling)).real)
    return ThermalDerivatives(k, float(dalpha), float(dbeta), printed, {"NT": xnt, "TN": xtn})


def affinity_defect(
    g: MetricJet, known: dict, constants: dict, xi, layer: int, unknown: tuple, h: float = 1.0,
    center: float = 0.0,
) -> float:
    """Relative second difference of ``p_{1-layer}`` in one order-``layer`` unknown.

    Lower derivatives are fixed at ``known``; the unknown takes the values
    ``center - h, center, center + h``.
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    V = 3
    der = {}
    for name in COEFFS:
        arr = np.zeros((layer + 1, V))
        lst = list(known[name])[: layer + 1]
        arr[: len(lst)] = np.asarray(lst, dtype=float)[:, None]
        der[name] = arr
    name, k = unknown
    der[name][k] = center + h * np.array([-1.0, 0.0, 1.0])
    consts = {c: constants.get(c, 1.0 if c != "omega" else 0.0) for c in CONSTANTS}
    pv = _forward_level(g, der, consts, xi, 1 - layer)
    second = pv[:, 2] - 2 * pv[:, 1] + pv[:, 0]
    return float(np.max(np.abs(second)) / max(np.max(np.abs(pv[:, 1])), np.finfo(float).tiny))


def tangential_derivatives(minus: SymbolData, plus: SymbolData, h: float, g0=None) -> dict:
    """Central difference of :func:`recover_order0` between base points ``x' -/+ h e_a``."""
    a = recover_order0(minus.p[1], minus.p[0], minus.xi, g0)
    b = recover_order0(plus.p[1], plus.p[0], plus.xi, g0)
    return {k: (b[k] - a[k]) / (2 * h) for k in COEFFS}


@dataclass
class SymbolFit:
    """Least-squares estimates of ``p_j`` along one covector direction."""

    xi: np.ndarray
    p: dict
    cond: float
    residual: float

    def as_data(self, constants: dict | None = None) -> SymbolData:
        return SymbolData(self.xi[None, :], {j: v[None] for j, v in self.p.items()}, constants or {})


def fit_symbols_from_samples(samples, depth: int, xi0=None, cond_limit: float = FIT_COND_LIMIT) -> SymbolFit:
    """Fit ``Lam(t xi0) ~ sum_{j=1-depth}^{1} t^j P_j`` over samples along ``xi0``.

    Parameters
    ----------
    samples : sequence of DtnSample
        Covectors must be positive multiples of one direction.
    depth : int
        Lowest level is ``1 - depth``; needs at least ``depth + 3`` samples.
    xi0 : array_like, optional
        Reference covector, default the unit vector of the first sample.

    Raises
    ------
    IllConditionedFit
        Too few samples, non-collinear covectors, or a scaled design matrix
        with condition number above ``cond_limit``.
    """
    if len(samples) < depth + 3:
        raise IllConditionedFit(f"{len(samples)} samples for depth {depth}, need at least {depth + 3}")
    xs = np.array([np.asarray(sm.xi, dtype=float) for sm in samples])
    xi0 = xs[0] / np.linalg.norm(xs[0]) if xi0 is None else np.asarray(xi0, dtype=float)
    t = xs @ xi0 / (xi0 @ xi0)
    if np.any(t <= 0) or np.max(np.abs(xs - t[:, None] * xi0)) > 1e-12 * np.max(np.abs(xs)):
        raise IllConditionedFit("sample covectors are not positive multiples of one direction")
    levels = list(range(1, -depth, -1))
    D = np.stack([t**j for j in levels], axis=1)
    scale = np.linalg.norm(D, axis=0)
    Ds = D / scale
    cond = float(np.linalg.cond(Ds))
    if cond > cond_limit:
        raise IllConditionedFit(f"design condition {cond:.2e} exceeds {cond_limit:g}")
    Y = np.stack([np.asarray(sm.Lam, dtype=complex).reshape(-1) for sm in samples])
    coef, *_ = np.linalg.lstsq(Ds, Y, rcond=None)
    coef = coef / scale[:, None]
    res = float(np.linalg.norm(D @ coef - Y) / np.linalg.norm(Y))
    shape = np.shape(samples[0].Lam)
    return SymbolFit(xi0, {j: coef[i].reshape(shape) for i, j in enumerate(levels)}, cond, res)
