"""Factorisation recursion for ``q_j`` and the Dirichlet-to-Neumann symbol ``p_j``.

The full symbol equation is grouped by homogeneity degree ``d``.  Writing
``R_d`` for the sum of all degree-``d`` terms built from the currently known
``q_j``, the next unknown solves

    (q1 - b1) q_{d-1} + q_{d-1} q1 = -R_d.

The blockwise right-hand sides :func:`rhs_E1`, :func:`rhs_E0` and
:func:`rhs_Em` are provided separately and cross-checked in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra.jets import Jet
from .errors import InsufficientJetOrder, ResidualTooLarge
from .geometry import Covector, MetricJet, covector_package
from .material import MaterialJet, validate
from .operator_symbols import matrix_A, matrix_D, symbol_b, symbol_c
from .symbol_calculus import Structure, build_structure, compose_terms, sylvester_solve

Q1_RTOL = 1e-11


@dataclass
class Symbols:
    """Operator symbols at one base point, keyed by degree."""

    b: dict
    c: dict
    d: dict
    A: Jet
    structure: Structure

    @classmethod
    def build(cls, g: MetricJet, m: MaterialJet, xi: Covector) -> "Symbols":
        b1, b0 = symbol_b(g, m, xi)
        c2, c1, c0 = symbol_c(g, m, xi)
        d1, d0 = matrix_D(g, m, xi)
        A = matrix_A(m).lift(xi.norm.space.xiorder)
        return cls({1: b1, 0: b0}, {2: c2, 1: c1, 0: c0}, {1: d1, 0: d0}, A, build_structure(g, m, xi))


def q1_symbol(g: MetricJet, m: MaterialJet, xi: Covector, check: bool = True) -> Jet:
    """Principal symbol ``q1 = |xi'| I + k F1``; checks ``q1^2 - b1 q1 + c2 = 0``."""
    st = build_structure(g, m, xi)
    if check:
        c2 = symbol_c(g, m, xi)[0]
        r = st.q1 @ st.q1 - st.b1 @ st.q1 + c2
        scale = c2.coeff_norm() or 1.0
        res = r.coeff_norm() / scale
        if res > (0.0 if r.space.exact else Q1_RTOL):
            raise ResidualTooLarge(f"principal factorisation residual {res:.3e}")
    return st.q1


def grouped_terms(d: int, q: dict, sym: Symbols) -> Jet | None:
    """Sum of every degree-``d`` term of the full symbol equation built from ``q``.

    Returns ``None`` when no term is present.
    """
    terms = []
    for j, qj in q.items():
        for k, qk in q.items():
            r = j + k - d
            if r >= 0:
                terms.append(compose_terms(qj, qk, r))
    for j, bj in sym.b.items():
        for k, qk in q.items():
            r = j + k - d
            # b0 is xi-independent and b1 is linear in xi
            if 0 <= r <= j:
                terms.append(-compose_terms(bj, qk, r))
    if d in q:
        terms.append(-q[d].dx(q[d].space.dim - 1))
    if d in sym.c:
        terms.append(sym.c[d])
    if not terms:
        return None
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    return total


def rhs_E1(q1: Jet, sym: Symbols) -> Jet:
    """``i sum_a d_xi_a (q1 - b1) d_x_a q1 + b0 q1 + d_n q1 - c1``."""
    n = q1.space.dim
    left = q1 - sym.b[1]
    out = sym.b[0] @ q1 + q1.dx(n - 1) - sym.c[1]
    for a in range(n - 1):
        out = out + 1j * (left.dxi(a) @ q1.dx(a))
    return out


def rhs_E0(q1: Jet, q0: Jet, sym: Symbols) -> Jet:
    """Degree-zero right-hand side, term by term."""
    n = q1.space.dim
    left = q1 - sym.b[1]
    out = -(q0 @ q0) + sym.b[0] @ q0 + q0.dx(n - 1) - sym.c[0]
    for a in range(n - 1):
        out = out + 1j * (left.dxi(a) @ q0.dx(a) + q0.dxi(a) @ q1.dx(a))
        for b in range(n - 1):
            out = out + 0.5 * (q1.dxi(a).dxi(b) @ q1.dx(a).dx(b))
    return out


def rhs_Em(mm: int, q: dict, sym: Symbols) -> Jet:
    """Right-hand side ``E_{-m}`` for ``m >= 1`` with the explicit composition sum."""
    from itertools import product as iproduct
    from math import factorial, prod

    qm = q[-mm]
    n = qm.space.dim
    out = sym.b[0] @ qm + qm.dx(n - 1)
    for a in range(n - 1):
        out = out - 1j * (sym.b[1].dxi(a) @ qm.dx(a))
    for j in range(-mm, 2):
        for k in range(-mm, 2):
            order = j + k + mm
            if order < 0:
                continue
            for J in iproduct(range(order + 1), repeat=n - 1):
                if sum(J) != order:
                    continue
                coef = (-1j) ** order / prod(factorial(v) for v in J)
                term = q[j].dxi_multi(J) @ q[k].dx_multi(J + (0,))
                out = out - coef * term
    return out


@dataclass
class SymbolTable:
    """``q_j`` and ``p_j`` for ``j = 1, 0, ..., 1 - depth`` at one base point."""

    depth: int
    q: dict
    p: dict
    provenance: dict = field(default_factory=dict)

    def values(self, which: str = "p") -> dict:
        """Base-point values ``{j: array}`` (x = 0, xi' = base covector)."""
        tab = self.p if which == "p" else self.q
        return {j: np.asarray(v.to_float().value) for j, v in tab.items()}


def required_orders(depth: int) -> tuple[int, int]:
    """Material and metric x-orders demanded for a table of the given depth."""
    return depth + 1, depth + 2


def build_table(
    g: MetricJet,
    m: MaterialJet,
    xi0,
    depth: int,
    xiorder: int | None = None,
    check: bool = True,
) -> SymbolTable:
    """Run the factorisation recursion and assemble the DtN symbol table.

    Parameters
    ----------
    g, m : MetricJet, MaterialJet
        Jets at the base point; ``m`` may carry a batch tail.
    xi0 : array_like
        Base covector(s), last axis of length ``n - 1``.
    depth : int
        Number ``M`` of symbol levels below the principal one.
    xiorder : int, optional
        xi-order of the bi-jets, default ``M + 2``.
    check : bool
        Verify the principal factorisation and every Sylvester residual.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    need_m, need_g = required_orders(depth)
    if m.space.xorder < need_m or g.space.xorder < need_g:
        raise InsufficientJetOrder(
            f"depth {depth} needs material order >= {need_m} and metric order >= {need_g}; "
            f"got {m.space.xorder} and {g.space.xorder}"
        )
    L = depth + 2 if xiorder is None else xiorder
    if L < depth:
        raise InsufficientJetOrder(f"xi-order {L} is below the depth {depth}")
    validate(m)
    xi = covector_package(g, xi0, L)
    sym = Symbols.build(g, m, xi)
    q = {1: q1_symbol(g, m, xi, check=check)}
    for d in range(1, 1 - depth, -1):
        E = -grouped_terms(d, q, sym)
        q[d - 1] = sylvester_solve(E, sym.structure, check=check)
    A = sym.A
    p = {}
    for j, qj in q.items():
        pj = A @ qj
        if j in sym.d:
            pj = pj - sym.d[j]
        p[j] = pj
    prov = {
        "dim": g.dim,
        "xi0": np.asarray(xi0, dtype=float).tolist(),
        "material_order": m.space.xorder,
        "metric_order": g.space.xorder,
        "xi_order": L,
        "exact": g.space.exact,
        "constants": {k: float(getattr(m, k)) for k in ("rho", "omega", "theta0", "c_heat")},
    }
    return SymbolTable(depth, q, p, prov)


def table_residuals(g: MetricJet, m: MaterialJet, xi0, table: SymbolTable) -> dict:
    """Relative residual of each degree-``d`` equation, ``d = 2 .. 2 - depth``.

    Uses the term-by-term right-hand sides (:func:`rhs_E1`, :func:`rhs_E0`,
    :func:`rhs_Em`), a code path independent of :func:`grouped_terms`.
    """
    xi = covector_package(g, xi0, table.provenance["xi_order"])
    sym = Symbols.build(g, m, xi)
    st = sym.structure
    q = table.q
    out = {}
    r = q[1] @ q[1] - sym.b[1] @ q[1] + sym.c[2]
    out[2] = r.coeff_norm() / (sym.c[2].coeff_norm() or 1.0)
    for d in range(1, 1 - table.depth, -1):
        if d == 1:
            E = rhs_E1(q[1], sym)
        elif d == 0:
            E = rhs_E0(q[1], q[0], sym)
        else:
            E = rhs_Em(-d, q, sym)
        X = q[d - 1]
        r = st.left @ X + X @ st.q1 - E
        scale = E.truncate(r.space.xorder, r.space.xiorder).coeff_norm()
        out[d] = r.coeff_norm() / (scale or 1.0)
    return out
