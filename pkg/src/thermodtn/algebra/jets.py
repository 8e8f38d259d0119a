"""Truncated Taylor jets in ``x`` tensored with truncated expansions in ``xi'``.

A :class:`Jet` holds a dense array ``c`` of shape ``(Nx, Nxi, *tail)``.  Axis 0
runs over x-monomials of total degree ``<= xorder`` and axis 1 over
xi-monomials of total degree ``<= xiorder``, both in graded order, so
truncation is a prefix slice.  ``tail`` carries batch and matrix axes; all
arithmetic broadcasts over it and ``@`` contracts the last two axes.

Internally ``c`` stores monomial (Taylor) coefficients.  The public accessors
:meth:`Jet.derivative` and :meth:`Jet.from_derivatives` use the derivative
convention: the entry at multi-index ``J`` is the partial derivative
``d^|J| f / dx^J`` at the base point.

x-variables can be restricted to a subset of the physical coordinates
(``JetSpace.coords``).  Differentiating along an inactive coordinate gives
zero, which makes x'-independent problems cheap.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, prod

import numpy as np

from ..errors import (
    DivisionByZeroJet,
    IndexOutOfOrder,
    InsufficientJetOrder,
    OrderMismatch,
    SqrtBranchError,
)
from .rational import GaussianRational

# Upper bound on the number of scalar products materialised per chunk.
_CHUNK_ELEMS = 1 << 21


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def monomials(nvars: int, order: int) -> np.ndarray:
    """Exponent table of all monomials in ``nvars`` variables, graded order."""
    rows = [m for d in range(order + 1) for m in _compositions(d, nvars)]
    out = np.array(rows, dtype=np.int64).reshape(len(rows), nvars)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def monomial_index(nvars: int, order: int) -> dict:
    return {tuple(int(v) for v in m): i for i, m in enumerate(monomials(nvars, order))}


def n_monomials(nvars: int, order: int) -> int:
    return comb(nvars + order, order)


@lru_cache(maxsize=None)
def _pairs(nvars: int, order: int):
    mons = monomials(nvars, order)
    index = monomial_index(nvars, order)
    degs = mons.sum(axis=1)
    a, b, c = [], [], []
    for ia in range(len(mons)):
        for ib in range(n_monomials(nvars, order - int(degs[ia]))):
            a.append(ia)
            b.append(ib)
            c.append(index[tuple(int(v) for v in mons[ia] + mons[ib])])
    return np.array(a, dtype=np.int64), np.array(b, dtype=np.int64), np.array(c, dtype=np.int64)


@lru_cache(maxsize=None)
def _product_plan(nx: int, kx: int, nxi: int, kxi: int):
    ax, bx, cx = _pairs(nx, kx)
    ak, bk, ck = _pairs(nxi, kxi)
    m = n_monomials(nxi, kxi)
    ia = (ax[:, None] * m + ak[None, :]).ravel()
    ib = (bx[:, None] * m + bk[None, :]).ravel()
    out = (cx[:, None] * m + ck[None, :]).ravel()
    order = np.argsort(out, kind="stable")
    ia, ib, out = ia[order], ib[order], out[order]
    starts = np.flatnonzero(np.r_[True, out[1:] != out[:-1]])
    assert len(starts) == n_monomials(nx, kx) * m
    return ia, ib, starts


@lru_cache(maxsize=None)
def _diff_plan(nvars: int, order: int, var: int):
    lower = monomials(nvars, order - 1)
    index = monomial_index(nvars, order)
    src = np.empty(len(lower), dtype=np.int64)
    fac = np.empty(len(lower), dtype=np.int64)
    for i, m in enumerate(lower):
        up = list(int(v) for v in m)
        up[var] += 1
        src[i] = index[tuple(up)]
        fac[i] = up[var]
    return src, fac


def _as_exact(value):
    arr = np.asarray(value, dtype=object)
    if arr.ndim == 0:
        return GaussianRational.coerce(arr.item())
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = GaussianRational.coerce(v)
    return out


def _as_float(value):
    if isinstance(value, Fraction):
        return complex(value)
    arr = np.asarray(value)
    if arr.dtype == object:
        arr = np.vectorize(complex, otypes=[complex])(arr) if arr.ndim else complex(arr.item())
    return np.asarray(arr, dtype=complex)


@dataclass(frozen=True)
class JetSpace:
    """Shape descriptor shared by jets that may be combined.

    Parameters
    ----------
    dim : int
        Manifold dimension ``n``; the tangential covector has ``n - 1`` entries.
    coords : tuple of int
        Physical x-coordinates (``0 .. n-1``, ``n-1`` is the normal one) that
        are carried as jet variables.
    xorder, xiorder : int
        Total-degree truncation in x and in xi'.
    exact : bool
        Use :class:`GaussianRational` scalars instead of complex floats.
    """

    dim: int
    coords: tuple
    xorder: int
    xiorder: int = 0
    exact: bool = False

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dimension must be >= 2")
        if self.xorder < 0 or self.xiorder < 0:
            raise InsufficientJetOrder(f"negative jet order ({self.xorder}, {self.xiorder})")
        if sorted(set(self.coords)) != list(self.coords) or any(
            not 0 <= k < self.dim for k in self.coords
        ):
            raise ValueError(f"invalid coordinate list {self.coords}")

    @classmethod
    def full(cls, dim, xorder, xiorder=0, exact=False):
        return cls(dim, tuple(range(dim)), xorder, xiorder, exact)

    @property
    def nx(self) -> int:
        return len(self.coords)

    @property
    def nxi(self) -> int:
        return self.dim - 1

    @property
    def size_x(self) -> int:
        return n_monomials(self.nx, self.xorder)

    @property
    def size_xi(self) -> int:
        return n_monomials(self.nxi, self.xiorder)

    @property
    def dtype(self):
        return object if self.exact else complex

    def with_orders(self, xorder=None, xiorder=None) -> "JetSpace":
        return replace(
            self,
            xorder=self.xorder if xorder is None else xorder,
            xiorder=self.xiorder if xiorder is None else xiorder,
        )

    def coerce(self, value):
        """Convert a scalar or array to this space's scalar type."""
        return _as_exact(value) if self.exact else _as_float(value)

    def compatible(self, other: "JetSpace") -> bool:
        return (
            self.dim == other.dim and self.coords == other.coords and self.exact == other.exact
        )


def _pad(c: np.ndarray, ntail: int) -> np.ndarray:
    tail = c.shape[2:]
    if len(tail) == ntail:
        return c
    return c.reshape(c.shape[:2] + (1,) * (ntail - len(tail)) + tail)


def _pad_flat(c: np.ndarray, ntail: int) -> np.ndarray:
    tail = c.shape[1:]
    if len(tail) == ntail:
        return c
    return c.reshape(c.shape[:1] + (1,) * (ntail - len(tail)) + tail)


class Jet:
    """Truncated bi-jet with an arbitrary tail of batch/matrix axes."""

    __slots__ = ("space", "c")
    __array_ufunc__ = None

    def __init__(self, space: JetSpace, coeffs):
        c = np.asarray(coeffs, dtype=space.dtype)
        if c.shape[:2] != (space.size_x, space.size_xi):
            raise ValueError(
                f"coefficient array {c.shape[:2]} does not match space "
                f"({space.size_x}, {space.size_xi})"
            )
        self.space = space
        self.c = c

    # construction
    @classmethod
    def zeros(cls, space: JetSpace, tail=()) -> "Jet":
        c = np.zeros((space.size_x, space.size_xi) + tuple(tail), dtype=space.dtype)
        if space.exact:
            c[...] = GaussianRational(0)
        return cls(space, c)

    @classmethod
    def constant(cls, space: JetSpace, value) -> "Jet":
        v = space.coerce(value)
        tail = np.shape(v)
        out = cls.zeros(space, tail)
        out.c[0, 0] = v
        return out

    @classmethod
    def x_variable(cls, space: JetSpace, coord: int, value=0) -> "Jet":
        """The coordinate function ``x_coord`` (shifted by ``value``)."""
        out = cls.constant(space, value)
        if coord in space.coords and space.xorder >= 1:
            unit = [0] * space.nx
            unit[space.coords.index(coord)] = 1
            ix = monomial_index(space.nx, space.xorder)[tuple(unit)]
            out.c[ix, 0] = space.coerce(1)
        return out

    @classmethod
    def xi_variable(cls, space: JetSpace, index: int, value) -> "Jet":
        """The covector component ``xi_index`` expanded around ``value``."""
        out = cls.constant(space, value)
        if space.xiorder >= 1:
            unit = [0] * space.nxi
            unit[index] = 1
            ik = monomial_index(space.nxi, space.xiorder)[tuple(unit)]
            out.c[0, ik] = space.coerce(np.ones(np.shape(value)))
        return out

    @classmethod
    def from_derivatives(cls, space: JetSpace, derivs: dict, xi_derivs=None) -> "Jet":
        """Build an x-jet (constant in xi) from ``{J: d^J f}`` over all ``dim`` coordinates.

        Entries beyond ``space.xorder`` are ignored (truncation).  Entries with
        a nonzero exponent on an inactive coordinate raise ``ValueError``.
        """
        out = cls.zeros(space)
        index = monomial_index(space.nx, space.xorder)
        for J, val in derivs.items():
            J = tuple(int(k) for k in J)
            if len(J) != space.dim:
                raise ValueError(f"multi-index {J} has wrong length for dimension {space.dim}")
            if sum(J) > space.xorder:
                continue
            if any(J[k] for k in range(space.dim) if k not in space.coords):
                if val != 0:
                    raise ValueError(f"jet depends on inactive coordinate: {J}")
                continue
            sub = tuple(J[k] for k in space.coords)
            coef = space.coerce(val)
            scale = prod(factorial(k) for k in J)
            out.c[index[sub], 0] = coef * Fraction(1, scale) if space.exact else coef / scale
        return out

    @classmethod
    def block(cls, rows, like: "Jet | None" = None) -> "Jet":
        """Assemble a matrix jet from nested rows of jets / scalars.

        Jet entries are truncated to the smallest orders present; tails are
        broadcast together and the two matrix axes appended.
        """
        jets = [e for row in rows for e in row if isinstance(e, Jet)]
        if like is not None:
            jets.append(like)
        if not jets:
            raise ValueError("block() needs at least one Jet entry or a template")
        space = jets[0].space
        kx = min(j.space.xorder for j in jets)
        kxi = min(j.space.xiorder for j in jets)
        for j in jets:
            if not j.space.compatible(space):
                raise OrderMismatch("incompatible jet spaces in block()")
        space = space.with_orders(kx, kxi)
        entries = [
            [e.truncate(kx, kxi).c if isinstance(e, Jet) else cls.constant(space, e).c for e in row]
            for row in rows
        ]
        batch = np.broadcast_shapes(*(e.shape[2:] for row in entries for e in row))
        nr, nc = len(rows), len(rows[0])
        out = np.empty((space.size_x, space.size_xi) + batch + (nr, nc), dtype=space.dtype)
        for i, row in enumerate(entries):
            if len(row) != nc:
                raise ValueError("ragged block rows")
            for j, e in enumerate(row):
                out[..., i, j] = np.broadcast_to(_pad(e, len(batch)), out.shape[:-2])
        return cls(space, out)

    # introspection
    @property
    def tail(self) -> tuple:
        return self.c.shape[2:]

    @property
    def value(self):
        """Coefficient at the base point (x = 0, xi' = xi'_0)."""
        return self.c[0, 0]

    def __repr__(self):
        s = self.space
        return f"Jet(dim={s.dim}, coords={s.coords}, K={s.xorder}, L={s.xiorder}, tail={self.tail})"

    def derivative(self, J=None, K=None):
        """Mixed partial ``d_x^J d_xi^K`` at the base point (derivative convention)."""
        s = self.space
        J = tuple(J) if J is not None else (0,) * s.dim
        K = tuple(K) if K is not None else (0,) * s.nxi
        if len(J) != s.dim or len(K) != s.nxi:
            raise IndexOutOfOrder(f"multi-index lengths {len(J)}, {len(K)} do not match space")
        if min(J + K, default=0) < 0:
            raise IndexOutOfOrder("negative multi-index entry")
        if sum(J) > s.xorder or sum(K) > s.xiorder:
            raise IndexOutOfOrder(
                f"requested orders ({sum(J)}, {sum(K)}) exceed jet orders ({s.xorder}, {s.xiorder})"
            )
        if any(J[k] for k in range(s.dim) if k not in s.coords):
            return s.coerce(np.zeros(self.tail)) if self.tail else s.coerce(0)
        ix = monomial_index(s.nx, s.xorder)[tuple(J[k] for k in s.coords)]
        ik = monomial_index(s.nxi, s.xiorder)[K]
        scale = prod(factorial(k) for k in J + K)
        return self.c[ix, ik] * scale

    def xi_slice(self, K) -> "Jet":
        """x-jet of ``d_xi^K`` of this jet at the base covector."""
        s = self.space
        ik = monomial_index(s.nxi, s.xiorder)[tuple(K)]
        ns = s.with_orders(xiorder=0)
        scale = prod(factorial(k) for k in K)
        return Jet(ns, self.c[:, ik : ik + 1] * scale)

    def derivative_map(self) -> dict:
        """All x-derivatives at xi-order zero, keyed by full multi-index."""
        s = self.space
        out = {}
        for m in monomials(s.nx, s.xorder):
            J = [0] * s.dim
            for k, e in zip(s.coords, m):
                J[k] = int(e)
            out[tuple(J)] = self.derivative(J)
        return out

    # structural
    def truncate(self, xorder=None, xiorder=None) -> "Jet":
        s = self.space
        kx = s.xorder if xorder is None else xorder
        kxi = s.xiorder if xiorder is None else xiorder
        if kx > s.xorder or kxi > s.xiorder:
            raise InsufficientJetOrder(
                f"cannot raise orders ({s.xorder}, {s.xiorder}) to ({kx}, {kxi}) by truncation"
            )
        if (kx, kxi) == (s.xorder, s.xiorder):
            return self
        ns = s.with_orders(kx, kxi)
        return Jet(ns, self.c[: ns.size_x, : ns.size_xi])

    def lift(self, xiorder: int) -> "Jet":
        """Embed a xi-independent jet (xiorder 0) into a space with xi-order ``xiorder``."""
        if self.space.xiorder == xiorder:
            return self
        if self.space.xiorder != 0:
            raise OrderMismatch("lift() expects a jet with xi-order 0")
        ns = self.space.with_orders(xiorder=xiorder)
        out = Jet.zeros(ns, self.tail)
        out.c[:, 0] = self.c[:, 0]
        return out

    def restrict(self, coords) -> "Jet":
        """Drop x-variables the jet does not depend on."""
        s = self.space
        coords = tuple(coords)
        if coords == s.coords:
            return self
        if not set(coords) <= set(s.coords):
            raise ValueError("restrict() can only drop coordinates")
        ns = replace(s, coords=coords)
        keep = [s.coords.index(k) for k in coords]
        index = monomial_index(s.nx, s.xorder)
        rows = []
        for m in monomials(ns.nx, ns.xorder):
            full = [0] * s.nx
            for v, e in zip(keep, m):
                full[v] = int(e)
            rows.append(index[tuple(full)])
        rows = np.array(rows, dtype=np.int64)
        dropped = np.setdiff1d(np.arange(s.size_x), rows)
        if dropped.size and any(np.any(self.c[dropped] != 0) for _ in [0]):
            raise ValueError("jet depends on a coordinate being dropped")
        return Jet(ns, self.c[rows])

    def depends_on(self, coord: int) -> bool:
        s = self.space
        if coord not in s.coords:
            return False
        v = s.coords.index(coord)
        mask = monomials(s.nx, s.xorder)[:, v] > 0
        return bool(np.any(self.c[mask] != 0))

    def __getitem__(self, idx) -> "Jet":
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.space, self.c[(slice(None), slice(None)) + idx])

    @property
    def T(self) -> "Jet":
        return Jet(self.space, np.swapaxes(self.c, -1, -2))

    def reshape(self, *tail) -> "Jet":
        return Jet(self.space, self.c.reshape(self.c.shape[:2] + tuple(tail)))

    def transpose(self, *axes) -> "Jet":
        """Permute tail axes (``axes`` indexes the tail only)."""
        return Jet(self.space, np.transpose(self.c, (0, 1) + tuple(a + 2 for a in axes)))

    @classmethod
    def stack(cls, jets, axis: int = 0) -> "Jet":
        """Stack jets along a new tail axis (counted within the tail)."""
        jets = list(jets)
        kx = min(j.space.xorder for j in jets)
        kxi = min(j.space.xiorder for j in jets)
        jets = [j.truncate(kx, kxi) for j in jets]
        tail = np.broadcast_shapes(*(j.tail for j in jets))
        arrs = [np.broadcast_to(_pad(j.c, len(tail)), j.c.shape[:2] + tail) for j in jets]
        ax = axis + 2 if axis >= 0 else axis
        return cls(jets[0].space, np.stack(arrs, axis=ax))

    def sum(self, axis) -> "Jet":
        """Sum over tail axis ``axis`` (counted within the tail)."""
        ax = axis + 2 if axis >= 0 else axis
        return Jet(self.space, self.c.sum(axis=ax))

    def expand(self, naxes: int = 2) -> "Jet":
        """Append ``naxes`` singleton tail axes (scalar -> broadcastable matrix)."""
        return Jet(self.space, self.c.reshape(self.c.shape + (1,) * naxes))

    def broadcast_tail(self, tail) -> "Jet":
        tail = tuple(tail)
        c = _pad(self.c, len(tail))
        return Jet(self.space, np.broadcast_to(c, c.shape[:2] + tail).copy())

    def to_float(self) -> "Jet":
        if not self.space.exact:
            return self
        return Jet(replace(self.space, exact=False), _as_float(self.c))

    def coeff_norm(self) -> float:
        c = _as_float(self.c) if self.space.exact else self.c
        return float(np.sqrt(np.sum(np.abs(c) ** 2)))

    def is_zero(self) -> bool:
        return bool(np.all(self.c == 0))

    # arithmetic helpers
    def _align(self, other):
        if isinstance(other, Jet):
            if not self.space.compatible(other.space):
                raise OrderMismatch(
                    f"incompatible jet spaces: coords {self.space.coords} vs {other.space.coords}"
                )
            kx = min(self.space.xorder, other.space.xorder)
            kxi = min(self.space.xiorder, other.space.xiorder)
            return self.truncate(kx, kxi), other.truncate(kx, kxi)
        return self, Jet.constant(self.space, other)

    def _cauchy(self, other: "Jet", matmul: bool) -> "Jet":
        a, b = self._align(other)
        s = a.space
        ia, ib, starts = _product_plan(s.nx, s.xorder, s.nxi, s.xiorder)
        if matmul:
            nb = max(len(a.tail), len(b.tail)) - 2
            at = a.tail[:-2]
            bt = b.tail[:-2]
            af = a.c.reshape((-1,) + (1,) * (nb - len(at)) + a.tail)
            bf = b.c.reshape((-1,) + (1,) * (nb - len(bt)) + b.tail)
            op = np.matmul
            tail = np.broadcast_shapes(at, bt) + (a.tail[-2], b.tail[-1])
        else:
            nt = max(len(a.tail), len(b.tail))
            af = _pad_flat(a.c.reshape((-1,) + a.tail), nt)
            bf = _pad_flat(b.c.reshape((-1,) + b.tail), nt)
            op = np.multiply
            tail = np.broadcast_shapes(a.tail, b.tail)
        ngroups = len(starts)
        npairs = len(ia)
        out = np.empty((ngroups,) + tail, dtype=s.dtype)
        per = max(1, prod(tail))
        limit = max(1, _CHUNK_ELEMS // per)
        g0 = 0
        while g0 < ngroups:
            target = starts[g0] + limit
            g1 = int(np.searchsorted(starts, target, side="right")) - 1
            g1 = max(g1, g0 + 1) if g1 <= g0 else g1
            g1 = min(g1, ngroups)
            p0 = starts[g0]
            p1 = starts[g1] if g1 < ngroups else npairs
            prodv = op(af[ia[p0:p1]], bf[ib[p0:p1]])
            out[g0:g1] = np.add.reduceat(prodv, starts[g0:g1] - p0, axis=0)
            g0 = g1
        return Jet(s, out.reshape((s.size_x, s.size_xi) + tail))

    def _linear(self, other, fn) -> "Jet":
        a, b = self._align(other)
        nt = max(len(a.tail), len(b.tail))
        return Jet(a.space, fn(_pad(a.c, nt), _pad(b.c, nt)))

    def __add__(self, other):
        return self._linear(other, np.add)

    def __radd__(self, other):
        return self._linear(other, np.add)

    def __sub__(self, other):
        return self._linear(other, np.subtract)

    def __rsub__(self, other):
        return self._linear(other, lambda x, y: np.subtract(y, x))

    def __neg__(self):
        return Jet(self.space, -self.c)

    def __mul__(self, other):
        if isinstance(other, Jet):
            return self._cauchy(other, matmul=False)
        v = self.space.coerce(other)
        nt = max(len(self.tail), np.ndim(v))
        return Jet(self.space, _pad(self.c, nt) * v)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, Jet):
            other = Jet.constant(self.space, other)
        return self._cauchy(other, matmul=True)

    def __rmatmul__(self, other):
        return Jet.constant(self.space, other)._cauchy(self, matmul=True)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        v = self.space.coerce(other)
        if np.any(v == 0):
            raise DivisionByZeroJet("division by a zero constant")
        return self * (1 / v if not self.space.exact else _exact_reciprocal(v))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, k: int):
        if not isinstance(k, numbers.Integral) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = Jet.constant(self.space, np.ones(self.tail))
        for _ in range(int(k)):
            out = out * self
        return out

    # nonlinear scalar functions
    def _split_constant(self):
        c0 = self.c[0, 0]
        if np.any(c0 == 0):
            raise DivisionByZeroJet("jet constant term is zero")
        inv0 = _exact_reciprocal(c0) if self.space.exact else 1.0 / c0
        return c0, inv0, self * inv0 - 1

    def reciprocal(self) -> "Jet":
        _, inv0, t = self._split_constant()
        r = Jet.constant(self.space, np.ones(self.tail))
        for _ in range(self.space.xorder + self.space.xiorder):
            r = 1 - t * r
        return r * inv0

    def sqrt(self) -> "Jet":
        """Principal square root; the constant term must have positive real part."""
        c0 = self.c[0, 0]
        re = np.vectorize(lambda z: z.re, otypes=[object])(c0) if self.space.exact else np.real(c0)
        if np.any(re <= 0):
            raise SqrtBranchError("square root needs a constant term with positive real part")
        _, _, t = self._split_constant()
        if self.space.exact:
            try:
                s0 = np.vectorize(lambda z: z.exact_sqrt(), otypes=[object])(c0)
                s0 = s0.item() if np.ndim(s0) == 0 else s0
            except ValueError as err:
                raise SqrtBranchError(f"no exact rational square root: {err}") from None
        else:
            s0 = np.sqrt(c0)
        degree = self.space.xorder + self.space.xiorder
        coeffs = [Fraction(1)]
        for k in range(1, degree + 1):
            coeffs.append(coeffs[-1] * (Fraction(1, 2) - (k - 1)) / k)
        r = Jet.constant(self.space, np.full(self.tail, coeffs[degree], dtype=object)
                         if self.space.exact else np.full(self.tail, float(coeffs[degree])))
        for k in range(degree - 1, -1, -1):
            r = t * r + (coeffs[k] if self.space.exact else float(coeffs[k]))
        return r * s0

    # differentiation
    def dx(self, coord: int) -> "Jet":
        """Partial derivative along physical coordinate ``coord``; x-order drops by one."""
        s = self.space
        if s.xorder == 0:
            raise InsufficientJetOrder("cannot differentiate an x-jet of order 0")
        ns = s.with_orders(xorder=s.xorder - 1)
        if coord not in s.coords:
            return Jet.zeros(ns, self.tail)
        src, fac = _diff_plan(s.nx, s.xorder, s.coords.index(coord))
        f = fac.reshape((-1, 1) + (1,) * len(self.tail))
        return Jet(ns, self.c[src] * f)

    def dxi(self, index: int) -> "Jet":
        """Partial derivative along ``xi_index``; xi-order drops by one."""
        s = self.space
        if s.xiorder == 0:
            raise InsufficientJetOrder("cannot differentiate a xi-jet of order 0")
        ns = s.with_orders(xiorder=s.xiorder - 1)
        src, fac = _diff_plan(s.nxi, s.xiorder, index)
        f = fac.reshape((1, -1) + (1,) * len(self.tail))
        return Jet(ns, self.c[:, src] * f)

    def dx_multi(self, J) -> "Jet":
        out = self
        for coord, k in enumerate(J):
            for _ in range(k):
                out = out.dx(coord)
        return out

    def dxi_multi(self, K) -> "Jet":
        out = self
        for a, k in enumerate(K):
            for _ in range(k):
                out = out.dxi(a)
        return out


def _exact_reciprocal(v):
    if np.ndim(v) == 0:
        v = v.item() if isinstance(v, np.ndarray) else v
        return GaussianRational(1) / GaussianRational.coerce(v)
    return np.vectorize(lambda z: GaussianRational(1) / z, otypes=[object])(v)


def sum_jets(jets, like: Jet | None = None) -> Jet:
    """Sum an iterable of jets, returning a zero jet shaped like ``like`` when empty."""
    total = None
    for j in jets:
        total = j if total is None else total + j
    if total is None:
        if like is None:
            raise ValueError("empty sum needs a template")
        return Jet.zeros(like.space, like.tail)
    return total


_OPS = {"add", "sub", "mul", "div", "sqrt", "neg"}


def jet_arith(a: Jet, b: Jet | None, op: str) -> Jet:
    """Strict arithmetic: both operands must share orders and coordinates."""
    if op not in _OPS:
        raise ValueError(f"unknown jet operation {op!r}")
    if op in ("sqrt", "neg"):
        return a.sqrt() if op == "sqrt" else -a
    if b is None:
        raise ValueError(f"{op} needs two operands")
    if a.space != b.space:
        raise OrderMismatch(f"jet spaces differ: {a.space} vs {b.space}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    return a / b


def jet_extract(a: Jet, J, K=None):
    """Mixed partial derivative ``d_x^J d_xi^K a`` at the base point."""
    return a.derivative(J, K)
