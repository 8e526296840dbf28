"""Double description method for ``{x : A x >= 0, L x = 0}``.

Equalities are quotiented out first (rays are enumerated in a rational basis
of their null space), then inequalities are inserted one at a time.  Lineality
is carried explicitly, so non-pointed cones are handled: a row that is not
identically zero on the current lineality space consumes one lineality
direction and turns it into a ray.

Adjacency of a (positive, negative) ray pair is decided combinatorially on
packed zero sets (see ``_kernels``).  The ``algebraic`` mode replaces this by an
exact rank test and exists for cross-checking on small inputs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable

import numpy as np

from . import _kernels
from .cone import HCone, VCone
from .errors import ResourceLimitExceeded
from .rational import canonical_line, canonical_ray, nullspace, primitive, rank

log = logging.getLogger(__name__)

_INT64_SAFE = 2**62


@dataclass
class DDConfig:
    order: str = "nonzeros"  # "nonzeros" (ascending support size) or "given"
    adjacency: str = "combinatorial"  # or "algebraic"
    max_rays: int | None = None
    progress: Callable[[int, int, int], None] | None = None


def _matmul_exact(R, a):
    """R @ a without silent int64 overflow."""
    if R.dtype == object:
        return R.dot(a)
    bound = (int(np.abs(R).max(initial=0)) * int(np.abs(a).max(initial=0))) * max(1, R.shape[1])
    if bound < _INT64_SAFE:
        return R @ a
    return R.astype(object).dot(a.astype(object))


def _rows_primitive(M):
    if M.dtype == object:
        out = []
        for row in M:
            g = 0
            for v in row:
                g = gcd(g, int(v))
            out.append([int(v) // g for v in row] if g > 1 else [int(v) for v in row])
        return _as_array(out, M.shape[1])
    g = np.gcd.reduce(M, axis=1)
    g[g == 0] = 1
    return M // g[:, None]


def _as_array(rows, d):
    big = any(abs(int(v)) >= 2**40 for r in rows for v in r)
    if big:
        arr = np.empty((len(rows), d), dtype=object)
        for i, r in enumerate(rows):
            arr[i, :] = [int(v) for v in r]
        return arr
    return np.array(rows, dtype=np.int64).reshape(len(rows), d)


def _combine(R, s, pairs):
    """Rays ``s[p] R[n] - s[n] R[p]`` for each adjacent pair, made primitive."""
    p, n = pairs[:, 0], pairs[:, 1]
    sp, sn = s[p], s[n]
    if R.dtype != object:
        bound = 2 * int(np.abs(s).max(initial=0)) * int(np.abs(R).max(initial=0))
        if bound < _INT64_SAFE:
            new = sp[:, None] * R[n] - sn[:, None] * R[p]
            return _rows_primitive(new)
    Ro = R.astype(object)
    so = s.astype(object)
    new = so[p][:, None] * Ro[n] - so[n][:, None] * Ro[p]
    out = _rows_primitive(new)
    if out.dtype == object and all(abs(int(v)) < 2**40 for v in out.flat):
        return out.astype(np.int64)
    return out


class _State:
    def __init__(self, d: int, m: int):
        self.d = d
        self.W = max(1, (m + 63) // 64)
        self.R = np.zeros((0, d), dtype=np.int64)
        self.Z = np.zeros((0, self.W), dtype=np.uint64)
        self.lin = [np.eye(d, dtype=np.int64)[i] for i in range(d)]

    def set_bit(self, mask_rows, t):
        w, b = divmod(t, 64)
        self.Z[mask_rows, w] |= np.uint64(1) << np.uint64(b)


def _algebraic_pairs(A_done, st: _State, P, N, thr):
    out = []
    nb = A_done.shape[0]
    D = st.d - len(st.lin)
    for i in P:
        for j in N:
            common = st.Z[i] & st.Z[j]
            idx = [t for t in range(nb) if (int(common[t // 64]) >> (t % 64)) & 1]
            if len(idx) < thr:
                continue
            if rank([list(A_done[t]) for t in idx]) == D - 2:
                out.append((i, j))
    return np.array(out, dtype=np.int64).reshape(-1, 2)


def _insert(st: _State, a, t: int, A_done, cfg: DDConfig):
    # lineality step
    for li, l in enumerate(st.lin):
        sl = int(np.dot(l.astype(object), a.astype(object)))
        if sl != 0:
            lstar = l if sl > 0 else -l
            sigma = abs(sl)
            rest = []
            for k, l2 in enumerate(st.lin):
                if k == li:
                    continue
                s2 = int(np.dot(l2.astype(object), a.astype(object)))
                v = [sigma * int(x) - s2 * int(y) for x, y in zip(l2, lstar)] if s2 else [int(x) for x in l2]
                rest.append(np.array(canonical_line(v), dtype=object))
            st.lin = [np.array(list(v), dtype=np.int64 if all(abs(int(x)) < 2**40 for x in v) else object) for v in rest]
            if st.R.shape[0]:
                s = _matmul_exact(st.R, a)
                Ro = st.R.astype(object)
                new = sigma * Ro - np.outer(np.asarray(s, dtype=object), lstar.astype(object))
                st.R = _rows_primitive(new)
                if st.R.dtype == object and all(abs(int(v)) < 2**40 for v in st.R.flat):
                    st.R = st.R.astype(np.int64)
                st.set_bit(np.arange(st.R.shape[0]), t)
            newray = np.array(primitive([int(x) for x in lstar]), dtype=object)
            newray = newray.astype(np.int64) if all(abs(int(x)) < 2**40 for x in newray) else newray
            if st.R.dtype == object or newray.dtype == object:
                st.R = np.vstack([st.R.astype(object), newray.astype(object)[None, :]])
            else:
                st.R = np.vstack([st.R, newray[None, :]])
            # a former lineality direction is zero on every earlier row
            zl = np.zeros((1, st.W), dtype=np.uint64)
            for b in range(t):
                zl[0, b // 64] |= np.uint64(1) << np.uint64(b % 64)
            st.Z = np.vstack([st.Z, zl])
            return
    if st.R.shape[0] == 0:
        return
    s = _matmul_exact(st.R, a)
    s_sign = np.sign(s.astype(float)) if s.dtype != object else np.array([(v > 0) - (v < 0) for v in s])
    P = np.flatnonzero(s_sign > 0).astype(np.int64)
    N = np.flatnonzero(s_sign < 0).astype(np.int64)
    Zr = np.flatnonzero(s_sign == 0)
    if len(N) == 0:
        st.set_bit(Zr, t)
        return
    D = st.d - len(st.lin)
    thr = D - 2
    if len(P) == 0:
        pairs = np.zeros((0, 2), dtype=np.int64)
    elif cfg.adjacency == "algebraic":
        pairs = _algebraic_pairs(A_done, st, P, N, thr)
    else:
        ptr, idx = _kernels.incidence_lists(st.Z, t)
        pairs = _kernels.adjacent_pairs(st.Z, P, N, thr, ptr, idx, t)
    keep = np.concatenate([P, Zr]).astype(np.int64)
    keep.sort()
    if len(pairs):
        new = _combine(st.R, s, pairs)
        Znew = st.Z[pairs[:, 0]] & st.Z[pairs[:, 1]]
    else:
        new = np.zeros((0, st.d), dtype=st.R.dtype)
        Znew = np.zeros((0, st.W), dtype=np.uint64)
    Rk, Zk = st.R[keep], st.Z[keep]
    if Rk.dtype != new.dtype:
        Rk, new = Rk.astype(object), new.astype(object)
    st.R = np.vstack([Rk, new])
    st.Z = np.vstack([Zk, Znew])
    zero_rows = np.concatenate([np.flatnonzero(np.isin(keep, Zr)), np.arange(len(keep), len(keep) + len(new))])
    st.set_bit(zero_rows.astype(np.int64), t)


def _core(A: np.ndarray, cfg: DDConfig):
    m, d = A.shape
    st = _State(d, m)
    for t in range(m):
        _insert(st, A[t], t, A[:t], cfg)
        k = st.R.shape[0]
        if cfg.max_rays is not None and k > cfg.max_rays:
            raise ResourceLimitExceeded("ray", k, cfg.max_rays)
        if cfg.progress is not None:
            cfg.progress(t + 1, m, k)
    return st


def dd_enumerate(cone: HCone, config: DDConfig | None = None) -> VCone:
    """Extremal rays (and lineality generators) of ``cone``."""
    cfg = config or DDConfig()
    n = cone.dim
    eq_rows = [list(f.coeffs) for f in cone.equalities if not f.is_zero()]
    basis = nullspace(eq_rows, n)  # n-vectors spanning {L x = 0}
    if not basis:
        return VCone(cone.space, [], [])
    d = len(basis)
    rows = []
    seen = set()
    for f in cone.inequalities:
        red = [sum((f.coeffs[i] * b[i] for i in range(n) if b[i] and f.coeffs[i]), Fraction(0)) for b in basis]
        p = primitive(red)
        if any(p) and p not in seen:
            seen.add(p)
            rows.append(p)
    if cfg.order == "nonzeros":
        rows.sort(key=lambda r: sum(1 for x in r if x))
    elif cfg.order != "given":
        raise ValueError(f"unknown insertion order {cfg.order!r}")
    A = _as_array(rows, d) if rows else np.zeros((0, d), dtype=np.int64)
    st = _core(A, cfg)

    B = np.array(basis, dtype=object)  # d x n

    def lift(y):
        return [sum(int(y[k]) * int(B[k, i]) for k in range(d) if y[k]) for i in range(n)]

    rays = sorted({canonical_ray(lift(r)) for r in st.R})
    lin = [canonical_line(lift(l)) for l in st.lin]
    return VCone(cone.space, [tuple(Fraction(x) for x in r) for r in rays], [tuple(Fraction(x) for x in l) for l in lin])


def facets_from_rays(vcone: VCone, config: DDConfig | None = None) -> HCone:
    """Dual DD: facet inequalities of the cone generated by ``vcone``."""
    from .cone import LinearForm

    n = vcone.space.dim
    dual = HCone(
        vcone.space,
        [LinearForm.ge(r) for r in vcone.rays]
        + [LinearForm.ge(l) for l in vcone.lineality]
        + [LinearForm.ge([-x for x in l]) for l in vcone.lineality],
        [],
    )
    gens = dd_enumerate(dual, config)
    ineqs = [LinearForm.ge(r) for r in gens.rays]
    eqs = [LinearForm.eq(l) for l in gens.lineality]
    return HCone(vcone.space, ineqs, eqs)
