"""Exact linear programming over cones with pinned coordinates.

Every verdict returned by :func:`lp_check` is an exact rational statement backed
by a witness that has been re-checked in rational arithmetic:

* ``optimal``    -- a feasible point and dual multipliers reaching the same value,
* ``unbounded``  -- a recession direction with negative objective,
* ``infeasible`` -- Farkas multipliers (a :class:`Certificate`).

Two routes produce the witnesses.  The ``exact`` route is a dense two-phase
simplex on :class:`~fractions.Fraction` with Bland's rule.  The ``auto`` route
asks HiGHS (through scipy) for a floating point solution, rounds it to small
rationals and re-checks it exactly; if the rounded witness does not verify, the
exact simplex takes over.  A float result is never trusted on its own.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .cone import Certificate, HCone, LinearForm, verify_certificate
from .errors import DimensionMismatch
from .rational import as_fraction, dot, rationalize, solve_exact

log = logging.getLogger(__name__)

Pins = Mapping[int, Fraction]


@dataclass
class LPOutcome:
    status: str  # "optimal" | "unbounded" | "infeasible"
    value: Fraction | None = None
    point: tuple[Fraction, ...] | None = None
    certificate: Certificate | None = None
    ray: tuple[Fraction, ...] | None = None
    violation: Fraction | None = None
    method: str = ""

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"

    @property
    def bounded(self) -> bool:
        return self.status == "optimal"


# ---------------------------------------------------------------------------
# reduced problem:  min c.x  s.t.  A x >= b,  E x = e,  x free
# ---------------------------------------------------------------------------


@dataclass
class _Reduced:
    c: list[Fraction] | None
    A: list[list[Fraction]]
    b: list[Fraction]
    E: list[list[Fraction]]
    e: list[Fraction]
    n: int

    def primal_ok(self, x) -> bool:
        return all(dot(r, x) >= bi for r, bi in zip(self.A, self.b)) and all(
            dot(r, x) == ei for r, ei in zip(self.E, self.e)
        )

    def combo(self, y, w) -> list[Fraction]:
        acc = [Fraction(0)] * self.n
        for rows, mult in ((self.A, y), (self.E, w)):
            for r, k in zip(rows, mult):
                if k:
                    for j, a in enumerate(r):
                        if a:
                            acc[j] += k * a
        return acc

    def farkas_ok(self, y, w) -> bool:
        if any(v < 0 for v in y):
            return False
        if any(self.combo(y, w)):
            return False
        return dot(y, self.b) + dot(w, self.e) > 0

    def dual_ok(self, y, w, value) -> bool:
        if any(v < 0 for v in y):
            return False
        if self.combo(y, w) != list(self.c):
            return False
        return dot(y, self.b) + dot(w, self.e) == value

    def ray_ok(self, r) -> bool:
        return (
            all(dot(a, r) >= 0 for a in self.A)
            and all(dot(a, r) == 0 for a in self.E)
            and dot(self.c, r) < 0
        )


@dataclass
class _Solution:
    status: str
    x: list[Fraction] | None = None
    y: list[Fraction] | None = None
    w: list[Fraction] | None = None
    ray: list[Fraction] | None = None
    method: str = ""


class _Simplex:
    """Dense two-phase tableau simplex with Bland's rule over Fractions."""

    def __init__(self, P: _Reduced):
        self.P = P
        n, mA, mE = P.n, len(P.A), len(P.E)
        self.n, self.mA, self.mE = n, mA, mE
        m = mA + mE
        self.m = m
        # columns: u[0:n], v[n:2n], s[2n:2n+mA], art[2n+mA : 2n+mA+m]
        self.art0 = 2 * n + mA
        self.ncol = self.art0 + m
        T, sgn = [], []
        zero = Fraction(0)
        for i in range(m):
            row = [zero] * (self.ncol + 1)
            if i < mA:
                src, rhs = P.A[i], P.b[i]
                row[2 * n + i] = Fraction(-1)
            else:
                src, rhs = P.E[i - mA], P.e[i - mA]
            for j, a in enumerate(src):
                if a:
                    row[j] = a
                    row[n + j] = -a
            row[-1] = rhs
            s = -1 if rhs < 0 else 1
            if s < 0:
                row = [-x for x in row]
            row[self.art0 + i] = Fraction(1)
            T.append(row)
            sgn.append(s)
        self.T, self.sgn = T, sgn
        self.basis = [self.art0 + i for i in range(m)]

    def _reduced_costs(self, cost):
        T, ncol = self.T, self.ncol
        r = list(cost) + [Fraction(0)]
        for i, bcol in enumerate(self.basis):
            cb = cost[bcol]
            if cb:
                row = T[i]
                for j in range(ncol + 1):
                    if row[j]:
                        r[j] -= cb * row[j]
        return r  # r[-1] = -objective value

    def _pivot(self, pr: int, pc: int, r: list):
        T = self.T
        prow = T[pr]
        pv = prow[pc]
        if pv != 1:
            prow = [x / pv if x else x for x in prow]
            T[pr] = prow
        nz = [j for j, x in enumerate(prow) if x]
        for i, row in enumerate(T):
            if i != pr:
                f = row[pc]
                if f:
                    for j in nz:
                        row[j] -= f * prow[j]
        f = r[pc]
        if f:
            for j in nz:
                r[j] -= f * prow[j]
        self.basis[pr] = pc

    def _iterate(self, r, allowed):
        T = self.T
        while True:
            enter = next((j for j in allowed if r[j] < 0), None)
            if enter is None:
                return None
            best, leave = None, None
            for i, row in enumerate(T):
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leave]):
                        best, leave = ratio, i
            if leave is None:
                return enter
            self._pivot(leave, enter, r)

    def solve(self) -> _Solution:
        P, n, m = self.P, self.n, self.m
        art0 = self.art0
        cost1 = [Fraction(0)] * art0 + [Fraction(1)] * m
        r = self._reduced_costs(cost1)
        self._iterate(r, range(self.ncol))
        if -r[-1] > 0:
            pi = [1 - r[art0 + i] for i in range(m)]
            yall = [s * p for s, p in zip(self.sgn, pi)]
            return _Solution("infeasible", y=yall[: self.mA], w=yall[self.mA :], method="exact")
        for i in range(m):
            if self.basis[i] >= art0:
                j = next((j for j in range(art0) if self.T[i][j] != 0), None)
                if j is not None:
                    self._pivot(i, j, r)
        c = P.c if P.c is not None else [Fraction(0)] * n
        cost2 = list(c) + [-x for x in c] + [Fraction(0)] * (self.mA + m)
        r = self._reduced_costs(cost2)
        enter = self._iterate(r, range(art0))
        if enter is not None:
            d = [Fraction(0)] * self.ncol
            d[enter] = Fraction(1)
            for i, bcol in enumerate(self.basis):
                d[bcol] -= self.T[i][enter]
            ray = [d[j] - d[n + j] for j in range(n)]
            return _Solution("unbounded", ray=ray, method="exact")
        val = [Fraction(0)] * self.ncol
        for i, bcol in enumerate(self.basis):
            val[bcol] = self.T[i][-1]
        x = [val[j] - val[n + j] for j in range(n)]
        pi = [-r[art0 + i] for i in range(m)]
        yall = [s * p for s, p in zip(self.sgn, pi)]
        return _Solution("optimal", x=x, y=yall[: self.mA], w=yall[self.mA :], method="exact")


# ---------------------------------------------------------------------------
# float-guided route
# ---------------------------------------------------------------------------


def _np(rows, ncols):
    if not rows:
        return None
    return np.array([[float(a) for a in r] for r in rows], dtype=float).reshape(len(rows), ncols)


def _rat(vec):
    return [rationalize(float(v)) for v in vec]


def _linprog(c, A_ub, b_ub, A_eq, b_eq, bounds):
    from scipy.optimize import linprog

    return linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")


def _active_set_point(P: _Reduced, xf: np.ndarray, tol=1e-7):
    A = _np(P.A, P.n)
    rows, rhs = [], []
    if A is not None:
        slack = A @ xf - np.array([float(v) for v in P.b])
        for i in np.flatnonzero(np.abs(slack) <= tol):
            rows.append(P.A[i])
            rhs.append(P.b[i])
    rows += P.E
    rhs += P.e
    if not rows:
        return None
    return solve_exact(rows, rhs, free_values=_rat(xf))


def _guided(P: _Reduced) -> _Solution | None:
    n, mA, mE = P.n, len(P.A), len(P.E)
    A, E = _np(P.A, n), _np(P.E, n)
    b = np.array([float(v) for v in P.b]) if mA else None
    e = np.array([float(v) for v in P.e]) if mE else None
    c = np.array([float(v) for v in P.c]) if P.c is not None else np.zeros(n)
    if n == 0:
        return None
    res = _linprog(c, None if A is None else -A, None if b is None else -b, E, e, [(None, None)] * n)
    if res.status == 0:
        x = _rat(res.x)
        if not P.primal_ok(x):
            x = _active_set_point(P, res.x)
            if x is None or not P.primal_ok(x):
                return None
        if P.c is None:
            return _Solution("optimal", x=x, y=[Fraction(0)] * mA, w=[Fraction(0)] * mE, method="guided")
        y = _rat(-res.ineqlin.marginals) if mA else []
        w = _rat(res.eqlin.marginals) if mE else []
        if P.dual_ok(y, w, dot(P.c, x)):
            return _Solution("optimal", x=x, y=y, w=w, method="guided")
        return None
    if res.status == 2:
        # Farkas system: A^T y + E^T w = 0, b.y + e.w = 1, y >= 0
        cols = mA + mE
        Aeq = np.zeros((n + 1, cols))
        if mA:
            Aeq[:n, :mA] = A.T
            Aeq[n, :mA] = b
        if mE:
            Aeq[:n, mA:] = E.T
            Aeq[n, mA:] = e
        beq = np.zeros(n + 1)
        beq[n] = 1.0
        cost = np.concatenate([np.ones(mA), np.zeros(mE)])
        fr = _linprog(cost, None, None, Aeq, beq, [(0, None)] * mA + [(None, None)] * mE)
        if fr.status != 0:
            return None
        y, w = _rat(fr.x[:mA]), _rat(fr.x[mA:])
        if P.farkas_ok(y, w):
            return _Solution("infeasible", y=y, w=w, method="guided")
        supp = [i for i in range(cols) if abs(fr.x[i]) > 1e-9]
        rows = [[(P.A[i][j] if i < mA else P.E[i - mA][j]) for i in supp] for j in range(n)]
        rows.append([(P.b[i] if i < mA else P.e[i - mA]) for i in supp])
        sol = solve_exact(rows, [Fraction(0)] * n + [Fraction(1)])
        if sol is None:
            return None
        full = [Fraction(0)] * cols
        for k, i in enumerate(supp):
            full[i] = sol[k]
        y, w = full[:mA], full[mA:]
        if P.farkas_ok(y, w):
            return _Solution("infeasible", y=y, w=w, method="guided")
        return None
    if res.status == 3 and P.c is not None:
        # recession direction with c.r = -1
        A_ub = [] if A is None else [-A]
        b_ub = [] if A is None else [np.zeros(mA)]
        A_ub.append(c.reshape(1, -1))
        b_ub.append(np.zeros(1))
        Aeq = [c.reshape(1, -1)]
        beq = [np.array([-1.0])]
        if E is not None:
            Aeq.insert(0, E)
            beq.insert(0, np.zeros(mE))
        rr = _linprog(np.zeros(n), np.vstack(A_ub), np.concatenate(b_ub), np.vstack(Aeq), np.concatenate(beq), [(None, None)] * n)
        if rr.status != 0:
            return None
        r = _rat(rr.x)
        if P.ray_ok(r):
            return _Solution("unbounded", ray=r, method="guided")
    return None


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def _reduce(cone: HCone, objective: LinearForm | None, pins: Pins) -> tuple[_Reduced, list[int]]:
    n = cone.dim
    if objective is not None and len(objective) != n:
        raise DimensionMismatch("objective lives in a different space")
    pins = {int(k): as_fraction(v) for k, v in pins.items()}
    for k in pins:
        if not 0 <= k < n:
            raise DimensionMismatch(f"pinned coordinate {k} outside a space of dimension {n}")
    free = [j for j in range(n) if j not in pins]

    def split(rows):
        out, rhs = [], []
        for f in rows:
            co = f.coeffs
            out.append([co[j] for j in free])
            rhs.append(-sum((co[k] * v for k, v in pins.items() if co[k]), Fraction(0)))
        return out, rhs

    A, b = split(cone.inequalities)
    E, e = split(cone.equalities)
    c = None if objective is None else [objective.coeffs[j] for j in free]
    return _Reduced(c, A, b, E, e, len(free)), free


def _trivial(P: _Reduced) -> _Solution:
    # no free variables: everything is decided by the pinned values
    if all(0 >= bi for bi in P.b) and all(ei == 0 for ei in P.e):
        return _Solution("optimal", x=[], y=[Fraction(0)] * len(P.A), w=[Fraction(0)] * len(P.E), method="exact")
    y = [Fraction(int(bi > 0)) for bi in P.b]
    w = [Fraction(0)] * len(P.E)
    if not any(y):
        k = next(i for i, ei in enumerate(P.e) if ei != 0)
        w[k] = Fraction(1) if P.e[k] > 0 else Fraction(-1)
    return _Solution("infeasible", y=y, w=w, method="exact")


def lp_check(
    cone: HCone,
    objective: LinearForm | None = None,
    pins: Pins | None = None,
    method: str = "auto",
) -> LPOutcome:
    """Minimise ``objective`` over ``cone`` with some coordinates pinned.

    ``objective=None`` asks for feasibility only.  ``method`` is ``"auto"``
    (float-guided, exactly verified, exact fallback) or ``"exact"``.
    """
    pins = dict(pins or {})
    P, free = _reduce(cone, objective, pins)
    sol = None
    if P.n == 0:
        sol = _trivial(P)
    elif method == "auto":
        try:
            sol = _guided(P)
        except Exception:  # pragma: no cover - solver hiccups fall through to the exact route
            log.debug("guided LP failed", exc_info=True)
            sol = None
    elif method != "exact":
        raise ValueError(f"unknown LP method {method!r}")
    if sol is None:
        sol = _Simplex(P).solve()
    return _assemble(cone, objective, pins, P, free, sol)


def _assemble(cone, objective, pins, P, free, sol: _Solution) -> LPOutcome:
    n = cone.dim
    pins = {int(k): as_fraction(v) for k, v in pins.items()}

    def lift(xfree, pinned=True):
        out = [Fraction(0)] * n
        for j, v in zip(free, xfree):
            out[j] = v
        if pinned:
            for k, v in pins.items():
                out[k] = v
        return tuple(out)

    def certificate(y, w):
        terms = [(("ge", i), v) for i, v in enumerate(y) if v] + [(("eq", i), v) for i, v in enumerate(w) if v]
        target = [Fraction(0)] * n
        for rows, mult in ((cone.inequalities, y), (cone.equalities, w)):
            for f, k in zip(rows, mult):
                if k:
                    for j in f.support():
                        target[j] += k * f.coeffs[j]
        return Certificate(terms, LinearForm.ge(target))

    if sol.status == "infeasible":
        cert = certificate(sol.y, sol.w)
        viol = cert.target.dot([pins.get(j, Fraction(0)) for j in range(n)])
        return LPOutcome("infeasible", certificate=cert, violation=viol, method=sol.method)
    if sol.status == "unbounded":
        return LPOutcome("unbounded", ray=lift(sol.ray, pinned=False), method=sol.method)
    x = lift(sol.x)
    if objective is None:
        return LPOutcome("optimal", value=Fraction(0), point=x, method=sol.method)
    value = objective.dot(x)
    return LPOutcome("optimal", value=value, point=x, certificate=certificate(sol.y, sol.w), method=sol.method)


def lp_min(cone: HCone, objective: LinearForm, pins: Pins | None = None, method: str = "auto"):
    """Minimum of ``objective`` (``None`` when unbounded, raises when infeasible)."""
    out = lp_check(cone, objective, pins, method)
    if out.status == "infeasible":
        raise ValueError("infeasible system")
    return out.value if out.bounded else None


def verify_outcome(out: LPOutcome, cone: HCone, objective: LinearForm | None = None, pins: Pins | None = None) -> bool:
    """Independent exact re-check of whatever witness ``out`` carries."""
    pins = {int(k): as_fraction(v) for k, v in (pins or {}).items()}
    if out.status == "infeasible":
        cert = out.certificate
        if cert is None or not verify_certificate(cert, cone):
            return False
        if any(cert.target.coeffs[j] for j in range(cone.dim) if j not in pins):
            return False
        return cert.target.dot([pins.get(j, 0) for j in range(cone.dim)]) < 0
    if out.status == "unbounded":
        r = out.ray
        return (
            cone.contains(r)
            and all(r[k] == 0 for k in pins)
            and objective is not None
            and objective.dot(r) < 0
        )
    x = out.point
    if x is None or not cone.contains(x) or any(x[k] != v for k, v in pins.items()):
        return False
    if objective is None:
        return True
    cert = out.certificate
    if cert is None or not verify_certificate(cert, cone):
        return False
    free = [j for j in range(cone.dim) if j not in pins]
    if any(cert.target.coeffs[j] != objective.coeffs[j] for j in free):
        return False
    lower = sum(((objective.coeffs[k] - cert.target.coeffs[k]) * v for k, v in pins.items()), Fraction(0))
    return lower == out.value == objective.dot(x)


def is_feasible(cone: HCone, pins: Pins | None = None, method: str = "auto") -> bool:
    return lp_check(cone, None, pins, method).feasible


def implies(cone: HCone, form: LinearForm, method: str = "auto") -> bool:
    """Whether ``form >= 0`` (or ``= 0``) holds on every point of ``cone``."""
    from .cone import Relation

    out = lp_check(cone, form.as_relation(Relation.GE), None, method)
    if not (out.bounded and out.value >= 0):
        return False
    if form.relation is Relation.EQ:
        out = lp_check(cone, (-form).as_relation(Relation.GE), None, method)
        return out.bounded and out.value >= 0
    return True
