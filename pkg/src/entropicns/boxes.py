"""Probability boxes p(outcomes | settings), named examples, mixing and the GHZ family."""

from __future__ import annotations

import csv
import io
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

log = logging.getLogger(__name__)


@dataclass
class Box:
    """``table[x_1, ..., x_n, a_1, ..., a_n] = p(a | x)``.

    Rational boxes hold an object array of :class:`~fractions.Fraction`.
    """

    settings: tuple[int, ...]
    outcomes: tuple[int, ...]
    table: np.ndarray
    name: str = ""

    def __post_init__(self):
        self.settings = tuple(int(s) for s in self.settings)
        self.outcomes = tuple(int(d) for d in self.outcomes)
        if len(self.settings) != len(self.outcomes):
            raise ValueError("one settings count and one outcome count per party")
        shape = self.settings + self.outcomes
        if self.table.shape != shape:
            raise ValueError(f"table shape {self.table.shape} does not match {shape}")

    @property
    def parties(self) -> int:
        return len(self.settings)

    @property
    def exact(self) -> bool:
        return self.table.dtype == object

    def float_table(self) -> np.ndarray:
        return self.table.astype(float)

    def __call__(self, outcome: Sequence[int], setting: Sequence[int]):
        return self.table[tuple(setting) + tuple(outcome)]

    def is_normalized(self, tol: float = 1e-12) -> bool:
        sums = self.table.sum(axis=tuple(range(self.parties, 2 * self.parties)))
        if self.exact:
            return all(s == 1 for s in np.ravel(sums)) and all(v >= 0 for v in self.table.flat)
        return bool(np.all(np.abs(sums - 1) <= tol) and np.all(self.table >= -tol))

    def marginal(self, keep: Sequence[int], setting: Sequence[int]) -> np.ndarray:
        """Outcome distribution of parties ``keep`` for a full setting tuple."""
        joint = self.table[tuple(setting)]
        drop = tuple(p for p in range(self.parties) if p not in keep)
        return joint.sum(axis=drop) if drop else joint

    def is_nonsignaling(self, tol: float = 1e-12) -> bool:
        """Every marginal of a party subset is independent of the other parties' settings."""
        n = self.parties
        for r in range(1, n):
            for keep in itertools.combinations(range(n), r):
                ref: dict[tuple, np.ndarray] = {}
                for setting in itertools.product(*[range(m) for m in self.settings]):
                    key = tuple(setting[p] for p in keep)
                    m = self.marginal(keep, setting)
                    if key in ref:
                        diff = m - ref[key]
                        if self.exact:
                            if any(v != 0 for v in np.ravel(diff)):
                                return False
                        elif np.max(np.abs(diff)) > tol:
                            return False
                    else:
                        ref[key] = m
        return True

    def relabel_outcomes(self, party: int, perm: Sequence[int], setting: int | None = None) -> "Box":
        """Permute the outcomes of one party (for one setting or all)."""
        t = self.table.copy()
        idx = [slice(None)] * (2 * self.parties)
        if setting is not None:
            idx[party] = setting
        src = tuple(idx)
        block = t[src]
        axis = self.parties + party - (1 if setting is not None else 0)
        t[src] = np.take(block, list(perm), axis=axis)
        return Box(self.settings, self.outcomes, t, self.name)


def _rational_box(settings, outcomes, rule: Callable[[tuple, tuple], Fraction], name="") -> Box:
    shape = tuple(settings) + tuple(outcomes)
    t = np.empty(shape, dtype=object)
    for x in itertools.product(*[range(m) for m in settings]):
        for a in itertools.product(*[range(d) for d in outcomes]):
            t[x + a] = Fraction(rule(x, a))
    return Box(tuple(settings), tuple(outcomes), t, name)


def _delta(cond: bool, weight) -> Fraction:
    return Fraction(weight) if cond else Fraction(0)


def _xor(*v):
    out = 0
    for b in v:
        out ^= b
    return out


_NAMED: dict[str, Callable[[], Box]] = {
    "pr": lambda: _rational_box((2, 2), (2, 2), lambda x, a: _delta(_xor(*a) == x[0] & x[1], Fraction(1, 2)), "pr"),
    "pc2": lambda: _rational_box((2, 2), (2, 2), lambda x, a: _delta(_xor(*a) == 0, Fraction(1, 2)), "pc2"),
    "xyz": lambda: _rational_box(
        (2, 2, 2), (2, 2, 2), lambda x, a: _delta(_xor(*a) == x[0] & x[1] & x[2], Fraction(1, 4)), "xyz"),
    "nltri": lambda: _rational_box(
        (2, 2, 2), (2, 2, 2),
        lambda x, a: _delta(_xor(*a) == _xor(x[1] & x[2], x[0], x[1], x[2]), Fraction(1, 4)), "nltri"),
    "pc3": lambda: _rational_box((2, 2, 2), (2, 2, 2), lambda x, a: _delta(_xor(*a) == 0, Fraction(1, 4)), "pc3"),
    # p(a, b, c | x) = 1/4 when a xor b = x c; Bob and Charlie have no setting choice
    "biloc_activation": lambda: _rational_box(
        (2, 1, 1), (2, 2, 2), lambda x, a: _delta(a[0] ^ a[1] == x[0] & a[2], Fraction(1, 4)), "biloc_activation"),
    "genuine_nonbilocal": lambda: _rational_box(
        (2, 2, 2), (2, 2, 2),
        lambda x, a: _delta(
            _xor(*a) == _xor(x[0] & x[1] & x[2], x[0] & x[1], x[0] & x[2], x[1] & x[2], x[2], 1), Fraction(1, 8))
        + _delta(_xor(*a) == 0, Fraction(1, 8)),
        "genuine_nonbilocal"),
}

NAMED_BOXES = tuple(_NAMED)


def named_box(name: str) -> Box:
    try:
        return _NAMED[name]()
    except KeyError:
        raise KeyError(f"unknown box {name!r}; known: {', '.join(_NAMED)}") from None


def mix(boxes: Sequence[Box], weights: Sequence) -> Box:
    """Convex combination; exact when every box and weight is rational."""
    if len(boxes) != len(weights) or not boxes:
        raise ValueError("need one weight per box")
    shape = boxes[0].table.shape
    for b in boxes:
        if b.table.shape != shape:
            raise ValueError("boxes have different shapes")
    exact = all(b.exact for b in boxes) and all(isinstance(w, (int, Fraction)) for w in weights)
    if exact:
        ws = [Fraction(w) for w in weights]
        if any(w < 0 for w in ws) or sum(ws) != 1:
            raise ValueError("weights must be nonnegative and sum to 1")
        t = sum((b.table * w for b, w in zip(boxes, ws)), np.zeros(shape, dtype=object) + Fraction(0))
    else:
        ws = [float(w) for w in weights]
        if any(w < 0 for w in ws) or abs(sum(ws) - 1) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")
        t = sum(b.float_table() * w for b, w in zip(boxes, ws))
    return Box(boxes[0].settings, boxes[0].outcomes, t, "mix")


def uniform(settings: Sequence[int], outcomes: Sequence[int], exact: bool = True) -> Box:
    shape = tuple(settings) + tuple(outcomes)
    total = math.prod(outcomes)
    if exact:
        t = np.empty(shape, dtype=object)
        t.fill(Fraction(1, total))
    else:
        t = np.full(shape, 1.0 / total)
    return Box(tuple(settings), tuple(outcomes), t, "uniform")


def white_noise(box: Box, visibility) -> Box:
    """``v * box + (1 - v) * uniform``."""
    v = visibility
    if not 0 <= v <= 1:
        raise ValueError("visibility must lie in [0, 1]")
    exact = box.exact and isinstance(v, (int, Fraction))
    u = uniform(box.settings, box.outcomes, exact)
    if exact:
        return mix([box, u], [Fraction(v), 1 - Fraction(v)])
    return mix([box, u], [float(v), 1.0 - float(v)])


# ---------------------------------------------------------------------------
# GHZ states with Fourier-basis measurements
# ---------------------------------------------------------------------------


def _as_phases(phases) -> np.ndarray:
    a = np.asarray(phases, dtype=float).reshape(3, 2)
    if not np.all(np.isfinite(a)):
        raise ValueError("phases must be finite")
    return a


def ghz_residue_probs(d: int, t: float | np.ndarray) -> np.ndarray:
    """``q_r = |sum_j exp(2 pi i j (r + t) / d)|^2 / d^4`` for r = 0..d-1.

    Equal to ``csc^2(pi (r+t)/d) sin^2(pi (r+t)) / d^4`` with its removable
    singularity filled in, but free of any division.
    """
    t = np.asarray(t, dtype=float)
    r = np.arange(d)
    j = np.arange(d)
    phase = 2 * np.pi * np.multiply.outer(np.add.outer(t, r), j) / d
    s = np.exp(1j * phase).sum(axis=-1)
    return (np.abs(s) ** 2) / d**4


def ghz_box(d: int, phases) -> Box:
    """p(a,b,c|x,y,z) for the d-dimensional GHZ state and the measurement
    bases |k>_{p,m} with phase offsets ``phases[p][m]``."""
    if d < 1:
        raise ValueError("dimension must be positive")
    al = _as_phases(phases)
    t = np.empty((2, 2, 2, d, d, d))
    abc = np.add.outer(np.add.outer(np.arange(d), np.arange(d)), np.arange(d)) % d
    for x, y, z in itertools.product(range(2), repeat=3):
        q = ghz_residue_probs(d, al[0, x] + al[1, y] + al[2, z])
        t[x, y, z] = q[abc]
    return Box((2, 2, 2), (d, d, d), t, f"ghz{d}")


# Triples and pairs of the ten-term S_L|NS (setting bits for A, B, C).
_SLNS_PLUS = ((1, 1, 0), (1, 0, 0), (1, 0, 1), (0, 1, 0), (0, 1, 1))
_SLNS_MINUS = ((1, 1, 1),)
_SLNS_PAIRS = 4


def _triple_entropy(d: int, t: np.ndarray) -> np.ndarray:
    q = ghz_residue_probs(d, t)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(q > 0, q * np.log2(np.where(q > 0, q, 1.0)), 0.0)
    return -(d * d) * terms.sum(axis=-1)


def ghz_s_lns(d: int, phases) -> float:
    """S_L|NS on the GHZ box in O(d^2) without building the table.

    Every pair marginal of the GHZ box is uniform (H = 2 log2 d) and each
    triple entropy depends only on the summed phase.
    """
    al = _as_phases(phases)
    ts = lambda xyz: al[0, xyz[0]] + al[1, xyz[1]] + al[2, xyz[2]]  # noqa: E731
    plus = sum(float(_triple_entropy(d, ts(k))) for k in _SLNS_PLUS)
    minus = sum(float(_triple_entropy(d, ts(k))) for k in _SLNS_MINUS)
    return plus - minus - _SLNS_PAIRS * 2 * math.log2(d)


@dataclass
class OptimizerConfig:
    starts: int = 24
    seed: int = 0
    xatol: float = 1e-9
    fatol: float = 1e-12
    maxiter: int = 4000


@dataclass
class GHZOptimum:
    d: int
    phases: np.ndarray
    value: float
    converged: bool
    start_values: list[float]  # objective at each starting point


def _start_points(cfg: OptimizerConfig) -> np.ndarray:
    rng = np.random.default_rng(cfg.seed)
    corners = []
    # lattice corners: phases in {0, 1/4} on a few patterns
    for bits_ in itertools.product((0.0, 0.25), repeat=3):
        corners.append([0.0, bits_[0], 0.0, bits_[1], 0.0, bits_[2]])
    pts = np.array(corners[: min(len(corners), cfg.starts)])
    extra = cfg.starts - len(pts)
    if extra > 0:
        pts = np.vstack([pts, rng.random((extra, 6))])
    return pts


def optimize_ghz_violation(d: int, config: OptimizerConfig | None = None,
                           objective: Callable[[int, np.ndarray], float] | None = None) -> GHZOptimum:
    """Minimise S_L|NS over the six measurement phases (multi-start Nelder-Mead)."""
    cfg = config or OptimizerConfig()
    f = objective or ghz_s_lns
    best = None
    starts = []
    for x0 in _start_points(cfg):
        v0 = f(d, x0)
        res = minimize(lambda x: f(d, x), x0, method="Nelder-Mead",
                       options={"xatol": cfg.xatol, "fatol": cfg.fatol, "maxiter": cfg.maxiter})
        val = float(res.fun)
        if val > v0:  # never report worse than the start
            val, xs, ok = v0, x0, False
        else:
            xs, ok = res.x, bool(res.success)
        starts.append(v0)
        if best is None or val < best[1]:
            best = (np.mod(xs, 1.0), val, ok)
    phases, value, ok = best
    return GHZOptimum(d, phases.reshape(3, 2), value, ok, starts)


def ghz_scan(d_values: Iterable[int], config: OptimizerConfig | None = None,
             progress: Callable[[int, float], None] | None = None) -> list[GHZOptimum]:
    out = []
    for d in d_values:
        r = optimize_ghz_violation(d, config)
        out.append(r)
        if progress:
            progress(d, r.value)
    return out


SCAN_COLUMNS = ["d", "alpha_1_0", "alpha_1_1", "alpha_2_0", "alpha_2_1", "alpha_3_0", "alpha_3_1", "S_value"]


def scan_csv(results: Sequence[GHZOptimum]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_COLUMNS)
    for r in results:
        w.writerow([r.d] + [format(float(a), ".17g") for a in np.ravel(r.phases)] + [format(r.value, ".17g")])
    return buf.getvalue()


def read_scan_csv(text: str) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return [{k: (int(v) if k == "d" else float(v)) for k, v in row.items()} for row in rows]


def evaluate(ineq, box: Box, exact: bool = False):
    """Value of a named inequality's left-hand side on ``box``.

    Float by default; ``exact`` returns a Fraction for dyadic rational boxes.
    """
    from .entropy import entropy_vector

    sc = ineq.scenario
    if box.settings != tuple(sc.settings):
        raise ValueError(f"box settings {box.settings} do not match scenario {sc.settings}")
    value = ineq.evaluate(entropy_vector(box, sc, exact=exact))
    return value if exact else float(value)
