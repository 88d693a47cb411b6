"""Arithmetic in the quotients D/Z and (D x R)/Z.

Points are stored by representative. The Z-actions are

    n . z      = z exp(2 pi i n alpha)
    n . (z, t) = (z exp(2 pi i n alpha), t + n |z|^2)

and R acts on the fiber coordinate, ``s . (z, t) = (z, t + s)``.

Exact orbit equality over all of Z cannot be decided in floating point, so
equality is decided inside a :class:`MatchWindow` ``|n| <= n_max`` whose angle
tolerance is small enough that at most one integer can match.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import (
    AmbiguousMatch,
    BranchJumpWithoutZero,
    InputError,
    NotSameFiber,
    WindowExhausted,
)
from .rotation import RotationNumber, min_orbit_gap, turns

TOL_RADIUS = 1e-12
DELTA_ZERO = 1e-9
FIBER_TOL = 1e-9
RADIUS_TOL = 1e-9
N_MAX = 1024


def _check_disk(z) -> complex:
    z = complex(z)
    if abs(z) > 1.0 + TOL_RADIUS:
        raise InputError(f"{z} lies outside the closed unit disk")
    return z


def _rotor(alpha, n) -> complex:
    return cmath.exp(2j * math.pi * float(turns(alpha, n)))


@dataclass(frozen=True)
class DRep:
    """A point of D/Z, given by a representative in the closed disk."""

    z: complex

    def __post_init__(self):
        object.__setattr__(self, "z", _check_disk(self.z))


@dataclass(frozen=True)
class WRep:
    """A point ``[z, t]`` of (D x R)/Z, given by a representative."""

    z: complex
    t: float

    def __post_init__(self):
        object.__setattr__(self, "z", _check_disk(self.z))
        object.__setattr__(self, "t", float(self.t))


@dataclass(frozen=True)
class MatchWindow:
    """Finite decision window for orbit equality.

    ``angle_tol`` is measured in turns (fractions of a full circle). Left as
    ``None`` it resolves to just under half of ``min_orbit_gap(alpha, 2 * n_max)``:
    two matches ``n1 != n2`` would force ``||(n1 - n2) alpha|| <= 2 * angle_tol``
    with ``|n1 - n2| <= 2 * n_max``, which that choice rules out.
    """

    n_max: int = N_MAX
    angle_tol: float | None = None
    delta_zero: float = DELTA_ZERO
    fiber_tol: float = FIBER_TOL
    radius_tol: float = RADIUS_TOL

    def __post_init__(self):
        if self.n_max < 1:
            raise InputError("n_max must be >= 1")
        for name in ("delta_zero", "fiber_tol", "radius_tol"):
            if getattr(self, name) <= 0:
                raise InputError(f"{name} must be positive")
        if self.angle_tol is not None and self.angle_tol <= 0:
            raise InputError("angle_tol must be positive")

    def resolve(self, alpha: RotationNumber) -> "MatchWindow":
        """Return a copy with ``angle_tol`` filled in and validated against ``alpha``."""
        gap = min_orbit_gap(alpha, 2 * self.n_max)
        if self.angle_tol is None:
            return replace(self, angle_tol=0.49 * gap)
        if 2 * self.angle_tol >= gap:
            raise InputError(
                f"angle_tol={self.angle_tol:g} admits ambiguous matches; "
                f"need < {gap / 2:g} for n_max={self.n_max}"
            )
        return self


_DEFAULT_WINDOWS: dict[tuple, MatchWindow] = {}


def _window(alpha: RotationNumber, win: MatchWindow | None) -> MatchWindow:
    win = win or MatchWindow()
    if win.angle_tol is not None:
        return win
    key = (float(alpha), win)
    if key not in _DEFAULT_WINDOWS:
        _DEFAULT_WINDOWS[key] = win.resolve(alpha)
    return _DEFAULT_WINDOWS[key]


# actions


def act_D(alpha, n: int, z) -> complex:
    return _check_disk(z) * _rotor(alpha, n)


def act_W(alpha, n: int, w: WRep) -> WRep:
    z = w.z
    return WRep(z * _rotor(alpha, n), w.t + n * abs(z) ** 2)


def act_R(s: float, w: WRep) -> WRep:
    return WRep(w.z, w.t + s)


def project(w: WRep) -> DRep:
    return DRep(w.z)


# orbit matching


def match_turns(alpha, targets, n_max: int, angle_tol: float) -> np.ndarray:
    """Find, for each target angle (in turns), the unique ``|n| <= n_max``
    with ``||n alpha - turn|| <= angle_tol``.

    Returns an int array with ``n_max + 1`` marking "no match". Raises
    :class:`AmbiguousMatch` if any target has two matches.
    """
    targets = np.atleast_1d(np.asarray(targets, dtype=float))
    ns = np.arange(-n_max, n_max + 1)
    nalpha = turns(alpha, ns)
    out = np.full(targets.shape, n_max + 1, dtype=np.int64)
    # Bound memory of the (targets x window) distance matrix.
    step = max(1, (1 << 22) // ns.size)
    for lo in range(0, targets.size, step):
        block = targets[lo:lo + step]
        d = nalpha[None, :] - block[:, None]
        d = np.abs(d - np.rint(d))
        hits = d <= angle_tol
        counts = hits.sum(axis=1)
        if np.any(counts > 1):
            i = int(np.argmax(counts > 1))
            raise AmbiguousMatch(
                f"turn {block[i]:.17g} matches n = {ns[hits[i]].tolist()}"
            )
        found = counts == 1
        out[lo:lo + step][found] = ns[np.argmax(hits[found], axis=1)]
    return out


def _orbit_index(alpha, a: complex, b: complex, win: MatchWindow) -> int:
    """Unique ``n`` with ``n . a == b`` in the window; raises on failure."""
    ra, rb = abs(a), abs(b)
    if abs(ra - rb) > win.radius_tol * (1.0 + ra):
        raise NotSameFiber(f"|{a}| and |{b}| differ; points lie on different circles")
    if min(ra, rb) <= win.delta_zero:
        return 0
    turn = cmath.phase(b / a) / (2 * math.pi)
    n = int(match_turns(alpha, turn, win.n_max, win.angle_tol)[0])
    if n > win.n_max:
        raise WindowExhausted(
            f"no |n| <= {win.n_max} rotates {a} onto {b}"
        )
    return n


def equal_in_D(alpha, a: DRep, b: DRep, win: MatchWindow | None = None) -> int | None:
    """Orbit equality in D/Z.

    Returns the unique ``n`` with ``n . a == b`` (which may be ``0``), or
    ``None`` when no integer in the window relates the points. Test the result
    with ``is not None``.
    """
    win = _window(alpha, win)
    try:
        return _orbit_index(alpha, a.z, b.z, win)
    except (NotSameFiber, WindowExhausted):
        return None


def _fiber_close(t1: float, t2: float, tol: float) -> bool:
    return abs(t2 - t1) <= tol * (1.0 + max(abs(t1), abs(t2)))


def equal_in_W(alpha, a: WRep, b: WRep, win: MatchWindow | None = None) -> int | None:
    """Orbit equality in (D x R)/Z; same return convention as :func:`equal_in_D`."""
    win = _window(alpha, win)
    n = equal_in_D(alpha, project(a), project(b), win)
    if n is None:
        return None
    if abs(a.z) <= win.delta_zero:
        return 0 if _fiber_close(a.t, b.t, win.fiber_tol) else None
    return n if _fiber_close(a.t + n * abs(a.z) ** 2, b.t, win.fiber_tol) else None


def divide(alpha, y1: WRep, y2: WRep, win: MatchWindow | None = None) -> float:
    """The unique ``s`` with ``s . y1 == y2`` in (D x R)/Z."""
    win = _window(alpha, win)
    m = _orbit_index(alpha, y1.z, y2.z, win)
    if abs(y1.z) <= win.delta_zero:
        return y2.t - y1.t
    return y2.t - y1.t - m * abs(y1.z) ** 2


# path division


@dataclass(frozen=True)
class SampledPath:
    """Lifts ``(w1(t), tau1(t))`` and ``(w2(t), tau2(t))`` on a common grid."""

    ts: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    tau1: np.ndarray
    tau2: np.ndarray

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=float)
        arrays = {
            "w1": np.asarray(self.w1, dtype=complex),
            "w2": np.asarray(self.w2, dtype=complex),
            "tau1": np.asarray(self.tau1, dtype=float),
            "tau2": np.asarray(self.tau2, dtype=float),
        }
        if ts.ndim != 1 or ts.size == 0:
            raise InputError("ts must be a non-empty 1-d grid")
        if np.any(np.diff(ts) <= 0):
            raise InputError("ts must be strictly increasing")
        for name, arr in arrays.items():
            if arr.shape != ts.shape:
                raise InputError(f"{name} has shape {arr.shape}, expected {ts.shape}")
        for name in ("w1", "w2"):
            if np.any(np.abs(arrays[name]) > 1.0 + TOL_RADIUS):
                raise InputError(f"{name} leaves the closed unit disk")
        object.__setattr__(self, "ts", ts)
        for name, arr in arrays.items():
            object.__setattr__(self, name, arr)

    def __len__(self):
        return self.ts.size


@dataclass(frozen=True)
class PathDivision:
    """Result of :func:`divide_path`.

    ``runs`` lists maximal runs of non-degenerate nodes as half-open index
    ranges ``(start, stop, m)``.
    """

    ts: np.ndarray
    s: np.ndarray
    m: np.ndarray
    degenerate: np.ndarray = field(repr=False)
    runs: list[tuple[int, int, int]]

    def summary(self) -> dict:
        h = np.diff(self.ts)
        ds = np.diff(self.s) / h if self.ts.size > 1 else np.zeros(0)
        jump = float(np.max(np.abs(np.diff(ds)))) if ds.size > 1 else 0.0
        return {
            "nodes": int(self.ts.size),
            "degenerate_nodes": int(self.degenerate.sum()),
            "branch_runs": [
                {"t_start": float(self.ts[a]), "t_end": float(self.ts[b - 1]), "m": m}
                for a, b, m in self.runs
            ],
            "max_ds_jump": jump,
        }


def divide_path(
    alpha,
    path: SampledPath,
    win: MatchWindow | None = None,
    delta_zero: float | None = None,
) -> PathDivision:
    """Divide the second lift by the first, node by node.

    Off the axis the branch integer ``m(t)`` comes from orbit matching and
    ``s = tau2 - tau1 - m |w1|^2``; on the axis ``s = tau2 - tau1``. The
    branch integer must be constant along every maximal run of off-axis
    nodes; it may change across axis nodes. Axis nodes report the ``m`` of
    the nearest off-axis node (the earlier one on ties), or 0 if none exists.
    Path endpoints are treated like any other node.
    """
    win = _window(alpha, win)
    if delta_zero is not None:
        win = replace(win, delta_zero=delta_zero)
    r1 = np.abs(path.w1)
    r2 = np.abs(path.w2)
    degenerate = np.minimum(r1, r2) <= win.delta_zero
    live = ~degenerate

    bad_radius = np.abs(r1 - r2) > win.radius_tol * (1.0 + r1)
    if np.any(bad_radius):
        i = int(np.argmax(bad_radius))
        raise NotSameFiber(f"node t={path.ts[i]:g}: |w1| != |w2|")

    m = np.zeros(path.ts.shape, dtype=np.int64)
    if np.any(live):
        turns = np.angle(path.w2[live] / path.w1[live]) / (2 * math.pi)
        found = match_turns(alpha, turns, win.n_max, win.angle_tol)
        if np.any(found > win.n_max):
            i = np.flatnonzero(live)[int(np.argmax(found > win.n_max))]
            raise NotSameFiber(
                f"node t={path.ts[i]:g}: w2 not in the orbit of w1 within |n| <= {win.n_max}"
            )
        m[live] = found

    runs = []
    idx = 0
    n = path.ts.size
    while idx < n:
        if degenerate[idx]:
            idx += 1
            continue
        start = idx
        while idx < n and live[idx]:
            if m[idx] != m[start]:
                raise BranchJumpWithoutZero(
                    f"m jumps {m[idx - 1]} -> {m[idx]} between t={path.ts[idx - 1]:g} "
                    f"and t={path.ts[idx]:g} without crossing the axis"
                )
            idx += 1
        runs.append((start, idx, int(m[start])))

    if runs and np.any(degenerate):
        live_idx = np.flatnonzero(live)
        for i in np.flatnonzero(degenerate):
            j = np.searchsorted(live_idx, i)
            before = live_idx[j - 1] if j > 0 else None
            after = live_idx[j] if j < live_idx.size else None
            if after is None or (before is not None and i - before <= after - i):
                m[i] = m[before]
            else:
                m[i] = m[after]

    s = path.tau2 - path.tau1 - np.where(degenerate, 0.0, m * r1**2)
    return PathDivision(path.ts, s, m, degenerate, runs)
