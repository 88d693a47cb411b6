"""Bundle-level constructions over D/Z.

* the trivialization of the pullback along D -> D/Z, ``(z, t) -> (z, [z, t])``
* the restriction to the boundary circle, whose cocycle is the constant 1
* the contraction ``[z] -> [s z]`` of the base
* a tester for the equivariance any horizontal-lift map would have to satisfy

A lift candidate is any callable ``H(z_path, t0) -> t_path`` returning fiber
values on the grid of the base path. If ``H`` came from a connection, then for
every integer ``n``

    H(n . z, t0 + n |z(0)|^2)(s) = H(z, t0)(s) + n |z(s)|^2.

Along radial paths from the origin this forces a function ``G`` on the circle
with ``G(z1 exp(2 pi i n alpha)) = G(z1) + n``, which has no solution (see
:func:`warpedbundle.cohomology.certify_obstruction`). The tester measures how
badly a given candidate fails.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .cohomology import CircleFunction, ClassVerdict, class_is_trivial
from .exceptions import GridMismatch, InitialValueMismatch, InputError
from .quotient import DRep, MatchWindow, WRep, _check_disk, _rotor, act_W, divide

LiftCandidate = Callable[[np.ndarray, float], np.ndarray]

RADIAL_NODES = 65  # s_j = j / 64


def pullback_forward(z, t: float) -> tuple[complex, WRep]:
    z = _check_disk(z)
    return z, WRep(z, t)


def pullback_inverse(alpha, z, y: WRep, win: MatchWindow | None = None) -> float:
    """The unique ``t`` with ``[z, t] == y``."""
    return divide(alpha, WRep(z, 0.0), y, win)


@dataclass(frozen=True)
class BoundaryCocycle:
    """The restriction of the bundle to the circle ``|z| = 1``.

    On that circle ``n . (z, t) = (z exp(2 pi i n alpha), t + n)``, so the
    cocycle is represented by the constant function 1.
    """

    alpha: object
    f: CircleFunction
    radius: float = 1.0

    def fiber_shift(self, n: int, z: complex, t: float = 0.0) -> float:
        return act_W(self.alpha, n, WRep(z, t)).t - t

    def verdict(self, **tols) -> ClassVerdict:
        return class_is_trivial(self.alpha, self.f, **tols)


def restrict_boundary(alpha, K: int = 0) -> BoundaryCocycle:
    return BoundaryCocycle(alpha, CircleFunction.constant(1.0, K))


def contract(s: float, d: DRep) -> DRep:
    if not 0.0 <= s <= 1.0:
        raise InputError(f"contraction parameter must lie in [0, 1], got {s}")
    return DRep(s * d.z)


# lift candidates


def trivial_lift(z_path: np.ndarray, t0: float) -> np.ndarray:
    """Keep the fiber coordinate constant."""
    return np.full(np.shape(z_path), float(t0))


def gauge_lift(G: CircleFunction) -> LiftCandidate:
    """Candidate ``H(z, t0)(s) = t0 + G(u(s)) |z(s)|^2 - G(u(0)) |z(0)|^2``
    with ``u = z / |z|``; the ``G`` term is dropped where ``z = 0``."""

    def weighted(z):
        z = np.asarray(z, dtype=complex)
        return np.where(np.abs(z) > 0, G(np.angle(z)) * np.abs(z) ** 2, 0.0)

    def lift(z_path, t0):
        w = weighted(z_path)
        return t0 + w - w[0]

    lift.G = G
    return lift


@dataclass(frozen=True)
class BasePath:
    """A sampled base path ``z(s)``; ``unit`` is set for radial paths ``s * unit``."""

    path_id: str
    s: np.ndarray
    z: np.ndarray
    unit: complex | None = None


def radial_path(unit: complex, nodes: int = RADIAL_NODES, path_id: str | None = None) -> BasePath:
    unit = complex(unit)
    if abs(abs(unit) - 1.0) > 1e-12:
        raise InputError(f"radial path direction {unit} is not a unit complex number")
    s = np.linspace(0.0, 1.0, nodes)
    return BasePath(path_id or f"radial:{np.angle(unit):.12g}", s, s * unit, unit)


def radial_paths(thetas: Iterable[float], nodes: int = RADIAL_NODES) -> list[BasePath]:
    return [radial_path(np.exp(1j * th), nodes) for th in thetas]


@dataclass(frozen=True)
class EquivarianceReport:
    max_violation: float
    entries: list[dict]
    boundary_samples: list[dict] = field(default_factory=list)

    def per_n(self) -> dict[int, float]:
        out: dict[int, float] = {}
        for e in self.entries:
            out[e["n"]] = max(out.get(e["n"], 0.0), e["sup_s"])
        return out

    def to_dict(self) -> dict:
        return {
            "max_violation": self.max_violation,
            "entries": self.entries,
            "boundary_samples": self.boundary_samples,
        }


def _run(cand: LiftCandidate, z: np.ndarray, t0: float) -> np.ndarray:
    out = np.asarray(cand(z, t0), dtype=float)
    if out.shape != z.shape:
        raise GridMismatch(f"candidate returned shape {out.shape}, expected {z.shape}")
    if abs(out[0] - t0) > 1e-12:
        raise InitialValueMismatch(f"candidate starts at {out[0]!r}, expected {t0!r}")
    return out


def test_lift_equivariance(
    alpha,
    cand: LiftCandidate,
    paths: Sequence[BasePath],
    n_set: Iterable[int],
    t0: float = 0.0,
) -> EquivarianceReport:
    """Measure ``|H(n . z, t0 + n|z(0)|^2) - H(z, t0) - n |z|^2|`` on every path.

    For radial paths the endpoint values ``H(z, 0)(1)`` and
    ``H(n . z, 0)(1)`` are recorded as boundary samples: for a candidate built
    from ``G`` they are ``G(z1)`` and ``G(z1 exp(2 pi i n alpha))``.
    """
    entries = []
    samples: dict[float, float] = {}
    worst = 0.0
    n_set = list(n_set)
    for path in paths:
        z = np.asarray(path.z, dtype=complex)
        r2 = np.abs(z) ** 2
        base = _run(cand, z, t0)
        radial = path.unit is not None
        if radial:
            theta = float(np.angle(path.unit))
            samples.setdefault(theta, float(_run(cand, z, 0.0)[-1]))
        for n in n_set:
            zn = z * _rotor(alpha, n)
            moved = _run(cand, zn, t0 + n * r2[0])
            viol = np.abs(moved - base - n * r2)
            i = int(np.argmax(viol))
            entries.append({
                "n": int(n),
                "path_id": path.path_id,
                "sup_s": float(viol[i]),
                "at_s": float(path.s[i]),
            })
            worst = max(worst, float(viol[i]))
            if radial and n != 0:
                theta_n = float(np.angle(path.unit * _rotor(alpha, n)))
                samples.setdefault(theta_n, float(_run(cand, zn, 0.0)[-1]))
    boundary = [{"theta": th, "value": v} for th, v in samples.items()]
    return EquivarianceReport(worst, entries, boundary)


# pytest would otherwise collect the tester as a test when imported into a test module
test_lift_equivariance.__test__ = False
