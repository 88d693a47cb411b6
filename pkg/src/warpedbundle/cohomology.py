"""Fourier-spectral cohomology of the rotation on circles and on the disk.

Functions on the circle are truncated Fourier series
``f(theta) = sum_{|k| <= K} c_k exp(i k theta)``; functions on the disk are a
radial grid of such series. The rotation by ``2 pi alpha`` acts diagonally on
coefficients, so the coboundary operator

    (delta_alpha sigma)(z) = sigma(z exp(2 pi i alpha)) - sigma(z)

multiplies ``c_k`` by ``exp(2 pi i k alpha) - 1``. Its image misses every
function whose circle means are nonzero, and inverting it divides by the small
divisors ``|exp(2 pi i k alpha) - 1|``.

All verdicts here are relative to the truncation degree ``K`` and radial grid
they were computed on; each report records both.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Union

import numpy as np

from .exceptions import (
    InputError,
    MalformedTable,
    RadiusOutOfRange,
    ResidualTooLarge,
    SmallDivisorOverflow,
    UnknownBuiltin,
)
from .rotation import turns

MEAN_TOL = 1e-10
SOLVE_TOL = 1e-9
OVERFLOW_GUARD = 1e12
DEFAULT_J = 32
R_ZERO_TOL = 1e-12


def default_radii(J: int = DEFAULT_J) -> np.ndarray:
    return np.linspace(0.0, 1.0, J + 1)


def _modes(K: int) -> np.ndarray:
    return np.arange(-K, K + 1)


def rotation_multipliers(alpha, K: int, n: int = 1) -> np.ndarray:
    """``exp(2 pi i k n alpha) - 1`` for ``k = -K..K``."""
    return np.exp(2j * np.pi * turns(alpha, n * _modes(K))) - 1.0


def _symmetrize(c: np.ndarray) -> np.ndarray:
    """Project coefficient rows onto real-valued functions."""
    return 0.5 * (c + np.conj(c[..., ::-1]))


@dataclass(frozen=True)
class CircleFunction:
    """Truncated real Fourier series on the unit circle.

    ``coeffs[k + K]`` holds ``c_k``.
    """

    K: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (2 * self.K + 1,):
            raise InputError(f"expected {2 * self.K + 1} coefficients, got {c.shape}")
        object.__setattr__(self, "coeffs", c)

    def __getitem__(self, k: int) -> complex:
        return complex(self.coeffs[k + self.K]) if abs(k) <= self.K else 0j

    @property
    def mean(self) -> float:
        return float(self.coeffs[self.K].real)

    def __call__(self, theta):
        """Evaluate at angles ``theta`` (radians)."""
        theta = np.asarray(theta, dtype=float)
        phases = np.exp(1j * np.multiply.outer(theta, _modes(self.K)))
        return (phases @ self.coeffs).real

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    @classmethod
    def from_callable(cls, g: Callable, K: int) -> "CircleFunction":
        return cls(K, _quadrature(lambda th: g(np.exp(1j * th)), K))

    @classmethod
    def constant(cls, value: float, K: int = 0) -> "CircleFunction":
        c = np.zeros(2 * K + 1, dtype=complex)
        c[K] = value
        return cls(K, c)


@dataclass(frozen=True)
class DiskFunction:
    """Truncated angular Fourier series on a grid of concentric circles.

    ``coeffs[j, k + K]`` holds ``c_k(radii[j])``. Between grid radii the
    coefficients are interpolated linearly.
    """

    K: int
    radii: np.ndarray
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=float)
        c = np.asarray(self.coeffs, dtype=complex)
        if radii.ndim != 1 or radii.size == 0:
            raise InputError("radii must be a non-empty 1-d array")
        if np.any(np.diff(radii) <= 0) or radii[0] < 0 or radii[-1] > 1:
            raise InputError("radii must be strictly increasing within [0, 1]")
        if c.shape != (radii.size, 2 * self.K + 1):
            raise InputError(
                f"coefficient array {c.shape} does not match "
                f"({radii.size}, {2 * self.K + 1})"
            )
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "coeffs", c)

    @property
    def J(self) -> int:
        """Number of radial intervals (slices minus one)."""
        return self.radii.size - 1

    def slice(self, j: int) -> CircleFunction:
        return CircleFunction(self.K, self.coeffs[j].copy())

    def coeff(self, k: int) -> np.ndarray:
        """``c_k`` at every radius."""
        if abs(k) > self.K:
            return np.zeros(self.radii.size, dtype=complex)
        return self.coeffs[:, k + self.K]

    def _like(self, coeffs) -> "DiskFunction":
        return DiskFunction(self.K, self.radii, coeffs)

    def _check_compatible(self, other: "DiskFunction"):
        if self.K != other.K or not np.array_equal(self.radii, other.radii):
            raise InputError("disk functions live on different grids")

    def __add__(self, other):
        self._check_compatible(other)
        return self._like(self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check_compatible(other)
        return self._like(self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return self._like(self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return self._like(-self.coeffs)

    def circle_norms(self) -> np.ndarray:
        """L2 norm of each radial slice (normalized arc measure)."""
        return np.sqrt(np.sum(np.abs(self.coeffs) ** 2, axis=1))

    def without_means(self) -> "DiskFunction":
        c = self.coeffs.copy()
        c[:, self.K] = 0.0
        return self._like(c)


# sampling and evaluation


def _quadrature(values_at: Callable, K: int) -> np.ndarray:
    """Coefficients ``c_{-K..K}`` from ``4K + 1`` equispaced samples."""
    M = 4 * K + 1
    theta = 2 * np.pi * np.arange(M) / M
    vals = np.asarray(values_at(theta), dtype=complex)
    c = np.fft.fft(vals) / M
    out = np.concatenate([c[M - K:], c[:K + 1]])
    return _symmetrize(out)


def _builtin(name: str) -> Callable:
    """Resolve a builtin function name to a callable of complex ``z``."""
    head, _, arg = name.partition(":")
    if head == "abs2":
        return lambda z: np.abs(z) ** 2
    if head == "re":
        return lambda z: np.real(z)
    if head == "im":
        return lambda z: np.imag(z)
    if head == "zero":
        return lambda z: np.zeros_like(np.real(z))
    if head == "monomial":
        try:
            k = int(arg)
        except ValueError:
            raise UnknownBuiltin(f"monomial needs an integer degree, got {arg!r}") from None
        return lambda z: np.real(z**k) if k >= 0 else np.real(np.conj(z) ** (-k))
    if head == "const":
        try:
            value = float(arg)
        except ValueError:
            raise UnknownBuiltin(f"const needs a number, got {arg!r}") from None
        return lambda z: np.full(np.shape(z), value)
    raise UnknownBuiltin(f"unknown builtin {name!r}")


BUILTINS = ("abs2", "re", "im", "zero", "monomial:k", "const:c")

FunctionSpec = Union[str, Callable, Path]


def sample(
    spec: FunctionSpec,
    K: int,
    radii: Iterable[float] | None = None,
) -> DiskFunction:
    """Build a :class:`DiskFunction` from a builtin name, a callable or a table.

    Builtins: ``abs2``, ``re``, ``im``, ``zero``, ``monomial:k`` (the real part
    of ``z**k``) and ``const:c``. ``monomial(k)`` and ``const(c)`` are accepted
    as aliases. A string ``table:PATH`` or a :class:`~pathlib.Path` reads a
    coefficient table (see :func:`read_table`), ignoring ``K`` and ``radii``.
    Otherwise each radius slice is computed by equispaced quadrature with
    ``4K + 1`` nodes, exact for trigonometric polynomials of degree ``<= 2K``.
    """
    if isinstance(spec, Path):
        return read_table(spec)
    if isinstance(spec, str):
        if spec.startswith("table:"):
            return read_table(Path(spec[len("table:"):]))
        spec = spec.replace("(", ":").rstrip(")")
        func = _builtin(spec)
    else:
        func = spec
    if K < 0:
        raise InputError("K must be >= 0")
    radii = default_radii() if radii is None else np.asarray(list(radii), dtype=float)
    coeffs = np.empty((radii.size, 2 * K + 1), dtype=complex)
    for j, r in enumerate(radii):
        coeffs[j] = _quadrature(lambda th: func(r * np.exp(1j * th)), K)
    # At the center the circle is a single point: only the mean survives.
    at_zero = radii <= R_ZERO_TOL
    coeffs[at_zero, :K] = 0.0
    coeffs[at_zero, K + 1:] = 0.0
    return DiskFunction(K, radii, coeffs)


def evaluate(f: DiskFunction | CircleFunction, points) -> np.ndarray:
    """Evaluate ``f`` at complex ``points``.

    For a :class:`CircleFunction` only the argument of each point is used. For
    a :class:`DiskFunction` the coefficients are interpolated linearly in the
    radius; radii outside the grid raise :class:`RadiusOutOfRange`.
    """
    z = np.asarray(points, dtype=complex)
    if isinstance(f, CircleFunction):
        return f(np.angle(z))
    r = np.abs(z)
    lo, hi = f.radii[0], f.radii[-1]
    if np.any(r < lo - R_ZERO_TOL) or np.any(r > hi + R_ZERO_TOL):
        raise RadiusOutOfRange(f"radius outside the grid [{lo}, {hi}]")
    flat_r = np.clip(r.ravel(), lo, hi)
    if f.radii.size == 1:
        c = np.broadcast_to(f.coeffs[0], (flat_r.size, f.coeffs.shape[1]))
    else:
        j = np.clip(np.searchsorted(f.radii, flat_r, side="right") - 1, 0, f.radii.size - 2)
        w = ((flat_r - f.radii[j]) / (f.radii[j + 1] - f.radii[j]))[:, None]
        c = (1 - w) * f.coeffs[j] + w * f.coeffs[j + 1]
    phases = np.exp(1j * np.outer(np.angle(z.ravel()), _modes(f.K)))
    return np.sum(c * phases, axis=1).real.reshape(z.shape)


eval = evaluate  # noqa: A001  (the documented operation name)


def read_table(path: Path) -> DiskFunction:
    """Read a coefficient table ``r,k,re_c,im_c``.

    Rows with only ``k >= 0`` are completed by conjugate symmetry; if negative
    modes are present they must agree with the conjugates of the positive ones.
    """
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [h.strip() for h in reader.fieldnames] != [
                "r", "k", "re_c", "im_c"
            ]:
                raise MalformedTable(f"{path}: header must be r,k,re_c,im_c")
            rows = [
                (float(row["r"]), int(row["k"]), complex(float(row["re_c"]), float(row["im_c"])))
                for row in reader
            ]
    except OSError as exc:
        raise MalformedTable(f"{path}: {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, MalformedTable):
            raise
        raise MalformedTable(f"{path}: {exc}") from None
    if not rows:
        raise MalformedTable(f"{path}: no rows")
    radii = np.array(sorted({r for r, _, _ in rows}))
    K = max(abs(k) for _, k, _ in rows)
    coeffs = np.zeros((radii.size, 2 * K + 1), dtype=complex)
    seen = np.zeros(coeffs.shape, dtype=bool)
    index = {r: j for j, r in enumerate(radii)}
    for r, k, c in rows:
        j = index[r]
        if seen[j, k + K]:
            raise MalformedTable(f"{path}: duplicate entry r={r}, k={k}")
        coeffs[j, k + K] = c
        seen[j, k + K] = True
    has_negative = any(k < 0 for _, k, _ in rows)
    if not has_negative:
        coeffs[:, :K] = np.conj(coeffs[:, :K:-1])
    else:
        asym = np.abs(coeffs - np.conj(coeffs[:, ::-1]))
        if np.any(asym > 1e-12 * (1 + np.abs(coeffs))):
            raise MalformedTable(f"{path}: coefficients are not conjugate-symmetric")
    if np.any(np.abs(coeffs[:, K].imag) > 1e-12):
        raise MalformedTable(f"{path}: mean coefficients must be real")
    try:
        return DiskFunction(K, radii, _symmetrize(coeffs))
    except InputError as exc:
        raise MalformedTable(f"{path}: {exc}") from None


def write_table(f: DiskFunction, path: Path) -> None:
    """Write every coefficient of ``f`` as ``r,k,re_c,im_c`` rows."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r", "k", "re_c", "im_c"])
        for j, r in enumerate(f.radii):
            for k in range(-f.K, f.K + 1):
                c = f.coeffs[j, k + f.K]
                w.writerow([repr(float(r)), k, repr(float(c.real)), repr(float(c.imag))])


# coboundary operator and its inverse


def _as_disk(f: DiskFunction | CircleFunction) -> DiskFunction:
    if isinstance(f, CircleFunction):
        return DiskFunction(f.K, np.array([1.0]), f.coeffs[None, :])
    return f


def delta_alpha(alpha, sigma: DiskFunction | CircleFunction):
    """``sigma o R_alpha - sigma`` computed mode by mode."""
    mult = rotation_multipliers(alpha, sigma.K)
    if isinstance(sigma, CircleFunction):
        return CircleFunction(sigma.K, sigma.coeffs * mult)
    return DiskFunction(sigma.K, sigma.radii, sigma.coeffs * mult[None, :])


def orbit_average(f: DiskFunction | CircleFunction) -> np.ndarray:
    """Mean of ``f`` over each circle of the radial grid."""
    return _as_disk(f).coeff(0).real.copy()


@dataclass(frozen=True)
class CoboundaryReport:
    """Outcome of :func:`solve_coboundary`.

    ``amplification`` is the largest ``|c_k(sigma)| / |c_k(f)|`` over modes
    ``k != 0`` present in ``f``, i.e. ``1 / |exp(2 pi i k alpha) - 1|`` at the
    worst such mode ``amplification_k``.
    """

    status: str
    profile: np.ndarray
    sigma: DiskFunction | None = field(default=None, repr=False)
    amplification: float = 0.0
    amplification_k: int | None = None
    residual: float | None = None
    K: int = 0
    J: int = 0
    mean_tol: float = MEAN_TOL
    solve_tol: float = SOLVE_TOL
    overflow_guard: float = OVERFLOW_GUARD
    radii: np.ndarray | None = field(default=None, repr=False)

    @property
    def solved(self) -> bool:
        return self.status == "solved"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "profile": [float(x) for x in self.profile],
            "radii": None if self.radii is None else [float(r) for r in self.radii],
            "amplification": {"value": self.amplification, "k": self.amplification_k},
            "residual": self.residual,
            "truncation": {"K": self.K, "J": self.J},
            "tolerances": {
                "mean_tol": self.mean_tol,
                "solve_tol": self.solve_tol,
                "overflow_guard": self.overflow_guard,
            },
        }


def solve_coboundary(
    alpha,
    f: DiskFunction | CircleFunction,
    mean_tol: float = MEAN_TOL,
    solve_tol: float = SOLVE_TOL,
    overflow_guard: float = OVERFLOW_GUARD,
) -> CoboundaryReport:
    """Solve ``delta_alpha(sigma) = f`` in the truncated Fourier space.

    If some circle mean of ``f`` exceeds ``mean_tol`` in magnitude the equation
    has no solution and the report is ``obstructed`` with the means as its
    profile. Otherwise ``c_k(sigma) = c_k(f) / (exp(2 pi i k alpha) - 1)`` for
    ``k != 0`` and ``c_0(sigma) = 0``.

    Raises
    ------
    SmallDivisorOverflow
        If some ``|c_k(f)| / |exp(2 pi i k alpha) - 1|`` exceeds ``overflow_guard``.
    """
    f = _as_disk(f)
    K = f.K
    means = orbit_average(f)
    common = dict(K=K, J=f.J, radii=f.radii, mean_tol=mean_tol, solve_tol=solve_tol,
                  overflow_guard=overflow_guard)
    if np.max(np.abs(means)) > mean_tol:
        return CoboundaryReport("obstructed", means, **common)

    mult = rotation_multipliers(alpha, K)
    mult[K] = 1.0  # placeholder; the mean mode is set to zero below
    divisors = np.abs(mult)
    mags = np.abs(f.coeffs)
    scale = max(float(mags.max()), np.finfo(float).tiny)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(mags > 0, mags / divisors[None, :], 0.0)
    ratios[:, K] = 0.0
    if not np.all(np.isfinite(ratios)) or ratios.max() > overflow_guard:
        k_bad = abs(int(np.argmax(np.nan_to_num(ratios, nan=np.inf).max(axis=0))) - K)
        raise SmallDivisorOverflow(
            f"|c_{k_bad}(f)| / |exp(2 pi i {k_bad} alpha) - 1| exceeds {overflow_guard:g}"
        )

    sigma_c = f.coeffs / mult[None, :]
    sigma_c[:, K] = 0.0
    sigma = DiskFunction(K, f.radii, sigma_c)

    present = np.any(mags > 1e-14 * scale, axis=0)
    present[K] = False
    amp, amp_k = 0.0, None
    if np.any(present):
        inv = np.where(present, 1.0 / divisors, 0.0)
        # Modes come in conjugate pairs; report the non-negative one.
        i = K + int(np.argmax(inv[K:]))
        amp, amp_k = float(inv[i]), i - K

    residual = float(np.max((delta_alpha(alpha, sigma) - f).circle_norms()))
    if residual > solve_tol:
        raise ResidualTooLarge(f"residual {residual:g} exceeds solve_tol {solve_tol:g}")
    return CoboundaryReport(
        "solved", means, sigma=sigma, amplification=amp, amplification_k=amp_k,
        residual=residual, **common,
    )


@dataclass(frozen=True)
class ClassVerdict:
    """Whether ``[f]`` vanishes, with the evidence either way."""

    trivial: bool
    report: CoboundaryReport

    @property
    def certificate(self) -> DiskFunction | None:
        return self.report.sigma if self.trivial else None

    @property
    def profile(self) -> np.ndarray | None:
        return None if self.trivial else self.report.profile

    def to_dict(self) -> dict:
        out = {"trivial": self.trivial}
        if self.trivial:
            sigma = self.report.sigma
            out["certificate"] = {
                "residual": self.report.residual,
                "sigma_circle_norms": [float(x) for x in sigma.circle_norms()],
            }
        else:
            out["profile"] = [float(x) for x in self.report.profile]
        out["radii"] = self.report.to_dict()["radii"]
        out["truncation"] = {"K": self.report.K, "J": self.report.J}
        out["tolerances"] = self.report.to_dict()["tolerances"]
        return out


def class_is_trivial(alpha, f: DiskFunction | CircleFunction, **tols) -> ClassVerdict:
    """Decide whether ``f`` is a coboundary at its truncation."""
    report = solve_coboundary(alpha, f, **tols)
    return ClassVerdict(report.solved, report)


# the gauge equation G o R_alpha^n = G + n


def gauge_residual(alpha, G: CircleFunction, n: int) -> float:
    """Circle L2 norm of ``G o R_alpha^n - G - n``.

    The mean of ``G o R_alpha^n - G`` is zero, so the constant ``-n`` is
    orthogonal to everything else and contributes exactly ``n**2``.
    """
    mult = rotation_multipliers(alpha, G.K, n)
    mult[G.K] = 0.0
    return math.sqrt(n * n + float(np.sum(np.abs(G.coeffs * mult) ** 2)))


def _gauge_system(alpha, K: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Real least-squares form of ``G -> coeffs(G o R^n - G)`` and target ``n e_0``.

    The unknowns are ``c_0`` and the real and imaginary parts of ``c_1..c_K``;
    rows are the real and imaginary parts of the output modes ``k = -K..K``.
    """
    mult = rotation_multipliers(alpha, K, n)
    mult[K] = 0.0
    cols = [np.zeros(2 * K + 1, dtype=complex)]
    cols[0][K] = 1.0
    for k in range(1, K + 1):
        for unit in (1.0, 1j):
            c = np.zeros(2 * K + 1, dtype=complex)
            c[K + k] = unit
            c[K - k] = np.conj(unit)
            cols.append(c)
    basis = np.array(cols).T  # (2K+1, 2K+1) complex: coefficient vectors
    image = mult[:, None] * basis
    A = np.vstack([image.real, image.imag])
    b = np.zeros(2 * (2 * K + 1))
    b[K] = n
    return A, b


@dataclass(frozen=True)
class TruncationCertificate:
    K: int
    min_residual: float
    # |A^T r| at the least-squares optimum: the residual is orthogonal to the
    # range of the operator, which certifies that no G does better.
    orthogonality: float

    def to_dict(self) -> dict:
        return {"K": self.K, "min_residual": self.min_residual,
                "orthogonality": self.orthogonality}


@dataclass(frozen=True)
class ObstructionReport:
    n: int
    entries: list[TruncationCertificate]
    tol: float = 1e-9

    @property
    def holds(self) -> bool:
        return all(abs(e.min_residual - abs(self.n)) <= self.tol for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "entries": [e.to_dict() for e in self.entries],
            "tol": self.tol,
            "holds": self.holds,
            "conclusion": (
                f"min over G of |G o R^{self.n} - G - {self.n}| equals |n| at every "
                "tested truncation: the gauge equation has no solution"
                if self.holds else "certificate failed at some truncation"
            ),
        }


def certify_obstruction(alpha, n: int, K_list: Iterable[int] = (8, 16, 32),
                        tol: float = 1e-9) -> ObstructionReport:
    """Minimize :func:`gauge_residual` over all real ``G`` of each degree in ``K_list``."""
    if n == 0:
        raise InputError("n must be nonzero")
    entries = []
    for K in K_list:
        A, b = _gauge_system(alpha, K, n)
        x, *_ = np.linalg.lstsq(A, b, rcond=None)
        r = A @ x - b
        entries.append(TruncationCertificate(
            int(K), float(np.linalg.norm(r)), float(np.linalg.norm(A.T @ r)),
        ))
    return ObstructionReport(n, entries, tol)
