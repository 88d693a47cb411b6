"""Irrational rotation numbers, continued fractions and small divisors.

A :class:`RotationNumber` stores a float value in (0, 1) together with a finite
prefix of its continued-fraction expansion ``[0; a_1, a_2, ...]`` and the
matching convergents ``p_k / q_k`` (exact Python integers, indexed from
``k = 1`` so that ``q_1 = a_1``).

Three ways to build one, mirroring the CLI grammar:

* ``golden``            the golden mean conjugate (sqrt(5) - 1) / 2
* ``cf:a1,a2,...``      a prescribed prefix, continued by an all-ones tail
* ``float:0.xxxx``      a float, guarded against looking rational
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .exceptions import DepthExceedsExpansion, FloatLooksRational, InputError

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
GOLDEN_DEPTH = 40
FLOAT_DEPTH = 12
# Partial quotients above this during float expansion mean "probably rational".
QUOTIENT_GUARD = 10**6
# Prefix used for the Liouville-like test rotation.
LIOUVILLE_CF = (10, 10**2, 10**4, 10**8)

AlphaSpec = Union[str, float, Sequence[int], "RotationNumber"]


def _convergents_from_cf(coeffs: Sequence[int]) -> tuple[tuple[int, int], ...]:
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    out = []
    for a in coeffs:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append((p, q))
    return tuple(out)


@dataclass(frozen=True)
class RotationNumber:
    """An irrational rotation number with a continued-fraction prefix.

    Attributes
    ----------
    value : float
        The number in (0, 1).
    cf_coeffs : tuple of int
        Partial quotients ``a_1, a_2, ...`` (the leading ``a_0 = 0`` is omitted).
    convergents : tuple of (int, int)
        ``(p_k, q_k)`` for ``k = 1 .. len(cf_coeffs)``.
    kind : str
        One of ``"golden"``, ``"cf_specified"``, ``"float_given"``.
    """

    value: float
    cf_coeffs: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...] = field(repr=False)
    kind: str

    def __float__(self) -> float:
        return self.value

    @property
    def depth(self) -> int:
        return len(self.cf_coeffs)

    @property
    def spec(self) -> str:
        """A CLI-grammar string that rebuilds this rotation."""
        if self.kind == "golden":
            return "golden"
        if self.kind == "cf_specified":
            return "cf:" + ",".join(str(a) for a in self.cf_coeffs)
        return f"float:{self.value!r}"

    def describe(self) -> dict:
        return {
            "spec": self.spec,
            "kind": self.kind,
            "value": self.value,
            "cf_prefix": list(self.cf_coeffs),
        }

    # constructors

    @classmethod
    def golden(cls, depth: int = GOLDEN_DEPTH) -> "RotationNumber":
        coeffs = (1,) * depth
        return cls(GOLDEN, coeffs, _convergents_from_cf(coeffs), "golden")

    @classmethod
    def from_cf(cls, coeffs: Sequence[int]) -> "RotationNumber":
        coeffs = tuple(int(a) for a in coeffs)
        if not coeffs:
            raise InputError("continued fraction prefix is empty")
        if any(a < 1 for a in coeffs):
            raise InputError(f"partial quotients must be >= 1, got {list(coeffs)}")
        # The prefix is continued by [1; 1, 1, ...] = golden ratio so the value
        # models an irrational whose expansion starts with the given quotients.
        x = (1.0 + math.sqrt(5.0)) / 2.0
        for a in reversed(coeffs):
            x = a + 1.0 / x
        return cls(1.0 / x, coeffs, _convergents_from_cf(coeffs), "cf_specified")

    @classmethod
    def from_float(cls, value: float, depth: int = FLOAT_DEPTH) -> "RotationNumber":
        value = float(value)
        if not 0.0 < value < 1.0:
            raise InputError(f"rotation number must lie in (0, 1), got {value}")
        coeffs = []
        x = Fraction(value)
        for k in range(1, depth + 1):
            if x == 0:
                raise FloatLooksRational(
                    f"expansion of {value!r} terminates after {k - 1} partial quotients "
                    f"(requested depth {depth})"
                )
            inv = 1 / x
            a = math.floor(inv)
            if a > QUOTIENT_GUARD:
                raise FloatLooksRational(
                    f"partial quotient a_{k} = {a} of {value!r} exceeds {QUOTIENT_GUARD}"
                )
            coeffs.append(a)
            x = inv - a
        coeffs = tuple(coeffs)
        return cls(value, coeffs, _convergents_from_cf(coeffs), "float_given")


def parse_alpha(text: str, depth: int | None = None) -> RotationNumber:
    """Parse ``golden``, ``cf:a1,a2,...`` or ``float:0.xxxx``."""
    text = text.strip()
    if text == "golden":
        return RotationNumber.golden(depth or GOLDEN_DEPTH)
    kind, sep, body = text.partition(":")
    if not sep:
        raise InputError(f"cannot parse rotation spec {text!r}")
    if kind == "cf":
        try:
            coeffs = [int(a) for a in body.split(",") if a.strip()]
        except ValueError:
            raise InputError(f"bad continued fraction {body!r}") from None
        return RotationNumber.from_cf(coeffs)
    if kind == "float":
        try:
            value = float(body)
        except ValueError:
            raise InputError(f"bad float {body!r}") from None
        return RotationNumber.from_float(value, depth or FLOAT_DEPTH)
    raise InputError(f"unknown rotation kind {kind!r}")


def make_rotation(spec: AlphaSpec = "golden", depth: int | None = None) -> RotationNumber:
    """Build a :class:`RotationNumber` from any accepted specification.

    Strings follow :func:`parse_alpha`; a float goes through the rational guard;
    a sequence of ints is a continued-fraction prefix.
    """
    if isinstance(spec, RotationNumber):
        return spec
    if isinstance(spec, str):
        return parse_alpha(spec, depth)
    if isinstance(spec, (float, np.floating)):
        return RotationNumber.from_float(float(spec), depth or FLOAT_DEPTH)
    return RotationNumber.from_cf(spec)


def convergents(alpha: RotationNumber, depth: int) -> list[tuple[int, int]]:
    if depth > alpha.depth:
        raise DepthExceedsExpansion(
            f"requested {depth} convergents, expansion has {alpha.depth}"
        )
    return list(alpha.convergents[:depth])


def _split(a: float) -> tuple[float, float]:
    """Split ``a`` into a 26-bit head and the remainder (Dekker)."""
    c = 134217729.0 * a  # 2**27 + 1
    hi = c - (c - a)
    return hi, a - hi


def turns(alpha: RotationNumber | float, k) -> np.ndarray:
    """``k * alpha`` reduced to [-1/2, 1/2], accurate to rounding of the result.

    The naive product loses ``|k|`` ulps; splitting alpha makes ``k * hi`` exact
    for ``|k| < 2**27`` so only the small tail product rounds.
    """
    hi, lo = _split(float(alpha))
    k = np.asarray(k, dtype=np.float64)
    x = k * hi
    x = x - np.rint(x)
    x = x + k * lo
    return x - np.rint(x)


def small_divisor(alpha: RotationNumber | float, k) -> np.ndarray | float:
    """``|exp(2 pi i k alpha) - 1| = 2 |sin(pi k alpha)|``, vectorized over ``k``."""
    out = 2.0 * np.abs(np.sin(np.pi * turns(alpha, k)))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SmallDivisorTable:
    """Small divisors ``d_k`` for ``|k| <= k_max``, stored for ``k >= 0``."""

    k_max: int
    divisors: np.ndarray = field(repr=False)

    def __getitem__(self, k: int) -> float:
        if abs(k) > self.k_max:
            raise KeyError(k)
        return float(self.divisors[abs(k)])

    @property
    def entries(self) -> dict[int, float]:
        return {k: self[k] for k in range(-self.k_max, self.k_max + 1)}


def small_divisor_table(alpha: RotationNumber, k_max: int) -> SmallDivisorTable:
    divs = small_divisor(alpha, np.arange(k_max + 1))
    divs.setflags(write=False)
    return SmallDivisorTable(k_max, divs)


def min_orbit_gap(alpha: RotationNumber | float, n: int, chunk: int = 1 << 20) -> float:
    """Minimum over ``1 <= |k| <= n`` of the distance from ``k alpha`` to Z."""
    if n < 1:
        raise InputError("n must be >= 1")
    best = math.inf
    for start in range(1, n + 1, chunk):
        k = np.arange(start, min(start + chunk, n + 1), dtype=np.float64)
        best = min(best, float(np.abs(turns(alpha, k)).min()))
    return best
