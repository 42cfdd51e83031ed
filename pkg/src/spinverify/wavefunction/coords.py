"""Hyperspherical coordinates of an N-particle configuration.

All particle coordinates are flattened into one vector ``y`` of length
``M = N * D`` (particle-major). The hyperradius is ``|y|`` and the
``M - 1`` hyperangles follow the usual spherical recursion::

    Omega_k = arccos(y_k / |y[k:]|)          k < M - 2
    Omega_{M-2} = arccos(y_{M-2} / |y[M-2:]|), or 2 pi minus that when y_{M-1} < 0

so every angle but the last lies in ``[0, pi]`` and the last in ``[0, 2 pi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from .counting import OperationCount
from .expr import Expr, Func, Pow, Var


@dataclass(frozen=True)
class SystemGeometry:
    positions: np.ndarray

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        if pos.ndim == 1:
            pos = pos[:, None]
        if pos.ndim != 2 or pos.shape[0] < 1 or pos.shape[1] < 1:
            raise ValidationError(f"positions must be an N x D array with N, D >= 1, got shape {pos.shape}")
        if not np.all(np.isfinite(pos)):
            raise ValidationError("positions must be finite")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def d(self) -> int:
        return self.positions.shape[1]

    def flat(self) -> np.ndarray:
        return self.positions.reshape(-1)

    def pair_distance(self, j: int, k: int) -> float:
        return float(np.linalg.norm(self.positions[j] - self.positions[k]))


@dataclass(frozen=True)
class HyperAngles:
    values: np.ndarray
    count: OperationCount
    cached_count: OperationCount
    degenerate: tuple[bool, ...]

    @property
    def any_degenerate(self) -> bool:
        return any(self.degenerate)


def hyperradius_count(m: int) -> OperationCount:
    """``m`` squares and one square root; the ``m - 1`` additions are free."""
    return OperationCount(counted=m + 1, free=max(m - 1, 0))


def hyperradius(g: SystemGeometry) -> tuple[float, OperationCount]:
    y = g.flat()
    return math.sqrt(float(np.dot(y, y))), hyperradius_count(y.size)


def hyperradius_expr(n: int, d: int = 1, start: int = 0) -> Expr:
    """``sqrt(sum of squares)`` over flattened components ``start..n*d-1``."""
    terms = [Pow(Var(i // d, i % d), 2) for i in range(start, n * d)]
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    return Func("sqrt", total)


def hyperangle_expr(n: int, d: int, k: int) -> Expr:
    """``arccos(y_k / |y[k:]|)`` on the principal branch."""
    return Func("arccos", Var(k // d, k % d) / hyperradius_expr(n, d, start=k))


def hyperangles(g: SystemGeometry) -> HyperAngles:
    """Angles of ``g`` with operation counts with and without suffix-norm caching.

    Uncached, angle ``k`` squares the ``M - k`` tail components, then takes a
    sqrt, a division and an arccos. Cached, the tail sums of squares are
    accumulated once (``M`` squares) and each angle costs 3. A zero tail
    norm makes the angle undefined; it is reported as 0 with its flag set.
    """
    y = g.flat()
    m = y.size
    sq = y * y
    tail = np.cumsum(sq[::-1])[::-1]
    values = np.zeros(max(m - 1, 0))
    degenerate = []
    counted = free = 0
    for k in range(m - 1):
        counted += (m - k) + 3
        free += m - k - 1
        norm = math.sqrt(float(tail[k]))
        if norm == 0.0:
            degenerate.append(True)
            continue
        degenerate.append(False)
        angle = math.acos(max(-1.0, min(1.0, y[k] / norm)))
        if k == m - 2 and y[m - 1] < 0:
            angle = 2 * math.pi - angle
        values[k] = angle
    cached = OperationCount(counted=m + 3 * max(m - 1, 0), free=max(m - 1, 0))
    values.setflags(write=False)
    return HyperAngles(values, OperationCount(counted, free), cached, tuple(degenerate))


def from_hyperspherical(rho: float, angles, n: int, d: int = 1) -> SystemGeometry:
    """Inverse map: ``y_k = rho * sin(O_0) ... sin(O_{k-1}) * cos(O_k)``, last one all sines."""
    angles = np.asarray(angles, dtype=float)
    m = n * d
    if angles.size != m - 1:
        raise ValidationError(f"{m}-dimensional vector needs {m - 1} angles, got {angles.size}")
    y = np.empty(m)
    running = rho
    for k in range(m - 1):
        y[k] = running * math.cos(angles[k])
        running *= math.sin(angles[k])
    y[m - 1] = running
    return SystemGeometry(y.reshape(n, d))
