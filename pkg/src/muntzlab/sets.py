"""Compact subsets of [0, inf) as finite unions of closed intervals:
measure, essential supremum, Smith-Volterra-Cantor construction and
grid discretization."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from muntzlab.errors import ConfigError


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted, pairwise-disjoint, non-adjacent closed intervals [a_i, b_i].

    Construct via normalize(); the raw constructor trusts its input.
    """

    intervals: tuple[tuple[float, float], ...]

    def measure(self) -> float:
        return sum(b - a for a, b in self.intervals)

    def contains(self, x: float, tol: float = 1e-12) -> bool:
        return any(a - tol <= x <= b + tol for a, b in self.intervals)

    def lo(self) -> float:
        if not self.intervals:
            raise ConfigError("empty union has no lower endpoint")
        return self.intervals[0][0]

    def hi(self) -> float:
        if not self.intervals:
            raise ConfigError("empty union has no upper endpoint")
        return self.intervals[-1][1]


@dataclass(frozen=True)
class Grid:
    """Finite point set discretizing an IntervalUnion; endpoints of every
    interval are included and consecutive points within an interval are
    at most `mesh` apart."""

    points: tuple[float, ...]
    parent: IntervalUnion
    mesh: float

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)

    def __len__(self) -> int:
        return len(self.points)


def normalize(raw) -> IntervalUnion:
    """Merge overlapping/adjacent closed intervals into a canonical union."""
    cleaned = []
    for pair in raw:
        a, b = float(pair[0]), float(pair[1])
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ConfigError("interval endpoints must be finite")
        if a < 0:
            raise ConfigError("intervals must lie in [0, inf)")
        if a > b:
            raise ConfigError(f"interval [{a}, {b}] has a > b")
        cleaned.append((a, b))
    cleaned.sort()
    merged: list[list[float]] = []
    for a, b in cleaned:
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return IntervalUnion(tuple((a, b) for a, b in merged))


def measure(A: IntervalUnion) -> float:
    return A.measure()


def essential_supremum(A: IntervalUnion) -> float:
    """Largest right endpoint among non-degenerate intervals; singletons
    carry no measure and are ignored."""
    fat = [b for a, b in A.intervals if a < b]
    if not fat:
        raise ConfigError("essential supremum needs positive measure")
    return max(fat)


def fat_cantor(K: int, carrier: tuple[float, float] = (0.0, 1.0)) -> IntervalUnion:
    """Level-K Smith-Volterra-Cantor set, affinely mapped onto `carrier`.

    At step k, each of the 2^(k-1) surviving intervals loses its centered
    open middle of length 4^(-k); the level-K set on [0,1] consists of 2^K
    closed intervals of total measure 1/2 + 2^(-(K+1)).
    """
    if K < 0:
        raise ConfigError("level must be nonnegative")
    pieces = [(0.0, 1.0)]
    for k in range(1, K + 1):
        gap = 4.0 ** (-k)
        nxt = []
        for a, b in pieces:
            mid = 0.5 * (a + b)
            nxt.append((a, mid - gap / 2))
            nxt.append((mid + gap / 2, b))
        pieces = nxt
    c0, c1 = float(carrier[0]), float(carrier[1])
    if c0 < 0 or c1 < c0:
        raise ConfigError("carrier must be a valid interval in [0, inf)")
    w = c1 - c0
    return IntervalUnion(tuple((c0 + w * a, c0 + w * b) for a, b in pieces))


def discretize(A: IntervalUnion, mesh: float) -> Grid:
    """Uniform subdivision of each interval at spacing <= mesh; degenerate
    singletons contribute their single point."""
    if mesh <= 0:
        raise ConfigError("mesh must be positive")
    pts: list[float] = []
    for a, b in A.intervals:
        if a == b:
            pts.append(a)
            continue
        nseg = max(1, math.ceil((b - a) / mesh - 1e-12))
        pts.extend(a + (b - a) * i / nseg for i in range(nseg))
        pts.append(b)
    return Grid(tuple(pts), A, mesh)


def union_to_json(A: IntervalUnion) -> dict:
    return {"intervals": [[a, b] for a, b in A.intervals]}


def union_from_json(obj: dict) -> IntervalUnion:
    """Parse {"intervals": [[a,b],...]} or
    {"fat_cantor": {"level": K, "carrier": [a,b]}}."""
    if not isinstance(obj, dict):
        raise ConfigError("set descriptor must be an object")
    if set(obj) == {"intervals"}:
        return normalize(obj["intervals"])
    if set(obj) == {"fat_cantor"}:
        spec = obj["fat_cantor"]
        unknown = set(spec) - {"level", "carrier"}
        if unknown:
            raise ConfigError(f"unknown fat_cantor fields: {sorted(unknown)}")
        carrier = tuple(spec.get("carrier", (0.0, 1.0)))
        return fat_cantor(int(spec["level"]), carrier)
    raise ConfigError(f"unrecognized set descriptor: {sorted(obj)}")
