"""Interval and rectangle domains shared by every checker."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] with lo strictly below hi."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        lo, hi = float(self.lo), float(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if not lo < hi:
            raise ValueError(f"interval needs lo < hi, got [{lo}, {hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, v: float) -> bool:
        return self.lo <= v <= self.hi


@dataclass(frozen=True)
class Box2:
    """Axis-aligned rectangle [a, b] x [c, d]."""

    x: Interval
    y: Interval

    @classmethod
    def from_bounds(cls, a: float, b: float, c: float, d: float) -> "Box2":
        return cls(Interval(a, b), Interval(c, d))

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return (self.x.lo, self.x.hi, self.y.lo, self.y.hi)

    @property
    def area(self) -> float:
        return self.x.length * self.y.length

    def contains(self, px: float, py: float) -> bool:
        return self.x.contains(px) and self.y.contains(py)
