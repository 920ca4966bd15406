"""
Container for radially symmetric trial functions.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np

from src.schemas.types import ArrayLike, FloatArray, Frame, RealFunction

if TYPE_CHECKING:
    from src.logic.transforms import GaugeTransform


@dataclass(frozen=True)
class LogPowerCore:
    """u(r) = coefficient * (-ln r)^exponent for 0 < r <= radius.

    Lets a u-frame profile that is unbounded at r = 0 be evaluated in t-frames
    without forming r.
    """

    radius: float
    coefficient: float
    exponent: float


@dataclass(frozen=True)
class RadialProfile:
    """A radial function carried in the u-frame (radius r) or a w-frame (t of a gauge).

    Parameters
    ----------
    frame : Frame
        ``U_FRAME`` when the coordinate is r in (0, 1); ``W_FRAME`` when it is the
        t variable of ``gauge``.
    func : RealFunction
        Vectorized closed-form evaluator.
    deriv : RealFunction or None
        Closed-form derivative in the frame coordinate. When None the derivative
        is taken from central differences of the node values.
    nodes : FloatArray
        Strictly increasing sample grid containing every breakpoint.
    support : tuple[float, float]
        Values vanish outside; ``hi`` may be ``inf`` in w-frames.
    breakpoints : tuple[float, ...]
        Points where the piecewise definition switches.
    gauge : GaugeTransform or None
        Gauge of a w-frame profile.
    plateau : tuple[float, float] or None
        ``(start, value)``: the profile equals ``value`` for every t >= start.
    core : LogPowerCore or None
        Log-power behaviour of a u-frame profile near r = 0.
    offset : float
        Distance of the centre of a translated bump from the origin.
    family : str or None
        Family name, with its constructor arguments in ``params``.
    """

    frame: Frame
    func: RealFunction
    deriv: RealFunction | None
    nodes: FloatArray
    support: tuple[float, float]
    breakpoints: tuple[float, ...] = ()
    gauge: GaugeTransform | None = None
    plateau: tuple[float, float] | None = None
    core: LogPowerCore | None = None
    offset: float = 0.0
    family: str | None = None
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("profile nodes must be strictly increasing")
        if self.frame is Frame.W_FRAME and self.gauge is None:
            raise ValueError("w-frame profiles need a gauge")

    def _inside(self, x: FloatArray) -> FloatArray:
        lo, hi = self.support
        return (x >= lo) & (x <= hi)

    def __call__(self, x: ArrayLike) -> ArrayLike:
        arr = np.asarray(x, dtype=np.float64)
        with np.errstate(all="ignore"):
            out = np.where(self._inside(arr), self.func(arr), 0.0)
        return float(out) if arr.ndim == 0 else out

    def derivative(self, x: ArrayLike) -> ArrayLike:
        """Derivative in the frame coordinate, zero outside the support."""
        arr = np.asarray(x, dtype=np.float64)
        if self.deriv is None:
            out = np.interp(arr, self.nodes, self.finite_difference)
        else:
            with np.errstate(all="ignore"):
                out = self.deriv(arr)
        out = np.where(self._inside(arr), out, 0.0)
        return float(out) if arr.ndim == 0 else out

    @cached_property
    def values(self) -> FloatArray:
        return np.asarray(self(self.nodes), dtype=np.float64)

    @cached_property
    def finite_difference(self) -> FloatArray:
        """Central differences of the node values (one-sided at the ends)."""
        return np.gradient(self.values, self.nodes)

    @property
    def energy_end(self) -> float:
        """Last point where the derivative can be nonzero."""
        if self.plateau is not None:
            return min(self.plateau[0], self.support[1])
        return self.support[1]

    @property
    def is_compact(self) -> bool:
        lo, hi = self.support
        if self.frame is Frame.U_FRAME:
            return lo > 0.0 and hi < 1.0
        return math.isfinite(hi) and (self.plateau is None or self.plateau[1] == 0.0)

    def scaled(self, c: float) -> RadialProfile:
        """The profile multiplied by the constant ``c``."""
        func, deriv = self.func, self.deriv
        plateau = None if self.plateau is None else (self.plateau[0], c * self.plateau[1])
        core = (
            None
            if self.core is None
            else replace(self.core, coefficient=c * self.core.coefficient)
        )
        return replace(
            self,
            func=lambda x: c * func(x),
            deriv=None if deriv is None else (lambda x: c * deriv(x)),
            plateau=plateau,
            core=core,
        )

    def with_nodes(self, nodes: FloatArray) -> RadialProfile:
        """Same function sampled on another grid (breakpoints are merged in)."""
        merged = np.union1d(np.asarray(nodes, dtype=np.float64), self.breakpoints)
        lo, hi = self.support
        merged = merged[(merged >= lo) & (merged <= hi)] if math.isfinite(hi) else merged
        return replace(self, nodes=merged)


def from_samples(
    nodes: FloatArray,
    values: FloatArray,
    frame: Frame = Frame.U_FRAME,
    gauge: GaugeTransform | None = None,
    family: str | None = None,
) -> RadialProfile:
    """Piecewise-linear profile interpolating ``values`` at ``nodes``.

    The derivative is the exact slope of the interpolant on each cell.
    """
    x = np.asarray(nodes, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    slopes = np.diff(y) / np.diff(x)

    def func(t: FloatArray) -> FloatArray:
        return np.interp(t, x, y, left=0.0, right=0.0)

    def deriv(t: FloatArray) -> FloatArray:
        cell = np.clip(np.searchsorted(x, t, side="right") - 1, 0, slopes.size - 1)
        return slopes[cell]

    return RadialProfile(
        frame=frame,
        func=func,
        deriv=deriv,
        nodes=x,
        support=(float(x[0]), float(x[-1])),
        breakpoints=tuple(float(v) for v in x),
        gauge=gauge,
        family=family,
    )


__all__: list[str] = ["LogPowerCore", "RadialProfile", "from_samples"]
