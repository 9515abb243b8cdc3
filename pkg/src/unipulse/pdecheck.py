"""Finite-difference verification that an evaluator solves the wave equation.

The residual of

    u_xx + u_yy + u_zz - (1/c^2) u_tt

is formed from central second differences with step h in every axis
(time steps h/c, i.e. step h in ct units), so a true solution shows an
O(h^2) residual while a non-solution keeps a fixed one.  The measured
convergence order is the log-log slope of |residual| against h.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fields import Evaluator, PulseParams, SpacetimePoint

_EPS = 2.220446049250313e-16


class BelowNoiseFloor(Exception):
    """Residuals are dominated by rounding, not truncation; no order fits."""


@dataclass(frozen=True)
class ResidualReport:
    point: SpacetimePoint
    h: float
    residual: complex
    field_scale: float

    @property
    def normalized(self) -> float:
        return abs(self.residual) / self.field_scale

    @property
    def noise_floor(self) -> float:
        # rounding scale of one second difference at this h
        return 4.0 * _EPS * self.field_scale


def wave_residual(
    evaluator: Evaluator, p: SpacetimePoint, h: float, params: PulseParams
) -> ResidualReport:
    """Second-order residual at one point.

    ``field_scale`` is the magnitude of the largest term entering the
    residual sum (with a rounding-level floor), so the normalized
    residual is O(1) for a non-solution and O(h^2) for a solution.
    """
    if not h > 0.0:
        raise ValueError(f"step must be positive, got {h}")
    c = params.c
    ht = h / c
    u0 = evaluator(p)
    h2 = h * h

    def second(plus: SpacetimePoint, minus: SpacetimePoint) -> complex:
        return (evaluator(plus) - 2.0 * u0 + evaluator(minus)) / h2

    stencil = [
        second(SpacetimePoint(p.t, p.x + h, p.y, p.z), SpacetimePoint(p.t, p.x - h, p.y, p.z)),
        second(SpacetimePoint(p.t, p.x, p.y + h, p.z), SpacetimePoint(p.t, p.x, p.y - h, p.z)),
        second(SpacetimePoint(p.t, p.x, p.y, p.z + h), SpacetimePoint(p.t, p.x, p.y, p.z - h)),
        second(SpacetimePoint(p.t + ht, p.x, p.y, p.z), SpacetimePoint(p.t - ht, p.x, p.y, p.z)),
    ]
    residual = stencil[0] + stencil[1] + stencil[2] - stencil[3]
    rounding = 4.0 * _EPS * abs(u0) / h2
    field_scale = max(max(abs(term) for term in stencil), rounding, 1e-300)
    return ResidualReport(p, h, residual, field_scale)


def convergence_order(
    evaluator: Evaluator,
    p: SpacetimePoint,
    h_list: Sequence[float],
    params: PulseParams,
) -> float:
    """Least-squares slope of log |residual| versus log h.

    Expects a decreasing, roughly geometric ladder of at least three
    steps.  Raises BelowNoiseFloor when the residuals sit at the
    rounding floor, where no meaningful order exists.
    """
    hs = [float(h) for h in h_list]
    if len(hs) < 3:
        raise ValueError(f"need at least 3 step sizes, got {len(hs)}")
    if any(h2 >= h1 for h1, h2 in zip(hs, hs[1:])):
        raise ValueError("step sizes must be strictly decreasing")

    reports = [wave_residual(evaluator, p, h, params) for h in hs]
    floored = sum(1 for r in reports if abs(r.residual) <= 10.0 * r.noise_floor)
    if floored >= (len(reports) + 1) // 2:
        raise BelowNoiseFloor(
            f"{floored}/{len(reports)} residuals at the rounding floor near {p}"
        )
    mags = [max(abs(r.residual), 1e-300) for r in reports]
    slope = np.polyfit(np.log(hs), np.log(mags), 1)[0]
    return float(slope)
