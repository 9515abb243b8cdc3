"""Closed-form evaluation of the localized pulse family.

The family is built from the complexified radial root

    S = sqrt(c^2 (t + i tau)^2 - rho^2),   branch with Im S >= c tau,

whose on-axis value is c(t + i tau).  The basic solution is
u = 1/(S (S - z - i zeta)); the general family is u = f(theta)/S with
phase theta = S - z - i c tau and f any admissible waveform.  A
spherical reference solution f(R - ct)/R is provided as the
counterexample for directionality checks.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .numerics import (
    ToleranceNotReached,
    complex_sqrt_upper,
    integrate_adaptive,
)
from .waveforms import Waveform

Evaluator = Callable[["SpacetimePoint"], complex]


class SingularPoint(Exception):
    """Evaluation requested at (or too close to) a pole of the solution."""


class GridEvaluationError(Exception):
    """An evaluator failed at a specific grid node."""

    def __init__(self, index: tuple[int, ...], point: "SpacetimePoint", cause: Exception):
        super().__init__(f"evaluation failed at grid index {index}: {cause}")
        self.index = index
        self.point = point


@dataclass(frozen=True)
class PulseParams:
    """Physical constants of one pulse family.

    ``tau`` is the imaginary time shift (sets the duration scale),
    ``zeta`` the imaginary z shift (sets the focal shape).  The length
    b = c*tau is derived.  The family is free of singularities exactly
    when zeta < b.
    """

    c: float
    tau: float
    zeta: float = 0.0

    def __post_init__(self):
        for name in ("c", "tau", "zeta"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"pulse parameter {name} must be finite, got {v}")
        if self.c <= 0.0:
            raise ValueError(f"wave speed c must be > 0, got {self.c}")
        if self.tau <= 0.0:
            raise ValueError(f"time shift tau must be > 0, got {self.tau}")

    @property
    def b(self) -> float:
        return self.c * self.tau

    @property
    def regular(self) -> bool:
        return self.zeta < self.b


@dataclass(frozen=True, slots=True)
class SpacetimePoint:
    t: float
    x: float
    y: float
    z: float

    @classmethod
    def from_cylindrical(cls, t: float, rho: float, z: float) -> "SpacetimePoint":
        if rho < 0.0:
            raise ValueError(f"rho must be >= 0, got {rho}")
        return cls(t, rho, 0.0, z)

    @property
    def rho(self) -> float:
        return math.hypot(self.x, self.y)

    @property
    def radius(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)


def complex_distance(p: SpacetimePoint, params: PulseParams) -> complex:
    """The root S with Im S >= c*tau; equals c(t + i tau) on the axis."""
    ct = complex(params.c * p.t, params.b)
    return complex_sqrt_upper(ct * ct - (p.x * p.x + p.y * p.y))


def pulse_phase(p: SpacetimePoint, params: PulseParams) -> complex:
    """Phase S - z - i b; its imaginary part is nonnegative everywhere."""
    return complex_distance(p, params) - p.z - 1j * params.b


def eval_simple_pulse(p: SpacetimePoint, params: PulseParams) -> complex:
    """u = 1 / (S (S - z - i zeta)).

    The denominator can only vanish for non-regular parameter sets
    (zeta >= b); such points raise SingularPoint instead of returning Inf.
    """
    s = complex_distance(p, params)
    denom = s * (s - complex(p.z, params.zeta))
    if abs(denom) < 1e-300:
        raise SingularPoint(f"simple pulse singular at {p} (zeta >= b case)")
    return 1.0 / denom


def eval_quasi_spherical(p: SpacetimePoint, params: PulseParams, w: Waveform) -> complex:
    """u = f(theta)/S.  |S| >= b > 0, so no division singularity."""
    s = complex_distance(p, params)
    return complex(w.eval(pulse_phase(p, params))) / s


def eval_spherical_reference(
    p: SpacetimePoint, params: PulseParams, w: Waveform, b_ref: float = 0.0
) -> complex:
    """Isotropic reference u = f(R - ct + i b_ref)/R.

    ``b_ref > 0`` shifts the waveform argument into the upper half-plane
    for waveforms that are only defined there; the default 0 is fine for
    the shipped families, which extend to the real axis.
    """
    r = p.radius
    if r < 1e-300:
        raise SingularPoint("spherical reference singular at the origin")
    return complex(w.eval(r - params.c * p.t + 1j * b_ref)) / r


def simple_pulse_evaluator(params: PulseParams) -> Evaluator:
    return lambda p: eval_simple_pulse(p, params)


def quasi_spherical_evaluator(params: PulseParams, w: Waveform) -> Evaluator:
    return lambda p: eval_quasi_spherical(p, params, w)


def spherical_reference_evaluator(
    params: PulseParams, w: Waveform, b_ref: float = 0.0
) -> Evaluator:
    return lambda p: eval_spherical_reference(p, params, w, b_ref)


# --- structured grid sampling ------------------------------------------

_AXIS_NAMES = ("t", "x", "y", "z", "rho")


@dataclass(frozen=True)
class AxisSpec:
    name: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.name not in _AXIS_NAMES:
            raise ValueError(f"axis name must be one of {_AXIS_NAMES}, got {self.name!r}")
        if self.count < 1:
            raise ValueError(f"axis {self.name}: count must be >= 1, got {self.count}")
        if self.count > 1 and not self.stop > self.start:
            raise ValueError(f"axis {self.name}: stop must exceed start for count > 1")

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.start])
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class GridSpec:
    axes: tuple[AxisSpec, ...]
    fixed: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 3:
            raise ValueError(f"grid must have 1 to 3 axes, got {len(self.axes)}")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate axis names in {names}")
        for k in self.fixed:
            if k not in _AXIS_NAMES:
                raise ValueError(f"fixed coordinate {k!r} is not one of {_AXIS_NAMES}")
            if k in names:
                raise ValueError(f"coordinate {k!r} is both an axis and fixed")
        used = set(names) | set(self.fixed)
        if "rho" in used and ("x" in used or "y" in used):
            raise ValueError("rho cannot be combined with x or y")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.count for a in self.axes)

    def point_at(self, index: tuple[int, ...]) -> SpacetimePoint:
        coords = dict(self.fixed)
        for axis, i in zip(self.axes, index):
            coords[axis.name] = float(axis.values()[i])
        if "rho" in coords:
            return SpacetimePoint.from_cylindrical(
                coords.get("t", 0.0), coords["rho"], coords.get("z", 0.0)
            )
        return SpacetimePoint(
            coords.get("t", 0.0), coords.get("x", 0.0),
            coords.get("y", 0.0), coords.get("z", 0.0),
        )


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("UNIPULSE_THREADS", "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


@dataclass(frozen=True)
class FieldGrid:
    """Sampled complex field over a structured grid, with provenance."""

    spec: GridSpec
    values: np.ndarray
    params: PulseParams | None = None
    waveform_desc: str = ""
    evaluator_desc: str = ""

    def __post_init__(self):
        if self.values.shape != self.spec.shape:
            raise ValueError(
                f"values shape {self.values.shape} != grid shape {self.spec.shape}"
            )

    def rows(self) -> Iterable[tuple[tuple[float, ...], complex]]:
        axis_values = [a.values() for a in self.spec.axes]
        for index in np.ndindex(self.spec.shape):
            coords = tuple(float(av[i]) for av, i in zip(axis_values, index))
            yield coords, complex(self.values[index])

    def _metadata(self) -> dict:
        meta = {
            "axes": [
                {"name": a.name, "start": a.start, "stop": a.stop, "count": a.count}
                for a in self.spec.axes
            ],
            "fixed": dict(sorted(self.spec.fixed.items())),
            "waveform": self.waveform_desc,
            "evaluator": self.evaluator_desc,
        }
        if self.params is not None:
            meta["pulse"] = {
                "c": self.params.c, "tau": self.params.tau, "zeta": self.params.zeta,
            }
        return meta

    def write_csv(self, path) -> None:
        """Rows of axis coordinates, re(u), im(u), |u|, row-major order."""
        from .ioformats import fmt_float

        lines = []
        if self.params is not None:
            lines.append(
                f"# pulse: c={fmt_float(self.params.c)}"
                f" tau={fmt_float(self.params.tau)}"
                f" zeta={fmt_float(self.params.zeta)}"
            )
        if self.waveform_desc:
            lines.append(f"# waveform: {self.waveform_desc}")
        if self.evaluator_desc:
            lines.append(f"# evaluator: {self.evaluator_desc}")
        for k, v in sorted(self.spec.fixed.items()):
            lines.append(f"# fixed: {k}={fmt_float(v)}")
        header = [a.name for a in self.spec.axes] + ["re", "im", "abs"]
        lines.append(",".join(header))
        for coords, u in self.rows():
            cells = [fmt_float(c) for c in coords]
            cells += [fmt_float(u.real), fmt_float(u.imag), fmt_float(abs(u))]
            lines.append(",".join(cells))
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")

    def write_binary(self, json_path) -> None:
        """JSON header plus a sibling .bin of little-endian complex128."""
        from .ioformats import render_json, write_text

        json_path = os.fspath(json_path)
        bin_path = json_path + ".bin"
        header = self._metadata()
        header.update(
            {
                "dtype": "complex128",
                "byte_order": "little",
                "order": "C",
                "shape": list(self.spec.shape),
                "data_file": os.path.basename(bin_path),
            }
        )
        with open(bin_path, "wb") as fh:
            fh.write(np.ascontiguousarray(self.values, dtype="<c16").tobytes())
        write_text(json_path, render_json(header))


def sample_grid(
    spec: GridSpec,
    evaluator: Evaluator,
    *,
    params: PulseParams | None = None,
    waveform_desc: str = "",
    evaluator_desc: str = "",
    workers: int | None = None,
) -> FieldGrid:
    """Evaluate over the grid in row-major order.

    The result is identical to a serial loop regardless of the worker
    count; workers only split the index space into ordered chunks.
    Evaluator failures are re-raised as GridEvaluationError carrying the
    offending index.
    """
    indices = list(np.ndindex(spec.shape))

    def run_chunk(chunk):
        out = []
        for idx in chunk:
            point = spec.point_at(idx)
            try:
                out.append(complex(evaluator(point)))
            except Exception as exc:  # noqa: BLE001 - re-raised with location
                raise GridEvaluationError(idx, point, exc) from exc
        return out

    nworkers = _worker_count(workers)
    values = np.empty(spec.shape, dtype=np.complex128)
    if nworkers == 1 or len(indices) < 4 * nworkers:
        flat = run_chunk(indices)
    else:
        from concurrent.futures import ThreadPoolExecutor

        chunks = np.array_split(np.arange(len(indices)), 4 * nworkers)
        with ThreadPoolExecutor(max_workers=nworkers) as pool:
            parts = pool.map(run_chunk, [[indices[i] for i in c] for c in chunks])
            flat = [v for part in parts for v in part]
    for idx, v in zip(indices, flat):
        values[idx] = v
    return FieldGrid(spec, values, params, waveform_desc, evaluator_desc)


# --- field energy -------------------------------------------------------


@dataclass(frozen=True)
class EnergyEstimate:
    """Truncated-domain field energy plus an extrapolated tail."""

    total: float
    truncated: float
    tail: float
    decay_exponent: float

    def __float__(self):
        return self.total


def energy_estimate(
    t: float,
    params: PulseParams,
    w: Waveform,
    cutoff_radius: float | None = None,
    tol: float = 1e-4,
    deriv_step: float | None = None,
) -> EnergyEstimate:
    """Energy integral |du/d(ct)|^2 + |grad u|^2 over all space at time t.

    Integrates spherical shells adaptively out to ``cutoff_radius``
    (default c|t| + 40 b) and extrapolates the tail from the fitted
    power-law decay of the shell integrand.  Derivatives are central
    differences with step ``deriv_step`` (default 1e-3 b).  Raises
    ToleranceNotReached when the shell integrand is not yet in its
    power-law regime at the cutoff.
    """
    if not params.regular:
        raise ValueError("energy is only finite for regular parameters (zeta < b)")
    b = params.b
    c = params.c
    cutoff = cutoff_radius if cutoff_radius is not None else c * abs(t) + 40.0 * b
    h = deriv_step if deriv_step is not None else 1e-3 * b

    def u(tt, xx, yy, zz):
        return eval_quasi_spherical(SpacetimePoint(tt, xx, yy, zz), params, w)

    def density(xx, yy, zz):
        ux = (u(t, xx + h, yy, zz) - u(t, xx - h, yy, zz)) / (2 * h)
        uy = (u(t, xx, yy + h, zz) - u(t, xx, yy - h, zz)) / (2 * h)
        uz = (u(t, xx, yy, zz + h) - u(t, xx, yy, zz - h)) / (2 * h)
        uct = (u(t + h / c, xx, yy, zz) - u(t - h / c, xx, yy, zz)) / (2 * h)
        return abs(ux) ** 2 + abs(uy) ** 2 + abs(uz) ** 2 + abs(uct) ** 2

    def shell(r, inner_tol):
        if r <= 0.0:
            return 0.0
        res = integrate_adaptive(
            lambda chi: density(r * math.sin(chi), 0.0, r * math.cos(chi))
            * math.sin(chi),
            0.0,
            math.pi,
            inner_tol,
            max_evals=200_000,
        )
        return 2.0 * math.pi * r * r * res.value.real

    # pilot pass fixes the overall scale so tolerances can be made relative
    pilot_nodes = np.linspace(0.0, cutoff, 65)
    pilot_vals = np.array([shell(r, 1e-6) for r in pilot_nodes])
    pilot = float(np.sum(0.5 * (pilot_vals[1:] + pilot_vals[:-1]) * np.diff(pilot_nodes)))
    if not math.isfinite(pilot) or pilot <= 0.0:
        raise ToleranceNotReached(f"energy pilot pass failed (got {pilot})")

    outer_tol = tol * min(1.0, pilot)
    inner_tol = max(outer_tol * 0.1 / max(cutoff, 1.0), 1e-14)
    truncated = integrate_adaptive(
        lambda r: shell(r, inner_tol), 0.0, cutoff, outer_tol, max_evals=6_000
    ).value.real

    # tail: fit shell ~ A R^(-q) near the cutoff and integrate it onward
    radii = [f * cutoff for f in (0.75, 0.85, 0.95, 1.0)]
    samples = [shell(r, inner_tol) for r in radii]
    floor = 1e-16 * pilot / max(cutoff, 1.0)
    if samples[-1] <= floor:
        return EnergyEstimate(truncated, truncated, 0.0, math.inf)
    logs = [math.log(max(s, floor)) for s in samples]
    logr = [math.log(r) for r in radii]
    q = -float(np.polyfit(logr, logs, 1)[0])
    if not q > 1.2:
        raise ToleranceNotReached(
            f"shell integrand not yet asymptotic at R={cutoff:.3g} "
            f"(fitted decay exponent {q:.2f})"
        )
    tail = samples[-1] * cutoff / (q - 1.0)
    return EnergyEstimate(truncated + tail, truncated, tail, q)
