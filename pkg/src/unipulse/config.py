"""JSON run configurations: loading, strict validation, defaults.

Every command reads a JSON document.  Validation is total: unknown keys
are rejected (no silent typo absorption) and every message names the
offending field path.  Physical constraints (c > 0, tau > 0, ...) are
enforced at load time.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .fields import AxisSpec, GridSpec, PulseParams, SpacetimePoint
from .waveforms import Waveform, parse_waveform


class ConfigError(Exception):
    pass


def load_config(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return doc


def check_keys(obj: dict, allowed: set[str], path: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ConfigError(
            f"{path or 'config'}: unknown key(s) {unknown}; allowed: {sorted(allowed)}"
        )


def get_number(obj: dict, key: str, path: str, default=None, *,
               gt=None, ge=None, lt=None, le=None) -> float:
    if key not in obj:
        if default is None:
            raise ConfigError(f"{path}{key}: required number is missing")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}{key}: expected a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError(f"{path}{key}: must be finite, got {v}")
    if gt is not None and not v > gt:
        raise ConfigError(f"{path}{key}: must be > {gt}, got {v}")
    if ge is not None and not v >= ge:
        raise ConfigError(f"{path}{key}: must be >= {ge}, got {v}")
    if lt is not None and not v < lt:
        raise ConfigError(f"{path}{key}: must be < {lt}, got {v}")
    if le is not None and not v <= le:
        raise ConfigError(f"{path}{key}: must be <= {le}, got {v}")
    return v


def get_int(obj: dict, key: str, path: str, default=None, *, ge=None) -> int:
    if key not in obj:
        if default is None:
            raise ConfigError(f"{path}{key}: required integer is missing")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{path}{key}: expected an integer, got {v!r}")
    if ge is not None and v < ge:
        raise ConfigError(f"{path}{key}: must be >= {ge}, got {v}")
    return v


def get_string(obj: dict, key: str, path: str, default=None,
               choices: tuple[str, ...] | None = None) -> str:
    if key not in obj:
        if default is None:
            raise ConfigError(f"{path}{key}: required string is missing")
        return default
    v = obj[key]
    if not isinstance(v, str):
        raise ConfigError(f"{path}{key}: expected a string, got {v!r}")
    if choices is not None and v not in choices:
        raise ConfigError(f"{path}{key}: must be one of {list(choices)}, got {v!r}")
    return v


def get_number_list(obj: dict, key: str, path: str, default=None) -> list[float]:
    if key not in obj:
        if default is None:
            raise ConfigError(f"{path}{key}: required array is missing")
        return list(default)
    v = obj[key]
    if not isinstance(v, list) or not v:
        raise ConfigError(f"{path}{key}: expected a non-empty array of numbers")
    out = []
    for i, item in enumerate(v):
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ConfigError(f"{path}{key}[{i}]: expected a number, got {item!r}")
        out.append(float(item))
    return out


@dataclass(frozen=True)
class PulseSetup:
    params: PulseParams
    waveform: Waveform
    waveform_desc: str


def parse_pulse_setup(cfg: dict) -> PulseSetup:
    """Shared ``pulse`` and ``waveform`` blocks with documented defaults.

    Defaults: c=1, tau=1, zeta=0 and waveform rational(a = b - zeta),
    the simplest regular family.
    """
    block = cfg.get("pulse", {})
    if not isinstance(block, dict):
        raise ConfigError("pulse: expected an object with keys c, tau, zeta")
    check_keys(block, {"c", "tau", "zeta"}, "pulse")
    try:
        params = PulseParams(
            c=get_number(block, "c", "pulse.", 1.0, gt=0.0),
            tau=get_number(block, "tau", "pulse.", 1.0, gt=0.0),
            zeta=get_number(block, "zeta", "pulse.", 0.0),
        )
    except ValueError as exc:
        raise ConfigError(f"pulse: {exc}") from exc

    desc = cfg.get("waveform")
    if desc is None:
        a = params.b - params.zeta
        if a <= 0.0:
            raise ConfigError(
                "waveform: no default exists for zeta >= c*tau; set one explicitly"
            )
        desc = f"rational(a={a:.17g})"
    if not isinstance(desc, str):
        raise ConfigError(f"waveform: expected a descriptor string, got {desc!r}")
    try:
        w = parse_waveform(desc)
    except ValueError as exc:
        raise ConfigError(f"waveform: {exc}") from exc
    return PulseSetup(params, w, desc)


def parse_points(cfg: dict, key: str = "points") -> list[SpacetimePoint]:
    """Array of {t, rho, z} or {t, x, y, z} objects."""
    raw = cfg.get(key)
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{key}: expected a non-empty array of point objects")
    points = []
    for i, item in enumerate(raw):
        path = f"{key}[{i}]."
        if not isinstance(item, dict):
            raise ConfigError(f"{key}[{i}]: expected an object")
        if "rho" in item:
            check_keys(item, {"t", "rho", "z"}, f"{key}[{i}]")
            points.append(
                SpacetimePoint.from_cylindrical(
                    get_number(item, "t", path, 0.0),
                    get_number(item, "rho", path, ge=0.0),
                    get_number(item, "z", path, 0.0),
                )
            )
        else:
            check_keys(item, {"t", "x", "y", "z"}, f"{key}[{i}]")
            points.append(
                SpacetimePoint(
                    get_number(item, "t", path, 0.0),
                    get_number(item, "x", path, 0.0),
                    get_number(item, "y", path, 0.0),
                    get_number(item, "z", path, 0.0),
                )
            )
    return points


def parse_grid(cfg: dict) -> GridSpec:
    block = cfg.get("grid")
    if not isinstance(block, dict):
        raise ConfigError("grid: expected an object with keys axes, fixed")
    check_keys(block, {"axes", "fixed"}, "grid")
    raw_axes = block.get("axes")
    if not isinstance(raw_axes, list) or not raw_axes:
        raise ConfigError("grid.axes: expected a non-empty array of axis objects")
    axes = []
    for i, item in enumerate(raw_axes):
        path = f"grid.axes[{i}]."
        if not isinstance(item, dict):
            raise ConfigError(f"grid.axes[{i}]: expected an object")
        check_keys(item, {"name", "min", "max", "count"}, f"grid.axes[{i}]")
        name = get_string(item, "name", path)
        count = get_int(item, "count", path, ge=1)
        lo = get_number(item, "min", path)
        hi = get_number(item, "max", path, lo)
        try:
            axes.append(AxisSpec(name, lo, hi, count))
        except ValueError as exc:
            raise ConfigError(f"grid.axes[{i}]: {exc}") from exc
    fixed_raw = block.get("fixed", {})
    if not isinstance(fixed_raw, dict):
        raise ConfigError("grid.fixed: expected an object of coordinate numbers")
    fixed = {
        k: get_number(fixed_raw, k, "grid.fixed.") for k in fixed_raw
    }
    try:
        return GridSpec(tuple(axes), fixed)
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc
