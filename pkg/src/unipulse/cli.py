"""Config-driven command line front end.

Every command reads one JSON config, writes one primary output file,
and follows a uniform exit-code contract:

    0  success
    2  config error (message names the field)
    3  numerical failure (tolerance not reached, singular point, ...)
    4  a requested check failed (route disagreement, certificate FAIL)

Outputs contain no timestamps and print floats with 17 significant
digits, so identical runs produce byte-identical files.  The
environment variable UNIPULSE_THREADS caps internal parallelism.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import __version__
from .config import (
    ConfigError,
    check_keys,
    get_int,
    get_number,
    get_number_list,
    get_string,
    load_config,
    parse_grid,
    parse_points,
    parse_pulse_setup,
)
from .farfield import (
    CERTIFICATE_SCHEDULE_CT,
    DEFAULT_SCHEDULE_CT,
    Direction,
    backward_direction_grid,
    check_unidirectional,
    farfield_analytic,
    farfield_numeric,
)
from .fields import (
    GridEvaluationError,
    SingularPoint,
    SpacetimePoint,
    energy_estimate,
    eval_quasi_spherical,
    quasi_spherical_evaluator,
    sample_grid,
    simple_pulse_evaluator,
    spherical_reference_evaluator,
)
from .ioformats import complex_fields, fmt_float, render_json, write_text
from .numerics import ExtrapolationUnstable, ToleranceNotReached
from .pdecheck import BelowNoiseFloor, convergence_order, wave_residual
from .synthesis import (
    make_spectral_weight,
    reconstruct_cartesian_mc,
    reconstruct_from_weight,
    reconstruct_fourier_bessel,
    reconstruct_hemisphere,
    spectral_weight,
)

_EVALUATORS = ("simple_pulse", "quasi_spherical", "spherical_reference")


class CheckFailed(Exception):
    """A requested verification did not hold; output was still written."""


def _build_evaluator(cfg, setup):
    kind = get_string(cfg, "evaluator", "", "quasi_spherical", choices=_EVALUATORS)
    b_ref = get_number(cfg, "b_ref", "", 0.0, ge=0.0)
    if kind == "simple_pulse":
        return simple_pulse_evaluator(setup.params), kind
    if kind == "spherical_reference":
        return spherical_reference_evaluator(setup.params, setup.waveform, b_ref), kind
    return quasi_spherical_evaluator(setup.params, setup.waveform), kind


def _pulse_header(setup) -> dict:
    return {
        "pulse": {
            "c": setup.params.c,
            "tau": setup.params.tau,
            "zeta": setup.params.zeta,
            "b": setup.params.b,
            "regular": setup.params.regular,
        },
        "waveform": setup.waveform_desc,
    }


def _point_fields(p: SpacetimePoint) -> dict:
    return {"t": p.t, "x": p.x, "y": p.y, "z": p.z}


# --- commands -----------------------------------------------------------

SAMPLE_KEYS = {"pulse", "waveform", "evaluator", "b_ref", "grid", "format", "out"}


def run_sample(cfg: dict, out: str | None, seed: int | None) -> int:
    check_keys(cfg, SAMPLE_KEYS, "")
    setup = parse_pulse_setup(cfg)
    evaluator, kind = _build_evaluator(cfg, setup)
    grid = parse_grid(cfg)
    fmt = get_string(cfg, "format", "", "csv", choices=("csv", "binary"))
    out = out or cfg.get("out") or ("unipulse_sample.csv" if fmt == "csv" else "unipulse_sample.json")
    field = sample_grid(
        grid, evaluator,
        params=setup.params, waveform_desc=setup.waveform_desc, evaluator_desc=kind,
    )
    if fmt == "csv":
        field.write_csv(out)
    else:
        field.write_binary(out)
    print(f"wrote {field.values.size} samples to {out}", file=sys.stderr)
    return 0


COMPARE_KEYS = {"pulse", "waveform", "points", "tolerance", "max_discrepancy", "mc", "out"}


def run_compare(cfg: dict, out: str | None, seed: int | None) -> int:
    check_keys(cfg, COMPARE_KEYS, "")
    setup = parse_pulse_setup(cfg)
    points = parse_points(cfg)
    tol = get_number(cfg, "tolerance", "", 1e-6, gt=0.0)
    bound = get_number(cfg, "max_discrepancy", "", 1e-5, gt=0.0)
    mc_cfg = cfg.get("mc")
    mc_n = 0
    mc_seed = 1
    mc_sigma = 4.0
    if mc_cfg is not None:
        if not isinstance(mc_cfg, dict):
            raise ConfigError("mc: expected an object")
        check_keys(mc_cfg, {"n_samples", "seed", "sigma"}, "mc")
        mc_n = get_int(mc_cfg, "n_samples", "mc.", 0, ge=0)
        mc_seed = get_int(mc_cfg, "seed", "mc.", 1, ge=0)
        mc_sigma = get_number(mc_cfg, "sigma", "mc.", 4.0, gt=0.0)
    if seed is not None:
        mc_seed = seed

    rows = []
    worst = 0.0
    ok = True
    for p in points:
        closed = eval_quasi_spherical(p, setup.params, setup.waveform)
        hemi = reconstruct_hemisphere(setup.params, setup.waveform, p, tol)
        fb = reconstruct_fourier_bessel(setup.params, setup.waveform, p, tol)
        weight = make_spectral_weight(setup.params, setup.waveform)
        wt = reconstruct_from_weight(weight, p, tol)
        disc = max(
            abs(hemi.value - closed), abs(fb.value - closed), abs(wt.value - closed)
        )
        row = {
            "point": _point_fields(p),
            "closed_form": complex_fields(closed),
            "hemisphere": complex_fields(hemi.value),
            "fourier_bessel": complex_fields(fb.value),
            "from_weight": complex_fields(wt.value),
        }
        if mc_n:
            mc = reconstruct_cartesian_mc(setup.params, setup.waveform, p, mc_n, mc_seed)
            row["mc_estimate"] = complex_fields(mc.value)
            row["mc_stderr"] = mc.stderr
            if abs(mc.value - closed) > mc_sigma * mc.stderr:
                ok = False
        row["max_discrepancy"] = disc
        rows.append(row)
        worst = max(worst, disc)
        if disc > bound:
            ok = False

    doc = _pulse_header(setup)
    doc.update(
        {
            "tolerance": tol,
            "max_discrepancy_bound": bound,
            "worst_discrepancy": worst,
            "pass": ok,
            "rows": rows,
        }
    )
    out = out or cfg.get("out") or "unipulse_compare.json"
    write_text(out, render_json(doc))
    print(f"wrote route comparison for {len(points)} point(s) to {out}", file=sys.stderr)
    if not ok:
        raise CheckFailed(f"route disagreement {worst:.3e} exceeds bound {bound:.3e}")
    return 0


FARFIELD_KEYS = {"pulse", "waveform", "s_values", "directions", "schedule_ct", "out"}


def _parse_directions(cfg: dict, key: str = "directions"):
    raw = cfg.get(key)
    if raw is None:
        return None
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{key}: expected a non-empty array of direction objects")
    out = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict):
            raise ConfigError(f"{key}[{i}]: expected an object")
        check_keys(item, {"chi", "phi"}, f"{key}[{i}]")
        try:
            out.append(
                Direction(
                    get_number(item, "chi", f"{key}[{i}]."),
                    get_number(item, "phi", f"{key}[{i}].", 0.0),
                )
            )
        except ValueError as exc:
            raise ConfigError(f"{key}[{i}]: {exc}") from exc
    return out


def run_farfield(cfg: dict, out: str | None, seed: int | None) -> int:
    check_keys(cfg, FARFIELD_KEYS, "")
    setup = parse_pulse_setup(cfg)
    s_values = get_number_list(cfg, "s_values", "", (-1.0, 0.0, 1.0))
    directions = _parse_directions(cfg) or [
        Direction(0.0), Direction(math.pi / 6), Direction(math.pi / 3)
    ]
    factors = get_number_list(cfg, "schedule_ct", "", DEFAULT_SCHEDULE_CT)
    schedule = tuple(f * setup.params.b / setup.params.c for f in factors)
    evaluator = quasi_spherical_evaluator(setup.params, setup.waveform)

    rows = []
    for d in directions:
        for s in s_values:
            fn = farfield_numeric(evaluator, s, d, schedule, setup.params.c)
            fa = farfield_analytic(s, d, setup.params, setup.waveform)
            rows.append(
                {
                    "chi": d.chi,
                    "phi": d.phi,
                    "s": s,
                    "numeric": complex_fields(fn),
                    "analytic": complex_fields(fa),
                    "abs_diff": abs(fn - fa),
                }
            )
    doc = _pulse_header(setup)
    doc.update({"schedule_ct_over_b": list(factors), "rows": rows})
    out = out or cfg.get("out") or "unipulse_farfield.json"
    write_text(out, render_json(doc))
    print(f"wrote {len(rows)} far-field samples to {out}", file=sys.stderr)
    return 0


UNIDIR_KEYS = {
    "pulse", "waveform", "evaluator", "b_ref", "s_values",
    "backward_directions", "tolerance", "schedule_ct", "out",
}


def run_unidir(cfg: dict, out: str | None, seed: int | None) -> int:
    check_keys(cfg, UNIDIR_KEYS, "")
    setup = parse_pulse_setup(cfg)
    evaluator, kind = _build_evaluator(cfg, setup)
    s_values = get_number_list(cfg, "s_values", "", (-2.0, -1.0, 0.0, 1.0, 2.0))
    directions = _parse_directions(cfg, "backward_directions") or backward_direction_grid(8)
    tol = get_number(cfg, "tolerance", "", 1e-6, gt=0.0)
    factors = get_number_list(cfg, "schedule_ct", "", CERTIFICATE_SCHEDULE_CT)
    schedule = tuple(f * setup.params.b / setup.params.c for f in factors)

    report = check_unidirectional(
        evaluator, s_values, directions, tol, schedule, setup.params.c
    )
    doc = _pulse_header(setup)
    doc["evaluator"] = kind
    doc.update(report.as_dict())
    out = out or cfg.get("out") or "unipulse_unidir.json"
    write_text(out, render_json(doc))
    verdict = "PASS" if report.passed else "FAIL"
    print(
        f"unidirectionality {verdict}: max |F| = {report.max_abs:.3e}"
        f" (tol {tol:.1e}), report in {out}",
        file=sys.stderr,
    )
    if not report.passed:
        raise CheckFailed(f"backward far field reaches {report.max_abs:.3e} > {tol:.1e}")
    return 0


SPECTRUM_KEYS = {"pulse", "waveform", "kz", "omega", "out"}


def _parse_range(cfg: dict, key: str, lo_default: float, hi_default: float,
                 count_default: int):
    block = cfg.get(key, {})
    if not isinstance(block, dict):
        raise ConfigError(f"{key}: expected an object with keys min, max, count")
    check_keys(block, {"min", "max", "count"}, key)
    lo = get_number(block, "min", f"{key}.", lo_default)
    hi = get_number(block, "max", f"{key}.", hi_default)
    count = get_int(block, "count", f"{key}.", count_default, ge=1)
    if count > 1 and not hi > lo:
        raise ConfigError(f"{key}: max must exceed min for count > 1")
    return np.linspace(lo, hi, count)


def run_spectrum(cfg: dict, out: str | None, seed: int | None) -> int:
    check_keys(cfg, SPECTRUM_KEYS, "")
    setup = parse_pulse_setup(cfg)
    kz_grid = _parse_range(cfg, "kz", 0.0, 3.0, 31)
    omega_grid = _parse_range(cfg, "omega", 0.5, 5.0, 10)
    if np.any(kz_grid < 0.0):
        raise ConfigError("kz.min: must be >= 0")
    if np.any(omega_grid <= 0.0):
        raise ConfigError("omega.min: must be > 0")

    lines = [
        f"# pulse: c={fmt_float(setup.params.c)} tau={fmt_float(setup.params.tau)}"
        f" zeta={fmt_float(setup.params.zeta)}",
        f"# waveform: {setup.waveform_desc}",
        "kz,omega,re,im,abs",
    ]
    n_rows = 0
    for omega in omega_grid:
        for kz in kz_grid:
            if kz > omega / setup.params.c:
                continue
            a = spectral_weight(float(kz), float(omega), setup.params, setup.waveform)
            lines.append(
                ",".join(
                    (fmt_float(kz), fmt_float(omega),
                     fmt_float(a.real), fmt_float(a.imag), fmt_float(abs(a)))
                )
            )
            n_rows += 1
    out = out or cfg.get("out") or "unipulse_spectrum.csv"
    write_text(out, "\n".join(lines))
    print(f"wrote {n_rows} spectral-weight rows to {out}", file=sys.stderr)
    return 0


RESIDUAL_KEYS = {
    "pulse", "waveform", "evaluator", "b_ref", "points", "random_points",
    "h_values", "out",
}


def run_residual(cfg: dict, out: str | None, seed: int | None) -> int:
    check_keys(cfg, RESIDUAL_KEYS, "")
    setup = parse_pulse_setup(cfg)
    evaluator, kind = _build_evaluator(cfg, setup)
    b = setup.params.b
    h_values = sorted(
        get_number_list(cfg, "h_values", "", (4e-3 * b, 2e-3 * b, 1e-3 * b)),
        reverse=True,
    )
    if any(h <= 0 for h in h_values):
        raise ConfigError("h_values: all steps must be > 0")

    if "points" in cfg:
        points = parse_points(cfg)
    else:
        block = cfg.get("random_points", {})
        if not isinstance(block, dict):
            raise ConfigError("random_points: expected an object")
        check_keys(block, {"n", "seed", "extent"}, "random_points")
        n = get_int(block, "n", "random_points.", 20, ge=1)
        pt_seed = get_int(block, "seed", "random_points.", 7, ge=0)
        extent = get_number(block, "extent", "random_points.", 1.2 * b, gt=0.0)
        rng = np.random.default_rng(pt_seed)
        points = [
            SpacetimePoint(*rng.uniform(-extent, extent, 4)) for _ in range(n)
        ]

    lines = [
        f"# evaluator: {kind}",
        f"# waveform: {setup.waveform_desc}",
        "t,x,y,z,h,abs_residual,normalized_residual,fitted_order",
    ]
    for p in points:
        try:
            order = convergence_order(evaluator, p, h_values, setup.params)
            order_cell = fmt_float(order)
        except BelowNoiseFloor:
            order_cell = "NaN"  # residuals at rounding floor: no order to fit
        for h in h_values:
            rep = wave_residual(evaluator, p, h, setup.params)
            lines.append(
                ",".join(
                    (fmt_float(p.t), fmt_float(p.x), fmt_float(p.y), fmt_float(p.z),
                     fmt_float(h), fmt_float(abs(rep.residual)),
                     fmt_float(rep.normalized), order_cell)
                )
            )
    out = out or cfg.get("out") or "unipulse_residual.csv"
    write_text(out, "\n".join(lines))
    print(f"wrote residuals for {len(points)} point(s) to {out}", file=sys.stderr)
    return 0


ENERGY_KEYS = {"pulse", "waveform", "t_values", "cutoff_radius", "tolerance", "out"}


def run_energy(cfg: dict, out: str | None, seed: int | None) -> int:
    check_keys(cfg, ENERGY_KEYS, "")
    setup = parse_pulse_setup(cfg)
    if not setup.params.regular:
        raise ConfigError("pulse: energy requires a regular family (zeta < c*tau)")
    t_values = get_number_list(cfg, "t_values", "", (0.0,))
    cutoff = cfg.get("cutoff_radius")
    if cutoff is not None:
        cutoff = get_number(cfg, "cutoff_radius", "", gt=0.0)
    tol = get_number(cfg, "tolerance", "", 1e-4, gt=0.0)

    rows = []
    for t in t_values:
        est = energy_estimate(t, setup.params, setup.waveform, cutoff, tol)
        rows.append(
            {
                "t": t,
                "energy": est.total,
                "truncated": est.truncated,
                "tail": est.tail,
                "shell_decay_exponent": est.decay_exponent,
            }
        )
    doc = _pulse_header(setup)
    doc.update({"tolerance": tol, "rows": rows})
    out = out or cfg.get("out") or "unipulse_energy.json"
    write_text(out, render_json(doc))
    print(f"wrote energy at {len(t_values)} time(s) to {out}", file=sys.stderr)
    return 0


# --- argument parsing ----------------------------------------------------

_COMMANDS = {
    "sample": (run_sample, SAMPLE_KEYS,
               "Sample an evaluator over a structured grid (CSV or JSON+binary)."),
    "compare": (run_compare, COMPARE_KEYS,
                "Cross-check the closed form against hemisphere, Fourier-Bessel "
                "and spectral-weight reconstructions (optional Monte Carlo)."),
    "farfield": (run_farfield, FARFIELD_KEYS,
                 "Tabulate numeric and closed-form directional amplitudes."),
    "unidir": (run_unidir, UNIDIR_KEYS,
               "Certify that the backward-hemisphere far field vanishes."),
    "spectrum": (run_spectrum, SPECTRUM_KEYS,
                 "Tabulate the spectral weight A(k_z, omega) over a grid."),
    "residual": (run_residual, RESIDUAL_KEYS,
                 "Finite-difference wave-equation residuals and convergence order."),
    "energy": (run_energy, ENERGY_KEYS,
               "Field energy with tail extrapolation."),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unipulse",
        description="Closed-form localized unidirectional pulses: evaluation, "
        "far-field certificates and cross-validated reconstructions.",
    )
    parser.add_argument("--version", action="version", version=f"unipulse {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, keys, help_text) in _COMMANDS.items():
        p = sub.add_parser(
            name,
            help=help_text,
            description=help_text,
            epilog=f"Config keys read by this command: {', '.join(sorted(keys))}. "
            "Unknown keys are errors.",
        )
        p.add_argument("--config", required=True, help="path to the JSON run config")
        p.add_argument("--out", default=None, help="primary output path (overrides config)")
        p.add_argument("--seed", type=int, default=None,
                       help="override any RNG seed in the config")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    runner = _COMMANDS[args.command][0]
    try:
        cfg = load_config(args.config)
        return runner(cfg, args.out, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ToleranceNotReached, ExtrapolationUnstable, SingularPoint,
            GridEvaluationError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 4


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
