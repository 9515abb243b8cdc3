import cmath
import math

import pytest

from unipulse.fields import (
    SpacetimePoint,
    quasi_spherical_evaluator,
    simple_pulse_evaluator,
)
from unipulse.pdecheck import BelowNoiseFloor, convergence_order, wave_residual
from unipulse.waveforms import LeknerWaveform

POINT = SpacetimePoint(0.3, 0.2, 0.1, -0.4)
H_LADDER = (4e-3, 2e-3, 1e-3)


def oblique_plane_wave(params, kx=0.3, ky=0.4, kz=0.5):
    k = math.sqrt(kx * kx + ky * ky + kz * kz)
    omega = params.c * k

    def ev(p: SpacetimePoint) -> complex:
        return cmath.exp(1j * (kx * p.x + ky * p.y + kz * p.z - omega * p.t))

    return ev


class TestWaveResidual:
    def test_plane_wave_is_a_solution(self, params):
        rep = wave_residual(oblique_plane_wave(params), POINT, 1e-3, params)
        assert rep.normalized <= 1e-5

    def test_simple_pulse_quadratic_truncation(self, params):
        r_2h = wave_residual(simple_pulse_evaluator(params), POINT, 2e-3, params)
        r_h = wave_residual(simple_pulse_evaluator(params), POINT, 1e-3, params)
        ratio = abs(r_2h.residual) / abs(r_h.residual)
        assert 3.5 <= ratio <= 4.5

    def test_static_quadratic_detector(self, params):
        # known Laplacian: u = x^2 leaves residual 2 at any h
        rep = wave_residual(lambda p: complex(p.x * p.x), SpacetimePoint(0, 1.0, 0.5, 0.2), 1e-3, params)
        assert rep.residual == pytest.approx(2.0, abs=1e-6)
        assert rep.normalized == pytest.approx(1.0, abs=1e-6)

    def test_field_scale_positive(self, params):
        rep = wave_residual(simple_pulse_evaluator(params), POINT, 1e-3, params)
        assert rep.field_scale > 0.0
        assert rep.h == 1e-3

    def test_rejects_bad_step(self, params):
        with pytest.raises(ValueError):
            wave_residual(simple_pulse_evaluator(params), POINT, 0.0, params)


class TestConvergenceOrder:
    def test_simple_pulse_order_two(self, params, rng):
        ev = simple_pulse_evaluator(params)
        for _ in range(20):
            p = SpacetimePoint(*rng.uniform(-1.2, 1.2, 4))
            assert 1.8 <= convergence_order(ev, p, H_LADDER, params) <= 2.2

    def test_lekner_order_two(self, params, rng):
        ev = quasi_spherical_evaluator(params, LeknerWaveform(1.0, 1.0))
        for _ in range(20):
            p = SpacetimePoint(*rng.uniform(-1.2, 1.2, 4))
            assert 1.8 <= convergence_order(ev, p, H_LADDER, params) <= 2.2

    def test_non_solution_order_zero(self, params):
        def gaussian(p: SpacetimePoint) -> complex:
            return complex(math.exp(-(p.x**2 + p.y**2 + p.z**2)))

        order = convergence_order(gaussian, SpacetimePoint(0.0, 0.4, 0.2, 0.3), H_LADDER, params)
        assert abs(order) <= 0.05

    def test_axis_aligned_plane_wave_hits_floor(self, params):
        # with steps equal in ct units the truncation cancels exactly and
        # only rounding remains: the order fit must refuse
        def ev(p: SpacetimePoint) -> complex:
            return cmath.exp(1j * (p.z - params.c * p.t))

        with pytest.raises(BelowNoiseFloor):
            convergence_order(ev, POINT, H_LADDER, params)

    def test_requires_decreasing_ladder(self, params):
        ev = simple_pulse_evaluator(params)
        with pytest.raises(ValueError):
            convergence_order(ev, POINT, (1e-3, 2e-3, 4e-3), params)
        with pytest.raises(ValueError):
            convergence_order(ev, POINT, (2e-3, 1e-3), params)
