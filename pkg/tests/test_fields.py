import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unipulse.fields import (
    AxisSpec,
    GridSpec,
    PulseParams,
    SingularPoint,
    SpacetimePoint,
    complex_distance,
    energy_estimate,
    eval_quasi_spherical,
    eval_simple_pulse,
    eval_spherical_reference,
    pulse_phase,
    sample_grid,
    simple_pulse_evaluator,
)
from unipulse.waveforms import LeknerWaveform, RationalWaveform, Waveform

mp.mp.dps = 40


def pulse_oracle(t, rho, z, c, tau, zeta):
    """Arbitrary-precision composition of the closed form."""
    tstar = mp.mpc(t, tau)
    s = mp.sqrt((c * tstar) ** 2 - rho**2)
    if s.imag < 0:
        s = -s
    return complex(1 / (s * (s - mp.mpc(z, zeta))))


class TestPulseParams:
    def test_derived_b(self):
        p = PulseParams(2.0, 0.5, 0.1)
        assert p.b == 1.0 and p.regular

    def test_regularity_flag(self):
        assert not PulseParams(1.0, 1.0, 1.5).regular

    @pytest.mark.parametrize("kw", [{"c": 0.0}, {"tau": -1.0}, {"zeta": math.inf}])
    def test_validation(self, kw):
        base = {"c": 1.0, "tau": 1.0, "zeta": 0.0}
        with pytest.raises(ValueError):
            PulseParams(**{**base, **kw})


class TestComplexDistance:
    def test_on_axis_branch(self, params):
        assert complex_distance(SpacetimePoint(2, 0, 0, 0), params) == 2 + 1j

    def test_negative_radicand(self, params):
        s = complex_distance(SpacetimePoint(0, 1, 0, 0), params)
        assert s == pytest.approx(1j * math.sqrt(2.0))

    def test_oracle_point(self):
        # oracle: high-precision sqrt with Im >= 0 at t=1, rho=0.5, tau=0.3
        p = PulseParams(1.0, 0.3)
        s = complex_distance(SpacetimePoint(1, 0.5, 0, 0), p)
        assert s == pytest.approx(0.8808984404683409 + 0.3405613930256264j, abs=1e-15)

    @given(
        t=st.floats(-10, 10), rho=st.floats(0, 10),
        c=st.floats(0.1, 5), tau=st.floats(0.05, 4),
    )
    @settings(max_examples=300)
    def test_branch_inequality(self, t, rho, c, tau):
        p = PulseParams(c, tau)
        s = complex_distance(SpacetimePoint(t, rho, 0, 0), p)
        assert s.imag >= c * tau - 1e-12


class TestPulsePhase:
    def test_on_axis_is_real(self, params):
        th = pulse_phase(SpacetimePoint(1.5, 0, 0, 0.4), params)
        assert th == pytest.approx(1.1)  # ct - z
        assert abs(th.imag) <= 1e-12

    def test_origin(self, params):
        assert pulse_phase(SpacetimePoint(0, 0, 0, 0), params) == 0.0

    def test_oracle_point(self, params):
        # composition of the oracle square root at t=1, rho=1, z=0.5
        th = pulse_phase(SpacetimePoint(1, 1, 0, 0.5), params)
        assert th == pytest.approx(
            0.2861513777574233 + 0.272019649514069j, abs=1e-15
        )
        assert th.imag > 0.0

    def test_imaginary_part_nonnegative(self, params, rng):
        for _ in range(2000):
            t, z = rng.uniform(-10, 10, 2)
            rho = rng.uniform(0, 10)
            th = pulse_phase(SpacetimePoint.from_cylindrical(t, rho, z), params)
            assert th.imag >= -1e-12


class TestSimplePulse:
    def test_origin_t0(self, params):
        assert eval_simple_pulse(SpacetimePoint(0, 0, 0, 0), params) == -1.0

    def test_axis_t1(self, params):
        # S = 1 + i, u = 1/(1+i)^2 = -i/2
        assert eval_simple_pulse(SpacetimePoint(1, 0, 0, 0), params) == -0.5j

    def test_oracle_point(self):
        p = PulseParams(1.0, 0.8, 0.2)
        u = eval_simple_pulse(SpacetimePoint.from_cylindrical(0.7, 1.2, -0.4), p)
        assert u == pytest.approx(
            -0.3047022594859845 - 0.4133117616624564j, abs=1e-15
        )

    def test_singular_only_for_non_regular(self):
        bad = PulseParams(1.0, 1.0, 1.0)  # zeta = b: pole at the origin at t=0
        with pytest.raises(SingularPoint):
            eval_simple_pulse(SpacetimePoint(0, 0, 0, 0), bad)

    def test_axisymmetry(self, params, rng):
        for _ in range(200):
            t, z = rng.uniform(-3, 3, 2)
            rho = rng.uniform(0, 3)
            ang = rng.uniform(0, 2 * math.pi)
            u1 = eval_simple_pulse(
                SpacetimePoint(t, rho * math.cos(ang), rho * math.sin(ang), z), params
            )
            u2 = eval_simple_pulse(SpacetimePoint(t, rho, 0.0, z), params)
            assert abs(u1 - u2) <= 4e-16 + 2e-15 * abs(u2)


class TestQuasiSpherical:
    def test_rational_reproduces_simple_pulse(self, rng):
        for zeta in (0.0, 0.5):
            p = PulseParams(1.0, 1.0, zeta)
            w = RationalWaveform(p.b - zeta)
            worst = 0.0
            for _ in range(1000):
                t, x, y, z = rng.uniform(-3, 3, 4)
                pt = SpacetimePoint(t, x, y, z)
                u1 = eval_simple_pulse(pt, p)
                u2 = eval_quasi_spherical(pt, p, w)
                worst = max(worst, abs(u1 - u2) / abs(u1))
            assert worst <= 1e-13

    def test_zero_carrier_matches_rational(self, params, rng):
        wl = LeknerWaveform(params.b, 0.0)
        wr = RationalWaveform(params.b)
        for _ in range(100):
            pt = SpacetimePoint(*rng.uniform(-2, 2, 4))
            assert eval_quasi_spherical(pt, params, wl) == pytest.approx(
                eval_quasi_spherical(pt, params, wr), rel=1e-15
            )

    def test_lekner_origin_oracle(self, params):
        # theta = 0 there, so u = e^0 / (i * i) = -1
        u = eval_quasi_spherical(SpacetimePoint(0, 0, 0, 0), params, LeknerWaveform(1.0, 2.0))
        assert u == pytest.approx(-1.0, abs=1e-15)


class TestSphericalReference:
    def test_basic_value(self, params):
        u = eval_spherical_reference(
            SpacetimePoint(0, 1, 0, 0), params, RationalWaveform(1.0)
        )
        assert u == pytest.approx((1 - 1j) / 2)

    def test_zero_retarded_argument(self, params):
        w = RationalWaveform(1.0)
        u = eval_spherical_reference(
            SpacetimePoint(2, 0, 0, 2), params, w, b_ref=0.5
        )
        assert u == pytest.approx(w.eval(0.5j) / 2.0)

    def test_origin_is_singular(self, params):
        with pytest.raises(SingularPoint):
            eval_spherical_reference(SpacetimePoint(0, 0, 0, 0), params, RationalWaveform(1.0))


class TestGrid:
    def test_single_point(self, params):
        spec = GridSpec((AxisSpec("rho", 0.3, 0.3, 1),), {"t": 0.0, "z": 0.1})
        grid = sample_grid(spec, simple_pulse_evaluator(params))
        expect = eval_simple_pulse(SpacetimePoint.from_cylindrical(0.0, 0.3, 0.1), params)
        assert grid.values.shape == (1,)
        assert grid.values[0] == expect

    def test_2x2_matches_direct_calls(self, params):
        spec = GridSpec(
            (AxisSpec("rho", 0.0, 1.0, 2), AxisSpec("z", -1.0, 1.0, 2)), {"t": 0.5}
        )
        grid = sample_grid(spec, simple_pulse_evaluator(params))
        for (i, rho) in enumerate((0.0, 1.0)):
            for (j, z) in enumerate((-1.0, 1.0)):
                direct = eval_simple_pulse(
                    SpacetimePoint.from_cylindrical(0.5, rho, z), params
                )
                assert grid.values[i, j] == direct

    def test_snapshot_peaks_at_origin(self, params):
        # brute-force scan: the t=0 snapshot with zeta=0 attains max |u| at rho=z=0
        spec = GridSpec(
            (AxisSpec("rho", 0.0, 5.0, 101), AxisSpec("z", -5.0, 5.0, 101)), {"t": 0.0}
        )
        grid = sample_grid(spec, simple_pulse_evaluator(params))
        flat = np.abs(grid.values)
        i, j = np.unravel_index(np.argmax(flat), flat.shape)
        assert (i, j) == (0, 50)
        assert flat[i, j] == pytest.approx(1.0)

    def test_worker_count_does_not_change_result(self, params):
        spec = GridSpec(
            (AxisSpec("rho", 0.0, 2.0, 13), AxisSpec("z", -2.0, 2.0, 11)), {"t": 0.3}
        )
        serial = sample_grid(spec, simple_pulse_evaluator(params), workers=1)
        threaded = sample_grid(spec, simple_pulse_evaluator(params), workers=4)
        assert np.array_equal(serial.values, threaded.values)

    def test_error_carries_grid_index(self, params):
        from unipulse.fields import GridEvaluationError

        def broken(p):
            if p.z > 0:
                raise SingularPoint("boom")
            return 1.0 + 0j

        spec = GridSpec((AxisSpec("z", -1.0, 1.0, 3),), {})
        with pytest.raises(GridEvaluationError) as exc:
            sample_grid(spec, broken)
        assert exc.value.index == (2,)

    def test_rho_conflicts_with_xy(self):
        with pytest.raises(ValueError):
            GridSpec((AxisSpec("rho", 0, 1, 2), AxisSpec("x", 0, 1, 2)), {})

    def test_csv_roundtrip_shape(self, params, tmp_path):
        spec = GridSpec((AxisSpec("rho", 0.0, 1.0, 3),), {"t": 0.0})
        grid = sample_grid(
            spec, simple_pulse_evaluator(params),
            params=params, waveform_desc="rational(a=1)", evaluator_desc="simple_pulse",
        )
        path = tmp_path / "grid.csv"
        grid.write_csv(path)
        lines = path.read_text().splitlines()
        data = [l for l in lines if not l.startswith("#")]
        assert data[0] == "rho,re,im,abs"
        assert len(data) == 4

    def test_binary_roundtrip(self, params, tmp_path):
        import json

        spec = GridSpec((AxisSpec("z", -1.0, 1.0, 5),), {"t": 0.2})
        grid = sample_grid(spec, simple_pulse_evaluator(params), params=params)
        jpath = tmp_path / "grid.json"
        grid.write_binary(jpath)
        header = json.loads(jpath.read_text())
        raw = (tmp_path / header["data_file"]).read_bytes()
        values = np.frombuffer(raw, dtype="<c16").reshape(header["shape"])
        assert np.array_equal(values, grid.values)


class _Scaled(Waveform):
    """Amplitude-scaled wrapper used to probe quadratic functionals."""

    def __init__(self, inner: Waveform, factor: float):
        self.inner = inner
        self.factor = factor
        self.decay_rate = inner.decay_rate
        self.spectrum_breakpoints = inner.spectrum_breakpoints

    def eval(self, theta):
        return self.factor * self.inner.eval(theta)

    def deriv(self, theta):
        return self.factor * self.inner.deriv(theta)

    def spectrum(self, kappa):
        return self.factor * self.inner.spectrum(kappa)

    def describe(self):
        return f"scaled({self.inner.describe()},{self.factor})"


class TestEnergy:
    def test_finite_and_conserved(self, params, rational):
        e0 = energy_estimate(0.0, params, rational)
        e1 = energy_estimate(1.0, params, rational)
        assert math.isfinite(e0.total) and e0.total > 0.0
        assert abs(e0.total - e1.total) / e0.total <= 1e-3

    def test_shell_decay_exponent(self, params, rational):
        est = energy_estimate(0.0, params, rational)
        assert est.decay_exponent >= 1.9

    def test_quadratic_scaling(self, params, rational):
        base = energy_estimate(0.0, params, rational, cutoff_radius=15.0)
        doubled = energy_estimate(0.0, params, _Scaled(rational, 2.0), cutoff_radius=15.0)
        assert doubled.total == pytest.approx(4.0 * base.total, rel=1e-6)

    def test_rejects_non_regular(self):
        with pytest.raises(ValueError):
            energy_estimate(0.0, PulseParams(1.0, 1.0, 2.0), RationalWaveform(1.0))
