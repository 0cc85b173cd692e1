import csv
import io
import math

import jax.numpy as jnp
import numpy as np
import pytest

from grayscott import grid, integrator, kinetics, monitors
from grayscott.exceptions import ParameterError


@pytest.fixture
def lattice16():
    return grid.LatticeSpec.from_side(16, 16)


def _bounds_for(state, p, lattice):
    return monitors.compute_bounds(state.u, state.v, p, lattice)


class _Pipe(io.StringIO):
    """Text sink without random access, like a pipe or a terminal."""

    def seekable(self):
        return False

    def tell(self):
        raise io.UnsupportedOperation("underlying stream is not seekable")


class TestComputeBounds:

    def test_published_equilibrium(self, published_params):
        lattice = grid.LatticeSpec.from_side(200, 200)
        u0 = grid.field_constant(200, 200, 1.0)
        v0 = grid.field_constant(200, 200, 0.0)
        b = monitors.compute_bounds(u0, v0, published_params, lattice)
        assert b.sup_bound == 1.0
        assert np.isclose(b.mass_bound, 40000 / 0.0636, rtol=1e-14)
        assert round(b.mass_bound, 1) == 628930.8

    def test_large_initial_sup(self, published_params, lattice16):
        u0 = np.ones((16, 16))
        u0[3, 3] = 2.5
        b = monitors.compute_bounds(jnp.asarray(u0), jnp.zeros((16, 16)), published_params, lattice16)
        assert b.sup_bound == 2.5

    def test_initial_mass_dominates(self, lattice16):
        p = kinetics.ModelParams(kappa=1.0)
        u0 = grid.field_constant(16, 16, 3.0)
        v0 = grid.field_constant(16, 16, 1.0)
        b = monitors.compute_bounds(u0, v0, p, lattice16)
        assert b.mass_bound == 4.0 * 256

    def test_kappa_tilde_is_capped(self, lattice16, equilibrium_state):
        p = kinetics.ModelParams(kappa=5.0)
        b = _bounds_for(equilibrium_state, p, lattice16)
        assert b.mass_bound == 256.0

    def test_spacing(self):
        lattice = grid.LatticeSpec(8.0, 16, 0.5)
        p = kinetics.ModelParams(kappa=0.5, h=0.5)
        b = monitors.compute_bounds(
            grid.field_constant(16, 16, 1.0), grid.field_constant(16, 16, 0.0), p, lattice
        )
        assert b.mass_bound == 64.0 / 0.5

    def test_zero_kappa(self, equilibrium_state, lattice16):
        with pytest.raises(ParameterError, match="kappa"):
            _bounds_for(equilibrium_state, kinetics.ModelParams(kappa=0.0), lattice16)

    @pytest.mark.parametrize("c", [1.0, 1.5, 3.0, 10.0])
    def test_monotone_in_initial_u(self, random_state, published_params, lattice16, c):
        b = _bounds_for(random_state, published_params, lattice16)
        scaled = monitors.compute_bounds(
            c * random_state.u, random_state.v, published_params, lattice16
        )
        assert scaled.sup_bound >= b.sup_bound
        assert scaled.mass_bound >= b.mass_bound


class TestEnvelopes:

    def test_sup_envelope_endpoints(self):
        assert monitors.sup_envelope(0.0, 3.0, 0.04) == 3.0
        assert np.isclose(monitors.sup_envelope(1e4, 3.0, 0.04), 1.0)

    @pytest.mark.parametrize("sup_u0", [0.2, 1.0, 4.0])
    def test_sup_envelope_below_constant_bound(self, sup_u0):
        for t in np.linspace(0, 200, 21):
            assert monitors.sup_envelope(t, sup_u0, 0.04) <= max(sup_u0, 1.0) + 1e-15

    def test_mass_envelope_endpoints(self):
        area = 256.0
        assert monitors.mass_envelope(0.0, 100.0, 0.04, 0.0636, area) == 100.0
        assert np.isclose(
            monitors.mass_envelope(1e6, 100.0, 0.04, 0.0636, area), area / 0.0636
        )

    @pytest.mark.parametrize("mass0", [0.0, 256.0, 1e4])
    def test_mass_envelope_below_constant_bound(self, mass0):
        area, kappa = 256.0, 0.0636
        bound = max(area / kappa, mass0)
        for t in np.linspace(0, 1000, 21):
            assert monitors.mass_envelope(t, mass0, 0.04, kappa, area) <= bound * (1 + 1e-14)


class TestAudit:

    def test_clean_state(self, seeded_state, published_params, lattice16, small_kernel):
        bounds = _bounds_for(seeded_state, published_params, lattice16)
        r = monitors.audit(seeded_state, bounds, published_params, lattice16, "mixed", small_kernel)
        assert r.violations == []
        assert not r.has_violations
        assert r.min_u == 0.5 and r.min_v == 0.0
        assert r.sup_u == 1.0 and r.sup_v == 0.25
        assert r.total_mass == 256 - 16 * 0.5 + 16 * 0.25
        assert r.gamma_residual <= 1e-12
        assert r.laplacian_residual <= 1e-12

    def test_after_mixed_steps(self, seeded_state, published_params, lattice16, small_kernel):
        bounds = _bounds_for(seeded_state, published_params, lattice16)
        s = integrator.advance(seeded_state, published_params, 200, "mixed", small_kernel)
        r = monitors.audit(s, bounds, published_params, lattice16, "mixed", small_kernel)
        assert r.violations == []
        assert r.step == 200 and r.time == 200.0

    def test_negative_u(self, equilibrium_state, published_params, lattice16):
        bounds = _bounds_for(equilibrium_state, published_params, lattice16)
        u = np.ones((16, 16))
        u[2, 3] = -0.01
        s = integrator.SimState(jnp.asarray(u), equilibrium_state.v)
        r = monitors.audit(s, bounds, published_params, lattice16, "mixed")
        assert r.violations == ["u_negative"]
        assert r.has_violations

    def test_tiny_negative_is_tolerated(self, equilibrium_state, published_params, lattice16):
        bounds = _bounds_for(equilibrium_state, published_params, lattice16)
        v = np.zeros((16, 16))
        v[0, 0] = -1e-12
        s = integrator.SimState(equilibrium_state.u, jnp.asarray(v))
        r = monitors.audit(s, bounds, published_params, lattice16, "mixed")
        assert r.violations == []

    def test_negative_v(self, equilibrium_state, published_params, lattice16):
        bounds = _bounds_for(equilibrium_state, published_params, lattice16)
        v = np.zeros((16, 16))
        v[0, 0] = -1e-3
        s = integrator.SimState(equilibrium_state.u, jnp.asarray(v))
        assert monitors.audit(s, bounds, published_params, lattice16, "mixed").violations == [
            "v_negative"
        ]

    @pytest.mark.parametrize(
        "variant, expected, fails",
        [
            ("mixed", ["u_sup_bound"], True),
            ("local", ["u_sup_bound_advisory"], False),
            ("reversed", ["u_sup_bound_advisory"], False),
        ],
    )
    def test_sup_bound(self, equilibrium_state, published_params, lattice16, variant, expected, fails):
        bounds = _bounds_for(equilibrium_state, published_params, lattice16)
        u = np.ones((16, 16))
        u[5, 5] = 1.01
        s = integrator.SimState(jnp.asarray(u), equilibrium_state.v)
        r = monitors.audit(s, bounds, published_params, lattice16, variant)
        assert r.violations == expected
        assert r.has_violations is fails

    def test_mass_bound(self, lattice16):
        p = kinetics.ModelParams(kappa=1.0)
        s0 = integrator.SimState(grid.field_constant(16, 16, 1.0), grid.field_constant(16, 16, 0.0))
        bounds = _bounds_for(s0, p, lattice16)
        s = s0._replace(v=grid.field_constant(16, 16, 0.5))
        assert monitors.audit(s, bounds, p, lattice16, "mixed").violations == ["mass_bound"]

    def test_non_finite(self, equilibrium_state, published_params, lattice16, small_kernel):
        bounds = _bounds_for(equilibrium_state, published_params, lattice16)
        u = np.ones((16, 16))
        u[0, 0] = np.nan
        s = integrator.SimState(jnp.asarray(u), equilibrium_state.v)
        r = monitors.audit(s, bounds, published_params, lattice16, "mixed", small_kernel)
        assert "non_finite" in r.violations
        assert r.gamma_residual == 0.0

    def test_without_kernel(self, random_state, published_params, lattice16):
        bounds = _bounds_for(random_state, published_params, lattice16)
        r = monitors.audit(random_state, bounds, published_params, lattice16, "local")
        assert r.gamma_residual == 0.0
        assert r.violations == []

    def test_never_raises(self, published_params, lattice16):
        s = integrator.SimState(
            grid.field_constant(16, 16, np.inf), grid.field_constant(16, 16, -np.inf)
        )
        bounds = monitors.Bounds(1.0, 1.0)
        r = monitors.audit(s, bounds, published_params, lattice16, "mixed")
        assert r.has_violations

    def test_overflowing_transform_is_recorded(self, published_params, lattice16, small_kernel):
        s = integrator.SimState(
            grid.field_constant(16, 16, 1e308), grid.field_constant(16, 16, 0.0)
        )
        bounds = monitors.Bounds(1.0, 1.0)
        r = monitors.audit(s, bounds, published_params, lattice16, "mixed", small_kernel)
        assert "non_finite" not in r.violations
        assert "gamma_conservation" in r.violations

    def test_mass_decreases_near_bound(self, rng, lattice16, small_kernel):
        p = kinetics.ModelParams(kappa=1.0, dt=0.05)
        s = integrator.state_from_arrays(2 + rng.random((16, 16)), 1 + rng.random((16, 16)))
        bounds = _bounds_for(s, p, lattice16)
        reports = [monitors.audit(s, bounds, p, lattice16, "mixed", small_kernel)]
        for _ in range(10):
            s = integrator.advance(s, p, 4, "mixed", small_kernel)
            reports.append(monitors.audit(s, bounds, p, lattice16, "mixed", small_kernel))
        near = [
            i
            for i, r in enumerate(reports[:-1])
            if r.total_mass > r.mass_bound * (1 - 1e-3)
        ]
        assert near
        for i in near:
            assert reports[i + 1].total_mass < reports[i].total_mass


class TestWriteReportRow:

    @staticmethod
    def _report(**kw):
        values = dict(
            step=0,
            time=0.0,
            min_u=0.5,
            min_v=0.0,
            sup_u=1.0,
            sup_v=0.25,
            total_mass=252.0,
            sup_bound=1.0,
            mass_bound=256 / 0.0636,
            gamma_residual=1e-15,
            laplacian_residual=0.0,
            violations=[],
        )
        values.update(kw)
        return monitors.InvariantReport(**values)

    def test_header_written_once(self):
        sink = io.StringIO()
        monitors.write_report_row(self._report(), sink)
        monitors.write_report_row(self._report(step=10, time=10.0), sink)
        lines = sink.getvalue().splitlines()
        assert lines[0] == ",".join(monitors.REPORT_HEADER)
        assert len(lines) == 3
        assert lines[1].startswith("0,0,")
        assert lines[2].startswith("10,10,")

    def test_full_precision(self):
        sink = io.StringIO()
        r = self._report()
        monitors.write_report_row(r, sink)
        row = next(csv.DictReader(io.StringIO(sink.getvalue())))
        assert float(row["mass_bound"]) == r.mass_bound
        assert float(row["gamma_residual"]) == 1e-15
        assert row["violations"] == ""

    def test_violations_joined(self):
        sink = io.StringIO()
        monitors.write_report_row(self._report(violations=["u_negative", "mass_bound"]), sink)
        row = next(csv.DictReader(io.StringIO(sink.getvalue())))
        assert row["violations"] == "u_negative;mass_bound"

    def test_non_finite_values(self):
        sink = io.StringIO()
        monitors.write_report_row(self._report(sup_u=math.inf, min_u=math.nan), sink)
        row = next(csv.DictReader(io.StringIO(sink.getvalue())))
        assert row["sup_u"] == "inf"
        assert row["min_u"] == "nan"

    def test_unseekable_sink(self):
        sink = _Pipe()
        monitors.write_report_row(self._report(), sink)
        assert sink.getvalue().splitlines()[0].startswith("0,0,")
        sink = _Pipe()
        monitors.write_report_row(self._report(), sink, header=True)
        monitors.write_report_row(self._report(step=1, time=1.0), sink, header=False)
        lines = sink.getvalue().splitlines()
        assert lines[0] == ",".join(monitors.REPORT_HEADER)
        assert len(lines) == 3

    def test_failed_write_names_sink(self, tmp_path):
        path = tmp_path / "report.csv"
        path.touch()
        with open(path, "r") as sink:
            with pytest.raises(OSError, match="report.csv"):
                monitors.write_report_row(self._report(), sink)
