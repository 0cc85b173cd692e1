from contextlib import nullcontext as does_not_raise

import jax.numpy as jnp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grayscott import grid, kernel
from grayscott.exceptions import DimensionError, ParameterError, SizeGuardError


def _rel_err(a, b):
    return float(jnp.max(jnp.abs(a - b)) / jnp.max(jnp.abs(b)))


class TestBuildGaussianKernel:

    @pytest.mark.parametrize(
        "spec, expectation",
        [
            (kernel.KernelSpec(1.0, 8, 8), does_not_raise()),
            (kernel.KernelSpec(2.5, 8, 12, 0.5), does_not_raise()),
            (
                kernel.KernelSpec(0.0, 8, 8),
                pytest.raises(ParameterError, match="`epsilon` must be > 0"),
            ),
            (
                kernel.KernelSpec(-1.0, 8, 8),
                pytest.raises(ParameterError, match="`epsilon` must be > 0"),
            ),
            (kernel.KernelSpec(1.0, 8, 8, 0.0), pytest.raises(ParameterError, match="h")),
            (kernel.KernelSpec(1.0, 0, 8), pytest.raises(DimensionError)),
        ],
    )
    def test_parameter_checks(self, spec, expectation):
        with expectation:
            kernel.build_gaussian_kernel(spec)

    def test_published_kernel_is_normalized(self):
        k = kernel.build_gaussian_kernel(kernel.KernelSpec(1.0, 200, 200))
        assert abs(float(jnp.sum(k.weights)) - 1.0) <= 1e-14
        assert abs(float(k.total_mass) - 1.0) <= 1e-14

    def test_nonnegative(self, small_kernel):
        assert bool(jnp.all(small_kernel.weights >= 0))

    @pytest.mark.parametrize("shape", [(8, 8), (9, 7), (16, 10)])
    @pytest.mark.parametrize("epsilon", [0.5, 1.0, 3.0])
    def test_symmetry(self, shape, epsilon):
        nx, ny = shape
        w = np.asarray(kernel.build_gaussian_kernel(kernel.KernelSpec(epsilon, nx, ny)).weights)
        assert w[1, 0] == w[nx - 1, 0]
        for i in range(nx):
            for j in range(ny):
                assert w[i, j] == w[(-i) % nx, (-j) % ny]

    def test_square_grid_symmetric_in_axes(self):
        w = np.asarray(kernel.build_gaussian_kernel(kernel.KernelSpec(1.0, 12, 12)).weights)
        assert np.array_equal(w, w.T)

    def test_gaussian_ratio(self):
        w = kernel.build_gaussian_kernel(kernel.KernelSpec(1.0, 8, 8)).weights
        assert np.isclose(float(w[0, 0] / w[1, 0]), np.exp(0.5), rtol=1e-14)

    def test_spacing_scales_distances(self):
        # eps = 1 at h = 0.5 is eps = 2 in lattice units
        a = kernel.build_gaussian_kernel(kernel.KernelSpec(1.0, 16, 16, 0.5)).weights
        b = kernel.build_gaussian_kernel(kernel.KernelSpec(2.0, 16, 16, 1.0)).weights
        assert np.allclose(a, b, rtol=1e-14, atol=0)

    def test_spectrum(self, small_kernel):
        spec = small_kernel.spectrum
        assert np.isclose(complex(spec[0, 0]), float(small_kernel.total_mass), atol=1e-14)
        assert float(jnp.max(jnp.abs(spec.imag))) <= 1e-12
        assert float(jnp.max(jnp.abs(spec))) <= float(small_kernel.total_mass) + 1e-12

    def test_transform_round_trip(self, rng):
        f = jnp.asarray(rng.random((16, 16)))
        back = jnp.fft.ifft2(jnp.fft.fft2(f)).real
        assert float(jnp.max(jnp.abs(back - f))) <= 1e-13


class TestFromWeights:

    def test_delta_kernel(self):
        w = np.zeros((6, 6))
        w[0, 0] = 1.0
        k = kernel.DiscreteKernel.from_weights(w)
        assert k.shape == (6, 6)
        assert float(k.total_mass) == 1.0
        assert np.allclose(k.spectrum, 1.0)

    @pytest.mark.parametrize(
        "weights, expectation",
        [
            (np.ones((4, 4)), does_not_raise()),
            (np.zeros((4, 4)), does_not_raise()),
            (-np.ones((4, 4)), pytest.raises(ParameterError, match="nonnegative")),
            (
                np.eye(4, k=1),
                pytest.raises(ParameterError, match="symmetric"),
            ),
            (np.ones(4), pytest.raises(DimensionError)),
        ],
    )
    def test_validation(self, weights, expectation):
        with expectation:
            kernel.DiscreteKernel.from_weights(weights)


class TestConvolveSpectral:

    def test_constant_field(self, small_kernel):
        out = kernel.convolve_spectral(small_kernel, grid.field_constant(16, 16, 0.7))
        assert np.allclose(out, 0.7, rtol=0, atol=1e-14)

    @pytest.mark.parametrize("pos", [(0, 0), (3, 5), (15, 15)])
    def test_delta_field(self, small_kernel, pos):
        delta = np.zeros((16, 16))
        delta[pos] = 1.0
        out = kernel.convolve_spectral(small_kernel, delta)
        expected = grid.shift(small_kernel.weights, *pos)
        assert float(jnp.max(jnp.abs(out - expected))) <= 1e-14

    def test_shape_mismatch(self, small_kernel):
        with pytest.raises(DimensionError, match="cannot be applied"):
            kernel.convolve_spectral(small_kernel, np.ones((8, 8)))

    def test_output_is_real(self, small_kernel, rng):
        out = kernel.convolve_spectral(small_kernel, rng.random((16, 16)))
        assert out.dtype == jnp.float64

    def test_non_hermitian_spectrum_is_rejected(self, rng):
        w = jnp.asarray(rng.random((8, 8)))
        bad = kernel.DiscreteKernel(w, 1j * jnp.fft.fft2(w), jnp.sum(w))
        with pytest.raises(FloatingPointError, match="imaginary residual"):
            kernel.convolve_spectral(bad, rng.random((8, 8)))

    def test_mass_conservation(self, small_kernel, rng):
        f = jnp.asarray(rng.random((16, 16)))
        out = kernel.convolve_spectral(small_kernel, f)
        expected = grid.mass(f, 1.0) * small_kernel.total_mass
        assert abs(float(grid.mass(out, 1.0) - expected)) <= 1e-12 * float(expected)

    @given(a=st.integers(0, 15), b=st.integers(0, 15))
    @settings(max_examples=25, deadline=None)
    def test_commutes_with_translation(self, a, b):
        k = kernel.build_gaussian_kernel(kernel.KernelSpec(1.5, 16, 16))
        f = jnp.asarray(np.random.default_rng(7).random((16, 16)))
        lhs = kernel.convolve_spectral(k, grid.shift(f, a, b))
        rhs = grid.shift(kernel.convolve_spectral(k, f), a, b)
        assert float(jnp.max(jnp.abs(lhs - rhs))) <= 1e-12

    def test_jitted_path_matches(self, small_kernel, rng):
        f = jnp.asarray(rng.random((16, 16)))
        a = kernel.convolve_spectral(small_kernel, f)
        b = kernel.spectral_apply(small_kernel.spectrum, f)
        assert _rel_err(b, a) <= 1e-13

    def test_jitted_path_odd_shape(self, rng):
        k = kernel.build_gaussian_kernel(kernel.KernelSpec(1.0, 9, 7))
        f = jnp.asarray(rng.random((9, 7)))
        a = kernel.convolve_spectral(k, f)
        b = kernel.spectral_apply(k.spectrum, f)
        assert _rel_err(b, a) <= 1e-13


class TestConvolveDirect:

    @pytest.mark.parametrize("n", [8, 16, 32])
    def test_oracle_equivalence(self, n):
        rng = np.random.default_rng(n)
        k = kernel.build_gaussian_kernel(kernel.KernelSpec(1.0, n, n))
        for _ in range(10):
            f = jnp.asarray(rng.random((n, n)))
            direct = kernel.convolve_direct(k, f)
            spectral = kernel.convolve_spectral(k, f)
            assert _rel_err(spectral, direct) <= 1e-12

    def test_oracle_non_square(self, rng):
        k = kernel.build_gaussian_kernel(kernel.KernelSpec(2.0, 12, 6))
        f = jnp.asarray(rng.random((12, 6)))
        assert _rel_err(kernel.convolve_spectral(k, f), kernel.convolve_direct(k, f)) <= 1e-12

    def test_delta_field(self, small_kernel):
        delta = np.zeros((16, 16))
        delta[2, 9] = 1.0
        out = kernel.convolve_direct(small_kernel, delta)
        assert np.array_equal(np.asarray(out), np.asarray(grid.shift(small_kernel.weights, 2, 9)))

    def test_constant_field(self, small_kernel):
        out = kernel.convolve_direct(small_kernel, grid.field_constant(16, 16, 3.0))
        assert np.allclose(out, 3.0, rtol=1e-14)

    @pytest.mark.parametrize(
        "n, allow_large, expectation",
        [
            (64, False, does_not_raise()),
            (65, False, pytest.raises(SizeGuardError, match="allow_large")),
            (65, True, does_not_raise()),
        ],
    )
    def test_size_guard(self, n, allow_large, expectation):
        w = np.zeros((n, n))
        w[0, 0] = 1.0
        k = kernel.DiscreteKernel.from_weights(w)
        with expectation:
            kernel.convolve_direct(k, np.ones((n, n)), allow_large=allow_large)

    def test_size_guard_is_a_parameter_error(self):
        assert issubclass(SizeGuardError, ParameterError)

    def test_shape_mismatch(self, small_kernel):
        with pytest.raises(DimensionError):
            kernel.convolve_direct(small_kernel, np.ones((16, 8)))


class TestKernelMassBound:

    def test_normalized(self):
        k = kernel.build_gaussian_kernel(kernel.KernelSpec(1.0, 32, 32))
        assert abs(kernel.kernel_mass_bound(k) - 1.0) <= 1e-14

    def test_scaled(self, small_kernel):
        k = kernel.DiscreteKernel.from_weights(2 * small_kernel.weights)
        assert np.isclose(kernel.kernel_mass_bound(k), 2.0, rtol=1e-14)

    def test_zero(self):
        k = kernel.DiscreteKernel.from_weights(np.zeros((4, 4)))
        assert kernel.kernel_mass_bound(k) == 0.0
