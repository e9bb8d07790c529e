import numpy as np
import pytest
from pydantic import ValidationError

from mflab.error import SpaceError
from mflab.space import (
    GridSpace,
    KernelConfig,
    ModeSpace,
    Observable,
    ObservableConfig,
    SpaceConfig,
    fourier_transform,
    kernel_samples,
    make_fourier_mode_space,
    make_grid_space,
    make_observable,
    make_space,
    require_modes,
)


def test_two_mode_space(two_mode):
    assert two_mode.dim == 2
    assert two_mode.kind == 'two_mode'
    assert np.allclose(two_mode.kinetic, np.diag([0.0, 1.0]))
    # V = g cos(x) only couples 0 <-> 1 in both particles
    assert two_mode.interaction[0, 0, 1, 1] == pytest.approx(0.5)
    assert two_mode.interaction[0, 1, 1, 0] == pytest.approx(0.5)
    assert two_mode.interaction[0, 0, 0, 0] == 0
    f = np.array([0.3 + 0.1j, -0.2j])
    assert np.allclose(two_mode.conjugate(f), np.conj(f))


def test_fourier_space():
    kernel = KernelConfig(kind='cosine', v0=2.0, n=1)
    space = make_fourier_mode_space(2 * np.pi, 1, kernel)
    assert space.labels == [-1, 0, 1]
    assert np.allclose(np.diag(space.kinetic).real, [1.0, 0.0, 1.0])
    f = np.array([1.0, 2.0j, 3.0])
    # (Jf)(x) = conj(f(x)) swaps k and -k
    assert np.allclose(space.conjugate(f), [3.0, -2.0j, 1.0])
    # momentum conservation
    W = space.interaction
    for a, b, c, d in np.argwhere(np.abs(W) > 0):
        assert space.labels[a] + space.labels[b] == (
            space.labels[c] + space.labels[d]
        )
    # V^(1) = v0 L / 2, divided by L
    assert W[0, 1, 1, 0] == pytest.approx(1.0)


def test_fourier_table_too_short():
    kernel = KernelConfig(kind='tabulated_fourier', values=[1.0, 0.5])
    with pytest.raises(SpaceError):
        make_fourier_mode_space(2 * np.pi, 1, kernel)

    kernel = KernelConfig(kind='tabulated_fourier', values=[1.0, 0.5, 0.25])
    space = make_fourier_mode_space(2 * np.pi, 1, kernel)
    assert space.dim == 3


def test_kernel_config_tables_need_values():
    with pytest.raises(ValidationError):
        KernelConfig(kind='tabulated')


def test_fourier_transform_gaussian_matches_samples():
    kernel = KernelConfig(kind='gaussian', v0=1.0, sigma=0.3)
    length = 2 * np.pi
    points = 64
    samples = kernel_samples(kernel, 1, points, length)
    numeric = np.fft.fft(samples).real * length / points
    q = np.arange(4)
    assert np.allclose(
        fourier_transform(kernel, length, q), numeric[q], atol=1e-10
    )


def test_tabulated_kernel_must_be_even():
    kernel = KernelConfig(kind='tabulated', values=[1.0, 0.5, 0.1, 0.2])
    with pytest.raises(SpaceError) as exc:
        make_grid_space(1, 4, 1.0, kernel)
    assert 'not even' in str(exc.value)


def test_grid_validation():
    kernel = KernelConfig()
    with pytest.raises(SpaceError):
        make_grid_space(1, 6, 1.0, kernel)
    with pytest.raises(SpaceError):
        make_grid_space(4, 8, 1.0, kernel)
    with pytest.raises(SpaceError):
        make_grid_space(1, 8, -1.0, kernel)


def test_grid_convolution_is_circular_sum():
    kernel = KernelConfig(kind='gaussian', v0=1.5, sigma=0.4)
    space = make_grid_space(1, 16, 2 * np.pi, kernel)
    rng = np.random.default_rng(1)
    rho = rng.random(16)
    direct = np.array(
        [
            space.h
            * sum(space.kernel[(i - j) % 16] * rho[j] for j in range(16))
            for i in range(16)
        ]
    )
    assert np.allclose(space.convolve(rho), direct, atol=1e-12)


def test_grid_kinetic_on_plane_wave():
    space = make_grid_space(2, 8, 2 * np.pi, KernelConfig())
    x = space.positions
    X, Y = np.meshgrid(x, x, indexing='ij')
    wave = np.exp(1j * (2 * X - Y)).ravel()
    assert np.allclose(space.apply_kinetic(wave), 5 * wave, atol=1e-10)
    assert np.allclose(
        space.kinetic_phase(wave, 0.3), np.exp(-1.5j) * wave, atol=1e-10
    )
    assert np.allclose(space.kinetic @ wave, 5 * wave, atol=1e-10)


def test_grid_inner_product_weight():
    space = make_grid_space(1, 8, 2.0, KernelConfig())
    f = np.ones(8) / np.sqrt(2.0)
    assert space.norm(f) == pytest.approx(1.0)
    e = space.basis_vector(3)
    assert space.norm(e) == pytest.approx(1.0)


def test_density_check():
    space = make_grid_space(1, 8, 1.0, KernelConfig(kind='gaussian'))
    with pytest.raises(SpaceError):
        space.convolve_potential(np.ones(8) + 1e-3j)
    modes = make_fourier_mode_space(2 * np.pi, 1, KernelConfig())
    with pytest.raises(SpaceError):
        modes.convolve_potential(np.array([[1, 1], [0, 1]], dtype=complex))


def test_mode_space_validation():
    W = np.zeros((2, 2, 2, 2))
    with pytest.raises(SpaceError):
        ModeSpace('custom', [[0, 1], [0, 0]], W, [0, 1])
    with pytest.raises(SpaceError):
        ModeSpace('custom', np.eye(2), W, [0, 0])
    with pytest.raises(SpaceError):
        ModeSpace('custom', np.eye(3), np.zeros((3,) * 4), [1, 2, 0])
    bad = W.copy()
    bad[0, 1, 0, 0] = 1.0
    with pytest.raises(SpaceError):
        ModeSpace('custom', np.eye(2), bad, [0, 1])


def test_make_space_dispatch():
    assert isinstance(make_space(SpaceConfig(kind='grid')), GridSpace)
    assert make_space(SpaceConfig(kind='fourier')).dim == 3
    assert make_space(SpaceConfig()).dim == 2
    with pytest.raises(SpaceError):
        require_modes(make_space(SpaceConfig(kind='grid')))


def test_pair_apply_vectorised(two_mode):
    rng = np.random.default_rng(2)
    f = rng.normal(size=2) + 1j * rng.normal(size=2)
    h = rng.normal(size=2) + 1j * rng.normal(size=2)
    G = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    columns = two_mode.pair_apply(f, G, h)
    for j in range(3):
        assert np.allclose(columns[:, j], two_mode.pair_apply(f, G[:, j], h))


def test_observables(two_mode):
    sx = make_observable(two_mode, ObservableConfig(kind='sigma_x'))
    sz = make_observable(two_mode, ObservableConfig(kind='sigma_z'))
    n0 = make_observable(two_mode, ObservableConfig(kind='number', mode=0))
    assert np.allclose(sx.matrix, [[0, 1], [1, 0]])
    assert sz.commutes(n0)
    assert not sx.commutes(sz)
    assert sz.label == 'sigma_z'

    phi = np.array([0.8, 0.6])
    assert sz.expectation(two_mode, phi) == pytest.approx(0.28)
    centred = sz.centered(two_mode, phi)
    assert centred.expectation(two_mode, phi) == pytest.approx(0.0)

    shifted = make_observable(
        two_mode,
        ObservableConfig(kind='sigma_x', scale=2.0, shift=0.5, label='x'),
    )
    assert np.allclose(shifted.matrix, [[0.5, 2], [2, 0.5]])
    assert shifted.label == 'x'


def test_observable_errors(two_mode):
    with pytest.raises(SpaceError):
        make_observable(two_mode, ObservableConfig(kind='number', mode=2))
    with pytest.raises(SpaceError):
        make_observable(two_mode, ObservableConfig(kind='cosine'))
    with pytest.raises(SpaceError):
        make_observable(
            two_mode, ObservableConfig(kind='sigma_z', modes=(1, 1))
        )
    with pytest.raises(SpaceError):
        make_observable(
            two_mode, ObservableConfig(kind='matrix', re=[[1.0]])
        )
    with pytest.raises(SpaceError):
        Observable(np.array([[0, 1], [0, 0]]), 'upper')


def test_multiplication_observables():
    grid = make_grid_space(1, 8, 2 * np.pi, KernelConfig())
    cos = make_observable(grid, ObservableConfig(kind='cosine'))
    assert np.allclose(np.diag(cos.matrix), np.cos(grid.positions))

    fourier = make_fourier_mode_space(2 * np.pi, 1, KernelConfig())
    sin = make_observable(fourier, ObservableConfig(kind='sine'))
    # sin(x) e_k = (e_{k+1} - e_{k-1}) / 2i
    e0 = np.array([0, 1, 0], dtype=complex)
    assert np.allclose(sin.apply(e0), [-1 / 2j, 0, 1 / 2j])
