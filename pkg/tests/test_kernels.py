"""Cross-checks of the compiled N-body sums against halfwall.greens."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from halfwall import kernels
from halfwall.greens import (
    greens,
    greens_gradient,
    greens_pressure,
    greens_source_laplacian,
)


def setup_batch(seed, m=25, n=20):
    rng = np.random.default_rng(seed)
    targets = rng.uniform([0.0, -2, -2], [3, 2, 2], (m, 3))
    sources = rng.uniform([0.3, -2, -2], [3, 2, 2], (n, 3))
    forces = rng.standard_normal((n, 3))
    return targets, sources, forces


def test_greens_apply_matches_reference():
    targets, sources, forces = setup_batch(1)
    G = greens(targets[:, None, :], sources[None, :, :])
    ref = np.einsum("mnij,nj->mi", G, forces)
    out = kernels.greens_apply(targets, sources, forces)
    assert np.abs(out - ref).max() / np.abs(ref).max() <= 1e-13


def test_finite_apply_matches_reference():
    targets, sources, forces = setup_batch(2)
    rng = np.random.default_rng(20)
    radii = rng.uniform(0.01, 0.05, sources.shape[0])
    G = greens(targets[:, None, :], sources[None, :, :])
    lap = greens_source_laplacian(targets[:, None, :], sources[None, :, :])
    ref = (np.einsum("mnij,nj->mi", G, forces)
           + np.einsum("mnij,nj,n->mi", lap, forces, radii**2 / 6.0))
    out = kernels.greens_apply_finite(targets, sources, forces, radii)
    assert np.abs(out - ref).max() / np.abs(ref).max() <= 1e-13


def test_finite_zero_radius_is_point():
    targets, sources, forces = setup_batch(3)
    a = kernels.greens_apply(targets, sources, forces)
    b = kernels.greens_apply_finite(targets, sources, forces, np.zeros(len(sources)))
    assert_allclose(a, b, rtol=0, atol=0)


def test_grad1_matches_reference():
    targets, sources, forces = setup_batch(4)
    grad = greens_gradient(targets[:, None, :], sources[None, :, :])
    ref = np.einsum("mnij,nj->mi", grad[:, :, 0], forces)
    out = kernels.greens_grad1_apply(targets, sources, forces)
    assert np.abs(out - ref).max() / np.abs(ref).max() <= 1e-13


def test_pressure_matches_reference():
    targets, sources, forces = setup_batch(5)
    ref = np.zeros(targets.shape[0])
    for n in range(sources.shape[0]):
        ref += greens_pressure(targets, sources[n], forces[n])
    out = kernels.greens_pressure_apply(targets, sources, forces)
    assert np.abs(out - ref).max() / np.abs(ref).max() <= 1e-12


def test_wall_trace_vanishes_in_batch():
    rng = np.random.default_rng(6)
    targets = np.zeros((200, 3))
    targets[:, 1:] = rng.uniform(-4, 4, (200, 2))
    sources = rng.uniform([0.2, -2, -2], [2, 2, 2], (50, 3))
    forces = rng.standard_normal((50, 3))
    out = kernels.greens_apply(targets, sources, forces)
    assert np.abs(out).max() <= 1e-12


def test_broadcast_single_force():
    targets, sources, _ = setup_batch(7)
    e = np.array([0.0, 0.0, 1.0])
    a = kernels.greens_apply(targets, sources, e)
    b = kernels.greens_apply(targets, sources, np.tile(e, (len(sources), 1)))
    assert_allclose(a, b, rtol=0, atol=0)


def test_determinism():
    targets, sources, forces = setup_batch(8, m=100, n=80)
    a = kernels.greens_apply(targets, sources, forces)
    b = kernels.greens_apply(targets, sources, forces)
    assert (a == b).all()


def test_separation_guard():
    sources = np.array([[1.0, 0.0, 0.0]])
    forces = np.array([[0.0, 0.0, 1.0]])
    with pytest.raises(ValueError):
        kernels.greens_apply(sources + 1e-12, sources, forces)


def test_min_separation():
    targets = np.array([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    sources = np.array([[1.0, 0.3, 0.4], [5.0, 0.0, 0.0]])
    assert_allclose(kernels.min_separation(targets, sources), 0.5, rtol=1e-14)
