"""Tests for particle configurations, sampling, and N-body fields."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from halfwall import cloud
from halfwall.cloud import (
    DensityField,
    GridDensity,
    InfeasibleSampling,
    ParticleConfig,
    UniformDensity,
    estimate_w1,
    iid_sample,
    interaction_max,
    interaction_sum,
    sample,
    save_config,
    load_config,
    sliced_w1,
    u_app,
    v_n,
    validate,
)
from halfwall.greens import greens
from halfwall.stokeslet import finite_sphere_field, SphereSource

RHO = DensityField([0.8, 0.0, 0.0], [0.25, 0.3, 0.3])


def test_density_basics():
    assert RHO([0.8, 0.0, 0.0]) == 1.0
    assert RHO([0.8, 0.0, 0.31]) == 0.0
    assert np.all(RHO(np.random.default_rng(0).uniform(-1, 2, (100, 3))) >= 0)
    assert_allclose(RHO.normalized().mass(), 1.0, rtol=1e-12)
    with pytest.raises(ValueError):
        DensityField([0.1, 0.0, 0.0], [0.2, 0.2, 0.2])  # pokes through the wall


def test_density_mass_against_quadrature():
    # midpoint Riemann sum as an independent oracle for the closed form
    n = 120
    axes = [c + (-w + (np.arange(n) + 0.5) * 2 * w / n)
            for c, w in zip(RHO.center, RHO.widths)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, 3)
    cell = np.prod(2 * RHO.widths / n)
    assert_allclose(RHO(pts).sum() * cell, RHO.mass(), rtol=1e-5)


def test_grid_density_matches_samples():
    n = 65
    axes = [np.linspace(c - w, c + w, n) for c, w in zip(RHO.center, RHO.widths)]
    vals = RHO(np.stack(np.meshgrid(*axes, indexing="ij"), -1))
    gd = GridDensity([a[0] for a in axes], [a[1] - a[0] for a in axes], vals)
    pts = np.random.default_rng(1).uniform(RHO.support_lo, RHO.support_hi, (50, 3))
    assert np.abs(gd(pts) - RHO(pts)).max() <= 5e-3
    assert_allclose(gd.mass(), RHO.mass(), rtol=0.05)


def test_sampler_feasible_case():
    uni = UniformDensity([0, 0, 0], [1, 1, 1])
    cfg = sample(uni, 8, seed=4, d_min_target=0.4)
    assert cfg.n == 8
    assert cfg.d_min() >= 0.4


def test_sampler_infeasible_case():
    uni = UniformDensity([0, 0, 0], [1, 1, 1])
    with pytest.raises(InfeasibleSampling):
        sample(uni, 8, seed=4, d_min_target=1.0)


def test_sampler_deterministic():
    a = sample(RHO, 100, seed=9, d_min_target=0.02)
    b = sample(RHO, 100, seed=9, d_min_target=0.02)
    assert (a.centers == b.centers).all()


def test_validate_reports():
    uni = UniformDensity([0, 0, 0], [1, 1, 1])
    cfg = sample(uni, 1000, seed=11, d_min_target=0.3 * 1000 ** (-1 / 3))
    assert validate(cfg)["ok"]

    coincident = ParticleConfig([[0.5, 0.1, 0.1], [0.5, 0.1, 0.1]],
                                0.01, 2.0, 0.05, [0, -1, -1], [1, 1, 1])
    rep = validate(coincident)
    assert not rep["ok"]
    assert any("minimal distance" in v[0] for v in rep["violations"])

    marginal = ParticleConfig([[0.5, 0.0, 0.0], [0.5, 0.5, 0.0]],
                              0.01, 2.0, 0.02, [0, -1, -1], [1, 1, 1])
    rep = validate(marginal)  # eps == theta * R exactly: strict inequality fails
    assert any("layer clearance" in v[0] for v in rep["violations"])


def small_config(radius=0.004):
    cfg = sample(RHO, 60, seed=5, d_min_target=0.06, radius=radius, eps=0.03)
    return cfg


def test_vn_single_particle():
    cfg = ParticleConfig([[0.7, 0.1, -0.2]], 0.002, 2.0, 0.03,
                         RHO.support_lo, RHO.support_hi)
    x = np.array([1.2, -0.3, 0.5])
    expected = -greens(x, cfg.centers[0]) @ cloud.E_GRAV
    assert_allclose(v_n(x, cfg), expected, rtol=1e-13)
    src = SphereSource(cfg.centers[0], cfg.radius, -cloud.E_GRAV, safety=cfg.theta)
    assert_allclose(u_app(x, cfg), finite_sphere_field(x, src), rtol=1e-13)


def test_fields_vanish_on_wall():
    cfg = small_config()
    rng = np.random.default_rng(13)
    x = np.zeros((60, 3))
    x[:, 1:] = rng.uniform(-2, 2, (60, 2))
    assert np.abs(v_n(x, cfg)).max() <= 1e-12
    assert np.abs(u_app(x, cfg)).max() <= 1e-12


def test_uapp_inside_particle_rejected():
    cfg = small_config()
    with pytest.raises(ValueError):
        u_app(cfg.centers[0] + [cfg.radius / 2, 0, 0], cfg)


def test_linearity_in_force():
    cfg = small_config()
    x = np.array([[1.0, 0.2, 0.1]])
    assert_allclose(v_n(x, cfg, e=3.0 * cloud.E_GRAV), 3.0 * v_n(x, cfg),
                    rtol=1e-13)


def test_uapp_to_vn_gap_shrinks_with_radius():
    # the finite-size term is the radius^2/6 dipole, so the gap contracts by
    # 4 per halving; in particular it sits below the linear-in-R envelope
    cfg = small_config()
    rng = np.random.default_rng(8)
    X = rng.uniform([0.43, -0.4, -0.4], [1.17, 0.4, 0.4], (150, 3))
    gaps = []
    for radius in (0.004, 0.002, 0.001):
        c = ParticleConfig(cfg.centers, radius, cfg.theta, cfg.eps,
                           cfg.support_lo, cfg.support_hi)
        gaps.append(np.linalg.norm(u_app(X, c) - v_n(X, c), axis=-1).mean())
    assert 3.9 <= gaps[0] / gaps[1] <= 4.1
    assert 3.9 <= gaps[1] / gaps[2] <= 4.1
    envelope = gaps[0] / 0.004
    for gap, radius in zip(gaps, (0.004, 0.002, 0.001)):
        assert gap <= envelope * radius + 1e-15


def test_interaction_sum_cases():
    two = ParticleConfig([[1.0, 0.0, 0.0], [1.0, 1.0, 0.0]], 0.01, 2.0, 0.05,
                         [0, -1, -1], [2, 2, 2])
    assert_allclose(interaction_sum(two, 0), 0.5, rtol=1e-14)
    scaled = ParticleConfig(2.0 * two.centers, 0.01, 2.0, 0.05,
                            [0, -2, -2], [4, 4, 4])
    assert_allclose(interaction_sum(scaled, 0), 0.125, rtol=1e-14)


def test_interaction_max_bounded_under_sampler_policy():
    uni = UniformDensity([0, 0, 0], [1, 1, 1])
    worst = 0.0
    for n in (500, 2000):
        cfg = sample(uni, n, seed=3, d_min_target=0.3 * n ** (-1 / 3))
        worst = max(worst, interaction_max(cfg))
    assert worst <= 15.0


def test_sliced_w1_trivial_cases():
    pts = np.random.default_rng(2).uniform(0, 1, (200, 3))
    assert sliced_w1(pts, pts, 16, seed=0) == 0.0
    shift = np.array([0.05, 0.0, 0.0])
    assert sliced_w1(pts + shift, pts, 64, seed=0) <= np.linalg.norm(shift) + 1e-12


def test_w1_estimate_decays_for_iid_samples():
    rhon = RHO.normalized()
    slopes = []
    for seed in range(3):
        vals = []
        for n in (250, 1000, 4000):
            pts = iid_sample(rhon, n, np.random.default_rng([seed, n]))
            cfg = ParticleConfig(pts, 1e-4, 2.0, 1e-3,
                                 RHO.support_lo, RHO.support_hi)
            vals.append(estimate_w1(cfg, RHO, n_slices=24, seed=seed))
        slopes.append(np.polyfit(np.log([250, 1000, 4000]), np.log(vals), 1)[0])
    mean_slope = np.mean(slopes)
    assert -1 / 3 - 0.15 <= mean_slope <= -1 / 3 + 0.15


def test_config_roundtrip(tmp_path):
    cfg = small_config()
    path = tmp_path / "cloud.txt"
    save_config(cfg, path)
    back = load_config(path)
    assert (back.centers == cfg.centers).all()
    assert back.radius == cfg.radius
    assert back.eps == cfg.eps
    assert back.seed == cfg.seed
    assert (back.support_lo == cfg.support_lo).all()


def test_volume_fraction():
    cfg = small_config()
    assert_allclose(cfg.volume_fraction(), cfg.n * cfg.radius**3, rtol=0)
