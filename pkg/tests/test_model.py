"""Couplings, Kac normalization, momentum grid, and closed-form critical fields."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ixysense.model import (
    ModelParams,
    ModeRange,
    coupling_profile,
    critical_field_pi,
    critical_field_zero,
    kac_factor,
    mode_angles,
    momentum_coupling,
)

ALPHA_GRID = (0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0)
Z_GRID = (1, 2, 3, 4, 7, 16, 100, 999)


def test_kac_factor_frozen_values():
    # hand sums: 1 + 1/2 + 1/3 + 1/4 = 25/12, 1 + 1/4 + 1/9 = 49/36
    assert_allclose(kac_factor(1.0, 4), 25.0 / 12.0, rtol=1e-15)
    assert_allclose(kac_factor(2.0, 3), 49.0 / 36.0, rtol=1e-15)
    assert kac_factor(0.0, 137) == 137.0
    assert kac_factor(1.5, 1) == 1.0


def test_kac_factor_validation():
    with pytest.raises(ValueError):
        kac_factor(1.0, 0)
    with pytest.raises(ValueError):
        kac_factor(-0.1, 4)


def test_coupling_profile_frozen_weights():
    prof = coupling_profile(1.0, 2)
    assert_allclose(prof.weights, [2.0 / 3.0, 1.0 / 3.0], rtol=1e-15)
    assert_allclose(prof.kac, 1.5, rtol=1e-15)


@pytest.mark.parametrize("alpha", ALPHA_GRID)
@pytest.mark.parametrize("Z", Z_GRID)
def test_weights_sum_to_one(alpha, Z):
    prof = coupling_profile(alpha, Z)
    assert abs(math.fsum(prof.weights) - 1.0) < 1e-12


@pytest.mark.parametrize("alpha", ALPHA_GRID)
@pytest.mark.parametrize("Z", (1, 2, 7, 100, 5000))
def test_momentum_coupling_at_zero_is_one(alpha, Z):
    # J(0) = sum_r J_r = 1 exactly by Kac normalization
    prof = coupling_profile(alpha, Z)
    assert abs(momentum_coupling(prof, 0.0) - 1.0) < 1e-12


def test_momentum_coupling_frozen_value():
    # Z=2, alpha=1: J(pi/2) = (2/3) i + (1/3) e^{i pi} = -1/3 + 2i/3
    prof = coupling_profile(1.0, 2)
    j = momentum_coupling(prof, math.pi / 2.0)
    assert_allclose([j.real, j.imag], [-1.0 / 3.0, 2.0 / 3.0], atol=1e-15)


@pytest.mark.parametrize("alpha,Z", [(0.0, 3), (0.5, 17), (1.5, 200), (3.0, 2000)])
def test_momentum_coupling_matches_direct_sum(alpha, Z):
    prof = coupling_profile(alpha, Z)
    rng = np.random.default_rng(7)
    phi = rng.uniform(0.0, math.pi, size=40)
    r = np.arange(1, Z + 1, dtype=float)
    direct = (prof.weights[None, :] * np.exp(1j * phi[:, None] * r[None, :])).sum(axis=1)
    assert_allclose(momentum_coupling(prof, phi), direct, rtol=0, atol=1e-12)


def test_momentum_coupling_scalar_matches_array():
    prof = coupling_profile(1.2, 5)
    phi = 0.7321
    scalar = momentum_coupling(prof, phi)
    arr = momentum_coupling(prof, np.array([phi]))
    assert isinstance(scalar, complex)
    assert scalar == arr[0]


def test_mode_angles_full_and_truncated():
    p = ModelParams(N=8, Z=1, alpha=1.0, gamma=0.3, h=-0.7)
    assert_allclose(mode_angles(p), np.array([1, 3, 5, 7]) * math.pi / 8.0, rtol=1e-15)
    pt = ModelParams(N=8, Z=1, alpha=1.0, gamma=0.3, h=-0.7,
                     mode_range=ModeRange.TRUNCATED)
    assert_allclose(mode_angles(pt), np.array([1, 3, 5]) * math.pi / 8.0, rtol=1e-15)


def test_mode_angles_inside_zone():
    p = ModelParams(N=1024, Z=4, alpha=1.5, gamma=0.3, h=-0.7)
    phi = mode_angles(p)
    assert len(phi) == 512
    assert phi[0] > 0.0 and phi[-1] < math.pi
    assert (np.diff(phi) > 0).all()


def test_critical_field_zero_exact():
    assert critical_field_zero() == -1.0


def test_critical_field_pi_frozen_values():
    # Z=4, alpha=1: 1 - (1 + 1/2)/(25/12) = 1 - 18/25 = 0.28
    assert_allclose(critical_field_pi(1.0, 4), 0.28, rtol=1e-14)
    assert critical_field_pi(0.0, 2) == 0.0
    assert critical_field_pi(2.3, 1) == 1.0


@pytest.mark.parametrize("alpha", ALPHA_GRID)
@pytest.mark.parametrize("Z", Z_GRID)
def test_critical_field_pi_matches_alternating_sum(alpha, Z):
    # h_c at the zone boundary is -J(pi) = -sum_r (-1)^r J_r
    prof = coupling_profile(alpha, Z)
    alt = -math.fsum(((-1.0) ** r) * prof.weights[r - 1] for r in range(1, Z + 1))
    assert abs(critical_field_pi(alpha, Z) - alt) < 1e-12


@pytest.mark.parametrize("bad", [dict(N=3), dict(N=6, Z=0), dict(N=6, Z=4),
                                 dict(N=2), dict(N=8, alpha=-0.5)])
def test_params_validation(bad):
    kw = dict(N=8, Z=1, alpha=1.0, gamma=0.3, h=-0.7)
    kw.update(bad)
    with pytest.raises(ValueError):
        ModelParams(**kw)
