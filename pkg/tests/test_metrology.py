"""QFI invariances, the dynamical pipeline, and the stationary closed-form oracle."""

import math
from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ixysense.blocks import block_arrays
from ixysense.dynamics import evolve_mode_derivative
from ixysense.errors import UnderflowError
from ixysense.metrology import (
    dynamical_qfi,
    mode_qfi,
    qfi_curve,
    qfi_ratio_time_avg,
    stationary_qfi,
)
from ixysense.model import AnisotropyMode, ModelParams, ThetaKind

# Dual-route frozen value: the dense spin-basis oracle and the momentum
# pipeline agree on this cell to 1e-10; the digits below are the pinned
# momentum-side result.
DYNAMICAL_ORACLE_CELL = ModelParams(N=8, Z=1, alpha=1.5, gamma=0.3, h=-0.7)
DYNAMICAL_ORACLE_VALUE = 0.5186037668316041


def stationary_closed_form(params: ModelParams, theta: ThetaKind) -> float:
    """Per-mode stationary QFI from first-order eigenvector perturbation.

    For the selected eigenvector of M = [[-a,-b],[b,a]] (lowest real
    eigenvalue when eps_sq > 0, largest imaginary when eps_sq < 0):

        unbroken:  F_h = b^2 / (a^2 eps_sq),     F_gamma = J_I^2 / eps_sq
        broken:    F_h = 1 / |eps_sq|,           F_gamma = a^2 J_I^2 / (b^2 |eps_sq|)

    Independent of the finite-difference pipeline; used as its oracle.
    """
    _, _, ji, a, b, eps_sq = block_arrays(params)
    per = np.empty_like(eps_sq)
    unb = eps_sq > 0
    brk = ~unb
    if theta is ThetaKind.FIELD_H:
        per[unb] = b[unb] ** 2 / (a[unb] ** 2 * eps_sq[unb])
        per[brk] = 1.0 / np.abs(eps_sq[brk])
    else:
        per[unb] = ji[unb] ** 2 / eps_sq[unb]
        per[brk] = a[brk] ** 2 * ji[brk] ** 2 / (b[brk] ** 2 * np.abs(eps_sq[brk]))
    return float(math.fsum(per))


def test_mode_qfi_frozen_value():
    # orthogonal derivative: F = 4 |c|^2
    c = 0.3 + 0.4j
    assert mode_qfi([1.0, 0.0], [0.0, c]) == pytest.approx(1.0, rel=1e-14)


def test_mode_qfi_gauge_invariance():
    rng = np.random.default_rng(41)
    for _ in range(50):
        phi = rng.normal(size=2) + 1j * rng.normal(size=2)
        dphi = rng.normal(size=2) + 1j * rng.normal(size=2)
        c = complex(rng.normal(), rng.normal())
        w = complex(rng.normal(), rng.normal())
        if abs(c) < 0.1:
            c += 0.5
        base = mode_qfi(phi, dphi)
        moved = mode_qfi(c * phi, c * dphi + w * phi)
        assert moved == pytest.approx(base, rel=1e-10, abs=1e-10)


def test_mode_qfi_zero_norm_raises():
    with pytest.raises(UnderflowError):
        mode_qfi([0.0, 0.0], [1.0, 0.0])


def test_qfi_additive_over_modes():
    params = ModelParams(N=24, Z=4, alpha=1.1, gamma=0.35, h=-0.8)
    t = 1.7
    for theta in (ThetaKind.FIELD_H, ThetaKind.ANISOTROPY_GAMMA):
        total = float(qfi_curve(params, [t], theta)[0])
        per = []
        for p in range(1, params.N // 2 + 1):
            traj = evolve_mode_derivative(params, p, t, theta)
            per.append(mode_qfi(traj.state.vector(), np.array(traj.dstate)))
        assert total == pytest.approx(math.fsum(per), rel=1e-10)


def test_dynamical_qfi_frozen_oracle_cell():
    s = dynamical_qfi(DYNAMICAL_ORACLE_CELL, 1.0, ThetaKind.FIELD_H)
    assert s.value == pytest.approx(DYNAMICAL_ORACLE_VALUE, rel=1e-12)


def test_qfi_zero_at_t_zero():
    params = ModelParams(N=16, Z=2, alpha=1.0, gamma=0.3, h=-0.7)
    assert float(qfi_curve(params, [0.0], ThetaKind.FIELD_H)[0]) == 0.0


def test_qfi_nonnegative_random_cells():
    rng = np.random.default_rng(43)
    for _ in range(30):
        n = int(rng.choice([8, 16, 32]))
        params = ModelParams(N=n, Z=int(rng.integers(1, n // 2 + 1)),
                             alpha=float(rng.uniform(0, 3)),
                             gamma=float(rng.uniform(-1, 1)),
                             h=float(rng.uniform(-3, 1)))
        t = rng.uniform(0.0, 20.0, size=4)
        theta = rng.choice([ThetaKind.FIELD_H, ThetaKind.ANISOTROPY_GAMMA])
        assert (qfi_curve(params, t, theta) >= 0.0).all()


def test_qfi_curve_negative_time_raises():
    params = ModelParams(N=8, Z=1, alpha=1.0, gamma=0.3, h=-0.7)
    with pytest.raises(ValueError):
        qfi_curve(params, [-1.0], ThetaKind.FIELD_H)


STATIONARY_CELLS = [
    # (Z, alpha, gamma, h): both phases, both parameter targets
    (2, 1.0, 0.5, -1.5),    # unbroken, below the dome
    (2, 1.0, 0.5, -1.01),   # broken, inside the dome
    (1, 1.0, 0.5, -0.7),    # broken
    (4, 0.8, 0.5, -1.2),    # mixed-distance unbroken
    (2, 5.0, 0.5, -0.95),   # broken, short-range-like weights
    (3, 1.5, 0.0, -1.5),    # gamma = 0 limit
]


@pytest.mark.parametrize("theta", [ThetaKind.FIELD_H, ThetaKind.ANISOTROPY_GAMMA])
@pytest.mark.parametrize("z,alpha,gamma,h", STATIONARY_CELLS)
def test_stationary_qfi_matches_closed_form(z, alpha, gamma, h, theta):
    params = ModelParams(N=256, Z=z, alpha=alpha, gamma=gamma, h=h)
    exact = stationary_closed_form(params, theta)
    sample = stationary_qfi(params, theta)
    assert sample.meta["straddled_modes"] == 0
    assert sample.meta["defective_modes"] == 0
    assert sample.value == pytest.approx(exact, rel=1e-6, abs=1e-12)


def test_stationary_qfi_straddle_flagged():
    # dome edge at Z=1 is |h| = sqrt(1 + gamma^2); a gamma step of 2e-2
    # moves the edge across h = -1.116, so the stencil must straddle
    params = ModelParams(N=64, Z=1, alpha=1.0, gamma=0.5, h=-1.116)
    sample = stationary_qfi(params, ThetaKind.ANISOTROPY_GAMMA, fd_step=2e-2)
    assert sample.meta["straddled_modes"] > 0
    assert math.isfinite(sample.value)


def test_stationary_qfi_step_validation():
    params = ModelParams(N=16, Z=1, alpha=1.0, gamma=0.3, h=-0.7)
    with pytest.raises(ValueError):
        stationary_qfi(params, ThetaKind.FIELD_H, fd_step=0.0)


def test_ratio_gamma_zero_is_identically_one():
    params = ModelParams(N=32, Z=2, alpha=1.0, gamma=0.0, h=-0.7)
    r = qfi_ratio_time_avg(params, ThetaKind.FIELD_H, t0=1.0, t1=5.0, n_grid=11)
    assert r.mean_ratio == 1.0
    assert r.dropped == 0
    assert_allclose(r.ratio, 1.0, atol=0)
    assert_allclose(r.qfi_nh, r.qfi_h, atol=0)


def test_ratio_arrays_consistent():
    params = ModelParams(N=64, Z=2, alpha=1.5, gamma=0.3, h=-1.5)
    r = qfi_ratio_time_avg(params, ThetaKind.FIELD_H, t0=5.0, t1=25.0, n_grid=51)
    assert r.n_samples + r.dropped == 51
    assert_allclose(r.ratio, r.qfi_nh / r.qfi_h, rtol=1e-14)
    assert r.mean_ratio > 0
    assert math.isfinite(r.mean_ratio)


def test_ratio_window_validation():
    params = ModelParams(N=16, Z=1, alpha=1.0, gamma=0.3, h=-0.7)
    with pytest.raises(ValueError):
        qfi_ratio_time_avg(params, ThetaKind.FIELD_H, t0=5.0, t1=5.0)
    with pytest.raises(ValueError):
        qfi_ratio_time_avg(params, ThetaKind.FIELD_H, t0=1.0, t1=2.0, n_grid=1)


def test_hermitian_benchmark_differs_for_nonzero_gamma():
    params = ModelParams(N=64, Z=1, alpha=1.0, gamma=0.3, h=-1.5)
    herm = replace(params, anisotropy_mode=AnisotropyMode.HERMITIAN)
    f_nh = float(qfi_curve(params, [3.0], ThetaKind.FIELD_H)[0])
    f_h = float(qfi_curve(herm, [3.0], ThetaKind.FIELD_H)[0])
    assert f_nh != pytest.approx(f_h, rel=1e-3)
