"""Dense spin-basis oracle: structure checks and the dual-route QFI match."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ixysense.dense import (
    MAX_DENSE_SITES,
    build_spin_hamiltonian,
    dense_evolve_qfi,
    parity_operator,
    polarized_vacuum,
    propagate_dense,
)
from ixysense.metrology import dynamical_qfi
from ixysense.model import AnisotropyMode, ModelParams, ThetaKind


def test_polarized_diagonal_elements():
    # couplings are purely off-diagonal, so <all-up|H|all-up> = N h/2
    # and <all-down|H|all-down> = -N h/2
    params = ModelParams(N=4, Z=2, alpha=1.0, gamma=0.4, h=0.37)
    m = build_spin_hamiltonian(params).matrix
    assert m[0, 0] == pytest.approx(2 * 0.37, rel=1e-14)
    assert m[-1, -1] == pytest.approx(-2 * 0.37, rel=1e-14)


def test_hermitian_mode_builds_hermitian_matrix():
    params = ModelParams(N=4, Z=2, alpha=1.0, gamma=0.4, h=-0.7,
                         anisotropy_mode=AnisotropyMode.HERMITIAN)
    m = build_spin_hamiltonian(params).matrix
    assert np.abs(m - m.conj().T).max() == 0.0


def test_imaginary_anisotropy_conjugates_to_negated_gamma():
    from dataclasses import replace
    params = ModelParams(N=4, Z=2, alpha=1.0, gamma=0.4, h=-0.7)
    m = build_spin_hamiltonian(params).matrix
    m_neg = build_spin_hamiltonian(replace(params, gamma=-0.4)).matrix
    assert np.abs(m.conj().T - m_neg).max() == 0.0


def test_parity_commutes_exactly():
    params = ModelParams(N=6, Z=3, alpha=1.2, gamma=0.3, h=-0.7)
    m = build_spin_hamiltonian(params).matrix
    p = parity_operator(6)
    # P is diagonal +-1; commutation means H_ij vanishes across sectors
    assert np.abs(m * p[None, :] - p[:, None] * m).max() == 0.0


def test_parity_operator_structure():
    p = parity_operator(4)
    assert isinstance(p, np.ndarray)
    assert set(np.unique(p)) == {-1.0, 1.0}
    assert p[0] == 1.0   # all spins up
    assert p[-1] == 1.0  # all spins down, even count


def test_polarized_vacuum_state():
    psi = polarized_vacuum(4)
    assert psi.shape == (16,)
    assert psi[-1] == 1.0
    assert np.linalg.norm(psi) == 1.0


def test_propagate_dense_methods_agree():
    params = ModelParams(N=4, Z=2, alpha=1.5, gamma=0.3, h=-0.7)
    op = build_spin_hamiltonian(params)
    psi = polarized_vacuum(4)
    a = propagate_dense(op, 1.3, psi, method="pade")
    b = propagate_dense(op, 1.3, psi, method="eig")
    assert_allclose(a, b, atol=1e-10)
    with pytest.raises(ValueError):
        propagate_dense(op, 1.0, psi, method="magic")


def test_size_guard():
    with pytest.raises(ValueError):
        build_spin_hamiltonian(
            ModelParams(N=MAX_DENSE_SITES + 2, Z=1, alpha=1.0, gamma=0.3, h=-0.7))


@pytest.mark.parametrize("theta", [ThetaKind.FIELD_H, ThetaKind.ANISOTROPY_GAMMA])
def test_dense_matches_momentum_pipeline(theta):
    params = ModelParams(N=6, Z=2, alpha=1.5, gamma=0.3, h=-0.7)
    f_dense = dense_evolve_qfi(params, 1.0, theta)
    f_mode = dynamical_qfi(params, 1.0, theta).value
    assert abs(f_mode - f_dense) / max(abs(f_dense), 1.0) < 1e-8


def test_dense_fd_step_validation():
    params = ModelParams(N=4, Z=1, alpha=1.0, gamma=0.3, h=-0.7)
    with pytest.raises(ValueError):
        dense_evolve_qfi(params, 1.0, ThetaKind.FIELD_H, fd_step=-1e-5)
