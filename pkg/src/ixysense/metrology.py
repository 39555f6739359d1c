"""Quantum Fisher information of dynamical and stationary probes.

For a pure state family phi(theta), not necessarily normalized, the
Fisher information of one mode is

    F = 4 [ <dphi|dphi> / n  -  |<phi|dphi>|^2 / n^2 ],    n = <phi|phi>.

This is the standard normalized-state expression with the normalization
and the gauge (overall phase) eliminated algebraically, so it can be fed
raw amplitudes.  It is invariant under phi -> c phi, dphi -> c dphi + w phi
for complex constants c, w, and additive over tensor factors, so the
chain total is the plain sum over momentum blocks.

Dynamical probe:  evolve the pair vacuum with each block propagator and
differentiate analytically.  Stationary probe:  reference eigenvector
per block, differentiated by gauge-fixed central differences with one
Richardson refinement (the analytic eigenvector derivative is singular
at exceptional points, which the stationary scans deliberately approach).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy.integrate import trapezoid

from .errors import UnderflowError
from .model import AnisotropyMode, ModelParams, ThetaKind
from .blocks import block_arrays, probe_vectors
from .dynamics import trajectory_arrays

# Totals this far below zero are numerical dust and clip to zero.
QFI_CLIP = -1e-10


class Protocol(Enum):
    DYNAMICAL = "dynamical"
    STATIONARY = "stationary"


@dataclass
class QfiSample:
    """One Fisher-information value at abscissa x (a time, size, or offset)."""

    x: float
    value: float
    protocol: Protocol
    theta_kind: ThetaKind
    params: ModelParams
    meta: dict = field(default_factory=dict)


@dataclass
class RatioResult:
    """Time-averaged ratio of non-Hermitian to Hermitian-benchmark QFI."""

    mean_ratio: float
    t0: float
    t1: float
    n_samples: int
    dropped: int
    t: np.ndarray
    qfi_nh: np.ndarray
    qfi_h: np.ndarray
    ratio: np.ndarray


def mode_qfi(phi, dphi) -> float:
    """Fisher information from one amplitude pair and its derivative.

    Works for any state dimension; the inputs do not need to be
    normalized (the formula divides the normalization out).
    """
    phi = np.asarray(phi, dtype=complex)
    dphi = np.asarray(dphi, dtype=complex)
    n = np.vdot(phi, phi).real
    if n < 1e-300:
        raise UnderflowError(f"state norm underflow in mode_qfi (norm^2={n})")
    g = np.vdot(dphi, dphi).real
    o = np.vdot(phi, dphi)
    return float(4.0 * (g / n - (o.real * o.real + o.imag * o.imag) / (n * n)))


def _clip_total(total: float) -> float:
    if QFI_CLIP < total < 0.0:
        return 0.0
    return total


def qfi_curve(params: ModelParams, t_grid, theta_kind: ThetaKind) -> np.ndarray:
    """Dynamical QFI at each time in t_grid, one vectorized pass.

    Modes and times are evaluated on a (modes x times) grid; the mode
    reduction is numpy's fixed-tree pairwise sum, which is deterministic
    for a fixed mode order.
    """
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if (t_grid < 0).any():
        raise ValueError("evolution times must be >= 0")
    _, _, j_imag, a, b, eps_sq = block_arrays(params)
    hermitian = params.anisotropy_mode is AnisotropyMode.HERMITIAN
    amp0, amp2, d0, d1, _ = trajectory_arrays(
        a[:, None], b[:, None], j_imag[:, None], eps_sq[:, None],
        hermitian, t_grid[None, :], theta_kind)
    n = amp0.real ** 2 + amp0.imag ** 2 + amp2.real ** 2 + amp2.imag ** 2
    if (n < 1e-300).any():
        raise UnderflowError("evolved norm underflow in qfi_curve")
    g = d0.real ** 2 + d0.imag ** 2 + d1.real ** 2 + d1.imag ** 2
    o = np.conj(amp0) * d0 + np.conj(amp2) * d1
    per_mode = 4.0 * (g / n - (o.real ** 2 + o.imag ** 2) / (n * n))
    totals = np.add.reduce(per_mode, axis=0)
    return np.array([_clip_total(v) for v in totals])


def dynamical_qfi(params: ModelParams, t: float, theta_kind: ThetaKind) -> QfiSample:
    """Fisher information of the evolved chain at time t."""
    value = float(qfi_curve(params, [t], theta_kind)[0])
    return QfiSample(x=float(t), value=value, protocol=Protocol.DYNAMICAL,
                     theta_kind=theta_kind, params=params)


def _theta_value(params: ModelParams, theta_kind: ThetaKind) -> float:
    if theta_kind is ThetaKind.FIELD_H:
        return params.h
    return params.gamma


def _with_theta(params: ModelParams, theta_kind: ThetaKind, value: float) -> ModelParams:
    if theta_kind is ThetaKind.FIELD_H:
        return replace(params, h=value)
    return replace(params, gamma=value)


def _probe_set(params: ModelParams):
    """Probe vectors plus eps_sq for every block of one parameter point."""
    _, _, _, a, b, eps_sq = block_arrays(params)
    hermitian = params.anisotropy_mode is AnisotropyMode.HERMITIAN
    v, defective = probe_vectors(a, b, hermitian)
    return v, eps_sq, defective


def _regauge(v: np.ndarray, pivot: np.ndarray) -> np.ndarray:
    """Rotate each row's phase so its pivot component is real positive.

    Rows whose pivot component vanished (an eigenvector flipped
    orientation entirely between stencil points) keep their own gauge.
    """
    piv = np.take_along_axis(v, pivot[:, None], axis=1)[:, 0]
    mag = np.abs(piv)
    phase = np.where(mag > 0, np.conj(piv) / np.where(mag > 0, mag, 1.0), 1.0)
    return v * phase[:, None]


def stationary_qfi(params: ModelParams, theta_kind: ThetaKind,
                   fd_step: float | None = None) -> QfiSample:
    """Fisher information of the stationary reference probe.

    Per-mode eigenvector derivatives use gauge-fixed central differences
    with one Richardson refinement (steps fd_step and fd_step/2); all
    stencil states are re-gauged against the center state's largest
    component before differencing.  Modes whose eps_sq changes sign
    inside the stencil straddle an exceptional point; the count is
    reported in meta["straddled_modes"] and the value is still returned.
    """
    theta0 = _theta_value(params, theta_kind)
    step = fd_step if fd_step is not None else 1e-6 * max(1.0, abs(theta0))
    if step <= 0:
        raise ValueError(f"fd_step must be > 0, got {step}")

    v0, eps0, defect0 = _probe_set(params)
    pivot = np.argmax(np.abs(v0), axis=1)
    v0 = _regauge(v0, pivot)

    stencil = {}
    eps_edge = {}
    for offs in (-step, -0.5 * step, 0.5 * step, step):
        p_off = _with_theta(params, theta_kind, theta0 + offs)
        v, eps, _ = _probe_set(p_off)
        stencil[offs] = _regauge(v, pivot)
        eps_edge[offs] = eps

    d_full = (stencil[step] - stencil[-step]) / (2.0 * step)
    d_half = (stencil[0.5 * step] - stencil[-0.5 * step]) / step
    dv = (4.0 * d_half - d_full) / 3.0

    n = np.sum(v0.real ** 2 + v0.imag ** 2, axis=1)
    g = np.sum(dv.real ** 2 + dv.imag ** 2, axis=1)
    o = np.sum(np.conj(v0) * dv, axis=1)
    per_mode = 4.0 * (g / n - (o.real ** 2 + o.imag ** 2) / (n * n))
    total = _clip_total(math.fsum(per_mode))

    straddled = int(np.count_nonzero(
        np.sign(eps_edge[step]) != np.sign(eps_edge[-step])))
    meta = {
        "fd_step": step,
        "straddled_modes": straddled,
        "defective_modes": int(np.count_nonzero(defect0)),
    }
    return QfiSample(x=theta0, value=total, protocol=Protocol.STATIONARY,
                     theta_kind=theta_kind, params=params, meta=meta)


def qfi_ratio_time_avg(params: ModelParams, theta_kind: ThetaKind,
                       t0: float = 200.0, t1: float = 1000.0,
                       n_grid: int = 801) -> RatioResult:
    """Trapezoid time average of F_nonHermitian / F_Hermitian on [t0, t1].

    The benchmark replaces the imaginary anisotropy i*gamma by the real
    value gamma in the same chain.  Grid points where the benchmark QFI
    falls below 1e-30 are dropped and counted.  With gamma = 0 the two
    models coincide and the ratio is 1 identically.
    """
    if not (t1 > t0 >= 0):
        raise ValueError(f"need t1 > t0 >= 0, got [{t0}, {t1}]")
    if n_grid < 2:
        raise ValueError(f"n_grid must be >= 2, got {n_grid}")
    grid = np.linspace(t0, t1, n_grid)

    if params.gamma == 0.0 or params.anisotropy_mode is AnisotropyMode.HERMITIAN:
        ones = np.ones_like(grid)
        f = qfi_curve(params, grid, theta_kind)
        return RatioResult(mean_ratio=1.0, t0=t0, t1=t1, n_samples=n_grid,
                           dropped=0, t=grid, qfi_nh=f, qfi_h=f.copy(), ratio=ones)

    params_h = replace(params, anisotropy_mode=AnisotropyMode.HERMITIAN)
    f_nh = qfi_curve(params, grid, theta_kind)
    f_h = qfi_curve(params_h, grid, theta_kind)
    valid = f_h > 1e-30
    dropped = int(np.count_nonzero(~valid))
    if np.count_nonzero(valid) < 2:
        raise UnderflowError("benchmark QFI vanished on the whole averaging grid")
    tv = grid[valid]
    ratio = f_nh[valid] / f_h[valid]
    mean = float(trapezoid(ratio, tv) / (tv[-1] - tv[0]))
    return RatioResult(mean_ratio=mean, t0=t0, t1=t1,
                       n_samples=int(np.count_nonzero(valid)), dropped=dropped,
                       t=tv, qfi_nh=f_nh[valid], qfi_h=f_h[valid], ratio=ratio)
