"""Mode propagators and evolved amplitudes with analytic parameter derivatives.

Every block satisfies M^2 = eps_sq * I, so the propagator collapses to

    exp(-i M t) = C(x, t) I - i S(x, t) M,        x = eps_sq,
    C(x, t) = cos(sqrt(x) t),   S(x, t) = sin(sqrt(x) t) / sqrt(x).

C and S are entire functions of x: trigonometric for x > 0, hyperbolic
for x < 0 (cos(i y) = cosh y), smooth across x = 0 where a Taylor branch
takes over.  Parameter derivatives follow from the chain rule,

    dU/dtheta = (dx/dtheta) [C_x I - i S_x M] - i S dM/dtheta,
    C_x = -t S / 2,   S_x = (t C - S) / (2 x),

with series fallbacks for the kernels near x = 0.

Broken blocks (x < 0) grow like exp(|eps| t).  Once |eps| t exceeds
RESCALE_EXPONENT both the amplitudes and their derivatives are scaled by
exp(-|eps| t); the common factor cancels in any Fisher information and
is reported through log_scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnderflowError
from .model import (
    AnisotropyMode,
    ModelParams,
    ModeRange,
    ThetaKind,
    coupling_profile,
    momentum_coupling,
)
from .blocks import ModeBlock, ModeState

# Taylor window for C and S: |x| t^2 below this.
SERIES_Z = 1e-8
# Wider window for S_x: the closed form (tC - S)/(2x) cancels near x = 0.
DSERIES_Z = 1e-6
# Hyperbolic growth beyond exp(150) is factored out of the amplitudes.
RESCALE_EXPONENT = 150.0

_EYE2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class ModeTrajectory:
    """Unnormalized evolved amplitudes of one block and their theta-derivative.

    state holds phi = U(t) (1, 0) with normalized=False; dstate is the
    analytic derivative of those amplitudes.  Both carry the same inert
    factor exp(-state.log_scale) when the block grows hyperbolically.
    """

    state: ModeState
    dstate: tuple[complex, complex]
    theta_kind: ThetaKind


def _kernels(x, t, rescale=True):
    """C, S and the rescale exponent sigma, vectorized over broadcast shapes."""
    xb, tb = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    shape = xb.shape
    xf = xb.ravel().astype(float)
    tf = tb.ravel().astype(float)
    c = np.empty_like(xf)
    s = np.empty_like(xf)
    sig = np.zeros_like(xf)

    z = xf * tf * tf
    ser = np.abs(z) < SERIES_Z
    pos = ~ser & (xf > 0.0)
    neg = ~ser & (xf < 0.0)

    if ser.any():
        zs = z[ser]
        ts = tf[ser]
        c[ser] = 1.0 - 0.5 * zs * (1.0 - zs / 12.0 * (1.0 - zs / 30.0))
        s[ser] = ts * (1.0 - zs / 6.0 * (1.0 - zs / 20.0 * (1.0 - zs / 42.0)))
    if pos.any():
        rt = np.sqrt(xf[pos])
        st = rt * tf[pos]
        c[pos] = np.cos(st)
        s[pos] = np.sin(st) / rt
    if neg.any():
        rt = np.sqrt(-xf[neg])
        st = rt * tf[neg]
        cn = np.empty_like(st)
        sn = np.empty_like(st)
        grow = st > RESCALE_EXPONENT if rescale else np.zeros(st.shape, dtype=bool)
        if grow.any():
            damp = np.exp(-2.0 * st[grow])
            cn[grow] = 0.5 * (1.0 + damp)
            sn[grow] = (1.0 - damp) / (2.0 * rt[grow])
        tame = ~grow
        cn[tame] = np.cosh(st[tame])
        sn[tame] = np.sinh(st[tame]) / rt[tame]
        c[neg] = cn
        s[neg] = sn
        sg = np.zeros_like(st)
        sg[grow] = st[grow]
        sig[neg] = sg

    return c.reshape(shape), s.reshape(shape), sig.reshape(shape)


def _kernel_derivs(x, t, c, s):
    """dC/dx and dS/dx given already-evaluated (possibly rescaled) C, S."""
    xb, tb, cb, sb = np.broadcast_arrays(
        np.asarray(x, dtype=float), np.asarray(t, dtype=float),
        np.asarray(c), np.asarray(s))
    shape = xb.shape
    xf = xb.ravel()
    tf = tb.ravel()
    cf = cb.ravel()
    sf = sb.ravel()

    dc = -0.5 * tf * sf
    z = xf * tf * tf
    ser = np.abs(z) < DSERIES_Z
    ds = np.empty_like(xf)
    if ser.any():
        zs = z[ser]
        t3 = tf[ser] ** 3
        ds[ser] = -t3 / 6.0 * (1.0 - zs / 10.0 * (1.0 - zs / 28.0 * (
            1.0 - zs / 54.0 * (1.0 - zs / 88.0 * (1.0 - zs / 130.0)))))
    rest = ~ser
    if rest.any():
        ds[rest] = (tf[rest] * cf[rest] - sf[rest]) / (2.0 * xf[rest])
    return dc.reshape(shape), ds.reshape(shape)


def propagator(block: ModeBlock, t: float) -> np.ndarray:
    """The 2x2 matrix exp(-i M t) of one block."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    c, s, _ = _kernels(block.eps_sq, t, rescale=False)
    return complex(c) * _EYE2 - 1j * complex(s) * block.matrix()


def evolved_arrays(a, m, x, t):
    """Unnormalized amplitudes U(t)(1,0) = (C + i a S, -i m S), vectorized.

    m is the lower-left block entry M_10: b for imaginary anisotropy,
    -b for the real (Hermitian) benchmark.  Returns (amp0, amp2, sigma);
    amplitudes carry the factor exp(-sigma).
    """
    c, s, sig = _kernels(x, t)
    amp0 = c + 1j * (np.asarray(a) * s)
    amp2 = -1j * (np.asarray(m) * s)
    return amp0, amp2, sig


def trajectory_arrays(a, b, j_imag, x, hermitian, t, theta_kind):
    """Amplitudes plus analytic theta-derivatives, vectorized over modes/times.

    Derivative of U(t)(1,0) at fixed t, with m = M_10 (b non-Hermitian,
    -b Hermitian):

        dphi = (dx/dtheta) (C_x + i a S_x, -i m S_x) - i S dM/dtheta (1, 0)

    with, for theta = h:      dx/dtheta = 2a,        dM (1,0) = (-1, 0)
    and for theta = gamma:    dx/dtheta = -+ 2 b J^I, dM (1,0) = (0, +-J^I)
    (upper signs non-Hermitian, lower Hermitian).  All outputs share the
    inert factor exp(-sigma).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    j_imag = np.asarray(j_imag, dtype=float)
    m = -b if hermitian else b  # lower-left block entry M_10
    c, s, sig = _kernels(x, t)
    dc, ds = _kernel_derivs(x, t, c, s)
    amp0 = c + 1j * (a * s)
    amp2 = -1j * (m * s)
    if theta_kind is ThetaKind.FIELD_H:
        xp = 2.0 * a
        d0 = xp * (dc + 1j * (a * ds)) + 1j * s
        d1 = xp * (-1j * (m * ds))
    elif theta_kind is ThetaKind.ANISOTROPY_GAMMA:
        sgn = 1.0 if hermitian else -1.0
        xp = sgn * 2.0 * b * j_imag
        mp = -j_imag if hermitian else j_imag  # dM_10/dgamma
        d0 = xp * (dc + 1j * (a * ds))
        d1 = xp * (-1j * (m * ds)) - 1j * (s * mp)
    else:
        raise ValueError(f"unknown theta_kind: {theta_kind!r}")
    return amp0, amp2, d0, d1, sig


def _mode_scalars(params: ModelParams, p: int):
    """phi, J(phi), a, b, eps_sq for a single block index p."""
    n_blocks = params.N // 2
    if params.mode_range is ModeRange.TRUNCATED:
        n_blocks -= 1
    if not 1 <= p <= n_blocks:
        raise ValueError(f"p must be in 1..{n_blocks}, got {p}")
    phi = (2.0 * p - 1.0) * math.pi / params.N
    j = momentum_coupling(coupling_profile(params.alpha, params.Z), phi)
    a = params.h + j.real
    b = params.gamma * j.imag
    if params.anisotropy_mode is AnisotropyMode.HERMITIAN:
        x = a * a + b * b
    else:
        x = a * a - b * b
    return phi, j, a, b, x


def evolve_mode(block: ModeBlock, t: float) -> ModeState:
    """Normalized evolved state of one block from the pair vacuum."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    m = -block.b if block.hermitian else block.b
    amp0, amp2, sig = evolved_arrays(block.a, m, block.eps_sq, t)
    amp0 = complex(amp0)
    amp2 = complex(amp2)
    n2 = amp0.real ** 2 + amp0.imag ** 2 + amp2.real ** 2 + amp2.imag ** 2
    if n2 < 1e-300:
        raise UnderflowError(
            f"evolved norm underflow at t={t} (eps_sq={block.eps_sq})")
    n = math.sqrt(n2)
    return ModeState(amp0 / n, amp2 / n, normalized=True,
                     prenorm=n, log_scale=float(sig))


def evolve_mode_derivative(params: ModelParams, p: int, t: float,
                           theta_kind: ThetaKind) -> ModeTrajectory:
    """Unnormalized amplitudes of block p and their analytic theta-derivative."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    _, j, a, b, x = _mode_scalars(params, p)
    hermitian = params.anisotropy_mode is AnisotropyMode.HERMITIAN
    amp0, amp2, d0, d1, sig = trajectory_arrays(a, b, j.imag, x, hermitian, t, theta_kind)
    state = ModeState(complex(amp0), complex(amp2), normalized=False,
                      log_scale=float(sig))
    return ModeTrajectory(state=state, dstate=(complex(d0), complex(d1)),
                          theta_kind=theta_kind)
