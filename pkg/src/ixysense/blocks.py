"""Momentum-space mode blocks, dispersion, and phase classification.

Each momentum pair (phi, -phi) contributes an independent two-level
block spanned by the pair vacuum and the doubly excited pair state.
With a = h + Re J(phi) and b = gamma * Im J(phi) the traceless block
reads

    M = [[-a, -b], [ b, a]]     (imaginary anisotropy, non-Hermitian)
    M = [[-a, -b], [-b, a]]     (real anisotropy, Hermitian benchmark)

and squares to eps_sq * I with eps_sq = a^2 - b^2 (non-Hermitian) or
a^2 + b^2 (Hermitian).  A negative eps_sq marks a broken block: a pair
of complex-conjugate eigenvalues and exponential amplitude growth.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import AnisotropyMode, ModelParams, coupling_profile, mode_angles, momentum_coupling

# Classification tolerance: eigenvalue-squared magnitudes below this are
# treated as coalesced rather than resolved into a sign.
TOL_PHASE = 1e-12


@dataclass(frozen=True)
class ModeBlock:
    """One momentum block and its derived quantities."""

    p: int
    phi: float
    a: float
    b: float
    eps_sq: float
    j_real: float
    j_imag: float
    hermitian: bool

    def matrix(self) -> np.ndarray:
        """The traceless 2x2 block."""
        lower = -self.b if self.hermitian else self.b
        return np.array([[-self.a, -self.b], [lower, self.a]], dtype=complex)


class PhaseLabel(Enum):
    UNBROKEN = "unbroken"
    BROKEN = "broken"


@dataclass(frozen=True)
class SpectrumClassification:
    label: PhaseLabel
    min_eps_sq: float
    argmin_mode: int


@dataclass(frozen=True)
class ModeState:
    """Amplitudes on one block's (vacuum, pair) basis.

    defective marks states returned at (or overridden by) an eigenvector
    coalescence.  log_scale records an inert common factor exp(-log_scale)
    applied to unnormalized amplitudes to keep them inside double range;
    it cancels in any quantum Fisher information built from the state.
    """

    amp0: complex
    amp2: complex
    normalized: bool
    defective: bool = False
    prenorm: float | None = None
    log_scale: float = 0.0

    def vector(self) -> np.ndarray:
        return np.array([self.amp0, self.amp2], dtype=complex)


def block_arrays(params: ModelParams):
    """Vectorized block data: (phi, j_real, j_imag, a, b, eps_sq).

    This is the array-of-columns twin of build_blocks used by every
    mode-summed quantity; build_blocks wraps it in dataclass records.
    """
    phi = mode_angles(params)
    profile = coupling_profile(params.alpha, params.Z)
    j = momentum_coupling(profile, phi)
    j_real = j.real.copy()
    j_imag = j.imag.copy()
    a = params.h + j_real
    b = params.gamma * j_imag
    if params.anisotropy_mode is AnisotropyMode.HERMITIAN:
        eps_sq = a * a + b * b
    else:
        eps_sq = a * a - b * b
    return phi, j_real, j_imag, a, b, eps_sq


def build_blocks(params: ModelParams) -> list[ModeBlock]:
    """All mode blocks of the chain, ascending p."""
    phi, j_real, j_imag, a, b, eps_sq = block_arrays(params)
    hermitian = params.anisotropy_mode is AnisotropyMode.HERMITIAN
    return [
        ModeBlock(p=i + 1, phi=float(phi[i]), a=float(a[i]), b=float(b[i]),
                  eps_sq=float(eps_sq[i]), j_real=float(j_real[i]),
                  j_imag=float(j_imag[i]), hermitian=hermitian)
        for i in range(len(phi))
    ]


def dispersion(block: ModeBlock) -> complex:
    """Principal square root of eps_sq.

    Real and >= 0 for unbroken blocks, pure imaginary with positive
    imaginary part for broken ones.
    """
    return complex(np.sqrt(complex(block.eps_sq)))


def classify_phase(blocks: list[ModeBlock]) -> SpectrumClassification:
    """Broken iff any block has eps_sq < -TOL_PHASE."""
    if not blocks:
        raise ValueError("no blocks to classify")
    eps = np.array([blk.eps_sq for blk in blocks])
    i = int(np.argmin(eps))
    label = PhaseLabel.BROKEN if eps[i] < -TOL_PHASE else PhaseLabel.UNBROKEN
    return SpectrumClassification(label=label, min_eps_sq=float(eps[i]),
                                  argmin_mode=blocks[i].p)


def _gauge_fix(v: np.ndarray) -> np.ndarray:
    """Rotate a global phase so the largest-magnitude component is real positive."""
    k = int(np.argmax(np.abs(v)))
    piv = v[k]
    mag = abs(piv)
    if mag == 0.0:
        return v
    return v * (np.conj(piv) / mag)


def probe_vectors(a, b, hermitian: bool):
    """Batched reference eigenvectors for blocks given by arrays a, b.

    Returns (V, defective): V has shape (m, 2), each row normalized and
    gauge-fixed so its largest-magnitude component is real positive.
    Selection per row: eigenvalue with lowest real part when eps_sq > 0
    (always, for Hermitian blocks), largest imaginary part when
    eps_sq < 0.  Rows within TOL_PHASE of coalescence are replaced by
    the merging eigendirection (b, -a)/sqrt(a^2+b^2) and flagged;
    vanishing blocks fall back to the vacuum basis vector, also flagged.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    m = len(a)
    v = np.empty((m, 2), dtype=complex)
    defective = np.zeros(m, dtype=bool)

    if hermitian:
        mats = np.empty((m, 2, 2), dtype=float)
        mats[:, 0, 0] = -a
        mats[:, 0, 1] = -b
        mats[:, 1, 0] = -b
        mats[:, 1, 1] = a
        _, vecs = np.linalg.eigh(mats)
        v[:] = vecs[:, :, 0]  # eigh sorts ascending; column 0 is the lowest
    else:
        mats = np.empty((m, 2, 2), dtype=complex)
        mats[:, 0, 0] = -a
        mats[:, 0, 1] = -b
        mats[:, 1, 0] = b
        mats[:, 1, 1] = a
        vals, vecs = np.linalg.eig(mats)
        x = a * a - b * b
        pick_low = np.argmin(vals.real, axis=1)
        pick_top = np.argmax(vals.imag, axis=1)
        pick = np.where(x < 0, pick_top, pick_low)
        v[:] = np.take_along_axis(vecs, pick[:, None, None], axis=2)[:, :, 0]
        coalesced = (np.abs(x) <= TOL_PHASE) & ~((a == 0.0) & (b == 0.0))
        if coalesced.any():
            norm = np.hypot(a[coalesced], b[coalesced])
            v[coalesced, 0] = b[coalesced] / norm
            v[coalesced, 1] = -a[coalesced] / norm
            defective |= coalesced

    degenerate = (a == 0.0) & (b == 0.0)
    if degenerate.any():
        v[degenerate, 0] = 1.0
        v[degenerate, 1] = 0.0
        defective |= degenerate

    # gauge: largest-magnitude component real positive, unit norm
    mags = np.abs(v)
    piv = np.take_along_axis(v, np.argmax(mags, axis=1)[:, None], axis=1)[:, 0]
    safe = np.abs(piv) > 0
    phase = np.ones(m, dtype=complex)
    phase[safe] = np.conj(piv[safe]) / np.abs(piv[safe])
    v *= phase[:, None]
    v /= np.linalg.norm(v, axis=1)[:, None]
    return v, defective


def stationary_probe(block: ModeBlock) -> ModeState:
    """Normalized reference eigenvector of one block.

    Selection: the eigenvalue -eps (lowest real part) in an unbroken
    block, +i|eps| (largest imaginary part) in a broken one.  Within
    TOL_PHASE of coalescence the single merging eigendirection
    (b, -a)/sqrt(a^2+b^2) is returned and flagged; a vanishing block
    (a = b = 0) returns the vacuum basis vector, also flagged.
    """
    v, defective = probe_vectors([block.a], [block.b], block.hermitian)
    return ModeState(complex(v[0, 0]), complex(v[0, 1]), normalized=True,
                     defective=bool(defective[0]))
