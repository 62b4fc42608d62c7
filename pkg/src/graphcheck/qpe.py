"""
Exact outcome statistics of ideal phase estimation on the walk operator.

An eigenvalue ``exp(2i theta)`` is read as the fraction ``phi = theta/pi mod 1``.
With ``N = 2**p`` control states, an eigenstate of fraction ``phi`` yields
outcome ``k`` with probability

    K_p(phi - k/N) = sin^2(N pi d) / (N sin(pi d))^2,   d = phi - k/N,

and a superposition mixes these kernels with its eigenspace weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import Spectrum
from .walk import WalkState

MIN_BITS = 4
MAX_BITS = 24
#: Extra bits so that a grid step of pi/2^p in theta is below the gap scale measured in radians.
PHASE_GUARD_BITS = 2
#: Eigenspace weights below this do not move any outcome probability measurably.
WEIGHT_FLOOR = 1e-16
WEIGHT_SUM_TOL = 1e-8
MASS_SUM_TOL = 1e-12


def raw_qpe_bits(n: int) -> int:
    """``floor(|log2(13 / n**3.4)|) + 1`` without clamping."""
    if n < 4:
        raise ValueError(f"need n >= 4, got n={n}")
    return math.floor(abs(math.log2(13.0) - 3.4 * math.log2(n))) + 1


def qpe_bits(n: int) -> int:
    """Bit budget from the fitted gap lower bound, clamped to ``[4, 24]``."""
    return min(MAX_BITS, max(MIN_BITS, raw_qpe_bits(n)))


def default_precision(n: int) -> int:
    """:func:`qpe_bits` plus guard bits, still clamped to 24."""
    return min(MAX_BITS, qpe_bits(n) + PHASE_GUARD_BITS)


def phase_fraction(phase: float) -> float:
    """Walk eigenphase ``2 theta`` (radians) to the register fraction ``theta/pi mod 1``."""
    return (phase / (2.0 * math.pi)) % 1.0


def qpe_kernel(phi, p: int, k=None) -> np.ndarray:
    """``K_p(phi - k/2**p)`` for all outcomes ``k`` (or the given ones)."""
    n_out = 1 << p
    if k is None:
        k = np.arange(n_out)
    x = n_out * np.asarray(phi, dtype=float) - np.asarray(k, dtype=float)
    # periodic in x with period N; reduce into (-N/2, N/2] so x/N stays small
    x = x - n_out * np.round(x / n_out)
    return (np.sinc(x) / np.sinc(x / n_out)) ** 2


@dataclass(frozen=True, eq=False)
class QpeDistribution:
    p: int
    probabilities: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probabilities, dtype=float)
        if probs.shape != (1 << self.p,):
            raise ValueError(f"expected {1 << self.p} outcome probabilities, got shape {probs.shape}")
        if np.any(probs < -1e-15):
            raise ValueError("negative outcome probability")
        probs = np.clip(probs, 0.0, None)
        total = probs.sum()
        if abs(total - 1.0) > MASS_SUM_TOL:
            raise ValueError(f"outcome masses sum to {total!r}")
        probs.setflags(write=False)
        object.__setattr__(self, "probabilities", probs)

    def mass(self, k: int) -> float:
        return float(self.probabilities[k % (1 << self.p)])

    def modal_outcome(self) -> int:
        return int(np.argmax(self.probabilities))

    def as_dict(self, floor: float = 0.0) -> dict[int, float]:
        ks = np.flatnonzero(self.probabilities > floor)
        return {int(k): float(self.probabilities[k]) for k in ks}


def distribution_from_weights(weights, p: int) -> QpeDistribution:
    """Mix kernels for ``(phase, weight)`` pairs, phases being walk eigenphases in radians."""
    if not 1 <= p <= MAX_BITS:
        raise ValueError(f"precision must be in [1, {MAX_BITS}], got {p}")
    pairs = [(ph, w) for ph, w in weights if w > WEIGHT_FLOOR]
    total = sum(w for _, w in pairs)
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise ValueError(f"eigenspace weights sum to {total!r}, expected 1")
    probs = np.zeros(1 << p)
    for ph, w in pairs:
        probs += (w / total) * qpe_kernel(phase_fraction(ph), p)
    return QpeDistribution(p, probs / probs.sum())


def qpe_distribution(spec: Spectrum, state: WalkState, p: int) -> QpeDistribution:
    """Outcome distribution of ``p``-bit phase estimation of ``W`` on ``state``."""
    return distribution_from_weights(spec.projection_weights(state), p)


def qpe_sample(dist: QpeDistribution, rng: np.random.Generator, shots: int) -> np.ndarray:
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    return rng.choice(dist.probabilities.size, size=shots, p=dist.probabilities)


def reference_outcome(p: int, theta2: float) -> int:
    """The ``p``-bit gridpoint nearest ``theta2/pi`` (halves round up)."""
    n_out = 1 << p
    return math.floor(n_out * theta2 / math.pi + 0.5) % n_out


def phase_match(k: int, p: int, theta2: float, tolerant: bool = False) -> bool:
    """Whether outcome ``k`` is the ``p``-bit representative of ``theta2``.

    ``tolerant`` also accepts the two neighbouring gridpoints.
    """
    n_out = 1 << p
    if not 0 <= k < n_out:
        raise ValueError(f"outcome {k} outside [0, {n_out})")
    ref = reference_outcome(p, theta2)
    if tolerant:
        return (k - ref) % n_out in (0, 1, n_out - 1)
    return k == ref
