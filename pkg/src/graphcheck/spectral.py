"""
Spectrum of the walk operator from the symmetric coupling matrix.

For ``C_xy = sqrt(p_xy p_yx)`` with eigenpair ``(lam, v)``, let ``T v = sum_x
v_x |alpha_x>`` and ``S`` the register swap. On ``span{T v, S T v}`` the walk
acts as the 2x2 block ``[[-1, -2 lam], [2 lam, 4 lam^2 - 1]]`` whose
eigenvalues are ``exp(+-2i theta)`` with ``theta = arccos(lam)``; the
corresponding eigenvectors are ``T v - exp(+-i theta) S T v``. Everything
orthogonal to ``span{alpha_x} + span{beta_y}`` is fixed by ``W``, as are the
``|lam| = 1`` directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, NamedTuple

import numpy as np
import scipy.linalg

from . import analytic
from .graph import (
    Graph,
    MarkedSet,
    StochasticMatrix,
    complete_graph,
    mark_nodes,
    transition_matrix,
)
from .walk import DENSE_MAX_N, WalkOperator, WalkState

CLUSTER_TOL = 1e-10
UNIT_TOL = 1e-10
#: Coupling eigenvalues this close to +-1 are treated as the fixed sector.
EDGE_TOL = 1e-12
#: Allowed mismatch between the two routes to the total projection weight.
COMPLETENESS_TOL = 1e-8

Method = Literal["structured", "dense"]


class SpectrumError(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class SymmetricCouplingMatrix:
    n: int
    entries: np.ndarray
    marked: MarkedSet

    def unmarked_block(self) -> np.ndarray:
        keep = np.setdiff1d(np.arange(self.n), self.marked.indices())
        return self.entries[np.ix_(keep, keep)]


def coupling_matrix(p: StochasticMatrix) -> SymmetricCouplingMatrix:
    e = p.entries
    c = np.sqrt(e * e.T)
    c.setflags(write=False)
    return SymmetricCouplingMatrix(p.n, c, p.marked)


class SpectralEntry(NamedTuple):
    phase: float
    vector: WalkState | None
    weight: float


def _wrap(phase):
    """Map angles into (-pi, pi]."""
    w = np.mod(np.asarray(phase, dtype=float) + np.pi, 2.0 * np.pi) - np.pi
    w = np.where(w == -np.pi, np.pi, w)
    return w if w.ndim else float(w)


def cluster_phases(pairs, tol: float = CLUSTER_TOL) -> list[tuple[float, float]]:
    """Merge ``(phase, weight)`` pairs whose phases differ by less than ``tol`` on the circle."""
    items = sorted((_wrap(ph), w) for ph, w in pairs)
    out: list[list[float]] = []
    for ph, w in items:
        if out and ph - out[-1][0] < tol:
            out[-1][1] += w
        else:
            out.append([ph, w])
    if len(out) > 1 and out[0][0] + 2.0 * np.pi - out[-1][0] < tol:
        out[0][1] += out.pop()[1]
    return [(float(ph), float(w)) for ph, w in out]


@dataclass(frozen=True, eq=False)
class _Decomposition:
    sqrt_p: np.ndarray
    coupling: np.ndarray
    lam: np.ndarray
    vecs: np.ndarray


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenphases of ``W`` (radians in (-pi, pi]) with multiplicities.

    ``vector`` is filled only when eigenvectors were requested; the phase-0
    sector is then still reported without a vector because it is large and
    QPE only needs its projector weight.
    """

    entries: list[SpectralEntry]
    source: Method
    n: int
    _basis: object = field(default=None, repr=False)

    def phases(self) -> np.ndarray:
        """Phase multiset with each phase repeated by its (integer) multiplicity."""
        reps = [np.full(int(round(e.weight)), e.phase) for e in self.entries]
        return np.concatenate(reps) if reps else np.empty(0)

    def eigenvalues(self) -> np.ndarray:
        return np.exp(1j * self.phases())

    def dimension(self) -> float:
        return float(sum(e.weight for e in self.entries))

    def projection_weights(self, state: WalkState) -> list[tuple[float, float]]:
        """Squared projections of ``state`` onto each eigenspace as ``(phase, weight)``.

        Raises :class:`SpectrumError` if the weights fail to add up to 1.
        """
        if state.n != self.n:
            raise ValueError(f"state is for n={state.n}, spectrum for n={self.n}")
        if self.source == "dense":
            pairs = _dense_weights(self._basis, state.amplitudes)
        else:
            pairs = _structured_weights(self._basis, state.amplitudes)
        total = sum(w for _, w in pairs)
        if abs(total - 1.0) > COMPLETENESS_TOL:
            raise SpectrumError(f"projection weights sum to {total!r}, spectrum incomplete")
        return cluster_phases(pairs)


def _decompose(p: StochasticMatrix) -> _Decomposition:
    c = coupling_matrix(p).entries
    try:
        lam, vecs = np.linalg.eigh(c)
    except np.linalg.LinAlgError as exc:
        raise SpectrumError(
            f"coupling eigensolver failed (condition number {np.linalg.cond(c):.3e})"
        ) from exc
    return _Decomposition(np.sqrt(p.entries), c, np.clip(lam, -1.0, 1.0), vecs)


def _structured_weights(d: _Decomposition, psi: np.ndarray) -> list[tuple[float, float]]:
    n = d.sqrt_p.shape[0]
    s = psi.reshape(n, n)
    g_a = np.sum(d.sqrt_p * s, axis=1)
    g_b = np.sum(d.sqrt_p * s.T, axis=1)
    pa = d.vecs.T @ g_a
    pb = d.vecs.T @ g_b

    pairs = []
    fixed = 0.0
    for i, lam in enumerate(d.lam):
        if abs(lam) > 1.0 - EDGE_TOL:
            fixed += float(abs(pa[i]) ** 2)
            continue
        theta = math.acos(lam)
        for sign in (1, -1):
            e = np.exp(sign * 1j * theta)
            ov = pa[i] - np.conj(e) * pb[i]
            pairs.append((sign * 2.0 * theta, float(abs(ov) ** 2 / (2.0 - 2.0 * lam * lam))))

    # independent route: projection onto span{alpha} + span{beta} via its Gram matrix
    eye = np.eye(n)
    gram = np.block([[eye, d.coupling], [d.coupling, eye]])
    g = np.concatenate([g_a, g_b])
    in_span = float(np.real(np.conj(g) @ np.linalg.pinv(gram, hermitian=True) @ g))
    dynamic = sum(w for _, w in pairs) + fixed
    if abs(dynamic - in_span) > COMPLETENESS_TOL:
        raise SpectrumError(
            f"eigenspace weights {dynamic!r} disagree with subspace projection {in_span!r}"
        )
    norm2 = float(np.sum(np.abs(psi) ** 2))
    pairs.append((0.0, fixed + norm2 - in_span))
    return pairs


def _dense_weights(basis, psi: np.ndarray) -> list[tuple[float, float]]:
    phases, z = basis
    w = np.abs(z.conj().T @ psi) ** 2
    return list(zip(phases.tolist(), w.tolist()))


def _structured_spectrum(p: StochasticMatrix, need_vectors: bool) -> Spectrum:
    d = _decompose(p)
    n = p.n
    moving = np.abs(d.lam) <= 1.0 - EDGE_TOL
    entries: list[SpectralEntry] = []
    for i in np.flatnonzero(moving):
        theta = math.acos(d.lam[i])
        if need_vectors:
            a = (d.sqrt_p * d.vecs[:, i][:, None]).reshape(-1)
            b = a.reshape(n, n).T.reshape(-1)
            for sign in (1, -1):
                v = a - np.exp(sign * 1j * theta) * b
                v = v / np.linalg.norm(v)
                entries.append(SpectralEntry(float(_wrap(sign * 2.0 * theta)), WalkState(v, n), 1.0))
        else:
            entries.append(SpectralEntry(float(_wrap(2.0 * theta)), None, 1.0))
            entries.append(SpectralEntry(float(_wrap(-2.0 * theta)), None, 1.0))
    zero_mult = n * n - 2 * int(np.count_nonzero(moving))
    if not need_vectors:
        merged = cluster_phases([(e.phase, e.weight) for e in entries] + [(0.0, float(zero_mult))])
        entries = [SpectralEntry(ph, None, w) for ph, w in merged]
    elif zero_mult:
        entries.append(SpectralEntry(0.0, None, float(zero_mult)))
    return Spectrum(entries, "structured", n, d)


def _dense_spectrum(p: StochasticMatrix, need_vectors: bool) -> Spectrum:
    if p.n > DENSE_MAX_N:
        raise ValueError(f"dense spectrum limited to n <= {DENSE_MAX_N}, got n={p.n}")
    w = WalkOperator(p).dense_matrix()
    try:
        t, z = scipy.linalg.schur(w, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SpectrumError(f"dense Schur decomposition failed (condition number {np.linalg.cond(w):.3e})") from exc
    eig = np.diag(t)
    bad = np.abs(np.abs(eig) - 1.0) > UNIT_TOL
    if np.any(bad):
        raise SpectrumError(f"eigenvalue modulus {np.abs(eig[bad][0])!r} is not 1")
    phases = _wrap(np.angle(eig))
    if need_vectors:
        entries = [
            SpectralEntry(float(ph), WalkState(z[:, j], p.n), 1.0) for j, ph in enumerate(phases)
        ]
    else:
        entries = [SpectralEntry(ph, None, w_) for ph, w_ in cluster_phases((ph, 1.0) for ph in phases)]
    return Spectrum(entries, "dense", p.n, (phases, z))


def walk_spectrum(p: StochasticMatrix, need_vectors: bool = False, method: Method = "structured") -> Spectrum:
    """Eigenphases of ``W`` for transition matrix ``p``.

    ``method='dense'`` diagonalizes the explicit ``n^2 x n^2`` operator with a
    complex Schur decomposition and serves as an oracle for ``n <= 40``.
    """
    if method == "structured":
        return _structured_spectrum(p, need_vectors)
    if method == "dense":
        return _dense_spectrum(p, need_vectors)
    raise ValueError(f"unknown method {method!r}")


def reference_theta2(n: int, m: int) -> float:
    """``arccos((n-m-1)/(n-1))``, the signature phase of the complete graph."""
    return analytic.eigenphases(n, m).theta2


def closest_dynamic_phase(spec: Spectrum, theta2: float, tol: float = CLUSTER_TOL) -> tuple[float, float]:
    """Half-phase ``theta_j`` nearest to ``theta2`` and the signed gap ``theta_j - theta2``.

    Only positive phases are searched, except that phase 0 is admitted when
    ``theta2`` itself is below ``tol``.
    """
    cands = [e.phase / 2.0 for e in spec.entries if e.phase > tol or (theta2 < tol and abs(e.phase) <= tol)]
    if not cands:
        return 0.0, -theta2
    theta_j = min(cands, key=lambda th: abs(th - theta2))
    return theta_j, theta_j - theta2


def theta2_eigenvector(n: int, m: int, marked: MarkedSet | tuple[int, ...] | None = None) -> WalkState:
    """Eigenvector of the complete-graph walk for ``exp(2i theta2)``.

    By default the ``m`` trailing nodes are marked; ``marked`` picks them
    explicitly (its size must equal ``m``).
    """
    if n < 4:
        raise ValueError(f"need n >= 4, got n={n}")
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got n={n}, m={m}")
    if marked is None:
        marked = MarkedSet(tuple(range(n - m + 1, n + 1)))
    elif not isinstance(marked, MarkedSet):
        marked = MarkedSet(tuple(marked))
    if marked.m != m:
        raise ValueError(f"marked set has {marked.m} nodes, expected m={m}")
    p = mark_nodes(transition_matrix(complete_graph(n)), marked)
    d = _decompose(p)
    target = analytic.cos_theta2(n, m)
    i = int(np.argmin(np.abs(d.lam - target)))
    theta = math.acos(d.lam[i])
    a = (d.sqrt_p * d.vecs[:, i][:, None]).reshape(-1)
    b = a.reshape(n, n).T.reshape(-1)
    v = a - np.exp(1j * theta) * b
    v = v / np.linalg.norm(v)

    w = WalkOperator(p)
    theta2 = reference_theta2(n, m)
    resid = np.linalg.norm(w.apply_vector(v) - np.exp(2j * theta2) * v)
    if resid > 1e-9:
        raise SpectrumError(f"theta2 eigenvector residual {resid:.3e} exceeds 1e-9")
    return WalkState(v, n)


# --------------------------------------------------------------------------
# Adjacency spectra
# --------------------------------------------------------------------------

def adjacency_spectral_radius(g: Graph) -> float:
    return float(np.max(np.abs(np.linalg.eigvalsh(g.adjacency()))))


def spectral_radius_bound(g: Graph) -> float:
    """``sqrt(2|E| - n + 1)``, an upper bound on the adjacency spectral radius of a connected graph."""
    return math.sqrt(2 * g.num_edges - g.n + 1)
