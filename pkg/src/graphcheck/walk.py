"""
State-vector simulation of the Szegedy walk on the duplicated graph.

The bipartite space has basis ``|x, y>`` indexed row-major, so a state of
length ``n**2`` reshapes to an ``(n, n)`` array ``S[x, y]``. With that layout

* ``|alpha_x> = |x> (x) sum_y sqrt(p_xy) |y>`` lives on row ``x``,
* ``|beta_y>  = sum_x sqrt(p_yx) |x> (x) |y>`` lives on column ``y``,

and each reflection costs ``O(n**2)``: one weighted row (or column) sum and
one rank-1 update per row (or column).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .graph import GraphError, MarkedSet, StochasticMatrix, as_marked_set

NORM_TOL = 1e-10
DENSE_MAX_N = 40

Strategy = Literal["structured", "dense"]


@dataclass(frozen=True, eq=False)
class WalkState:
    """Unit-norm amplitude vector over ``|x, y>``."""

    amplitudes: np.ndarray
    n: int

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.n * self.n:
            raise ValueError(f"state has {amps.size} amplitudes, expected n^2 = {self.n ** 2}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm!r} deviates from 1 by more than {NORM_TOL}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def as_matrix(self) -> np.ndarray:
        return self.amplitudes.reshape(self.n, self.n)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def position_distribution(self) -> np.ndarray:
        """Probability of each first-register position (0-indexed)."""
        return np.sum(np.abs(self.as_matrix()) ** 2, axis=1)


def _check_symmetric_support(p: StochasticMatrix) -> None:
    free = p.unmarked_indices()
    sub = p.entries[np.ix_(free, free)] > 0
    if not np.array_equal(sub, sub.T):
        x, y = np.argwhere(sub != sub.T)[0]
        raise GraphError(
            f"transition support is not symmetric between unmarked nodes "
            f"{free[x] + 1} and {free[y] + 1}"
        )


class WalkOperator:
    """The walk step ``W = R_B R_A`` for a (possibly marked) transition matrix.

    Marked rows are delta rows, so ``|alpha_x> = |x, x>`` for ``x`` in the
    marked set; this is the self-loop added between twin marked vertices.
    """

    def __init__(self, p: StochasticMatrix, strategy: Strategy = "structured"):
        if strategy not in ("structured", "dense"):
            raise ValueError(f"unknown strategy {strategy!r}")
        _check_symmetric_support(p)
        self.p = p
        self.n = p.n
        self.strategy = strategy
        self.sqrt_p = np.sqrt(p.entries)
        self.sqrt_p.setflags(write=False)
        self._dense: np.ndarray | None = None
        if strategy == "dense":
            self._dense = self.dense_matrix()

    def __repr__(self) -> str:
        return f"WalkOperator(n={self.n}, marked={self.p.marked.members}, strategy={self.strategy!r})"

    def alpha(self, x: int) -> np.ndarray:
        """``|alpha_x>`` for 0-indexed ``x``."""
        v = np.zeros((self.n, self.n))
        v[x, :] = self.sqrt_p[x]
        return v.reshape(-1)

    def beta(self, y: int) -> np.ndarray:
        """``|beta_y>`` for 0-indexed ``y``."""
        v = np.zeros((self.n, self.n))
        v[:, y] = self.sqrt_p[y]
        return v.reshape(-1)

    def reflect_a(self, amps: np.ndarray) -> np.ndarray:
        s = amps.reshape(self.n, self.n)
        c = np.sum(self.sqrt_p * s, axis=1)
        return (2.0 * c[:, None] * self.sqrt_p - s).reshape(-1)

    def reflect_b(self, amps: np.ndarray) -> np.ndarray:
        s = amps.reshape(self.n, self.n)
        c = np.sum(self.sqrt_p.T * s, axis=0)
        return (2.0 * c[None, :] * self.sqrt_p.T - s).reshape(-1)

    def apply_vector(self, amps: np.ndarray) -> np.ndarray:
        if self._dense is not None:
            return self._dense @ amps
        return self.reflect_b(self.reflect_a(amps))

    def apply(self, state: WalkState) -> WalkState:
        return WalkState(self.apply_vector(state.amplitudes), self.n)

    def dense_matrix(self) -> np.ndarray:
        """Explicit ``(2 Pi_B - I)(2 Pi_A - I)`` built from outer products (small ``n`` only)."""
        if self.n > DENSE_MAX_N:
            raise ValueError(f"dense walk matrix limited to n <= {DENSE_MAX_N}, got {self.n}")
        dim = self.n * self.n
        pi_a = np.zeros((dim, dim))
        pi_b = np.zeros((dim, dim))
        for x in range(self.n):
            a = self.alpha(x)
            b = self.beta(x)
            pi_a += np.outer(a, a)
            pi_b += np.outer(b, b)
        eye = np.eye(dim)
        return ((2.0 * pi_b - eye) @ (2.0 * pi_a - eye)).astype(complex)


def build_walk(p: StochasticMatrix | np.ndarray, strategy: Strategy = "structured") -> WalkOperator:
    if not isinstance(p, StochasticMatrix):
        p = StochasticMatrix(np.asarray(p, dtype=float))
    return WalkOperator(p, strategy)


def initial_state(p: StochasticMatrix) -> WalkState:
    """``(1/sqrt(n)) sum_xy sqrt(p_xy) |x, y>`` from the unmarked chain."""
    if p.marked.m:
        raise GraphError("the initial state is built from the unmarked transition matrix")
    return WalkState(np.sqrt(p.entries / p.n).reshape(-1), p.n)


def evolve(w: WalkOperator, state: WalkState, t: int) -> WalkState:
    if t < 0:
        raise ValueError(f"number of steps must be non-negative, got {t}")
    if state.n != w.n:
        raise ValueError(f"state is for n={state.n}, operator for n={w.n}")
    amps = state.amplitudes
    for _ in range(t):
        amps = w.apply_vector(amps)
    return WalkState(amps, w.n)


def trajectory(w: WalkOperator, state: WalkState, t_max: int) -> list[WalkState]:
    """States at ``t = 0..t_max``."""
    out = [state]
    amps = state.amplitudes
    for _ in range(t_max):
        amps = w.apply_vector(amps)
        out.append(WalkState(amps, w.n))
    return out


def marked_probability(state: WalkState, marked: MarkedSet | list[int] | tuple[int, ...]) -> float:
    """``<psi| P_M |psi>``: weight on first-register positions in ``marked``."""
    marked = as_marked_set(marked)
    marked.validate(state.n)
    if not marked.m:
        return 0.0
    rows = state.as_matrix()[marked.indices()]
    return float(np.sum(np.abs(rows) ** 2))


def measure_position(state: WalkState, rng: np.random.Generator) -> int:
    """Sample a node id (1-indexed) from the first-register marginal."""
    return int(sample_positions(state, rng, 1)[0])


def sample_positions(state: WalkState, rng: np.random.Generator, shots: int) -> np.ndarray:
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    probs = state.position_distribution()
    probs = probs / probs.sum()
    return rng.choice(state.n, size=shots, p=probs) + 1


def tad_direct(w: WalkOperator, s0: WalkState, T: int) -> float:
    """``(1/(T-1)) sum_{t=0}^{T} ||psi(t) - psi(0)||^2`` evaluated by simulation."""
    if T < 2:
        raise ValueError(f"T must be >= 2 for the 1/(T-1) prefactor, got {T}")
    total = 0.0
    amps = s0.amplitudes
    for _ in range(T + 1):
        total += float(np.sum(np.abs(amps - s0.amplitudes) ** 2))
        amps = w.apply_vector(amps)
    return total / (T - 1)
