"""
End-to-end completeness test: a walk stage with ``m*`` random marks followed
by phase estimation against the complete-graph signature phase.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from . import analytic
from .graph import (
    MIN_NODES_FOR_MARKING,
    Graph,
    GraphError,
    MarkedSet,
    is_complete_classical,
    mark_nodes,
    optimal_marked_count,
    transition_matrix,
)
from .qpe import MAX_BITS, default_precision, phase_match, qpe_distribution, qpe_sample
from .seeding import check_seed, stream
from .spectral import closest_dynamic_phase, reference_theta2, theta2_eigenvector, walk_spectrum
from .walk import build_walk, evolve, initial_state, marked_probability, measure_position, trajectory

Mode = Literal["sampled", "deterministic"]
Stage = Literal["walk-rejected", "qpe-completed"]

#: Deterministic mode rejects at the walk stage below this marked probability.
WALK_REJECT_THRESHOLD = 0.5
#: Node re-marked before phase estimation (1-indexed).
QPE_MARKED_NODE = 1


@dataclass(frozen=True)
class TestReport:
    __test__ = False

    verdict: bool
    stage_reached: Stage
    m_star: int
    t_star: int
    measured_node: int | None
    marked_set: MarkedSet
    p_bits: int | None
    qpe_outcome: int | None
    theta2_reference: float | None
    seed: int
    mode: Mode
    walk_marked_probability: float | None = None

    def __post_init__(self):
        if self.stage_reached == "walk-rejected":
            if self.verdict:
                raise ValueError("a walk-rejected run cannot have verdict true")
            if any(v is not None for v in (self.p_bits, self.qpe_outcome, self.theta2_reference)):
                raise ValueError("a walk-rejected run carries no QPE fields")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["marked_set"] = list(self.marked_set.members)
        return d

    def to_text(self) -> str:
        """Flat ``key=value`` lines in field order."""
        lines = []
        for key, value in self.to_dict().items():
            if isinstance(value, list):
                value = ",".join(str(v) for v in value)
            elif isinstance(value, bool):
                value = str(value).lower()
            elif value is None:
                value = ""
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{key}={value}")
        return "\n".join(lines) + "\n"


def _check_graph(g: Graph) -> None:
    if g.n < MIN_NODES_FOR_MARKING:
        raise GraphError(f"need n >= {MIN_NODES_FOR_MARKING} nodes, got n={g.n}")
    if not g.is_connected():
        raise GraphError("walk undefined on isolated components: the graph is disconnected")


def pick_marked(n: int, m: int, seed: int) -> MarkedSet:
    """``m`` distinct nodes drawn uniformly from the ``"mark"`` stream."""
    rng = stream(seed, "mark")
    chosen = rng.choice(n, size=m, replace=False) + 1
    return MarkedSet(tuple(sorted(int(x) for x in chosen)))


def _qpe_setup(g: Graph, p_override: int | None):
    p = transition_matrix(g)
    p_qpe = mark_nodes(p, [QPE_MARKED_NODE])
    spec = walk_spectrum(p_qpe)
    probe = theta2_eigenvector(g.n, 1, marked=(QPE_MARKED_NODE,))
    bits = default_precision(g.n) if p_override is None else int(p_override)
    if not 1 <= bits <= MAX_BITS:
        raise ValueError(f"precision must be in [1, {MAX_BITS}], got {bits}")
    return spec, probe, bits


@dataclass(frozen=True)
class WalkStage:
    marked: MarkedSet
    marked_probability: float
    measured_node: int | None
    rejected: bool


def walk_stage(g: Graph, seed: int, mode: Mode, m_star: int, t_star: int) -> WalkStage:
    """Mark ``m_star`` random nodes, walk ``t_star`` steps and decide whether to reject."""
    marked = pick_marked(g.n, m_star, seed)
    p = transition_matrix(g)
    w = build_walk(mark_nodes(p, marked))
    final = evolve(w, initial_state(p), t_star)
    pm = marked_probability(final, marked)
    if mode == "sampled":
        measured = measure_position(final, stream(seed, "walk"))
        return WalkStage(marked, pm, measured, measured not in marked)
    return WalkStage(marked, pm, None, pm < WALK_REJECT_THRESHOLD)


def test_completeness(
    g: Graph,
    seed: int = 0,
    mode: Mode = "deterministic",
    p_override: int | None = None,
    tolerant: bool = False,
) -> TestReport:
    """Run the walk stage and, if it passes, the phase-estimation stage.

    Parameters
    ----------
    g : Graph
        Connected graph with at least four nodes.
    seed : int
        Master seed; the marked set and every sampled measurement derive
        from it through labeled streams.
    mode : {"deterministic", "sampled"}
        ``sampled`` measures once at each stage. ``deterministic`` rejects at
        the walk stage iff the marked probability is below 0.5 and takes the
        modal QPE outcome.
    p_override : int, optional
        Control-register size. Defaults to :func:`graphcheck.qpe.default_precision`.
    tolerant : bool
        Accept an outcome one gridpoint away from the reference.
    """
    if mode not in ("sampled", "deterministic"):
        raise ValueError(f"unknown mode {mode!r}")
    seed = check_seed(seed)
    _check_graph(g)
    n = g.n
    consts = analytic.default_constants()
    m_star = optimal_marked_count(n, consts.a)
    t_star = consts.t_star
    ws = walk_stage(g, seed, mode, m_star, t_star)
    if ws.rejected:
        return TestReport(False, "walk-rejected", m_star, t_star, ws.measured_node, ws.marked,
                          None, None, None, seed, mode, ws.marked_probability)

    spec, probe, bits = _qpe_setup(g, p_override)
    dist = qpe_distribution(spec, probe, bits)
    if mode == "sampled":
        outcome = int(qpe_sample(dist, stream(seed, "qpe"), 1)[0])
    else:
        outcome = dist.modal_outcome()
    theta2 = reference_theta2(n, 1)
    verdict = phase_match(outcome, bits, theta2, tolerant=tolerant)
    return TestReport(verdict, "qpe-completed", m_star, t_star, ws.measured_node, ws.marked,
                      bits, outcome, theta2, seed, mode, ws.marked_probability)


# keep pytest from collecting the function when it is imported into a test module
test_completeness.__test__ = False


@dataclass(frozen=True)
class Analysis:
    report: TestReport
    marked_curve: list[float]
    histogram: dict[int, float]
    p_bits: int
    theta_j: float
    gap: float
    classical_complete: bool
    notes: list[str] = field(default_factory=list)


def analyze(g: Graph, seed: int = 0, p_override: int | None = None, steps: int = 6) -> Analysis:
    """Deterministic run plus the quantities behind its verdict.

    The QPE histogram and gap are computed even when the walk stage rejects.
    """
    report = test_completeness(g, seed, "deterministic", p_override)
    p = transition_matrix(g)
    w = build_walk(mark_nodes(p, report.marked_set))
    curve = [marked_probability(s, report.marked_set) for s in trajectory(w, initial_state(p), steps)]

    spec, probe, bits = _qpe_setup(g, p_override)
    dist = qpe_distribution(spec, probe, bits)
    theta_j, gap = closest_dynamic_phase(spec, reference_theta2(g.n, 1))
    notes = []
    if bits == MAX_BITS and p_override is None:
        notes.append(f"precision clamped to {MAX_BITS} bits")
    return Analysis(
        report=report,
        marked_curve=curve,
        histogram=dist.as_dict(floor=1e-12),
        p_bits=bits,
        theta_j=theta_j,
        gap=gap,
        classical_complete=is_complete_classical(g),
        notes=notes,
    )


def suite_agreement(graphs, seed: int = 0) -> np.ndarray:
    """Boolean array: deterministic verdict equals the classical check, per graph."""
    return np.array([test_completeness(g, seed).verdict == is_complete_classical(g) for g in graphs])
