"""
Worst-case gap sweeps over complete graphs missing one edge, the power-law
lower bound on the gap, and the bit counts derived from it.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Literal

import numpy as np

from . import analytic
from .graph import complete_graph, mark_nodes, remove_edges, transition_matrix
from .spectral import closest_dynamic_phase, reference_theta2, walk_spectrum

EdgePolicy = Literal["unmarked", "marked"]
EDGE_KIND = {"unmarked": "unmarked-unmarked", "marked": "marked-unmarked"}

MIN_FIT_ROWS = 8


def leading_zero_bits(v: float) -> int:
    """Zero bits after the binary point before the first 1 bit of ``v``.

    Uses the exact binary exponent, so powers of two are not subject to log
    rounding. Values ``>= 1`` give 0.
    """
    if not v > 0:
        raise ValueError(f"need v > 0, got {v!r}")
    if v >= 1.0:
        return 0
    _, e = math.frexp(v)  # v = mant * 2**e with mant in [0.5, 1)
    return -e


@dataclass(frozen=True)
class SweepRow:
    n: int
    removed_edge_kind: str
    theta_j: float
    theta2: float
    gap: float
    l_bits: int
    f_bits: int | None = None


@dataclass(frozen=True)
class PowerLawFit:
    c: float
    k: float
    adjusted_c: float

    def value(self, n) -> np.ndarray:
        return self.c / np.asarray(n, dtype=float) ** self.k

    def lower_bound(self, n) -> np.ndarray:
        return self.adjusted_c / np.asarray(n, dtype=float) ** self.k


def sweep_graph(n: int, which_edge: EdgePolicy = "unmarked"):
    """``K_n`` with node ``n`` marked and one edge removed per policy."""
    if which_edge == "unmarked":
        edge = (1, 2)
    elif which_edge == "marked":
        edge = (1, n)
    else:
        raise ValueError(f"unknown edge policy {which_edge!r}")
    g = remove_edges(complete_graph(n), [edge])
    return g, mark_nodes(transition_matrix(g), [n])


def sweep_row(n: int, which_edge: EdgePolicy = "unmarked") -> SweepRow:
    _, p = sweep_graph(n, which_edge)
    theta2 = reference_theta2(n, 1)
    theta_j, gap = closest_dynamic_phase(walk_spectrum(p), theta2)
    # the sign of the gap depends on the policy; bit counts use its size
    l_bits = leading_zero_bits(abs(gap)) if gap != 0 else 0
    return SweepRow(n, EDGE_KIND[which_edge], theta_j, theta2, gap, l_bits)


def worst_case_sweep(n_min: int = 4, n_max: int = 128, which_edge: EdgePolicy = "unmarked") -> list[SweepRow]:
    if not 4 <= n_min <= n_max:
        raise ValueError(f"need 4 <= n_min <= n_max, got {n_min}, {n_max}")
    return [sweep_row(n, which_edge) for n in range(n_min, n_max + 1)]


def fit_power_law(rows: list[SweepRow]) -> PowerLawFit:
    """Least squares of ``log gap`` on ``log n``, then shrink ``c`` into a lower bound."""
    if len(rows) < MIN_FIT_ROWS:
        raise ValueError(f"need at least {MIN_FIT_ROWS} rows, got {len(rows)}")
    n = np.array([r.n for r in rows], dtype=float)
    gap = np.array([r.gap for r in rows], dtype=float)
    if np.any(gap <= 0):
        bad = rows[int(np.argmax(gap <= 0))]
        raise ValueError(f"non-positive gap {bad.gap!r} at n={bad.n}")
    if n.max() < 10.0 * n.min():
        raise ValueError("rows must span at least a decade in n")
    slope, intercept = np.polyfit(np.log(n), np.log(gap), 1)
    c, k = math.exp(intercept), float(-slope)
    ratio = float(np.min(gap * n**k / c))
    adjusted = c * min(1.0, ratio)
    return PowerLawFit(c, k, adjusted)


def f_bits_for(n: int, fit: PowerLawFit) -> int:
    return math.floor(abs(math.log2(float(fit.lower_bound(n)))))


def with_fit(rows: list[SweepRow], fit: PowerLawFit) -> list[SweepRow]:
    return [replace(r, f_bits=f_bits_for(r.n, fit)) for r in rows]


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------

SWEEP_HEADER = ["n", "removed_edge_kind", "theta_j", "theta2", "gap", "l_bits", "f_bits"]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def emit_report(rows: list[SweepRow], fit: PowerLawFit | None, out_dir, format: str = "csv") -> list[Path]:
    """Write the sweep and the data series behind the four calibration plots.

    ``format='svg-data'`` writes the same series with a ``.dat`` suffix
    (whitespace-separated, ready for plotting tools).
    """
    if not rows:
        raise ValueError("no sweep rows to emit")
    if format not in ("csv", "svg-data"):
        raise ValueError(f"unknown format {format!r}")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    rows = sorted(rows, key=lambda r: r.n)
    if fit is not None:
        rows = with_fit(rows, fit)
    consts = analytic.default_constants()

    series = {
        "sweep": (SWEEP_HEADER, [[getattr(r, h) for h in SWEEP_HEADER] for r in rows]),
        "fig4_probability_band": (
            ["n", "p_star", "p_low", "p_high"],
            [[r.n, analytic.p_star(r.n, consts.a, consts.t_star_max), consts.p_low, consts.p_high] for r in rows],
        ),
    }
    if fit is not None:
        series["fig5_bits"] = (["n", "f_bits", "l_bits"], [[r.n, r.f_bits, r.l_bits] for r in rows])
        series["fig6_bit_ratios"] = (
            ["n", "f_over_n", "l_over_n"],
            [[r.n, r.f_bits / r.n, r.l_bits / r.n] for r in rows],
        )
        series["fig7_gap_fit"] = (
            ["n", "gap", "fitted", "lower_bound"],
            [[r.n, r.gap, float(fit.value(r.n)), float(fit.lower_bound(r.n))] for r in rows],
        )

    written = []
    for name, (header, data) in series.items():
        if format == "csv":
            path = out / f"{name}.csv"
            _write_csv(path, header, data)
        else:
            path = out / f"{name}.dat"
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write("# " + " ".join(header) + "\n")
                for r in data:
                    fh.write(" ".join(_fmt(v) for v in r) + "\n")
        written.append(path)
    return written
