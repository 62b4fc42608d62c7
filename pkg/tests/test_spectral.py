import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linear_sum_assignment

from graphcheck.analytic import solve_a
from graphcheck.graph import (
    MarkedSet,
    complete_graph,
    mark_nodes,
    optimal_marked_count,
    path_graph,
    remove_edges,
    star_graph,
    transition_matrix,
)
from graphcheck.spectral import (
    SpectralEntry,
    Spectrum,
    adjacency_spectral_radius,
    closest_dynamic_phase,
    cluster_phases,
    coupling_matrix,
    reference_theta2,
    spectral_radius_bound,
    theta2_eigenvector,
    walk_spectrum,
)
from graphcheck.walk import WalkState, build_walk, initial_state


def marked_complete(n, members):
    return mark_nodes(transition_matrix(complete_graph(n)), members)


def circular_transport_cost(a, b):
    """Largest circle distance under the optimal one-to-one matching."""
    d = np.abs(np.angle(np.exp(1j * (np.asarray(a)[:, None] - np.asarray(b)[None, :]))))
    rows, cols = linear_sum_assignment(d)
    return float(d[rows, cols].max())


# --------------------------------------------------------- coupling matrix

def test_coupling_k4_marked_block():
    c = coupling_matrix(marked_complete(4, [4]))
    np.testing.assert_allclose(c.entries[:3, :3], (1 - np.eye(3)) / 3, atol=1e-15)
    np.testing.assert_array_equal(c.entries[:3, 3], 0)
    assert c.entries[3, 3] == 1.0
    np.testing.assert_allclose(c.unmarked_block(), (1 - np.eye(3)) / 3, atol=1e-15)


def test_coupling_unmarked_k3_is_p():
    p = transition_matrix(complete_graph(3))
    np.testing.assert_allclose(coupling_matrix(p).entries, p.entries, atol=1e-16)


@given(st.integers(4, 12), st.data())
@settings(max_examples=25, deadline=None)
def test_coupling_symmetric_in_unit_interval(n, data):
    members = data.draw(st.sets(st.integers(1, n), max_size=n - 1))
    g = remove_edges(complete_graph(n), [(1, 2)])
    c = coupling_matrix(mark_nodes(transition_matrix(g), members)).entries
    assert np.array_equal(c, c.T)
    assert np.all((c >= 0) & (c <= 1))


# -------------------------------------------------------------- spectrum

@pytest.mark.parametrize("n", [4, 5, 9, 16])
def test_complete_spectrum_phases(n):
    spec = walk_spectrum(marked_complete(n, [n]))
    phases = spec.phases()
    th2 = math.acos((n - 2) / (n - 1))
    th1 = math.acos(-1 / (n - 1))
    for target in (2 * th2, -2 * th2, 2 * th1, -2 * th1, 0.0):
        wrapped = math.remainder(target, 2 * math.pi)
        assert np.min(np.abs(np.angle(np.exp(1j * (phases - wrapped))))) < 1e-9
    assert spec.dimension() == n * n


def test_k4_phase_value():
    phases = walk_spectrum(marked_complete(4, [4])).phases()
    assert np.min(np.abs(phases - 1.682138)) < 1e-6


@pytest.mark.parametrize("method", ["structured", "dense"])
def test_unit_modulus(method):
    g = remove_edges(complete_graph(7), [(2, 5), (3, 4)])
    spec = walk_spectrum(mark_nodes(transition_matrix(g), [1, 6]), method=method)
    np.testing.assert_allclose(np.abs(spec.eigenvalues()), 1.0, atol=1e-10)


def test_conjugate_pairs():
    g = remove_edges(complete_graph(8), [(1, 2)])
    phases = walk_spectrum(mark_nodes(transition_matrix(g), [8])).phases()
    assert circular_transport_cost(phases, -phases) < 1e-10


GRAPHS_SMALL = [
    (complete_graph(4), [4]),
    (complete_graph(6), [5, 6]),
    (remove_edges(complete_graph(6), [(1, 2)]), [6]),
    (remove_edges(complete_graph(8), [(2, 7), (3, 4)]), [1]),
    (path_graph(5), [3]),
    (star_graph(7), [2]),
    (remove_edges(complete_graph(10), [(1, 10)]), [10]),
]


@pytest.mark.parametrize("graph, members", GRAPHS_SMALL)
def test_structured_vs_dense(graph, members):
    p = mark_nodes(transition_matrix(graph), members)
    s = walk_spectrum(p).phases()
    d = walk_spectrum(p, method="dense").phases()
    assert s.size == d.size == graph.n**2
    assert circular_transport_cost(s, d) < 1e-8


@pytest.mark.parametrize("graph, members", GRAPHS_SMALL)
def test_projection_weights_structured_vs_dense(graph, members):
    p = mark_nodes(transition_matrix(graph), members)
    rng = np.random.default_rng(graph.n)
    v = rng.normal(size=graph.n**2) + 1j * rng.normal(size=graph.n**2)
    state = WalkState(v / np.linalg.norm(v), graph.n)
    ws = cluster_phases(walk_spectrum(p).projection_weights(state), tol=1e-7)
    wd = cluster_phases(walk_spectrum(p, method="dense").projection_weights(state), tol=1e-7)
    assert len(ws) == len(wd)
    dense_phases = np.array([ph for ph, _ in wd])
    for ps, a in ws:
        dist = np.abs(np.angle(np.exp(1j * (dense_phases - ps))))
        j = int(np.argmin(dist))
        assert dist[j] < 1e-7
        assert a == pytest.approx(wd[j][1], abs=1e-9)


def test_eigenvectors_satisfy_eigen_equation():
    g = remove_edges(complete_graph(7), [(1, 3)])
    p = mark_nodes(transition_matrix(g), [7])
    w = build_walk(p)
    spec = walk_spectrum(p, need_vectors=True)
    vecs = [e for e in spec.entries if e.vector is not None]
    assert len(vecs) > 0
    for e in vecs:
        v = e.vector.amplitudes
        assert np.linalg.norm(w.apply_vector(v) - np.exp(1j * e.phase) * v) < 1e-10


def test_unknown_method():
    with pytest.raises(ValueError):
        walk_spectrum(marked_complete(4, [1]), method="lanczos")


# ------------------------------------------------------- reference phases

def test_reference_theta2():
    assert reference_theta2(3, 1) == pytest.approx(math.pi / 3, abs=1e-15)
    assert reference_theta2(11, 10) == pytest.approx(math.pi / 2, abs=1e-15)
    assert reference_theta2(100, 1) == math.acos(98 / 99)
    assert reference_theta2(100, 1) == pytest.approx(0.142254, abs=1e-6)
    with pytest.raises(ValueError):
        reference_theta2(2, 1)


@pytest.mark.parametrize("n", [4, 9, 20])
def test_closest_phase_complete_zero_gap(n):
    _, gap = closest_dynamic_phase(walk_spectrum(marked_complete(n, [n])), reference_theta2(n, 1))
    assert abs(gap) < 1e-10


def test_closest_phase_positive_gap_unmarked_removal():
    for n in range(4, 65):
        g = remove_edges(complete_graph(n), [(1, 2)])
        spec = walk_spectrum(mark_nodes(transition_matrix(g), [n]))
        _, gap = closest_dynamic_phase(spec, reference_theta2(n, 1))
        assert gap > 0, n


def test_closest_phase_degenerate_input():
    spec = Spectrum([SpectralEntry(0.0, None, 4.0)], "structured", 2)
    assert closest_dynamic_phase(spec, 0.3) == (0.0, -0.3)


# ---------------------------------------------------------- theta2 vector

def test_theta2_eigenvector_properties():
    n = 8
    v = theta2_eigenvector(n, 1)
    p = marked_complete(n, [n])
    w = build_walk(p)
    th2 = reference_theta2(n, 1)
    assert np.linalg.norm(w.apply_vector(v.amplitudes) - np.exp(2j * th2) * v.amplitudes) <= 1e-9
    s0 = initial_state(transition_matrix(complete_graph(n)))
    assert abs(np.vdot(v.amplitudes, s0.amplitudes)) > 0.1
    minus = next(e.vector for e in walk_spectrum(p, need_vectors=True).entries if abs(e.phase + 2 * th2) < 1e-9)
    assert abs(np.vdot(v.amplitudes, minus.amplitudes)) < 1e-9


@pytest.mark.parametrize("n, m, members", [(10, 3, None), (10, 1, (1,)), (12, 2, (3, 9))])
def test_theta2_eigenvector_residual(n, m, members):
    v = theta2_eigenvector(n, m, marked=members)
    marked = MarkedSet(members) if members else MarkedSet(tuple(range(n - m + 1, n + 1)))
    w = build_walk(marked_complete(n, marked))
    th2 = reference_theta2(n, m)
    assert np.linalg.norm(w.apply_vector(v.amplitudes) - np.exp(2j * th2) * v.amplitudes) <= 1e-9


def test_theta2_eigenvector_errors():
    with pytest.raises(ValueError):
        theta2_eigenvector(3, 1)
    with pytest.raises(ValueError):
        theta2_eigenvector(8, 2, marked=(1,))


# ------------------------------------------------------ coupling eigenvalues

@pytest.mark.parametrize("n", range(4, 33))
def test_characteristic_roots(n):
    for m in sorted({1, optimal_marked_count(n, solve_a())}):
        block = coupling_matrix(marked_complete(n, range(n - m + 1, n + 1))).unmarked_block()
        lam = np.sort(np.linalg.eigvalsh(block))
        expected = np.sort([(n - m - 1) / (n - 1)] + [-1 / (n - 1)] * (n - m - 1))
        np.testing.assert_allclose(lam, expected, atol=1e-9)


def _unmarked_radius(g, marked_node):
    block = coupling_matrix(mark_nodes(transition_matrix(g), [marked_node])).unmarked_block()
    return float(np.max(np.linalg.eigvalsh(block)))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_spectral_radius_ordering_unmarked_removals(k):
    rng = np.random.default_rng(k)
    for n in range(5, 65):
        pairs = list(itertools.combinations(range(1, n), 2))  # node n stays marked and untouched
        victims = [pairs[i] for i in rng.choice(len(pairs), size=k, replace=False)]
        g = remove_edges(complete_graph(n), victims)
        assert g.is_connected()
        assert _unmarked_radius(g, n) < (n - 2) / (n - 1), (n, victims)


def test_spectral_radius_ordering_fails_for_marked_incident_removal():
    # removing an edge at the marked node raises the unmarked block's top eigenvalue
    for n in (5, 16, 40):
        g = remove_edges(complete_graph(n), [(1, n)])
        assert _unmarked_radius(g, n) > (n - 2) / (n - 1)


# -------------------------------------------------- adjacency radius bound

BOUND_GRAPHS = (
    [complete_graph(n) for n in range(2, 15)]
    + [remove_edges(complete_graph(n), [(1, 2)]) for n in range(4, 15)]
    + [path_graph(n) for n in range(3, 10)]
    + [remove_edges(complete_graph(9), [(1, 2), (3, 4), (5, 6)])]
)


@pytest.mark.parametrize("g", BOUND_GRAPHS, ids=lambda g: f"n{g.n}e{g.num_edges}")
def test_radius_bound(g):
    rho, bound = adjacency_spectral_radius(g), spectral_radius_bound(g)
    assert rho <= bound + 1e-9
    if g.num_edges == g.complete_edge_count:
        assert rho == pytest.approx(bound, abs=1e-9)
    else:
        assert rho < bound - 1e-9 or g.n <= 3


@pytest.mark.parametrize("n", [3, 5, 12])
def test_radius_bound_tight_on_stars(n):
    # stars attain the bound as well, so equality does not single out complete graphs
    g = star_graph(n)
    assert adjacency_spectral_radius(g) == pytest.approx(spectral_radius_bound(g), abs=1e-9)
