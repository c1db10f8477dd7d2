import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import expressions
from psat_bounds import _kernels as K
from psat_bounds.errors import InconsistencyError
from psat_bounds.expr_core import MonotoneExpression, dual
from psat_bounds.lattice_oracle import exact_satisfiability
from psat_bounds.sat2graph import (
    ReliabilityGraph,
    _kernel_arrays,
    connected,
    enumerate_paths,
    export_dot,
    min_cutsets,
    percolation,
    sat_to_graph,
)


def test_example_graph_shape(example):
    g = sat_to_graph(example)
    assert len(g.edges) == 7
    assert set(enumerate_paths(g)) == set(example.clauses)
    assert set(min_cutsets(g)) == set(dual(example).clauses)


def test_shared_label_needs_residual_identity():
    # keying vertices by label alone would wrongly join the two 5/6 branches
    e = MonotoneExpression(6, [{1, 5}, {1, 6}, {2, 5, 6}])
    g = sat_to_graph(e)
    assert set(enumerate_paths(g)) == set(e.clauses)


def test_unmerged_graph_still_correct(example):
    g = sat_to_graph(example, merge=False)
    assert set(enumerate_paths(g)) == set(example.clauses)
    assert len(g.edges) >= len(sat_to_graph(example).edges)


def test_dot_export(example):
    dot = export_dot(sat_to_graph(example))
    assert dot.startswith("digraph reliability {")
    assert '"S" [shape=box, style=bold];' in dot
    assert '"T" [shape=doublecircle];' in dot
    assert dot.count("->") == 7
    assert '"S" -> "7" [label="6"];' in dot


def test_graph_validation():
    with pytest.raises(InconsistencyError):
        ReliabilityGraph(2, ("S", "T"), (("S", "X", 1),))
    with pytest.raises(InconsistencyError):
        ReliabilityGraph(2, ("S", "T"), (("T", "S", 1),))
    with pytest.raises(InconsistencyError):
        ReliabilityGraph(2, ("S", "T"), (("S", "T", 3),))


def test_cycle_detected():
    g = ReliabilityGraph(1, ("S", "a", "b", "T"), (("S", "a", 1), ("a", "b", 1), ("b", "a", 1), ("b", "T", 1)))
    with pytest.raises(InconsistencyError):
        g.topological_order()


def test_connected(example):
    g = sat_to_graph(example)
    assert connected(g, {6, 7})
    assert connected(g, {1, 4, 5})
    assert not connected(g, {1, 2, 5, 6})


@given(expressions(max_n=9, max_clauses=6))
def test_round_trip(e):
    g = sat_to_graph(e)
    assert set(enumerate_paths(g)) == set(e.clauses)
    assert set(min_cutsets(g)) == set(dual(e).clauses)
    g.topological_order()


@given(expressions(max_n=8), st.integers(0, 255))
def test_connectivity_is_satisfiability(e, mask):
    config = {i + 1 for i in range(e.n_events) if mask >> i & 1}
    g = sat_to_graph(e)
    assert connected(g, config) == any(c <= config for c in e.clauses)


def test_percolation_within_sigma(example):
    g = sat_to_graph(example)
    for x in (0.3, 0.6):
        r = percolation(g, x, 20000, seed=9)
        assert abs(r.estimate - exact_satisfiability(example, x)) < 4 * r.stderr


def test_percolation_deterministic(example):
    g = sat_to_graph(example)
    assert percolation(g, 0.5, 5000, seed=1) == percolation(g, 0.5, 5000, seed=1, batch=777)


def test_connectivity_backends_agree(example):
    g = sat_to_graph(example)
    arrays = _kernel_arrays(g)
    open_ = np.random.default_rng(0).random((4000, 7)) < 0.5
    assert K.connected_count_numba(*arrays, open_) == K.connected_count_numpy(*arrays, open_)
