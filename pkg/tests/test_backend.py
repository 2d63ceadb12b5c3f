import json

import numpy as np
import pytest

from rivetlite import backend
from rivetlite.backend import (DEFAULT_BASIS, EDGE_ERROR_RANGE,
                               QUBIT_ERROR_RANGE, READOUT_ERROR_RANGE,
                               Topology, builtin_topology)
from rivetlite.exceptions import BackendError


def test_linear_topology():
    t = builtin_topology("linear-5")
    assert t.num_physical == 5
    assert t.edges == frozenset(((0, 1), (1, 2), (2, 3), (3, 4)))
    assert t.basis == DEFAULT_BASIS


def test_ring_topology():
    t = builtin_topology("ring-6")
    assert t.num_physical == 6
    assert (0, 5) in t.edges
    assert len(t.edges) == 6
    with pytest.raises(BackendError):
        builtin_topology("ring-2")


def test_grid_topology():
    t = builtin_topology("grid-2x3")
    assert t.num_physical == 6
    assert len(t.edges) == 7
    d = backend.distances(t)
    assert d[0, 5] == 3  # manhattan corner to corner


def test_heavyhex_topology():
    t = builtin_topology("heavyhex-27")
    assert t.num_physical == 27
    assert all(0 <= a < 27 and 0 <= b < 27 for a, b in t.edges)
    assert np.all(np.isfinite(backend.distances(t)))  # connected


def test_unknown_name():
    with pytest.raises(BackendError):
        builtin_topology("torus-9")
    with pytest.raises(BackendError):
        backend.load("torus-9")


def test_distances_linear():
    t = builtin_topology("linear-5")
    d = backend.distances(t)
    assert d[0, 4] == 4
    assert d[2, 2] == 0
    assert np.array_equal(d, d.T)


def test_synthesized_errors_deterministic_and_in_range():
    t1 = builtin_topology("ring-5")
    t2 = builtin_topology("ring-5")
    assert t1.edge_error == t2.edge_error
    assert t1.qubit_error == t2.qubit_error
    lo, hi = EDGE_ERROR_RANGE
    assert all(lo <= e <= hi for e in t1.edge_error.values())
    lo, hi = QUBIT_ERROR_RANGE
    assert all(lo <= e <= hi for e in t1.qubit_error)
    lo, hi = READOUT_ERROR_RANGE
    assert all(lo <= e <= hi for e in t1.readout_error)
    assert set(t1.edge_error) == set(t1.edges)


def test_coupled_and_error_of_are_symmetric():
    t = builtin_topology("linear-4")
    assert t.coupled(2, 1) and t.coupled(1, 2)
    assert not t.coupled(0, 2)
    assert t.error_of(0, 1) == t.error_of(1, 0)


def test_fingerprint_stability():
    a = builtin_topology("grid-3x3")
    b = builtin_topology("grid-3x3")
    assert a.fingerprint() == b.fingerprint()
    assert a.fingerprint() != builtin_topology("ring-9").fingerprint()


def test_disconnected_graph_rejected():
    with pytest.raises(BackendError):
        Topology(4, frozenset(((0, 1), (2, 3))))


def test_dict_round_trip_and_file_load(tmp_path):
    t = builtin_topology("ring-4")
    back = backend.from_dict(backend.to_dict(t), name=t.name)
    assert back.edges == t.edges
    assert back.edge_error == t.edge_error
    assert back.fingerprint() == t.fingerprint()
    p = tmp_path / "dev.json"
    p.write_text(json.dumps(backend.to_dict(t)))
    loaded = backend.load(str(p))
    assert loaded.edges == t.edges
