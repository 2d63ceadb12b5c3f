import math

import pytest

from rivetlite import circuit as circ
from rivetlite.circuit import Circuit, Gate, ParamExpr
from rivetlite.exceptions import CircuitError


def test_gate_validation():
    with pytest.raises(CircuitError):
        Gate("nop", (0,))
    with pytest.raises(CircuitError):
        Gate("cx", (0,))
    with pytest.raises(CircuitError):
        Gate("cx", (1, 1))
    with pytest.raises(CircuitError):
        Gate("rz", (0,))  # missing angle
    with pytest.raises(CircuitError):
        Gate("h", (0,), (1.0,))


def test_circuit_validation():
    with pytest.raises(CircuitError):
        Circuit(0)
    with pytest.raises(CircuitError):
        Circuit(2, (Gate("x", (2,)),))
    with pytest.raises(CircuitError):
        Circuit(2, measurements=((0, 0), (0, 1)))
    with pytest.raises(CircuitError):
        Circuit(2, measurements=((0, 0), (1, 0)))


def test_append_and_remap():
    base = Circuit(3, (Gate("h", (0,)),))
    suffix = Circuit(2, (Gate("cx", (0, 1)),), ((1, 0),))
    joined = circ.append(base, suffix, (2, 1))
    assert joined.gates == (Gate("h", (0,)), Gate("cx", (2, 1)))
    assert joined.measurements == ((1, 0),)


def test_append_errors():
    base = Circuit(2)
    with pytest.raises(CircuitError):
        circ.append(base, Circuit(2), (0,))
    with pytest.raises(CircuitError):
        circ.append(base, Circuit(2), (0, 2))
    with pytest.raises(CircuitError):
        circ.append(base, Circuit(2), (1, 1))
    measured = circ.measure_all(base)
    with pytest.raises(CircuitError):
        circ.append(measured, Circuit(2))


def test_measure_all_round_trip():
    c = circ.measure_all(Circuit(3, (Gate("h", (1,)),)))
    assert c.measurements == ((0, 0), (1, 1), (2, 2))
    with pytest.raises(CircuitError):
        circ.measure_all(c)
    assert circ.remove_final_measurements(c).measurements == ()


def test_param_expr_evaluate_and_shift():
    e = ParamExpr(0.0, 2.0, ((math.pi, -1.0, "a"), (math.pi, -1.0, "b")))
    assert e.symbols == frozenset(("a", "b"))
    val = e.evaluate({"a": 1.0, "b": 2.0})
    assert val == pytest.approx(2.0 * (math.pi - 1.0) * (math.pi - 2.0))
    with pytest.raises(CircuitError):
        e.evaluate({"a": 1.0})
    shifted = circ.shift_param(e, 0.5)
    assert shifted.evaluate({"a": 1.0, "b": 2.0}) == pytest.approx(val + 0.5)
    assert circ.shift_param(1.0, 0.25) == 1.25
    sym = circ.shift_param("t", 0.25)
    assert sym.evaluate({"t": 1.0}) == pytest.approx(1.25)


def test_bind_exact_symbol_match():
    c = Circuit(1, (Gate("ry", (0,), ("t",)),))
    bound = circ.bind(c, {"t": 0.5})
    assert bound.gates[0].params == (0.5,)
    assert bound.is_bound
    with pytest.raises(CircuitError):
        circ.bind(c, {})
    with pytest.raises(CircuitError):
        circ.bind(c, {"t": 0.5, "extra": 1.0})


def test_stats():
    c = Circuit(3, (Gate("h", (0,)), Gate("cx", (0, 1)), Gate("x", (2,)),
                    Gate("cz", (1, 2))))
    depth, two_q, total = circ.stats(c)
    assert (depth, two_q, total) == (3, 2, 4)
    assert circ.stats(Circuit(2)) == (0, 0, 0)


def test_random_circuit_properties():
    c1 = circ.random_circuit(4, 7, 11)
    c2 = circ.random_circuit(4, 7, 11)
    assert circ.circuit_hash(c1) == circ.circuit_hash(c2)
    assert circ.circuit_hash(c1) != circ.circuit_hash(circ.random_circuit(4, 7, 12))
    depth, _, _ = circ.stats(c1)
    assert depth == 7
    assert circ.used_qubits(c1) == (0, 1, 2, 3)


def test_compact_remaps_gates_and_measurements():
    c = Circuit(5, (Gate("h", (1,)), Gate("cx", (1, 3))), ((3, 0),))
    small, mapping = circ.compact(c)
    assert small.num_qubits == 2
    assert mapping == {1: 0, 3: 1}
    assert small.gates == (Gate("h", (0,)), Gate("cx", (0, 1)))
    assert small.measurements == ((1, 0),)
    padded, mapping = circ.compact(c, keep=(0, 1, 3))
    assert padded.num_qubits == 3
    assert mapping == {0: 0, 1: 1, 3: 2}


def test_json_round_trip():
    c = Circuit(2, (Gate("ry", (0,), ("t",)),
                    Gate("rz", (1,), (ParamExpr(1.0, 2.0, ((0.0, 1.0, "u"),)),)),
                    Gate("cx", (0, 1))), ((0, 0),))
    back = circ.from_json(circ.to_json(c))
    assert back == c
    assert circ.circuit_hash(back) == circ.circuit_hash(c)


def test_from_json_rejects_junk():
    with pytest.raises(CircuitError):
        circ.from_json("not json")
    with pytest.raises(CircuitError):
        circ.from_json('{"wrong": 1}')
