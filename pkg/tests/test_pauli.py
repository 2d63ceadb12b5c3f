import pytest

from rivetlite import circuit as circ, pauli, sim
from rivetlite.circuit import Circuit, Gate
from rivetlite.exceptions import CircuitError


def test_rotation_circuit_structure():
    c = pauli.create_rotation_circuit(2, "XI")
    # right-to-left: char 0 is qubit 0 (I, nothing), char 1 is qubit 1 (X -> h)
    assert c.gates == (Gate("h", (1,)),)
    c = pauli.create_rotation_circuit(1, "Y")
    assert c.gates == (Gate("sdg", (0,)), Gate("h", (0,)))
    assert pauli.create_rotation_circuit(3, "ZIZ").gates == ()


def test_rotation_circuit_validation():
    with pytest.raises(CircuitError):
        pauli.create_rotation_circuit(2, "X")
    with pytest.raises(CircuitError):
        pauli.create_rotation_circuit(2, "XQ")


def test_random_pauli_deterministic():
    a = pauli.random_pauli(8, 3)
    assert a == pauli.random_pauli(8, 3)
    assert len(a) == 8
    assert set(a) <= set(pauli.PAULI_ALPHABET)
    draws = "".join(pauli.random_pauli(6, s) for s in range(40))
    assert set(draws) == set("IXYZ")
    with pytest.raises(CircuitError):
        pauli.random_pauli(0, 1)


@pytest.mark.parametrize("p", ["ZZ", "XX", "YY", "XY", "IZ", "YI", "XZ"])
def test_counts_expectation_matches_exact(p):
    state_prep = circ.random_circuit(2, 5, seed=hash(p) % 1000)
    exact = sim.expectation(state_prep, p)
    rotated = circ.measure_all(
        circ.append(state_prep, pauli.create_rotation_circuit(2, p)))
    counts = sim.sample(rotated, 400000, seed=9)
    estimate = pauli.expectation_from_counts(counts, p)
    assert estimate == pytest.approx(exact, abs=0.01)


def test_expectation_from_counts_hand_cases():
    d = sim.CountsDistribution({"0": 75, "1": 25}, 100)
    assert pauli.expectation_from_counts(d, "Z") == pytest.approx(0.5)
    d = sim.CountsDistribution({"11": 100}, 100)
    assert pauli.expectation_from_counts(d, "ZZ") == pytest.approx(1.0)
    # the I position is ignored: only the left bit (qubit 1) counts
    d = sim.CountsDistribution({"10": 100}, 100)
    assert pauli.expectation_from_counts(d, "ZI") == pytest.approx(-1.0)
    assert pauli.expectation_from_counts(d, "IZ") == pytest.approx(1.0)
    with pytest.raises(CircuitError):
        pauli.expectation_from_counts(d, "Z")
