import math

import numpy as np
import pytest
from helpers import unitary_error

from rivetlite import backend, circuit as circ, sim
from rivetlite import transpiler as tp
from rivetlite.circuit import Circuit, Gate
from rivetlite.exceptions import RivetLiteError, TranspileError


def _dev(name: str):
    return backend.builtin_topology(name)


def test_layout_validation_and_inverse():
    lay = tp.Layout((2, 0, 1))
    assert lay[0] == 2 and len(lay) == 3
    assert lay.inverse()[2] == 0
    with pytest.raises(TranspileError):
        tp.Layout((0, 0))


def test_unroll_swap():
    c = Circuit(2, (Gate("swap", (0, 1)),))
    u = tp.unroll(c)
    assert [g.name for g in u.gates] == ["cx", "cx", "cx"]
    assert unitary_error(c, u) < 1e-9


def test_choose_layout_places_pairs_adjacent():
    c = Circuit(2, (Gate("cx", (0, 1)),) * 3)
    lay = tp.choose_layout(c, _dev("linear-5"))
    assert _dev("linear-5").coupled(lay[0], lay[1])
    trivial = tp.choose_layout(c, _dev("linear-5"),
                               tp.TranspileOptions(optimization_level=0))
    assert trivial.targets == (0, 1)


def test_choose_layout_deterministic():
    c = circ.random_circuit(4, 6, 3)
    a = tp.choose_layout(c, _dev("heavyhex-27"))
    b = tp.choose_layout(c, _dev("heavyhex-27"))
    assert a.targets == b.targets


def test_route_makes_every_pair_coupled():
    t = _dev("linear-4")
    c = Circuit(4, (Gate("cx", (0, 3)), Gate("cx", (1, 3)), Gate("cz", (0, 2))))
    routed = tp.route(c, tp.Layout((0, 1, 2, 3)), t)
    for g in routed.physical.gates:
        if len(g.qubits) == 2:
            assert t.coupled(*g.qubits)
    assert sorted(routed.final_layout.targets) == [0, 1, 2, 3]


def test_route_remaps_measurements_to_final_layout():
    t = _dev("linear-3")
    c = Circuit(3, (Gate("cx", (0, 2)),), ((0, 0), (1, 1), (2, 2)))
    routed = tp.route(c, tp.Layout((0, 1, 2)), t)
    pi = routed.final_layout
    assert set(routed.physical.measurements) == {(pi[q], q) for q in range(3)}


TRANSLATE_CASES = [
    Circuit(1, (Gate("h", (0,)),)),
    Circuit(1, (Gate("s", (0,)),)),
    Circuit(1, (Gate("sdg", (0,)),)),
    Circuit(1, (Gate("z", (0,)),)),
    Circuit(1, (Gate("y", (0,)),)),
    Circuit(1, (Gate("rx", (0,), (0.7,)),)),
    Circuit(1, (Gate("ry", (0,), (-1.3,)),)),
    Circuit(1, (Gate("u", (0,), (0.4, 1.1, -0.6)),)),
    Circuit(1, (Gate("u", (0,), (math.pi / 2, 0.3, 0.9)),)),
    Circuit(1, (Gate("u", (0,), (math.pi, -0.2, 0.5)),)),
    Circuit(2, (Gate("cz", (0, 1)),)),
    Circuit(2, (Gate("swap", (0, 1)),)),
]


@pytest.mark.parametrize("case", TRANSLATE_CASES,
                         ids=[c.gates[0].name + str(i)
                              for i, c in enumerate(TRANSLATE_CASES)])
def test_translate_rules_are_exact(case):
    basis = backend.DEFAULT_BASIS
    out = tp.translate(tp.unroll(case), basis)
    assert all(g.name in basis for g in out.gates)
    assert unitary_error(case, out) < 1e-9


def test_translate_symbolic_commutes_with_bind():
    c = Circuit(1, (Gate("ry", (0,), ("t",)),))
    translated = tp.translate(c, backend.DEFAULT_BASIS)
    assert translated.free_symbols == frozenset(("t",))
    for val in (0.0, 0.9, -2.2):
        a = circ.bind(translated, {"t": val})
        b = tp.translate(circ.bind(c, {"t": val}), backend.DEFAULT_BASIS)
        assert unitary_error(a, b) < 1e-9


def test_optimize_merges_rz_and_drops_zeros():
    c = Circuit(1, (Gate("rz", (0,), (0.4,)), Gate("rz", (0,), (-0.4,))))
    assert tp.optimize(c, 1).gates == ()
    c = Circuit(1, (Gate("rz", (0,), (0.3,)), Gate("rz", (0,), (0.5,))))
    out = tp.optimize(c, 1)
    assert len(out.gates) == 1
    assert out.gates[0].params[0] == pytest.approx(0.8)


def test_optimize_cancels_cx_pairs():
    c = Circuit(2, (Gate("cx", (0, 1)), Gate("cx", (0, 1))))
    assert tp.optimize(c, 1).gates == ()
    keep = Circuit(2, (Gate("cx", (0, 1)), Gate("cx", (1, 0))))
    assert len(tp.optimize(keep, 1).gates) == 2


def test_optimize_resynthesizes_1q_runs():
    # h-z-h = x: five basis gates collapse to the single-gate form
    c = tp.translate(Circuit(1, (Gate("h", (0,)), Gate("z", (0,)),
                                 Gate("h", (0,)))), backend.DEFAULT_BASIS)
    out = tp.optimize(c, 2)
    assert len(out.gates) <= 2
    assert unitary_error(c, out) < 1e-9


def test_optimize_never_grows():
    for seed in range(6):
        c = tp.translate(tp.unroll(circ.random_circuit(3, 8, seed)),
                         backend.DEFAULT_BASIS)
        for level in (1, 2, 3):
            out = tp.optimize(c, level)
            assert len(out.gates) <= len(c.gates)
            assert unitary_error(c, out) < 1e-9


def test_transpile_end_to_end():
    t = _dev("grid-3x3")
    c = circ.measure_all(circ.random_circuit(4, 6, 9))
    tc = tp.transpile(c, t)
    assert tp.check_transpiled(tc, t, c) == []
    assert tc.elapsed_seconds > 0
    assert set(tc.stage_seconds) == {"unroll", "layout", "route",
                                     "translate", "optimize"}
    assert tp.virtual_equivalent(tc, c) is True


def test_transpile_rejects_oversized_circuits():
    with pytest.raises(TranspileError):
        tp.transpile(circ.random_circuit(5, 3, 0), _dev("linear-4"))


def test_level0_still_valid():
    t = _dev("linear-4")
    c = circ.random_circuit(3, 5, 2)
    tc = tp.transpile(c, t, tp.TranspileOptions(optimization_level=0))
    assert tp.check_transpiled(tc, t, c) == []
    assert tp.virtual_equivalent(tc, c) is True


def test_check_transpiled_flags_violations():
    t = _dev("linear-4")
    c = circ.random_circuit(3, 4, 4)
    tc = tp.transpile(c, t)
    bad = Circuit(t.num_physical, tc.physical.gates + (Gate("h", (0,)),),
                  tc.physical.measurements)
    import dataclasses
    broken = dataclasses.replace(tc, physical=bad)
    assert tp.check_transpiled(broken, t, c) != []


def test_transpiled_json_round_trip():
    t = _dev("linear-4")
    c = circ.measure_all(circ.random_circuit(3, 4, 7))
    tc = tp.transpile(c, t)
    back = tp.from_dict(tp.to_dict(tc))
    assert back.physical == tc.physical
    assert back.initial_layout.targets == tc.initial_layout.targets
    assert back.final_layout.targets == tc.final_layout.targets
    assert back.source_hash == tc.source_hash
    with pytest.raises(RivetLiteError):
        tp.from_dict({"nope": 1})


def test_virtual_equivalent_detects_differences():
    t = _dev("linear-4")
    c = circ.random_circuit(3, 4, 1)
    tc = tp.transpile(c, t)
    other = circ.random_circuit(3, 4, 2)
    assert tp.virtual_equivalent(tc, other) is False


def test_transpile_options_key_covers_fields():
    a = tp.TranspileOptions()
    b = tp.TranspileOptions(optimization_level=1)
    assert a.key() != b.key()
    assert a.key() == tp.TranspileOptions().key()
