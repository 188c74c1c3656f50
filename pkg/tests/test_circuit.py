import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from avarith.circuit import (
    Builder,
    Circuit,
    FixedPointFormat,
    Gate,
    GateKind,
    Register,
    gate_census,
    peak_qubits,
    reverse,
    validate,
)
from avarith.simulator import BasisState, simulate


def _toy() -> Circuit:
    b = Builder()
    x = b.input("x", 2)
    a = b.and_(x[0], x[1], neg=(True, False))
    t = b.alloc1()
    b.cnot(a, t)
    b.unand(x[0], x[1], a, neg=(True, False))
    b.toffoli(x[0], t, x[1])
    b.swap(x[0], t)
    b.name("t", [x[0]])
    b.name("y", [t, x[1]])
    return b.circuit()


def test_gate_rejects_repeated_qubits():
    with pytest.raises(ValueError):
        Gate(GateKind.TOFFOLI, (1, 1, 2))


def test_gate_rejects_wrong_arity():
    with pytest.raises(ValueError):
        Gate(GateKind.CNOT, (1, 2, 3))


def test_inverse_pairs():
    g = Gate(GateKind.AND, (0, 1, 2), (True, False))
    assert g.inverse() == Gate(GateKind.UNAND, (0, 1, 2), (True, False))
    assert g.inverse().inverse() == g
    assert Gate(GateKind.INIT1, (3,)).inverse() == Gate(GateKind.DISCARD, (3,), expect=1)
    with pytest.raises(ValueError):
        Gate(GateKind.DISCARD, (3,), expect=None).inverse()


def test_format_round_trip():
    f = FixedPointFormat(6, 2, signed=True)
    assert f.fraction_bits == 4
    assert f.to_real(f.from_real(-1.25)) == -1.25
    with pytest.raises(ValueError):
        FixedPointFormat(3, 4)


def test_register_validation():
    with pytest.raises(ValueError):
        Register("r", (1, 1))
    with pytest.raises(ValueError):
        Register("r", (1, 2), FixedPointFormat(3))


def test_toy_circuit_is_valid_and_counted():
    c = _toy()
    assert validate(c) == []
    census = gate_census(c)
    assert census[GateKind.AND] == 1 and census[GateKind.TOFFOLI] == 1
    assert census.t_count == 8
    assert peak_qubits(c) == 4


def test_validate_reports_dead_and_unmatched():
    c = Circuit(3, (Gate(GateKind.CNOT, (0, 2)), Gate(GateKind.UNAND, (0, 1, 2))), {"x": Register("x", (0, 1))}, ("x",))
    rules = [v.rule for v in validate(c)]
    assert any("dead" in r for r in rules)
    assert any("without matching compute" in r for r in rules)


def test_text_and_json_round_trip():
    c = _toy()
    assert Circuit.from_text(c.to_text()) == c
    assert Circuit.from_json(c.to_json()) == c
    assert json.loads(c.to_json())["num_qubits"] == c.num_qubits


@st.composite
def random_circuits(draw):
    """Random well-formed circuits over a 3-qubit input register."""
    b = Builder()
    live = list(b.input("x", 3))
    for _ in range(draw(st.integers(0, 25))):
        op = draw(st.sampled_from(["x", "cnot", "toffoli", "swap", "andpair"]))
        if op == "x":
            b.x(draw(st.sampled_from(live)))
        elif op in ("cnot", "swap"):
            u, v = draw(st.permutations(live))[:2]
            b.cnot(u, v, draw(st.booleans())) if op == "cnot" else b.swap(u, v)
        elif op == "toffoli":
            u, v, w = draw(st.permutations(live))[:3]
            b.toffoli(u, v, w, (draw(st.booleans()), draw(st.booleans())))
        else:
            u, v, w = draw(st.permutations(live))[:3]
            neg = (draw(st.booleans()), draw(st.booleans()))
            a = b.and_(u, v, neg)
            b.cnot(a, w)
            b.unand(u, v, a, neg)
    return b.circuit()


@given(random_circuits(), st.integers(0, 7))
def test_reverse_undoes_circuit(c, value):
    assert validate(c) == []
    state = BasisState.from_registers(c, {"x": value})
    after = simulate(c, state)
    back = simulate(reverse(c), after)
    assert back.read(c, "x") == value


@given(random_circuits())
def test_serialization_round_trip_property(c):
    assert Circuit.from_text(c.to_text()) == c
    assert Circuit.from_json(c.to_json()) == c


def test_builder_undo_restores_state():
    b = Builder()
    x = b.input("x", 2)
    start = b.mark()
    a = b.and_(x[0], x[1])
    b.cnot(a, x[0])
    b.undo(start)
    c = b.circuit()
    for v in range(4):
        assert simulate(c, BasisState.from_registers(c, {"x": v})).read(c, "x") == v


def test_then_composes():
    c = _toy()
    r = reverse(c)
    both = Circuit(c.num_qubits, c.gates, c.registers, c.inputs).then(r)
    assert len(both.gates) == 2 * len(c.gates)
