"""Reversible gate IR: gates, registers, circuits, a builder, and (de)serialization."""

from __future__ import annotations

import heapq
import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence


class GateKind(str, Enum):
    X = "X"
    CNOT = "CNOT"
    TOFFOLI = "Toffoli"
    AND = "TempAndCompute"
    UNAND = "TempAndUncompute"
    SWAP = "Swap"
    INIT0 = "Init0"
    INIT1 = "Init1"
    DISCARD = "Discard"


# number of control qubits per kind; the last qubit of a gate is its target
_N_CONTROLS = {
    GateKind.X: 0,
    GateKind.CNOT: 1,
    GateKind.TOFFOLI: 2,
    GateKind.AND: 2,
    GateKind.UNAND: 2,
    GateKind.SWAP: 0,
    GateKind.INIT0: 0,
    GateKind.INIT1: 0,
    GateKind.DISCARD: 0,
}
_ARITY = {k: (2 if k is GateKind.SWAP else n + 1) for k, n in _N_CONTROLS.items()}
T_KINDS = (GateKind.TOFFOLI, GateKind.AND)


@dataclass(frozen=True)
class Gate:
    """One reversible primitive.

    ``negated`` holds one flag per control.  For ``Discard`` the ``expect`` field
    is the value the qubit must hold (0 or 1), or ``None`` when the qubit is
    measured out and its value is irrelevant.
    """

    kind: GateKind
    qubits: tuple[int, ...]
    negated: tuple[bool, ...] = ()
    expect: int | None = 0

    def __post_init__(self):
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        nc = _N_CONTROLS[kind]
        neg = tuple(bool(b) for b in self.negated) or (False,) * nc
        if len(neg) != nc:
            raise ValueError(f"{kind.value} takes {nc} negation flags, got {len(neg)}")
        object.__setattr__(self, "negated", neg)
        if len(self.qubits) != _ARITY[kind]:
            raise ValueError(f"{kind.value} acts on {_ARITY[kind]} qubits, got {len(self.qubits)}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"repeated qubit in {kind.value}{self.qubits}")
        if kind is not GateKind.DISCARD:
            object.__setattr__(self, "expect", 0)
        elif self.expect not in (0, 1, None):
            raise ValueError("Discard expects 0, 1 or None")

    @property
    def controls(self) -> tuple[int, ...]:
        return self.qubits[: _N_CONTROLS[self.kind]]

    @property
    def target(self) -> int:
        return self.qubits[-1]

    def inverse(self) -> Gate:
        k = self.kind
        if k is GateKind.AND:
            return Gate(GateKind.UNAND, self.qubits, self.negated)
        if k is GateKind.UNAND:
            return Gate(GateKind.AND, self.qubits, self.negated)
        if k in (GateKind.INIT0, GateKind.INIT1):
            return Gate(GateKind.DISCARD, self.qubits, expect=int(k is GateKind.INIT1))
        if k is GateKind.DISCARD:
            if self.expect is None:
                raise ValueError("a measured Discard has no inverse")
            return Gate(GateKind.INIT1 if self.expect else GateKind.INIT0, self.qubits)
        return self

    def __str__(self) -> str:
        ctl = [("!" if n else "") + str(q) for q, n in zip(self.controls, self.negated)]
        rest = [str(q) for q in self.qubits[len(ctl):]]
        s = " ".join([self.kind.value, *ctl, *rest])
        if self.kind is GateKind.DISCARD and self.expect != 0:
            s += " =m" if self.expect is None else " =1"
        return s

    @classmethod
    def parse(cls, line: str) -> Gate:
        parts = line.split()
        kind = GateKind(parts[0])
        expect: int | None = 0
        if parts[-1].startswith("="):
            expect = None if parts[-1] == "=m" else int(parts[-1][1:])
            parts = parts[:-1]
        qubits, neg = [], []
        for i, tok in enumerate(parts[1:]):
            if i < _N_CONTROLS[kind]:
                neg.append(tok.startswith("!"))
            qubits.append(int(tok.lstrip("!")))
        return cls(kind, tuple(qubits), tuple(neg), expect)


@dataclass(frozen=True)
class FixedPointFormat:
    width: int
    integer_bits: int | None = None
    signed: bool = False

    def __post_init__(self):
        if self.integer_bits is None:
            object.__setattr__(self, "integer_bits", self.width)
        if self.width < 1 or not 0 <= self.integer_bits <= self.width:
            raise ValueError(f"bad fixed-point format {self.width}/{self.integer_bits}")

    @property
    def fraction_bits(self) -> int:
        return self.width - self.integer_bits

    def to_real(self, code: int) -> float:
        if self.signed and code >> (self.width - 1):
            code -= 1 << self.width
        return code / (1 << self.fraction_bits)

    def from_real(self, value: float, rounding=round) -> int:
        code = int(rounding(value * (1 << self.fraction_bits)))
        return code % (1 << self.width)


@dataclass(frozen=True)
class Register:
    name: str
    qubits: tuple[int, ...]
    format: FixedPointFormat | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if not self.qubits or len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"register {self.name!r} needs distinct, non-empty qubits")
        if self.format is None:
            object.__setattr__(self, "format", FixedPointFormat(len(self.qubits)))
        elif self.format.width != len(self.qubits):
            raise ValueError(f"register {self.name!r}: format width != qubit count")

    def __len__(self):
        return len(self.qubits)

    def __getitem__(self, i):
        return self.qubits[i]

    def __iter__(self):
        return iter(self.qubits)


@dataclass(frozen=True)
class Circuit:
    """An immutable gate list over ``num_qubits`` indexed wires.

    ``inputs`` names the registers live before the first gate.  Any register
    whose qubits are all live after the last gate is readable as an output.
    """

    num_qubits: int
    gates: tuple[Gate, ...] = ()
    registers: dict[str, Register] = field(default_factory=dict)
    inputs: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        missing = [r for r in self.inputs if r not in self.registers]
        if missing:
            raise ValueError(f"unknown input registers {missing}")

    @property
    def initial_live(self) -> frozenset[int]:
        return frozenset(q for name in self.inputs for q in self.registers[name])

    def final_live(self) -> frozenset[int]:
        live = set(self.initial_live)
        for g in self.gates:
            if g.kind in (GateKind.INIT0, GateKind.INIT1, GateKind.AND):
                live.add(g.target)
            elif g.kind in (GateKind.DISCARD, GateKind.UNAND):
                live.discard(g.target)
        return frozenset(live)

    def output_registers(self) -> list[str]:
        live = self.final_live()
        return [name for name, r in self.registers.items() if set(r.qubits) <= live]

    def then(self, other: Circuit) -> Circuit:
        """Sequential composition; registers of ``other`` override same-named ones."""
        return Circuit(
            max(self.num_qubits, other.num_qubits),
            self.gates + other.gates,
            {**self.registers, **other.registers},
            self.inputs,
        )

    # ---- serialization -------------------------------------------------
    def to_text(self) -> str:
        lines = [f"qubits {self.num_qubits}"]
        for r in self.registers.values():
            f = r.format
            flag = " signed" if f.signed else ""
            lines.append(f"reg {r.name} {f.width} {f.integer_bits}{flag} : " + " ".join(map(str, r.qubits)))
        if self.inputs:
            lines.append("inputs " + " ".join(self.inputs))
        lines.append(f"# t_count {gate_census(self).t_count}")
        lines.extend(str(g) for g in self.gates)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Circuit:
        num, regs, inputs, gates = 0, {}, (), []
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            head = line.split(maxsplit=1)[0]
            if head == "qubits":
                num = int(line.split()[1])
            elif head == "reg":
                meta, qs = line.split(":")
                _, name, width, ibits, *flag = meta.split()
                fmt = FixedPointFormat(int(width), int(ibits), bool(flag))
                regs[name] = Register(name, tuple(int(q) for q in qs.split()), fmt)
            elif head == "inputs":
                inputs = tuple(line.split()[1:])
            else:
                gates.append(Gate.parse(line))
        return cls(num, tuple(gates), regs, inputs)

    def to_dict(self) -> dict:
        return {
            "num_qubits": self.num_qubits,
            "registers": [
                {
                    "name": r.name,
                    "qubits": list(r.qubits),
                    "width": r.format.width,
                    "integer_bits": r.format.integer_bits,
                    "signed": r.format.signed,
                }
                for r in self.registers.values()
            ],
            "inputs": list(self.inputs),
            "gates": [
                {"kind": g.kind.value, "qubits": list(g.qubits), "negated": list(g.negated)}
                | ({"expect": g.expect} if g.kind is GateKind.DISCARD else {})
                for g in self.gates
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> Circuit:
        regs = {
            r["name"]: Register(
                r["name"], tuple(r["qubits"]), FixedPointFormat(r["width"], r["integer_bits"], r["signed"])
            )
            for r in d["registers"]
        }
        gates = tuple(
            Gate(GateKind(g["kind"]), tuple(g["qubits"]), tuple(g["negated"]), g.get("expect", 0))
            for g in d["gates"]
        )
        return cls(d["num_qubits"], gates, regs, tuple(d["inputs"]))

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, s: str) -> Circuit:
        return cls.from_dict(json.loads(s))


@dataclass(frozen=True)
class Violation:
    gate_index: int
    rule: str

    def __str__(self):
        return f"gate {self.gate_index}: {self.rule}"


def validate(circuit: Circuit) -> list[Violation]:
    """Single linear scan over the gate list; returns every rule broken."""
    out: list[Violation] = []
    live = set(circuit.initial_live)
    ands: dict[int, tuple] = {}
    for name, r in circuit.registers.items():
        if any(q >= circuit.num_qubits for q in r.qubits):
            out.append(Violation(-1, f"register {name} exceeds num_qubits"))
    for i, g in enumerate(circuit.gates):
        if any(q < 0 or q >= circuit.num_qubits for q in g.qubits):
            out.append(Violation(i, "qubit index out of range"))
            continue
        k, t = g.kind, g.target
        if k in (GateKind.INIT0, GateKind.INIT1, GateKind.AND):
            if t in live:
                out.append(Violation(i, f"{k.value} on live qubit {t}"))
            others = g.qubits[:-1]
        else:
            others = g.qubits
        dead = [q for q in others if q not in live]
        if dead:
            out.append(Violation(i, f"{k.value} touches dead qubit(s) {dead}"))
        if k is GateKind.AND:
            ands[t] = (g.controls, g.negated)
        elif k is GateKind.UNAND:
            if ands.get(t) != (g.controls, g.negated):
                out.append(Violation(i, f"uncompute of {t} without matching compute"))
            ands.pop(t, None)
        elif k is GateKind.DISCARD:
            ands.pop(t, None)
        elif k is GateKind.SWAP:
            a, b = g.qubits
            sa, sb = ands.pop(a, None), ands.pop(b, None)
            if sa:
                ands[b] = sa
            if sb:
                ands[a] = sb
        if k in (GateKind.INIT0, GateKind.INIT1, GateKind.AND):
            live.add(t)
        elif k in (GateKind.DISCARD, GateKind.UNAND):
            live.discard(t)
    return out


def reverse(circuit: Circuit) -> Circuit:
    problems = validate(circuit)
    if problems:
        raise ValueError(f"cannot reverse a malformed circuit: {problems[0]}")
    live = circuit.final_live()
    inputs = tuple(n for n, r in circuit.registers.items() if set(r.qubits) <= live)
    return Circuit(
        circuit.num_qubits,
        tuple(g.inverse() for g in reversed(circuit.gates)),
        dict(circuit.registers),
        inputs,
    )


@dataclass(frozen=True)
class Census:
    counts: dict[GateKind, int]

    @property
    def t_count(self) -> int:
        return 4 * sum(self.counts.get(k, 0) for k in T_KINDS)

    def __getitem__(self, kind) -> int:
        return self.counts.get(GateKind(kind), 0)


def gate_census(circuit: Circuit) -> Census:
    c = Counter(g.kind for g in circuit.gates)
    return Census({k: c.get(k, 0) for k in GateKind})


def peak_qubits(circuit: Circuit) -> int:
    live = len(circuit.initial_live)
    peak = live
    for g in circuit.gates:
        if g.kind in (GateKind.INIT0, GateKind.INIT1, GateKind.AND):
            live += 1
            peak = max(peak, live)
        elif g.kind in (GateKind.DISCARD, GateKind.UNAND):
            live -= 1
    return peak


class Builder:
    """Mutable gate-list accumulator with a recycling qubit allocator.

    Builders for individual subroutines are plain functions that take a
    ``Builder`` plus qubit lists and append gates, so they compose freely.
    """

    def __init__(self):
        self.gates: list[Gate] = []
        self.registers: dict[str, Register] = {}
        self.inputs: list[str] = []
        self._free: list[int] = []
        self._next = 0
        self.live: set[int] = set()

    # ---- allocation ----------------------------------------------------
    def _fresh(self) -> int:
        if self._free:
            return heapq.heappop(self._free)
        self._next += 1
        return self._next - 1

    def input(self, name: str, width: int, fmt: FixedPointFormat | None = None) -> list[int]:
        qs = [self._fresh() for _ in range(width)]
        self.live.update(qs)
        self.registers[name] = Register(name, tuple(qs), fmt)
        self.inputs.append(name)
        return qs

    def alloc(self, width: int = 1, value: int = 0) -> list[int]:
        qs = []
        for i in range(width):
            q = self._fresh()
            self._emit(Gate(GateKind.INIT1 if value >> i & 1 else GateKind.INIT0, (q,)))
            qs.append(q)
        return qs

    def alloc1(self, value: int = 0) -> int:
        return self.alloc(1, value)[0]

    def free(self, qubits: Iterable[int] | int, expect: int | None = 0):
        for q in [qubits] if isinstance(qubits, int) else list(qubits):
            self._emit(Gate(GateKind.DISCARD, (q,), expect=expect))

    def name(self, name: str, qubits: Sequence[int], fmt: FixedPointFormat | None = None) -> list[int]:
        self.registers[name] = Register(name, tuple(qubits), fmt)
        return list(qubits)

    # ---- gates ---------------------------------------------------------
    def _emit(self, g: Gate):
        k, t = g.kind, g.target
        if k in (GateKind.INIT0, GateKind.INIT1, GateKind.AND):
            assert t not in self.live, f"{g}: target already live"
            self.live.add(t)
            if t in self._free:
                self._free.remove(t)
                heapq.heapify(self._free)
        elif k in (GateKind.DISCARD, GateKind.UNAND):
            self.live.discard(t)
            heapq.heappush(self._free, t)
        self.gates.append(g)

    def x(self, q: int):
        self._emit(Gate(GateKind.X, (q,)))

    def cnot(self, c: int, t: int, neg: bool = False):
        self._emit(Gate(GateKind.CNOT, (c, t), (neg,)))

    def toffoli(self, c1: int, c2: int, t: int, neg=(False, False)):
        self._emit(Gate(GateKind.TOFFOLI, (c1, c2, t), tuple(neg)))

    def and_(self, c1: int, c2: int, neg=(False, False), target: int | None = None) -> int:
        t = self._fresh() if target is None else target
        self._emit(Gate(GateKind.AND, (c1, c2, t), tuple(neg)))
        return t

    def unand(self, c1: int, c2: int, t: int, neg=(False, False)):
        self._emit(Gate(GateKind.UNAND, (c1, c2, t), tuple(neg)))

    def swap(self, a: int, b: int):
        self._emit(Gate(GateKind.SWAP, (a, b)))

    def mark(self) -> int:
        return len(self.gates)

    def undo(self, start: int, stop: int | None = None):
        """Append the inverse of gates[start:stop]."""
        for g in reversed(self.gates[start:stop]):
            self._emit(g.inverse())

    def circuit(self) -> Circuit:
        return Circuit(self._next, tuple(self.gates), dict(self.registers), tuple(self.inputs))
