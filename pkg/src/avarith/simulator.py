"""Basis-state simulation of reversible circuits.

All gates are classical permutations, so a "state" is just a bit per live
qubit.  Internally every qubit carries a Python int whose bit ``j`` is the
qubit's value in lane ``j``; one pass over the gate list therefore evaluates
many independent inputs at once (bit-sliced simulation).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping

import numpy as np

from .circuit import Circuit, GateKind

DEFAULT_BOUND = 1 << 20
_CHUNK = 1 << 14


class SimulationError(RuntimeError):
    def __init__(self, kind: str, gate_index: int, detail: str = ""):
        self.kind = kind
        self.gate_index = gate_index
        super().__init__(f"{kind} at gate {gate_index}" + (f": {detail}" if detail else ""))


@dataclass(frozen=True)
class BasisState:
    bits: Mapping[int, int]

    @property
    def live(self) -> frozenset[int]:
        return frozenset(self.bits)

    @classmethod
    def from_registers(cls, circuit: Circuit, values: Mapping[str, int]) -> BasisState:
        bits = {}
        for name in circuit.inputs:
            v = values.get(name, 0)
            for i, q in enumerate(circuit.registers[name]):
                bits[q] = v >> i & 1
        return cls(bits)

    def read(self, circuit: Circuit, name: str) -> int:
        return sum(self.bits[q] << i for i, q in enumerate(circuit.registers[name]))


@dataclass
class LaneResult:
    values: dict[int, int]
    lanes: int
    peak: int

    def register(self, circuit: Circuit, name: str) -> np.ndarray:
        return unpack([self.values[q] for q in circuit.registers[name]], self.lanes)


def run_lanes(circuit: Circuit, values: Mapping[int, int], lanes: int) -> LaneResult:
    """Evolve ``lanes`` basis states at once.  ``values`` maps each initially
    live qubit to its lane mask."""
    if set(values) != set(circuit.initial_live):
        raise ValueError("input qubits do not match the circuit's initially-live set")
    full = (1 << lanes) - 1
    v = dict(values)
    peak = len(v)
    for i, g in enumerate(circuit.gates):
        k, qs = g.kind, g.qubits
        t = qs[-1]
        if k is GateKind.INIT0 or k is GateKind.INIT1 or k is GateKind.AND:
            if t in v:
                raise SimulationError("live target", i, f"qubit {t} already allocated")
        elif t not in v:
            raise SimulationError("dead qubit", i, f"qubit {t}")
        for q in qs[:-1]:
            if q not in v:
                raise SimulationError("dead qubit", i, f"qubit {q}")
        if k is GateKind.CNOT:
            c = v[qs[0]]
            v[t] ^= c ^ full if g.negated[0] else c
        elif k is GateKind.TOFFOLI or k is GateKind.AND or k is GateKind.UNAND:
            a, b = v[qs[0]], v[qs[1]]
            if g.negated[0]:
                a ^= full
            if g.negated[1]:
                b ^= full
            if k is GateKind.TOFFOLI:
                v[t] ^= a & b
            elif k is GateKind.AND:
                v[t] = a & b
                peak = max(peak, len(v))
            else:
                if v[t] != a & b:
                    raise SimulationError("uncompute mismatch", i, f"ancilla {t}")
                del v[t]
        elif k is GateKind.X:
            v[t] ^= full
        elif k is GateKind.SWAP:
            v[qs[0]], v[t] = v[t], v[qs[0]]
        elif k is GateKind.INIT0:
            v[t] = 0
            peak = max(peak, len(v))
        elif k is GateKind.INIT1:
            v[t] = full
            peak = max(peak, len(v))
        else:  # Discard
            if g.expect is not None and v[t] != (full if g.expect else 0):
                raise SimulationError("nonzero discard", i, f"qubit {t} expected {g.expect}")
            del v[t]
    return LaneResult(v, lanes, peak)


def simulate(circuit: Circuit, state: BasisState) -> BasisState:
    res = run_lanes(circuit, {q: b & 1 for q, b in state.bits.items()}, 1)
    return BasisState({q: m & 1 for q, m in res.values.items()})


def pack(values: np.ndarray, width: int) -> list[int]:
    """Bit-slice an array of register values into one lane mask per bit."""
    arr = np.asarray(values, dtype=np.uint64)
    out = []
    for i in range(width):
        bits = ((arr >> np.uint64(i)) & np.uint64(1)).astype(np.uint8)
        out.append(int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little"))
    return out


def unpack(masks: list[int], lanes: int) -> np.ndarray:
    nbytes = (lanes + 7) // 8
    if len(masks) > 64:
        # wider than a machine word: fall back to Python ints
        acc = np.zeros(lanes, dtype=object)
        for i, m in enumerate(masks):
            bits = np.unpackbits(np.frombuffer(m.to_bytes(nbytes, "little"), dtype=np.uint8), bitorder="little")
            acc += np.array([int(b) << i for b in bits[:lanes]], dtype=object)
        return acc
    acc = np.zeros(lanes, dtype=np.uint64)
    for i, m in enumerate(masks):
        bits = np.unpackbits(np.frombuffer(m.to_bytes(nbytes, "little"), dtype=np.uint8), bitorder="little")
        acc |= bits[:lanes].astype(np.uint64) << np.uint64(i)
    return acc


def run_registers(circuit: Circuit, inputs: Mapping[str, np.ndarray]) -> tuple[dict[str, np.ndarray], int, int]:
    """Simulate a batch of register assignments.

    Returns (register values after the circuit, peak live qubits, number of
    lanes in which some unnamed live qubit is left nonzero).
    """
    lanes = len(next(iter(inputs.values()))) if inputs else 1
    values: dict[int, int] = {}
    for name in circuit.inputs:
        reg = circuit.registers[name]
        vals = inputs.get(name, np.zeros(lanes, dtype=np.uint64))
        for q, m in zip(reg.qubits, pack(vals, len(reg))):
            values[q] = m
    res = run_lanes(circuit, values, lanes)
    named = set()
    outs = {}
    for name, reg in circuit.registers.items():
        if all(q in res.values for q in reg.qubits):
            outs[name] = res.register(circuit, name)
            named.update(reg.qubits)
    stray = 0
    for q, m in res.values.items():
        if q not in named:
            stray |= m
    return outs, res.peak, bin(stray).count("1")


@dataclass
class VerificationReport:
    subroutine: str
    params: dict
    mode: str
    cases: int
    seed: int | None = None
    failures: list = field(default_factory=list)
    peak_qubits: int = 0
    metrics: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), default=_jsonable, **kw)

    def summary(self) -> str:
        status = "PASS" if self.passed else f"FAIL ({len(self.failures)} failures)"
        extra = "".join(f" {k}={v}" for k, v in self.metrics.items())
        seed = f" seed={self.seed}" if self.seed is not None else ""
        return f"{self.subroutine} {self.params}: {self.mode} {self.cases} cases{seed} peak={self.peak_qubits}{extra} -> {status}"


def _jsonable(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    return str(o)


def _check_batch(sub, spec, circuit, batch: dict[str, np.ndarray], report, oracle, max_failures):
    outs, peak, garbage = run_registers(circuit, batch)
    report.peak_qubits = max(report.peak_qubits, peak)
    if garbage:
        report.failures.append(({}, "unnamed ancillas zero", f"{garbage} lanes with garbage"))
    names = list(batch)
    lanes = len(batch[names[0]]) if names else 1
    for j in range(lanes):
        inp = {k: int(batch[k][j]) for k in names}
        expected = oracle(spec, inp)
        got = {k: int(outs[k][j]) for k in expected if k in outs}
        missing = [k for k in expected if k not in outs]
        if missing or got != expected:
            if len(report.failures) < max_failures:
                report.failures.append((inp, expected, got))
            else:
                report.metrics["truncated_failures"] = True
        if sub.check is not None:
            problem = sub.check(spec, inp, {k: int(outs[k][j]) for k in outs}, report.metrics)
            if problem and len(report.failures) < max_failures:
                report.failures.append((inp, problem, {k: int(outs[k][j]) for k in outs}))


def _chunks(arrays: dict[str, np.ndarray]):
    total = len(next(iter(arrays.values())))
    for s in range(0, total, _CHUNK):
        yield {k: a[s : s + _CHUNK] for k, a in arrays.items()}


def verify_exhaustive(spec, oracle: Callable | None = None, bound: int = DEFAULT_BOUND, max_failures: int = 20) -> VerificationReport:
    """Simulate every admissible input of ``spec`` and compare with the oracle."""
    from .registry import lookup

    sub = lookup(spec.id)
    domain = sub.domain(spec)
    size = 1
    for vals in domain.values():
        size *= len(vals)
    if size > bound:
        raise ValueError(f"input space {size} exceeds bound {bound}; use verify_sampled")
    names = list(domain)
    rows = [c for c in itertools.product(*(domain[k] for k in names)) if sub.accept(spec, dict(zip(names, c)))]
    circuit = sub.build(spec)
    report = VerificationReport(spec.id, spec.describe(), "exhaustive", len(rows))
    if not rows:
        return report
    arrays = {k: np.array([r[i] for r in rows], dtype=np.uint64) for i, k in enumerate(names)}
    for batch in _chunks(arrays):
        _check_batch(sub, spec, circuit, batch, report, oracle or sub.oracle, max_failures)
    return report


def verify_sampled(spec, oracle: Callable | None = None, samples: int = 500, seed: int = 0, max_failures: int = 20) -> VerificationReport:
    """Uniformly sample admissible inputs (rejection on the admissibility test)."""
    from .registry import lookup

    if samples < 1:
        raise ValueError("samples must be >= 1")
    sub = lookup(spec.id)
    rng = np.random.default_rng(seed)
    domain = sub.domain(spec)
    names = list(domain)
    rows: list[tuple] = []
    tries = 0
    while len(rows) < samples:
        tries += 1
        if tries > 1000 * samples:
            raise RuntimeError("admissible inputs too sparse to sample")
        # index rather than rng.choice: domains may be ranges too large to materialise
        row = tuple(int(domain[k][int(rng.integers(len(domain[k])))]) for k in names)
        if sub.accept(spec, dict(zip(names, row))):
            rows.append(row)
    circuit = sub.build(spec)
    report = VerificationReport(spec.id, spec.describe(), "sampled", samples, seed)
    arrays = {k: np.array([r[i] for r in rows], dtype=np.uint64) for i, k in enumerate(names)}
    for batch in _chunks(arrays):
        _check_batch(sub, spec, circuit, batch, report, oracle or sub.oracle, max_failures)
    return report
