"""Reversible arithmetic circuits for fault-tolerant quantum computers, with an
active-volume cost model and a bit-sliced basis-state simulator."""

from .circuit import Builder, Circuit, FixedPointFormat, Gate, GateKind, Register, gate_census, peak_qubits
from .costs import CostParams, CostReport, Volume, closed_form_cost, naive_gate_sum, primitive_cost, segment_sum_cost
from .registry import SubroutineSpec, build, lookup
from .simulator import simulate, verify_exhaustive, verify_sampled

__all__ = [
    "Builder", "Circuit", "CostParams", "CostReport", "FixedPointFormat", "Gate", "GateKind", "Register",
    "SubroutineSpec", "Volume", "build", "closed_form_cost", "gate_census", "lookup", "naive_gate_sum",
    "peak_qubits", "primitive_cost", "segment_sum_cost", "simulate", "verify_exhaustive", "verify_sampled",
]
