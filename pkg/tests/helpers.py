"""Shared helpers: run a built circuit on explicit register values."""

import numpy as np

from avarith.simulator import run_registers


def run_batch(circuit, **inputs):
    """Simulate every lane; returns (outputs as lists of ints, peak, garbage lanes)."""
    arrays = {k: np.array(v, dtype=np.uint64) for k, v in inputs.items()}
    outs, peak, garbage = run_registers(circuit, arrays)
    return {k: [int(x) for x in v] for k, v in outs.items()}, peak, garbage


def run_one(circuit, **inputs):
    outs, _, garbage = run_batch(circuit, **{k: [v] for k, v in inputs.items()})
    assert garbage == 0
    return {k: v[0] for k, v in outs.items()}
