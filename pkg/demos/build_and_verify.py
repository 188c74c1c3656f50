"""Build a few arithmetic circuits, print their gate census, and check them
against classical oracles on every input."""

from avarith import SubroutineSpec, build, gate_census, peak_qubits, verify_exhaustive

for sid, n in [("increment", 4), ("cas_adder", 4), ("multiply", 3), ("sqrt", 6)]:
    spec = SubroutineSpec(sid, n)
    circuit = build(spec)
    census = gate_census(circuit)
    print(f"{sid:>10} n={n}: {len(circuit.gates):4d} gates, T={census.t_count:4d}, peak qubits={peak_qubits(circuit)}")
    report = verify_exhaustive(spec)
    print(f"{'':>10}   {report.summary()}")
