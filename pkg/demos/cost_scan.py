"""Compare closed-form, segment-sum and naive gate-sum costs as n grows.

The naive sum counts every gate at its full primitive price; the segment
sum and closed form account for the cheaper packed layouts.  The gap is the
saving the optimized layout buys."""

from avarith import CostParams, SubroutineSpec, build, closed_form_cost, naive_gate_sum, segment_sum_cost

params = CostParams(35)
print(f"{'id':>10} {'n':>3} {'closed':>8} {'segments':>9} {'naive':>8}")
for sid in ("og_adder", "cas_adder", "multiply"):
    for n in (4, 8, 16, 32):
        spec = SubroutineSpec(sid, n)
        closed = closed_form_cost(spec, params).active_volume
        try:
            seg = segment_sum_cost(spec, params).active_volume
        except (KeyError, ValueError):
            seg = "-"
        naive = naive_gate_sum(build(spec), params).active_volume
        print(f"{sid:>10} {n:>3} {closed!s:>8} {seg!s:>9} {naive!s:>8}")
