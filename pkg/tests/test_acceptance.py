"""The nine acceptance criteria, one test each.  Every test records a
PASS/FAIL line that pytest prints in an "acceptance criteria" section."""

import json
import math
import time

import pytest
import sympy

from avarith import costs
from avarith.circuit import gate_census, peak_qubits
from avarith.cli import main as cli_main
from avarith.costs import CostParams, Sizes, formula_cost
from avarith.registry import LOW_LEVEL, SubroutineSpec, lookup
from avarith.simulator import verify_exhaustive, verify_sampled

from .conftest import ACCEPTANCE_LINES

P35 = CostParams(35)


def record(num: int, ok: bool, detail: str):
    ACCEPTANCE_LINES.append((num, ok, detail))
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


# 1 ------------------------------------------------------------ correctness

def test_criterion_1_functional_correctness():
    start = time.perf_counter()
    failures, runs = [], 0
    small = ["increment", "cincrement", "cas_adder", "og_adder", "cog_adder", "comparator"]
    specs = [SubroutineSpec(sid, n) for sid in small for n in (2, 3, 4)]
    specs += [SubroutineSpec("cshift1", n, {"direction": d}) for n in (2, 3, 4) for d in ("left", "right")]
    specs += [SubroutineSpec("multiply", 3), SubroutineSpec("square", 3), SubroutineSpec("sqrt", 4), SubroutineSpec("sqrt", 6)]
    for spec in specs:
        r = verify_exhaustive(spec, bound=2**13)
        runs += 1
        if not r.passed:
            failures.append(r.summary())
    sampled = small + ["cshift1", "multiply", "square", "sqrt"]
    for sid in sampled:
        r = verify_sampled(SubroutineSpec(sid, 8), samples=500, seed=0)
        runs += 1
        if not r.passed or r.cases < 500:
            failures.append(r.summary())
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 60
    record(1, ok, f"{runs} verification runs, {len(failures)} failing, {elapsed:.1f}s" + (f"; {failures[:2]}" if failures else ""))


# 2 ------------------------------------------------------------ T counts

CENSUS_IDS = LOW_LEVEL + ("toffoli_copy", "cheap_multiply", "fused_multiply_add")


def test_criterion_2_t_count_reproduction():
    deviations, unexplained, checked = [], [], 0
    for sid in CENSUS_IDS:
        sub = lookup(sid)
        for n in range(3, 9):
            spec = sub.default_spec(n)
            got = gate_census(sub.build(spec)).t_count
            want = costs.closed_form_cost(spec, P35).t_count
            checked += 1
            if got != want:
                note = costs.KNOWN_DEVIATIONS.get((sid, "t_count"))
                (deviations if note else unexplained).append(f"{sid} n={n}: built {got}, printed {want}")
    ok = not unexplained
    detail = f"{checked} (subroutine, n) pairs; {len(deviations)} whitelisted, {len(unexplained)} unexplained"
    if unexplained:
        detail += f": {unexplained[:3]}"
    record(2, ok, detail)


# 3 ------------------------------------------------------- segment identities

def test_criterion_3_segment_identities():
    bad = []
    for sid in ("increment", "cincrement", "og_adder", "cas_adder", "cog_adder"):
        for n in range(2, 65):
            spec = SubroutineSpec(sid, n)
            seg = costs.segment_sum_cost(spec, P35).components()
            closed = costs.closed_form_cost(spec, P35).components()
            if seg != closed:
                bad.append((sid, n, seg, closed))
    record(3, not bad, f"5 subroutines x n=2..64, (base, C-coeff, T, depth) exact; {len(bad)} mismatches")


# 4 ------------------------------------------------------ composition identities

def test_criterion_4_composition_identities():
    toff = costs.primitive_cost("Toffoli", P35)
    bad = []

    def triple(fid, n, **kw):
        r = formula_cost(fid, Sizes(n=n, **kw), P35)
        return r.volume, r.t_count, r.reaction_depth

    def combine(*terms):
        v, t, d = 0, 0, 0
        for k, (tv, tt, td) in terms:
            v, t, d = tv * k + v, t + k * tt, d + k * td
        return v, t, d

    tof = (toff.volume, toff.t_count, toff.reaction_depth)
    for n in range(2, 65):
        mult = triple("multiply", n)
        checks = {
            "multiply = (n-1) COG + n Toffoli": (mult, combine((n - 1, triple("cog_adder", n)), (n, tof))),
            "square = multiply + 4*2n": (triple("square", n), (mult[0] + 8 * n, mult[1], mult[2])),
            "csquare = multiply + 2n Toffoli": (triple("csquare", n), combine((1, mult), (2 * n, tof))),
            "comparator = 2 OG": (triple("comparator", n), combine((2, triple("og_adder", n)))),
        }
        for p in sorted({1, n // 2, n}):
            fma = triple("fused_multiply_add", n, p=p)
            checks[f"fma = cheap + OG (p={p})"] = (fma, combine((1, triple("cheap_multiply", n, p=p)), (1, triple("og_adder", n))))
            for q in (1, 2, 6):
                checks[f"poly = q fma (p={p}, q={q})"] = (triple("poly", n, p=p, q=q), combine((q, fma)))
        bad += [(name, n) for name, (lhs, rhs) in checks.items() if lhs != rhs]
    record(4, not bad, f"compositions for n=2..64; {len(bad)} failures" + (f": {bad[:3]}" if bad else ""))


# 5 ----------------------------------------------------------- constants

def test_criterion_5_constants():
    volume, saving = costs.cshift_optimized_volume(32, P35)
    unoptimized = formula_cost("cshift1", Sizes(n=32), P35).active_volume
    ex = costs.STRUCTURE_SENSITIVITY_EXAMPLE
    ok = saving == 15 and unoptimized == 1760 and volume == 1745 and (ex["design 1 blocks"], ex["design 2 blocks"]) == (21, 17)
    record(5, ok, f"controlled shift n=32: {unoptimized} -> {volume} (saves {saving}); "
                  f"structure example documented: {ex['design 1 blocks']} vs {ex['design 2 blocks']} blocks")


# 6 ----------------------------------------------------------- label CNOTs

def _greedy_flips(M: int) -> int:
    """Step a counter 0 -> M-1, one CNOT per flipped bit."""
    count, value = 0, 0
    for nxt in range(1, M):
        count += bin(value ^ nxt).count("1")
        value = nxt
    return count


def test_criterion_6_label_cnots():
    bound_bad = [z for z in range(1, 11) if _greedy_flips(2**z) != 2 ** (z + 1) - z - 2 or costs.label_cnot_bound(z) != _greedy_flips(2**z)]
    exact_bad = [M for M in range(2, 65) if costs.label_cnot_exact(M) != _greedy_flips(M)]
    record(6, not bound_bad and not exact_bad,
           f"bound 2^(z+1)-z-2 for z=1..10 ({len(bound_bad)} bad); exact count for M=2..64 ({len(exact_bad)} bad)")


# 7 ------------------------------------------------------------ tables

TABULATED = {
    1: ["8*n**2 + 4*n - 8", "3*n**2 - 2*n", "5*n"],
    2: ["n**2 + 10*n + 8", "n**2/2 + 3*n - 4", "3*n"],
    3: ["36*n**2 + 182*n + 2304", "27*n**2/2 + 76*n + 500", "8*n + 4"],
    4: ["74*n**2 + 168*n + 4", "28*n**2 + 43*n - 35", "11*n + 2"],
}


def test_criterion_7_tables(capsys):
    problems, findings = [], []
    for tid, expected in TABULATED.items():
        assert cli_main(["table", str(tid), "--format", "json"]) == 0
        rec = json.loads(capsys.readouterr().out)
        this = [r for r in rec["rows"] if r["design"] == "optimized"][:3]
        for row, want in zip(this, expected):
            if sympy.simplify(sympy.sympify(row["tabulated"]) - sympy.sympify(want)) != 0:
                problems.append(f"table {tid} {row['column']}: {row['tabulated']} != {want}")
            if row["substituted"] is None:
                problems.append(f"table {tid} {row['column']}: no substitution column")
            elif row["difference"] != "0":
                findings.append(f"T{tid} {row['column']} diff {row['difference']}")
    linear = {f for f in findings if "T count" in f}
    required = {"T3 T count diff 18*n", "T4 T count diff 36*n"}
    if not required <= linear:
        problems.append(f"linear-term findings missing: {required - linear}")
    record(7, not problems, "tabulated columns verbatim; findings: " + "; ".join(findings) + (f"; problems {problems}" if problems else ""))


# 8 ------------------------------------------------------------ error bound

def test_criterion_8_cheap_multiply_error():
    worst, bad = [], []
    for p in range(1, 7):
        r = verify_exhaustive(SubroutineSpec("cheap_multiply", 6, {"p": p}))
        worst.append(r.metrics.get("max_error", 0.0) / r.metrics.get("error_bound", math.inf))
        if not r.passed:
            bad.append(r.summary())
    for p in (2, 5, 8):
        r = verify_sampled(SubroutineSpec("cheap_multiply", 10, {"p": p}), samples=500, seed=0)
        worst.append(r.metrics.get("max_error", 0.0) / r.metrics.get("error_bound", math.inf))
        if not r.passed:
            bad.append(r.summary())
    record(8, not bad, f"n=6 exhaustive (p=1..6) and n=10 sampled (500 each): worst error / bound = {max(worst):.3f}")


# 9 ------------------------------------------------------------ hygiene

def test_criterion_9_hygiene():
    whitelisted, unexplained = [], []
    for sid in LOW_LEVEL + ("sqrt",):
        sub = lookup(sid)
        for n in range(3, 9):
            spec = sub.default_spec(n)
            if spec is None:
                continue
            want = costs.closed_form_cost(spec, P35).peak_qubits
            got = peak_qubits(sub.build(spec))
            if want is not None and got != want:
                (whitelisted if (sid, "peak") in costs.KNOWN_DEVIATIONS else unexplained).append(f"{sid} n={n}: {got} vs {want}")
    garbage = []
    for spec in [SubroutineSpec("sqrt", n) for n in (4, 6, 8)] + [SubroutineSpec("arcsine", n) for n in (6, 8, 10)]:
        r = verify_exhaustive(spec)
        if not r.passed:
            garbage.append(r.summary())
    ok = not unexplained and not garbage
    subjects = sorted({w.split()[0] for w in whitelisted})
    record(9, ok, f"peak scan n=3..8: {len(whitelisted)} whitelisted ({', '.join(subjects)}), {len(unexplained)} unexplained; "
                  f"sqrt/arcsine garbage-free: {not garbage}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
