import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from avarith import arith
from avarith.circuit import gate_census, peak_qubits, validate

from .helpers import run_batch, run_one


def grid(*widths):
    """All combinations of values for registers of the given widths, as columns."""
    rows = list(itertools.product(*(range(1 << w) for w in widths)))
    return [list(col) for col in zip(*rows)]


def check_all(circuit, names, widths, expect):
    cols = grid(*widths)
    outs, _, garbage = run_batch(circuit, **dict(zip(names, cols)))
    assert garbage == 0
    assert validate(circuit) == []
    for j, row in enumerate(zip(*cols)):
        inp = dict(zip(names, row))
        for reg, value in expect(**inp).items():
            assert outs[reg][j] == value, (inp, reg)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_increment(n):
    check_all(arith.build_increment(n), ["x"], [n], lambda x: {"x": (x + 1) % 2**n})


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_cincrement(n):
    check_all(arith.build_cincrement(n), ["ctrl", "x"], [1, n], lambda ctrl, x: {"x": (x + ctrl) % 2**n, "ctrl": ctrl})


@pytest.mark.parametrize("n", [1, 2, 4])
@pytest.mark.parametrize("direction", ["left", "right"])
def test_cshift1(n, direction):
    def expect(ctrl, x):
        if not ctrl:
            return {"x": x, "spill": 0}
        if direction == "left":
            return {"x": (2 * x) % 2**n, "spill": x >> (n - 1)}
        return {"x": x // 2, "spill": x % 2}

    check_all(arith.build_cshift1(n, direction), ["ctrl", "x"], [1, n], expect)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_k_not(k):
    check_all(arith.build_k_not(k), ["controls", "target"], [k, 1],
              lambda controls, target: {"controls": controls, "target": target ^ (controls == 2**k - 1)})


@pytest.mark.parametrize("n", [1, 3])
def test_toffoli_copy(n):
    check_all(arith.build_toffoli_copy(n), ["ctrl", "a"], [1, n], lambda ctrl, a: {"target": a * ctrl, "a": a})


@pytest.mark.parametrize("n", [2, 3, 4])
def test_og_adder(n):
    check_all(arith.build_og_adder(n), ["a", "b"], [n, n],
              lambda a, b: {"a": a, "b": (a + b) % 2**n, "carry": (a + b) >> n})


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("flip", [False, True])
def test_cas_adder(n, flip):
    check_all(arith.build_cas_adder(n, flip_sum=flip), ["ctrl", "a", "b"], [1, n, n],
              lambda ctrl, a, b: {"a": a, "ctrl": ctrl, "b": (b - a if ctrl else b + a) % 2**n})


@pytest.mark.parametrize("n", [2, 3, 4])
def test_cog_adder(n):
    def expect(ctrl, a, b):
        s = b + a * ctrl
        return {"a": a, "b": s % 2**n, "carry": s >> n}

    check_all(arith.build_cog_adder(n), ["ctrl", "a", "b"], [1, n, n], expect)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_comparator(n):
    check_all(arith.build_comparator(n), ["x", "y"], [n, n], lambda x, y: {"x": x, "y": y, "flag": int(y > x)})


@pytest.mark.parametrize("n", [2, 3])
def test_multiply(n):
    check_all(arith.build_multiply(n), ["a", "b"], [n, n], lambda a, b: {"a": a, "b": b, "result": a * b})


@pytest.mark.parametrize("n", [2, 3, 4])
def test_square_and_csquare(n):
    check_all(arith.build_square(n), ["a"], [n], lambda a: {"a": a, "result": a * a})
    check_all(arith.build_csquare(n), ["ctrl", "a"], [1, n], lambda ctrl, a: {"a": a, "result": a * a * ctrl})


def truncated_product(x, y, n, p):
    """Independent model: exact product minus the dropped partial-product bits,
    with bits above the register width discarded."""
    f = n - p
    acc = 0
    for i in range(n):
        if x >> i & 1:
            # partial product y * 2^(i-f), truncated to the register's grid
            acc += (y << i) >> f
    return acc % 2**n


@pytest.mark.parametrize("n,p", [(4, 1), (4, 2), (5, 3), (5, 5)])
def test_cheap_multiply_matches_truncated_model(n, p):
    c = arith.build_cheap_multiply(n, p)
    check_all(c, ["a", "b"], [n, n], lambda a, b: {"a": a, "b": b, "result": truncated_product(a, b, n, p)})


@pytest.mark.parametrize("n,p", [(4, 2), (6, 3)])
def test_cheap_multiply_error_bound_exhaustive(n, p):
    f = n - p
    cols = grid(n, n)
    outs, _, _ = run_batch(arith.build_cheap_multiply(n, p), a=cols[0], b=cols[1])
    for a, b, r in zip(cols[0], cols[1], outs["result"]):
        exact = a * b / 2 ** (2 * f)
        if exact < 2**p:
            assert abs(r / 2**f - exact) <= n / 2 ** (n - p)


@pytest.mark.parametrize("n,p", [(4, 2), (4, 1)])
def test_fused_multiply_add(n, p):
    check_all(arith.build_fused_multiply_add(n, p), ["a", "b", "c"], [n, n, n],
              lambda a, b, c: {"result": (truncated_product(a, b, n, p) + c) % 2**n, "c": c})


@given(st.integers(5, 12), st.data())
def test_adders_random_wide(n, data):
    a = data.draw(st.integers(0, 2**n - 1))
    b = data.draw(st.integers(0, 2**n - 1))
    ctrl = data.draw(st.integers(0, 1))
    assert run_one(arith.build_og_adder(n), a=a, b=b)["b"] == (a + b) % 2**n
    assert run_one(arith.build_cas_adder(n), ctrl=ctrl, a=a, b=b)["b"] == (b - a if ctrl else b + a) % 2**n
    out = run_one(arith.build_cog_adder(n), ctrl=ctrl, a=a, b=b)
    assert out["b"] + (out["carry"] << n) == b + ctrl * a
    assert run_one(arith.build_comparator(n), x=a, y=b)["flag"] == int(b > a)


@given(st.integers(4, 10), st.data())
def test_multipliers_random_wide(n, data):
    a = data.draw(st.integers(0, 2**n - 1))
    b = data.draw(st.integers(0, 2**n - 1))
    assert run_one(arith.build_multiply(n), a=a, b=b)["result"] == a * b
    assert run_one(arith.build_square(n), a=a)["result"] == a * a


# Gate counts and qubit peaks of the builders, as closed forms in n.
T_COUNTS = {
    "increment": lambda n: 4 * n - 8,
    "cincrement": lambda n: 4 * n - 4,
    "cshift1": lambda n: 4 * n,
    "og_adder": lambda n: 4 * n,
    "cas_adder": lambda n: 4 * n - 4,
    "cog_adder": lambda n: 8 * n + 8,
    "comparator": lambda n: 8 * n,
    "multiply": lambda n: 8 * n * n + 4 * n - 8,
    "square": lambda n: 8 * n * n + 4 * n - 8,
    "csquare": lambda n: 8 * n * n + 12 * n - 8,
}
PEAKS = {
    "increment": lambda n: 2 * n - 1,
    "cincrement": lambda n: 2 * n,
    "cshift1": lambda n: n + 2,
    "og_adder": lambda n: 3 * n,
    "cas_adder": lambda n: 3 * n,
    "cog_adder": lambda n: 3 * n + 1,
    "comparator": lambda n: 3 * n + 1,
    "multiply": lambda n: 5 * n - 1,
    "square": lambda n: 4 * n,
    "csquare": lambda n: 4 * n + 1,
}


@pytest.mark.parametrize("name", sorted(T_COUNTS))
@pytest.mark.parametrize("n", [3, 6, 9])
def test_census_and_peak(name, n):
    c = getattr(arith, f"build_{name}")(n)
    assert gate_census(c).t_count == T_COUNTS[name](n)
    assert peak_qubits(c) == PEAKS[name](n)


@pytest.mark.parametrize("k", [2, 3, 7])
def test_k_not_counts(k):
    c = arith.build_k_not(k)
    assert gate_census(c).t_count == 4 * k - 4
    assert peak_qubits(c) == 2 * k


@pytest.mark.parametrize("builder,n", [(arith.build_increment, 1), (arith.build_cincrement, 1), (arith.build_cas_adder, 1)])
def test_too_small_sizes_rejected(builder, n):
    with pytest.raises(ValueError):
        builder(n)
