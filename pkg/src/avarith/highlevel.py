"""High-level circuits composed from the low-level builders: square root,
piecewise polynomial evaluation (label + coefficient loading + Horner),
arcsine and logarithm."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .arith import (
    emit_cas_adder,
    emit_compare,
    emit_controlled_adder,
    emit_cshift1,
    emit_fused_multiply_add,
    emit_cheap_multiply,
    emit_increment,
    emit_k_not,
    emit_og_adder,
    emit_square,
    emit_toffoli_copy,
)
from .circuit import Builder, Circuit, FixedPointFormat
from .reference import PolySpec, log_format


# --------------------------------------------------------------- square root

def emit_sqrt(b: Builder, a: list[int]) -> list[int]:
    """Non-restoring square root: ``a`` becomes the remainder, returns the root register.

    The root register has n qubits; its low n/2 hold the root bits and the
    rest serve as the constant-one, the complement bit and zero padding of
    the subtrahend 4Q+1 / 4Q+3 while the bits are being produced, and are
    returned to zero at the end.
    """
    n = len(a)
    if n % 2 or n < 4:
        raise ValueError("square root needs an even n >= 4")
    m = n // 2
    root = b.alloc(m - 1)
    one = b.alloc1(1)
    comp = b.alloc1()
    zeros = b.alloc(m - 2)

    # top pair: root bit is OR of the pair, partial remainder is pair - 1
    root.append(b.and_(a[n - 1], a[n - 2], (True, True)))
    b.x(root[m - 1])
    b.x(a[n - 2])
    b.cnot(a[n - 2], a[n - 1])

    for k in range(m - 2, -1, -1):
        w = n - 2 * k
        sub = b.alloc1()
        b.cnot(root[k + 1], sub)
        b.cnot(sub, comp, True)
        pool = zeros + root[: k + 1]
        operand = [one, comp] + root[k + 1 :] + pool[: m - k - 1]
        emit_cas_adder(b, sub, operand, a[2 * k :])
        assert len(operand) == w
        b.cnot(a[n - 1], root[k], True)
        b.cnot(sub, comp, True)
        b.cnot(root[k + 1], sub)
        b.free(sub)

    # restore a negative remainder: R += 2Q + 1
    fix = b.alloc1()
    b.cnot(root[0], fix, True)
    operand = [one] + root + (zeros + [comp])[: m - 1]
    emit_controlled_adder(b, fix, operand, a, with_carry=False)
    b.cnot(root[0], fix, True)
    b.free(fix)
    b.x(one)
    return root + [one, comp] + zeros


def build_sqrt(n: int) -> Circuit:
    if n % 2 or n < 4:
        raise ValueError("square root needs an even n >= 4")
    b = Builder()
    a = b.input("a", n)
    b.name("root", emit_sqrt(b, a))
    b.name("remainder", a)
    return b.circuit()


# ------------------------------------------------- piecewise polynomials

def emit_label(b: Builder, x: list[int], label: list[int], boundary_codes: list[int]):
    """label := number of boundaries <= x.

    Because the comparison flags are monotone in the boundary index, when
    flag j fires the label holds exactly j-1, so the increment to j is the
    fixed XOR pattern (j-1) ^ j applied with CNOTs from the flag.
    """
    n = len(x)
    const = b.alloc(n)
    for j, code in enumerate(boundary_codes, start=1):
        diff = [label[i] for i in range(len(label)) if ((j - 1) ^ j) >> i & 1]
        if code == 0:
            for q in diff:
                b.x(q)
            continue
        # the comparator yields [x > c]; with c = boundary - 1 that is [x >= boundary]
        loaded = [const[i] for i in range(n) if (code - 1) >> i & 1]
        for q in loaded:
            b.x(q)

        def copy(carry, diff=diff):
            for q in diff:
                b.cnot(carry, q)

        emit_compare(b, const, x, copy)
        for q in loaded:
            b.x(q)
    b.free(const)


def build_label_circuit(n: int, poly: PolySpec) -> Circuit:
    if poly.segments < 2:
        raise ValueError("label circuit needs at least two subdomains")
    b = Builder()
    x = b.input("x", n, FixedPointFormat(n, poly.p))
    label = b.name("label", b.alloc(poly.label_bits))
    emit_label(b, x, label, poly.boundary_codes)
    return b.circuit()


def emit_next(b: Builder, label: list[int], coeff: list[int], old: list[int] | None, new: list[int]):
    """XOR (old ^ new)[j] into ``coeff`` for the subdomain j selected by ``label``.

    One k-controlled NOT computes the selector into a flag, CNOTs fan it out,
    a second k-controlled NOT clears it.
    """
    z = len(label)
    for j, word in enumerate(new):
        diff = word ^ (old[j] if old is not None else 0)
        targets = [coeff[i] for i in range(len(coeff)) if diff >> i & 1]
        if not targets:
            continue
        neg = [not (j >> i & 1) for i in range(z)]
        if z == 0:
            for q in targets:
                b.x(q)
        elif z == 1:
            for q in targets:
                b.cnot(label[0], q, neg[0])
        else:
            flag = b.alloc1()
            emit_k_not(b, label, flag, neg)
            for q in targets:
                b.cnot(flag, q)
            emit_k_not(b, label, flag, neg)
            b.free(flag)


def coefficient_words(poly: PolySpec, step: int) -> list[int]:
    """Words loaded by step ``step``: a_q at step 0, a_{q-step} afterwards."""
    return [row[poly.degree - step] for row in poly.words]


def build_next(poly: PolySpec, step: int) -> Circuit:
    if not 0 <= step <= poly.degree:
        raise ValueError("step must lie in 0..degree")
    b = Builder()
    label = b.input("label", poly.label_bits) if poly.label_bits else []
    fmt = FixedPointFormat(poly.n, poly.p)
    coeff = b.input("coeff", poly.n, fmt)
    old = coefficient_words(poly, step - 1) if step else None
    emit_next(b, label, coeff, old, coefficient_words(poly, step))
    return b.circuit()


@dataclass
class PPERegisters:
    label: list[int]
    coeff: list[int]
    accumulators: list[list[int]]
    overflow: list[list[int]]

    @property
    def result(self) -> list[int]:
        return self.accumulators[-1]


def emit_ppe(b: Builder, x: list[int], poly: PolySpec) -> PPERegisters:
    n = len(x)
    label = b.alloc(poly.label_bits)
    if poly.segments > 1:
        emit_label(b, x, label, poly.boundary_codes)
    coeff = b.alloc(n)
    emit_next(b, label, coeff, None, coefficient_words(poly, 0))
    accs, ovfs = [], []
    prev = coeff
    for step in range(1, poly.degree + 1):
        acc = b.alloc(n)
        ovf = emit_cheap_multiply(b, x, prev, acc, poly.p)
        emit_next(b, label, coeff, coefficient_words(poly, step - 1), coefficient_words(poly, step))
        ovf.append(emit_og_adder(b, coeff, acc))
        accs.append(acc)
        ovfs.append(ovf)
        prev = acc
    return PPERegisters(label, coeff, accs, ovfs)


def build_ppe(n: int, p: int, poly: PolySpec) -> Circuit:
    if (poly.n, poly.p) != (n, p):
        raise ValueError("polynomial words must be in the circuit's (n, p) format")
    b = Builder()
    fmt = FixedPointFormat(n, p)
    x = b.input("x", n, fmt)
    regs = emit_ppe(b, x, poly)
    if regs.label:
        b.name("label", regs.label)
    b.name("coeff", regs.coeff, fmt)
    for i, (acc, ovf) in enumerate(zip(regs.accumulators, regs.overflow), start=1):
        b.name(f"acc{i}", acc, fmt)
        b.name(f"overflow{i}", ovf)
    b.name("result", regs.result, fmt)
    return b.circuit()


# ------------------------------------------------------------------ arcsine

def arcsine_format(n: int) -> FixedPointFormat:
    return FixedPointFormat(n, 2, signed=True)


def build_arcsine(n: int, poly: PolySpec) -> Circuit:
    """|x> -> |x>|arcsin x> for x in [-1, 1], n-bit two's complement with n-2 fractional bits.

    |x| < 1/2 evaluates the polynomial at |x|; otherwise it uses
    arcsin x = pi/2 - 2 arcsin sqrt((1 - x)/2).  The square root runs on
    2(n-2) bits so that the root keeps all n-2 fractional bits.
    """
    if n < 5:
        raise ValueError("arcsine needs n >= 5")
    if (poly.n, poly.p) != (n, 2):
        raise ValueError("arcsine polynomial must use the (n, 2) format")
    f = n - 2
    b = Builder()
    fmt = arcsine_format(n)
    x = b.input("x", n, fmt)
    out = b.name("result", b.alloc(n), fmt)

    # absolute value
    sign = b.alloc1()
    b.cnot(x[n - 1], sign)
    for q in x:
        b.cnot(sign, q)
    emit_increment(b, x, sign)

    start = b.mark()
    small = b.and_(x[n - 2], x[n - 3], (True, True))
    work = b.alloc(2 * f)
    one = b.alloc1(1)
    b.x(work[2 * f - 1])
    emit_cas_adder(b, one, x[: f + 1], work[f - 1 :])
    b.free(one, expect=1)
    root = emit_sqrt(b, work)

    select = b.mark()
    pin = [b.and_(root[j], small, (False, True)) for j in range(n)]
    emit_toffoli_copy(b, small, x, pin)

    poly_start = b.mark()
    regs = emit_ppe(b, pin, poly)
    shift_start = b.mark()
    emit_cshift1(b, small, regs.result, "left", ctrl_neg=True)
    shift_stop = b.mark()

    half_pi = round(math.pi / 2 * (1 << f))
    for j in range(n):
        if half_pi >> j & 1:
            b.cnot(small, out[j], True)
    emit_cas_adder(b, small, regs.result, out, ctrl_neg=True)

    b.undo(shift_start, shift_stop)
    b.undo(poly_start, shift_start)
    b.undo(select, poly_start)
    b.undo(start, select)

    # restore the sign of x and apply it to the result
    for q in x:
        b.cnot(sign, q)
    emit_increment(b, x, sign)
    for q in out:
        b.cnot(sign, q)
    emit_increment(b, out, sign)
    b.cnot(x[n - 1], sign)
    b.free(sign)
    return b.circuit()


# ---------------------------------------------------------------------- log

@dataclass(frozen=True)
class LogSpec:
    h: int = 1
    v: int = 0
    direction: int = 0  # 1: subtract v

    def __post_init__(self):
        if self.h < 1 or self.v < 0 or self.direction not in (0, 1):
            raise ValueError("log needs h >= 1, v >= 0 and direction in {0, 1}")

    @property
    def k(self) -> int:
        return (self.h + 1) // 2

    @property
    def beta(self) -> int:
        return self.k + (self.h + 1) % 2

    @property
    def alpha(self) -> int:
        return (self.h + 1).bit_length()


def build_log(n: int, spec: LogSpec = LogSpec(), iterations: int | None = None) -> Circuit:
    """Digit-by-digit log base 2^(h+1), rescaled by h+1 and shifted by v.

    Working registers hold a_i in [1, 2^(h+1)); digit d_{i+1} = [a_i^2 >= 2^(h+1)]
    and a_{i+1} = a_i^2 / 2^((h+1) d).
    """
    ib, f = log_format(n, spec.h)
    iters = n - 1 if iterations is None else iterations
    even = (spec.h + 1) % 2 == 0
    fmt = FixedPointFormat(n, ib)
    b = Builder()
    t = b.input("a", n, fmt)
    digits = []
    for i in range(iters):
        nxt = b.alloc(n)
        if not even:
            d = b.alloc1()
        if even:
            d = _emit_or(b, t[n - spec.k :])
            digits.append(d)
        pre = b.mark()
        if even:
            for _ in range(spec.k):
                emit_cshift1(b, d, t, "right")
        sq_start = b.mark()
        sq = b.alloc(2 * n)
        emit_square(b, t, sq)
        or_start = or_stop = b.mark()
        if not even:
            # the OR ancillas read sq, so the digit is a copy that outlives them
            tmp = _emit_or(b, sq[2 * f + spec.h + 1 :])
            or_stop = b.mark()
            b.cnot(tmp, d)
            digits.append(d)
        sh_start = b.mark()
        if not even:
            for _ in range(spec.h + 1):
                emit_cshift1(b, d, sq, "right")
        sh_stop = b.mark()
        for j in range(n):
            b.cnot(sq[f + j], nxt[j])
        b.undo(sh_start, sh_stop)
        b.undo(or_start, or_stop)
        b.undo(sq_start, or_start)
        b.undo(pre, sq_start)
        b.name(f"t{i + 1}", nxt, fmt)
        t = nxt
    if not digits:
        return b.circuit()
    bits = digits[::-1]
    m = len(bits)
    if spec.h == 1:
        result, fb = bits, m - 1
    else:
        factor = b.alloc(spec.alpha, spec.h + 1)
        result = b.alloc(m + spec.alpha)
        emit_toffoli_copy(b, factor[0], bits, result[:m])
        for i in range(1, spec.alpha):
            emit_cog_adder_window(b, factor[i], bits, result, i, m)
        for i in range(spec.alpha):
            if (spec.h + 1) >> i & 1:
                b.x(factor[i])
        b.free(factor)
        fb = m
    b.name("digits", bits, FixedPointFormat(m, 0))
    if spec.v:
        extra = b.alloc(spec.v.bit_length() + 2)
        result = list(result) + extra
        width = len(result)
        vcode = spec.v << fb
        vreg = b.alloc(width, vcode)
        direction = b.alloc1(spec.direction)
        emit_cas_adder(b, direction, vreg, result)
        b.free(direction, expect=spec.direction)
        for i in range(width):
            if vcode >> i & 1:
                b.x(vreg[i])
        b.free(vreg)
    b.name("result", result, FixedPointFormat(len(result), len(result) - fb, signed=bool(spec.v)))
    return b.circuit()


def emit_cog_adder_window(b: Builder, ctrl: int, a: list[int], result: list[int], shift: int, width: int):
    from .arith import emit_cog_adder

    emit_cog_adder(b, ctrl, a, result[shift : shift + width], carry=result[shift + width])


def _emit_or(b: Builder, bits: list[int]) -> int:
    """Fresh qubit holding the OR of ``bits`` (a copy when there is one bit)."""
    if len(bits) == 1:
        d = b.alloc1()
        b.cnot(bits[0], d)
        return d
    if len(bits) == 2:
        d = b.and_(bits[0], bits[1], (True, True))
    else:
        d = b.alloc1()
        emit_k_not(b, bits, d, [True] * len(bits))
    b.x(d)
    return d
