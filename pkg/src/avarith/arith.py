"""Low-level arithmetic builders.

Every ``emit_*`` function appends gates to a :class:`~avarith.circuit.Builder`
and works on caller-supplied qubit lists (index 0 = least significant bit),
so the high-level circuits can reuse them on sub-windows of larger
registers.  The ``build_*`` functions wrap one ``emit_*`` call into a
stand-alone :class:`~avarith.circuit.Circuit` with named registers.
"""

from __future__ import annotations

from typing import Sequence

from .circuit import Builder, Circuit, FixedPointFormat

Qubits = Sequence[int]


def _need(cond: bool, msg: str):
    if not cond:
        raise ValueError(msg)


# ---------------------------------------------------------------- increments

def emit_increment(b: Builder, x: Qubits, ctrl: int | None = None, ctrl_neg: bool = False):
    """x += 1 (mod 2^n), optionally only when ``ctrl`` is set.

    The carry chain c_i = x_0 & ... & x_{i-1} is held in temporary ANDs; the
    uncontrolled variant seeds it with a CNOT copy of x_0.
    """
    n = len(x)
    if n == 1:
        if ctrl is None:
            b.x(x[0])
        else:
            b.cnot(ctrl, x[0], ctrl_neg)
        return
    if ctrl is None:
        c1 = b.alloc1()
        b.cnot(x[0], c1)
    else:
        c1 = b.and_(ctrl, x[0], (ctrl_neg, False))
    c = [None, c1]
    for i in range(1, n - 1):
        c.append(b.and_(c[i], x[i]))
    b.cnot(c[n - 1], x[n - 1])
    for i in range(n - 2, 0, -1):
        b.unand(c[i], x[i], c[i + 1])
        b.cnot(c[i], x[i])
    if ctrl is None:
        b.cnot(x[0], c1)
        b.free(c1)
        b.x(x[0])
    else:
        b.unand(ctrl, x[0], c1, (ctrl_neg, False))
        b.cnot(ctrl, x[0], ctrl_neg)


def build_increment(n: int) -> Circuit:
    _need(n >= 2, "increment needs n >= 2")
    b = Builder()
    x = b.input("x", n)
    emit_increment(b, x)
    return b.circuit()


def build_cincrement(n: int) -> Circuit:
    _need(n >= 2, "controlled increment needs n >= 2")
    b = Builder()
    ctrl = b.input("ctrl", 1)[0]
    x = b.input("x", n)
    emit_increment(b, x, ctrl)
    return b.circuit()


# ------------------------------------------------------------ shift and copy

def emit_cswap(b: Builder, ctrl: int, u: int, v: int, ctrl_neg: bool = False):
    b.cnot(v, u)
    b.toffoli(ctrl, u, v, (ctrl_neg, False))
    b.cnot(v, u)


def emit_cshift1(b: Builder, ctrl: int, x: Qubits, direction: str = "left", ctrl_neg: bool = False, spill: int | None = None) -> int:
    """Controlled shift by one place using n controlled SWAPs.

    The bit shifted out lands in ``spill`` (a fresh zero qubit unless given),
    which keeps the operation reversible.
    """
    _need(direction in ("left", "right"), "direction must be 'left' or 'right'")
    z = b.alloc1() if spill is None else spill
    chain = list(reversed(x)) if direction == "left" else list(x)
    chain.append(z)
    for u, v in zip(chain, chain[1:]):
        emit_cswap(b, ctrl, u, v, ctrl_neg)
    return z


def build_cshift1(n: int, direction: str = "left") -> Circuit:
    _need(n >= 1, "shift needs n >= 1")
    b = Builder()
    ctrl = b.input("ctrl", 1)[0]
    x = b.input("x", n)
    z = emit_cshift1(b, ctrl, x, direction)
    b.name("spill", [z])
    return b.circuit()


def emit_toffoli_copy(b: Builder, ctrl: int, a: Qubits, target: Qubits, ctrl_neg: bool = False):
    for ai, ti in zip(a, target, strict=True):
        b.toffoli(ctrl, ai, ti, (ctrl_neg, False))


def build_toffoli_copy(n: int) -> Circuit:
    b = Builder()
    ctrl = b.input("ctrl", 1)[0]
    a = b.input("a", n)
    t = b.name("target", b.alloc(n))
    emit_toffoli_copy(b, ctrl, a, t)
    return b.circuit()


def emit_k_not(b: Builder, controls: Qubits, target: int, negated: Sequence[bool] | None = None):
    """Flip ``target`` iff every control matches (k-1 temporary ANDs)."""
    k = len(controls)
    neg = list(negated) if negated is not None else [False] * k
    if k == 1:
        b.cnot(controls[0], target, neg[0])
        return
    chain = [b.and_(controls[0], controls[1], (neg[0], neg[1]))]
    for i in range(2, k):
        chain.append(b.and_(chain[-1], controls[i], (False, neg[i])))
    b.cnot(chain[-1], target)
    for i in range(k - 1, 1, -1):
        b.unand(chain[i - 2], controls[i], chain[i - 1], (False, neg[i]))
    b.unand(controls[0], controls[1], chain[0], (neg[0], neg[1]))


def build_k_not(k: int) -> Circuit:
    _need(k >= 2, "k-controlled NOT needs k >= 2")
    b = Builder()
    c = b.input("controls", k)
    t = b.input("target", 1)[0]
    emit_k_not(b, c, t)
    return b.circuit()


# -------------------------------------------------------------------- adders

def emit_og_adder(b: Builder, a: Qubits, s: Qubits, carry: int | None = None) -> int:
    """s += a with the (n+1)-th sum bit written to ``carry``.

    Ripple of temporary ANDs; the top carry is a Toffoli into a dedicated
    qubit so that it survives the uncompute sweep.
    """
    n = len(a)
    _need(len(s) == n, "adder operands must have equal width")
    out = b.alloc1() if carry is None else carry
    c: list[int | None] = [None] * (n + 1)
    for i in range(n):
        if i:
            b.cnot(c[i], a[i])
            b.cnot(c[i], s[i])
        if i == n - 1:
            c[n] = out
            b.toffoli(a[i], s[i], out)
        else:
            c[i + 1] = b.and_(a[i], s[i])
        if i:
            b.cnot(c[i], c[i + 1])
    for i in range(n - 1, -1, -1):
        if i < n - 1:
            if i:
                b.cnot(c[i], c[i + 1])
            b.unand(a[i], s[i], c[i + 1])
        if i:
            b.cnot(c[i], a[i])
        b.cnot(a[i], s[i])
    return out


def build_og_adder(n: int) -> Circuit:
    _need(n >= 1, "adder needs n >= 1")
    b = Builder()
    a = b.input("a", n)
    s = b.input("b", n)
    b.name("carry", [emit_og_adder(b, a, s)])
    return b.circuit()


def _modular_add(b: Builder, a: Qubits, s: Qubits, cin: int | None, cin_neg: bool = False):
    """s += a (+ cin) mod 2^n, no carry-out; n-1 temporary ANDs."""
    n = len(a)
    if n == 1:
        b.cnot(a[0], s[0])
        if cin is not None:
            b.cnot(cin, s[0], cin_neg)
        return
    c: list[int | None] = [cin] + [None] * (n - 1)
    for i in range(n - 1):
        if c[i] is not None:
            neg = cin_neg and i == 0
            b.cnot(c[i], a[i], neg)
            b.cnot(c[i], s[i], neg)
        c[i + 1] = b.and_(a[i], s[i])
        if c[i] is not None:
            b.cnot(c[i], c[i + 1], cin_neg and i == 0)
    b.cnot(a[n - 1], s[n - 1])
    b.cnot(c[n - 1], s[n - 1])
    for i in range(n - 2, -1, -1):
        neg = cin_neg and i == 0
        if c[i] is not None:
            b.cnot(c[i], c[i + 1], neg)
        b.unand(a[i], s[i], c[i + 1])
        if c[i] is not None:
            b.cnot(c[i], a[i], neg)
        b.cnot(a[i], s[i])


def emit_cas_adder(b: Builder, ctrl: int, a: Qubits, s: Qubits, ctrl_neg: bool = False, flip_sum: bool = False):
    """s += a when the control is off, s -= a when it is on (mod 2^n).

    Default wiring complements ``a`` under the control and feeds the control
    in as the carry: s + (a ^ ctrl) + ctrl.  With ``flip_sum`` the sum
    register is complemented instead: ~(~s + a) = s - a, needing no carry-in.
    """
    _need(len(a) == len(s), "adder operands must have equal width")
    if flip_sum:
        for q in s:
            b.cnot(ctrl, q, ctrl_neg)
        _modular_add(b, a, s, None)
        for q in s:
            b.cnot(ctrl, q, ctrl_neg)
        return
    for q in a:
        b.cnot(ctrl, q, ctrl_neg)
    _modular_add(b, a, s, ctrl, ctrl_neg)
    for q in a:
        b.cnot(ctrl, q, ctrl_neg)


def build_cas_adder(n: int, flip_sum: bool = False) -> Circuit:
    _need(n >= 2, "CAS adder needs n >= 2")
    b = Builder()
    ctrl = b.input("ctrl", 1)[0]
    a = b.input("a", n)
    s = b.input("b", n)
    emit_cas_adder(b, ctrl, a, s, flip_sum=flip_sum)
    return b.circuit()


def emit_controlled_adder(b: Builder, ctrl: int, a: Qubits, s: Qubits, carry: int | None = None, with_carry: bool = True, ctrl_neg: bool = False) -> int | None:
    """s += a when ``ctrl`` is set; optional carry-out (controlled Gidney adder).

    Low bits ripple through temporary ANDs of (a, s); the top bit computes the
    majority in place with two Toffolis, copies it out under the control and
    restores.  Each sum bit is then written by a Toffoli on the way down.
    """
    n = len(a)
    _need(len(s) == n, "adder operands must have equal width")
    neg = (ctrl_neg, False)
    c: list[int | None] = [None] * n
    for i in range(n - 1):
        if i:
            b.cnot(c[i], a[i])
            b.cnot(c[i], s[i])
        c[i + 1] = b.and_(a[i], s[i])
        if i:
            b.cnot(c[i], c[i + 1])
    top_a, top_s = a[n - 1], s[n - 1]
    spare = None
    if n == 1:
        spare = b.alloc1()
        c[0] = spare
    cc = c[n - 1]
    out = None
    if with_carry:
        b.cnot(top_a, top_s)
        b.cnot(top_a, cc)
        b.toffoli(cc, top_s, top_a)
        out = b.alloc1() if carry is None else carry
        b.toffoli(ctrl, top_a, out, neg)
        b.toffoli(cc, top_s, top_a)
        b.cnot(top_a, cc)
        b.cnot(top_a, top_s)
    b.cnot(cc, top_a)
    b.toffoli(ctrl, top_a, top_s, neg)
    b.cnot(cc, top_a)
    if spare is not None:
        b.free(spare)
    for i in range(n - 2, -1, -1):
        if i:
            b.cnot(c[i], c[i + 1])
        b.unand(a[i], s[i], c[i + 1])
        b.toffoli(ctrl, a[i], s[i], neg)
        if i:
            b.cnot(c[i], s[i])
            b.cnot(c[i], a[i])
    return out


def emit_cog_adder(b: Builder, ctrl: int, a: Qubits, s: Qubits, carry: int | None = None, ctrl_neg: bool = False) -> int:
    return emit_controlled_adder(b, ctrl, a, s, carry, True, ctrl_neg)


def build_cog_adder(n: int) -> Circuit:
    _need(n >= 1, "COG adder needs n >= 1")
    b = Builder()
    ctrl = b.input("ctrl", 1)[0]
    a = b.input("a", n)
    s = b.input("b", n)
    b.name("carry", [emit_cog_adder(b, ctrl, a, s)])
    return b.circuit()


# ---------------------------------------------------------------- comparator

def emit_compare(b: Builder, x: Qubits, y: Qubits, on_flag):
    """Compute [y > x] as the carry of ~x + y, hand it to ``on_flag``, uncompute.

    ``on_flag(carry)`` must leave the carry qubit unchanged.
    """
    for q in x:
        b.x(q)
    m = b.mark()
    carry = emit_og_adder(b, x, y)
    stop = b.mark()
    on_flag(carry)
    b.undo(m, stop)
    for q in x:
        b.x(q)


def build_comparator(n: int) -> Circuit:
    _need(n >= 1, "comparator needs n >= 1")
    b = Builder()
    x = b.input("x", n)
    y = b.input("y", n)
    flag = b.alloc1()
    emit_compare(b, x, y, lambda c: b.cnot(c, flag))
    b.name("flag", [flag])
    return b.circuit()


# ----------------------------------------------------------- multiplication

def emit_multiply(b: Builder, x: Qubits, y: Qubits, out: Qubits):
    """out (2n zero bits) := x * y; Toffoli array then n-1 COG adders."""
    n = len(x)
    emit_toffoli_copy(b, x[0], y, out[:n])
    for i in range(1, n):
        emit_cog_adder(b, x[i], y, out[i : i + n], carry=out[i + n])


def build_multiply(n: int) -> Circuit:
    _need(n >= 1, "multiply needs n >= 1")
    b = Builder()
    x = b.input("a", n)
    y = b.input("b", n)
    out = b.name("result", b.alloc(2 * n))
    emit_multiply(b, x, y, out)
    return b.circuit()


def emit_square(b: Builder, x: Qubits, out: Qubits, ctrl: int | None = None, ctrl_neg: bool = False):
    """out (2n zero bits) := x^2 (times ``ctrl`` when given).

    Each partial product needs x_i as a control distinct from the operand,
    so x_i is copied into one reusable ancilla (CNOT, or Toffoli when
    controlled) before its addition and uncopied after.
    """
    n = len(x)
    anc = b.alloc1()

    def load(i):
        if ctrl is None:
            b.cnot(x[i], anc)
        else:
            b.toffoli(ctrl, x[i], anc, (ctrl_neg, False))

    for i in range(n):
        load(i)
        if i == 0:
            emit_toffoli_copy(b, anc, x, out[:n])
        else:
            emit_cog_adder(b, anc, x, out[i : i + n], carry=out[i + n])
        load(i)
    b.free(anc)


def build_square(n: int) -> Circuit:
    _need(n >= 1, "square needs n >= 1")
    b = Builder()
    x = b.input("a", n)
    out = b.name("result", b.alloc(2 * n))
    emit_square(b, x, out)
    return b.circuit()


def build_csquare(n: int) -> Circuit:
    _need(n >= 1, "square needs n >= 1")
    b = Builder()
    ctrl = b.input("ctrl", 1)[0]
    x = b.input("a", n)
    out = b.name("result", b.alloc(2 * n))
    emit_square(b, x, out, ctrl)
    return b.circuit()


# ------------------------------------------------------ fixed-point products

def emit_cheap_multiply(b: Builder, x: Qubits, y: Qubits, out: Qubits, p: int) -> list[int]:
    """out (n zero bits) := x * y truncated to format (n, p).

    With f = n - p fractional bits, bit i of x contributes y * 2^(i - f).
    For i < f that is y >> (f - i): only its top n - (f - i) bits survive,
    added into the bottom of ``out``; the running sum always fits, so the
    carry lands in the next (still zero) bit of ``out``.  For i >= f the
    term is y << (i - f): a width n - (i - f) addition into the top window,
    whose carry is an overflow bit (zero whenever the product is
    representable).  Returns the overflow qubits.
    """
    n = len(x)
    _need(1 <= p <= n and len(y) == n == len(out), "cheap multiply needs 1 <= p <= n and equal widths")
    f = n - p
    overflow = []
    for i in range(n):
        if i < f:
            d = f - i
            w = n - d
            emit_cog_adder(b, x[i], y[d:], out[:w], carry=out[w])
        else:
            s = i - f
            overflow.append(emit_cog_adder(b, x[i], y[: n - s], out[s:]))
    return overflow


def _fixed_inputs(b: Builder, n: int, p: int):
    fmt = FixedPointFormat(n, p)
    return b.input("a", n, fmt), b.input("b", n, fmt), fmt


def build_cheap_multiply(n: int, p: int) -> Circuit:
    b = Builder()
    x, y, fmt = _fixed_inputs(b, n, p)
    out = b.name("result", b.alloc(n), fmt)
    b.name("overflow", emit_cheap_multiply(b, x, y, out, p))
    return b.circuit()


def emit_fused_multiply_add(b: Builder, x: Qubits, y: Qubits, addend: Qubits, out: Qubits, p: int) -> list[int]:
    overflow = emit_cheap_multiply(b, x, y, out, p)
    overflow.append(emit_og_adder(b, addend, out))
    return overflow


def build_fused_multiply_add(n: int, p: int) -> Circuit:
    b = Builder()
    x, y, fmt = _fixed_inputs(b, n, p)
    c = b.input("c", n, fmt)
    out = b.name("result", b.alloc(n), fmt)
    b.name("overflow", emit_fused_multiply_add(b, x, y, c, out, p))
    return b.circuit()
