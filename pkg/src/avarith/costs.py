"""Active-volume, T-count and reaction-depth cost model.

Volumes are kept as ``base + coeff * C`` where C is the distillation cost of
one CCZ state, so every figure can be re-evaluated for a different C.  The
closed forms below reproduce the printed expressions term for term, even the
ones that disagree with their own derivations; the disagreements are
collected by :func:`formula_discrepancies` instead of being patched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import sympy

from .circuit import Circuit, GateKind, peak_qubits

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)

C_SYMBOL = sympy.Symbol("C")


@dataclass(frozen=True)
class CostParams:
    c_ccz: int = 35

    def __post_init__(self):
        if self.c_ccz <= 0:
            raise ValueError("c_ccz must be positive")


@dataclass(frozen=True)
class Volume:
    """Active volume ``base + c * C``.  Coefficients may be numbers or sympy
    expressions in the size parameters."""

    base: object = 0
    c: object = 0

    def __add__(self, other):
        other = _as_volume(other)
        return Volume(self.base + other.base, self.c + other.c)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_volume(other)
        return Volume(self.base - other.base, self.c - other.c)

    def __rsub__(self, other):
        return _as_volume(other) - self

    def __neg__(self):
        return Volume(-self.base, -self.c)

    def __mul__(self, k):
        if isinstance(k, Volume):
            raise TypeError("volumes are linear in C; multiply by a scalar")
        return Volume(self.base * k, self.c * k)

    __rmul__ = __mul__

    def evaluate(self, c_ccz: int | float = 35):
        value = self.base + self.c * c_ccz
        return _tidy(value)

    def expr(self) -> sympy.Expr:
        return sympy.expand(_exact(self.base) + _exact(self.c) * C_SYMBOL)

    def simplify(self) -> Volume:
        return Volume(_tidy(sympy.expand(_exact(self.base))), _tidy(sympy.expand(_exact(self.c))))

    def __str__(self):
        return str(self.expr())


def _exact(x) -> sympy.Expr:
    """Exact sympy value; Fractions map to Rationals (never via floats)."""
    if isinstance(x, Fraction):
        return sympy.Rational(x.numerator, x.denominator)
    return sympy.sympify(x)


def _as_volume(x) -> Volume:
    return x if isinstance(x, Volume) else Volume(x, 0)


def _tidy(x):
    """Collapse integral Fractions / sympy numbers to int."""
    if isinstance(x, sympy.Basic):
        if x.is_Integer:
            return int(x)
        if x.is_Rational:
            return Fraction(int(x.p), int(x.q))
        return x
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


@dataclass(frozen=True)
class CostReport:
    volume: Volume
    t_count: object
    reaction_depth: object
    peak_qubits: object = None
    c_ccz: int = 35

    @property
    def active_volume(self):
        return self.volume.evaluate(self.c_ccz)

    def components(self) -> tuple:
        return (_tidy(self.volume.base), _tidy(self.volume.c), _tidy(self.t_count), _tidy(self.reaction_depth))

    def to_dict(self) -> dict:
        return {
            "active_volume": _plain(self.active_volume),
            "volume_base": _plain(self.volume.base),
            "volume_c_coeff": _plain(self.volume.c),
            "c_ccz": self.c_ccz,
            "t_count": _plain(self.t_count),
            "reaction_depth": _plain(self.reaction_depth),
            "peak_qubits": _plain(self.peak_qubits),
        }

    def __add__(self, other: CostReport) -> CostReport:
        return CostReport(self.volume + other.volume, self.t_count + other.t_count,
                          self.reaction_depth + other.reaction_depth, None, self.c_ccz)

    def scaled(self, k) -> CostReport:
        return CostReport(self.volume * k, self.t_count * k, self.reaction_depth * k, None, self.c_ccz)


def _plain(x):
    x = _tidy(x)
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, sympy.Basic):
        return str(x)
    return x


# ------------------------------------------------------------------ primitives

_PRIMITIVES = {
    GateKind.CNOT: (Volume(4), 0, 0),
    GateKind.TOFFOLI: (Volume(12, 1), 4, 1),
    GateKind.AND: (Volume(9, 1), 4, 1),
    GateKind.UNAND: (Volume(5), 0, 1),
    GateKind.X: (Volume(), 0, 0),
    GateKind.SWAP: (Volume(), 0, 0),
    GateKind.INIT0: (Volume(), 0, 0),
    GateKind.INIT1: (Volume(), 0, 0),
    GateKind.DISCARD: (Volume(), 0, 0),
}


def primitive_cost(kind: GateKind | str, params: CostParams = CostParams()) -> CostReport:
    """Per-gate cost; X, Swap and lifetime markers are free (Pauli-frame
    tracking and relabelling)."""
    v, t, d = _PRIMITIVES[GateKind(kind)]
    return CostReport(v, t, d, None, params.c_ccz)


def naive_gate_sum(circuit: Circuit, params: CostParams = CostParams()) -> CostReport:
    """Sum of primitive costs over the gate list.

    A heuristic upper bound only: spider merging makes the true active volume
    depend on circuit structure, not just on gate counts.
    """
    base = c = t = d = 0
    for g in circuit.gates:
        v, gt, gd = _PRIMITIVES[g.kind]
        base += v.base
        c += v.c
        t += gt
        d += gd
    return CostReport(Volume(base, c), t, d, peak_qubits(circuit), params.c_ccz)


def cas_naive_volume(n) -> Volume:
    """2n CNOTs plus a modified adder of n-1 repeating segments and a last segment."""
    return Volume(30, 1) * n - Volume(18, 1)


# --------------------------------------------------------------- closed forms

def ceil_log2(m: int) -> int:
    if m < 1:
        raise ValueError("M must be >= 1")
    return (m - 1).bit_length()


@dataclass(frozen=True)
class Sizes:
    """Size parameters of a formula.  Any field may be a sympy symbol; ``z``
    is ceil(log2 M) and must be supplied explicitly when M is symbolic."""

    n: object
    p: object = None
    q: object = 1
    M: object = 2
    s: object = None
    k: object = 2
    h: object = 1
    z: object = None
    alpha: object = None
    beta: object = None

    def __post_init__(self):
        if self.z is None and isinstance(self.M, int):
            object.__setattr__(self, "z", ceil_log2(self.M))
        if self.s is None:
            object.__setattr__(self, "s", self.n)
        if self.p is None and isinstance(self.n, int):
            object.__setattr__(self, "p", self.n // 2)
        if isinstance(self.h, int):
            k = (self.h + 1) // 2
            if self.beta is None:
                object.__setattr__(self, "beta", k + (self.h + 1) % 2)
            if self.alpha is None:
                object.__setattr__(self, "alpha", (self.h + 1).bit_length())


Formula = Callable[[Sizes], tuple]


def _k_not(s: Sizes):
    k = s.k
    return Volume(12, 1) * (k - 1) + 3, 4 * k - 4, k - 1, 2 * k


def _increment(s: Sizes):
    n = s.n
    return Volume(15, 1) * (n - 2) + 3, 4 * n - 8, n - 2, 2 * n - 1


def _cincrement(s: Sizes):
    n = s.n
    return Volume(15, 1) * (n - 1) + 3, 4 * n - 4, n - 1, 2 * n


def _cincrement_table(s: Sizes):
    n = s.n
    return Volume(15, 1) * (n - 1), 4 * n - 4, n - 1, 2 * n


def _cshift(s: Sizes):
    n = s.n
    return Volume(20, 1) * n, 4 * n, n, n + 2


def _toffoli_copy(s: Sizes):
    n = s.n
    return Volume(12, 1) * n, 4 * n, n, 2 * n + 1


def _og(s: Sizes):
    n = s.n
    return Volume(22, 1) * n - 7, 4 * n, 2 * n - 2, 3 * n


def _cog(s: Sizes):
    n = s.n
    return Volume(30, 2) * (n + 1) - 15, 8 * n + 8, 3 * n, 3 * n + 1


def _cas(s: Sizes):
    n = s.n
    return Volume(25, 1) * n - Volume(20, 1), 4 * n - 4, 2 * n - 2, 3 * n


def _multiply(s: Sizes):
    n = s.n
    v = Volume(30, 2) * n**2 + Volume(-3, 1) * n - Volume(15, 2)
    return v, 8 * n**2 + 4 * n - 8, 3 * n**2 - 2 * n, 5 * n


def _square(s: Sizes):
    n = s.n
    v = Volume(30, 2) * n**2 - Volume(0, 2) + Volume(5, 1) * n - 15
    return v, 8 * n**2 + 4 * n - 8, 3 * n**2 - 2 * n, 4 * n


def _square_table(s: Sizes):
    v, t, _, peak = _square(s)
    return v, t, 3 * s.n**2 - 2, peak


def _csquare(s: Sizes):
    n = s.n
    v = Volume(30, 2) * n**2 - Volume(0, 2) + Volume(21, 3) * n - 15
    return v, 8 * n**2 + 12 * n - 8, 3 * n**2, 4 * n + 1


def _comparator(s: Sizes):
    n = s.n
    return Volume(44, 2) * n - 14, 8 * n, 4 * n - 4, 3 * n


def _cheap_poly(s: Sizes):
    n, p = s.n, s.p
    return HALF * n**2 - HALF * n + n * p + p - p**2


def _cheap_multiply(s: Sizes):
    n, p = s.n, s.p
    v = Volume(30, 2) * _cheap_poly(s) + Volume(15, 2) * n
    t = 4 * n**2 + 4 * n + 8 * n * p + 8 * p - 8 * p**2
    d = Fraction(3, 2) * n**2 - Fraction(3, 2) * n + 3 * n * p + 3 * p - 3 * p**2
    return v, t, d, None


def _fma(s: Sizes):
    n, p = s.n, s.p
    v = Volume(30, 2) * _cheap_poly(s) + Volume(37, 3) * n - 7
    t = 4 * n**2 + 8 * n + 8 * n * p + 8 * p - 8 * p**2
    d = Fraction(3, 2) * n**2 + HALF * n + 3 * n * p + 3 * p - 3 * p**2 - 2
    return v, t, d, None


def _poly(s: Sizes):
    n, p, q = s.n, s.p, s.q
    v = Volume(30, 2) * (q * _cheap_poly(s)) + Volume(37, 3) * (q * n) - 7 * q
    t = 4 * q * n**2 + 8 * q * n + 8 * q * n * p + 8 * q * p - 8 * q * p**2
    d = q * (Fraction(3, 2) * n**2 + HALF * n + 3 * n * p + 3 * p - 3 * p**2 - 2)
    return v, t, d, (q + 2) * n + s.s


def _next(s: Sizes):
    M, z = s.M, s.z
    return Volume(12, 1) * (2 * M * (z - 1)) + 6 * M, 8 * M * (z - 1), 2 * M * (z - 1), None


def _label(s: Sizes):
    n, M, z = s.n, s.M, s.z
    v = Volume(44, 2) * (M * n) - 14 * M - 8 + 2 ** (z + 3) - 4 * z
    return v, 8 * M * n, 4 * M * (n - 1), None


def _ppe(s: Sizes):
    n, p, q, M, z = s.n, s.p, s.q, s.M, s.z
    v = (
        Volume(15, 1) * (q * _cheap_poly(s))
        + Volume(37, 3) * (q * n)
        - 7 * q
        + 6 * M * q
        + Volume(24, 2) * (M * q * (z - 1))
        + Volume(44, 2) * (M * n)
        - 14 * M
        + 2 ** (z + 3)
        + 4 * z
        - 8
    )
    t = 4 * (q * n**2 + 2 * q * n * p + 2 * q * p - 2 * q * p**2) + 8 * q * n + (8 * M * q * (z - 1) + 8 * M * n)
    d = (
        Fraction(3, 2) * q * n**2 + HALF * q * n + 3 * q * n * p + 3 * q * p - 3 * q * p**2 - 2 * q
        + 2 * M * q * (z - 1)
        + 4 * M * (n - 1)
    )
    return v, t, d, (q + 2) * n + z + s.s


def _sqrt(s: Sizes):
    n = s.n
    v = Volume(25, 1) * (QUARTER * n**2) + Volume(39, 2) * n - Volume(46, 6)
    return v, n**2 + 10 * n + 8, HALF * n**2 + 3 * n - 4, 3 * n + 1


def _arcsine(s: Sizes):
    n, p, q = s.n, s.p, s.q
    v = (
        Volume(30, 2) * (q * (n**2 + n + 2 * n * p + 2 * p - 2 * p**2))
        + Volume(74, 6) * (q * n)
        + Volume(25, 1) * (HALF * n**2)
        + Volume(256, 12) * n
        - 14 * q
        - Volume(126, 15)
    )
    t = 8 * q * n**2 + 16 * q * n + 16 * q * n * p + 16 * q * p - 16 * q * p**2 + 2 * n**2 + 60 * n + 4
    d = 3 * q * n**2 + q * n + 6 * q * n * p + 6 * q * p - 6 * q * p**2 - 4 * q + n**2 + 19 * n - 11
    return v, t, d, (q + 5) * n + 2


def _log_multiply(s: Sizes):
    n, a = s.n, s.alpha
    v = (Volume(27, 2) * a - Volume(23, 2)) * n + Volume(18, 2) * a - Volume(18, 2)
    return v, (8 * a - 4) * n + 8 * (a - 1), 3 * a * n - 2 * n, None


def _log(s: Sizes):
    n, a, b = s.n, s.alpha, s.beta
    v = (
        Volume(60, 4) * n**3
        - (Volume(46, 6) - Volume(20, 1) * b) * n**2
        - (Volume(41, 7) + Volume(20, 1) * b - Volume(30, 2) * a) * n
        + Volume(15, 2) * a
        - Volume(9, 3)
    )
    t = 16 * n**3 + (8 + 4 * b) * n**2 - (56 + 4 * b - 8 * a) * n + 8 * a + 20
    d = 6 * n**3 - (10 + b) * n**2 + (4 - b + 3 * a) * n - 2
    return v, t, d, 2 * n**2 + 2 * n


FORMULAS: dict[str, Formula] = {
    "k_not": _k_not,
    "increment": _increment,
    "cincrement": _cincrement,
    "cincrement_table": _cincrement_table,
    "cshift1": _cshift,
    "toffoli_copy": _toffoli_copy,
    "og_adder": _og,
    "cog_adder": _cog,
    "cas_adder": _cas,
    "multiply": _multiply,
    "square": _square,
    "square_table": _square_table,
    "csquare": _csquare,
    "comparator": _comparator,
    "cheap_multiply": _cheap_multiply,
    "fused_multiply_add": _fma,
    "poly": _poly,
    "next": _next,
    "label": _label,
    "ppe": _ppe,
    "sqrt": _sqrt,
    "arcsine": _arcsine,
    "log_multiply": _log_multiply,
    "log": _log,
}

# Row order and labels of the two summary tables.
SUMMARY_ROWS = [
    ("k_not", "k-controlled NOT"),
    ("increment", "Increment"),
    ("cincrement_table", "Controlled increment"),
    ("cshift1", "Controlled shift-by-one"),
    ("og_adder", "Addition (with output carry)"),
    ("cog_adder", "Controlled addition (with output carry)"),
    ("cas_adder", "Controlled addition or subtraction"),
    ("multiply", "Multiplication"),
    ("square_table", "Square"),
    ("csquare", "Controlled square"),
    ("comparator", "Comparison"),
    ("sqrt", "Square root"),
    ("poly", "Polynomial evaluation"),
    ("ppe", "Piecewise polynomial evaluation"),
    ("arcsine", "arcsin(x)"),
    ("log", "log(x)"),
]


def sizes_for(spec, p_convention: str = "integer") -> Sizes:
    """Sizes from a SubroutineSpec-like object (``id``, ``n``, ``get``).

    ``p_convention="fractional"`` reads the given p as the number of
    fractional bits and converts it to integer bits.
    """
    n = spec.n
    poly = spec.get("poly")
    p = spec.get("p")
    if p is not None and p_convention == "fractional":
        p = n - p
    elif p_convention not in ("integer", "fractional"):
        raise ValueError(f"unknown p convention {p_convention!r}")
    q = spec.get("q", poly.degree if poly is not None else 1)
    M = spec.get("M", poly.segments if poly is not None else 2)
    if spec.id == "arcsine" and p is None:
        p = 2
    return Sizes(n=n, p=p, q=q, M=M, s=spec.get("s"), k=spec.get("k", 2), h=spec.get("h", 1))


def formula_cost(formula_id: str, sizes: Sizes, params: CostParams = CostParams()) -> CostReport:
    try:
        fn = FORMULAS[formula_id]
    except KeyError:
        raise KeyError(f"no closed form for {formula_id!r}") from None
    v, t, d, peak = fn(sizes)
    return CostReport(v.simplify(), _tidy(t), _tidy(d), _tidy(peak), params.c_ccz)


def closed_form_cost(spec, params: CostParams = CostParams(), p_convention: str = "integer") -> CostReport:
    """Printed closed form for ``spec.id`` at the requested sizes."""
    fid = spec.id
    if fid == "cincrement" and spec.get("variant") == "table":
        fid = "cincrement_table"
    if fid == "square" and spec.get("variant") == "table":
        fid = "square_table"
    if fid == "k_not":
        sizes = Sizes(n=spec.n, k=spec.get("k", spec.n))
    else:
        sizes = sizes_for(spec, p_convention)
    return formula_cost(fid, sizes, params)


# ----------------------------------------------------------------- segments

@dataclass(frozen=True)
class Segment:
    name: str
    count: object
    volume: Volume
    t_count: object
    depth: object

    def __post_init__(self):
        if isinstance(self.count, int) and self.count < 0:
            raise ValueError("segment counts must be >= 0")


@dataclass(frozen=True)
class SegmentTable:
    subroutine: str
    segments: tuple[Segment, ...]

    def total(self, params: CostParams = CostParams()) -> CostReport:
        v, t, d = Volume(), 0, 0
        for seg in self.segments:
            v = v + seg.volume * seg.count
            t += seg.t_count * seg.count
            d += seg.depth * seg.count
        return CostReport(v.simplify(), _tidy(t), _tidy(d), None, params.c_ccz)


def segment_table(subroutine: str, n) -> SegmentTable:
    """Per-segment costs.  ``n`` may be symbolic except for the square root,
    whose middle part depends on the iteration index."""
    S = Segment
    if subroutine == "increment":
        if isinstance(n, int) and n < 2:
            raise ValueError("increment needs n >= 2")
        if n == 2:
            rows = [S("end", 1, Volume(3), 0, 0)]
        else:
            rows = [S("start", 1, Volume(15, 1), 4, 1), S("repeat", n - 3, Volume(15, 1), 4, 1), S("end", 1, Volume(3), 0, 0)]
    elif subroutine == "cincrement":
        rows = [S("start", 1, Volume(15, 1), 4, 1), S("repeat", n - 2, Volume(15, 1), 4, 1), S("end", 1, Volume(3), 0, 0)]
    elif subroutine == "og_adder":
        rows = [S("first", 1, Volume(15, 1), 4, 1), S("repeat", n - 2, Volume(22, 1), 4, 2), S("last", 1, Volume(22, 1), 4, 1)]
    elif subroutine == "cas_adder":
        rows = [
            S("first", 1, Volume(n + 2), 0, 0),
            S("second", 1, Volume(17, 1), 4, 2),
            S("repeat", n - 2, Volume(24, 1), 4, 2),
            S("last", 1, Volume(9), 0, 0),
        ]
    elif subroutine == "cog_adder":
        rows = [S("start", 1, Volume(24, 2), 8, 2), S("repeat", n - 2, Volume(30, 2), 8, 3), S("end", 1, Volume(51, 4), 16, 4)]
    elif subroutine == "sqrt":
        if not isinstance(n, int) or n < 4 or n % 2:
            raise ValueError("square-root segments need an even integer n >= 4")
        rows = [S("part 1: CAS(4) + fixed box", 1, cas_cost(4).volume + 10, 4 * 4 - 4, 2 * 4 - 2)]
        for i in range(2, n // 2):
            w = 2 * i + 2
            c = cas_cost(w)
            rows.append(S(f"part 2, i={i}: CAS({w}) + fixed box", 1, c.volume + 13, c.t_count, c.reaction_depth))
        rows.append(S("part 3: controlled adder + fixed box", 1, Volume(30, 2) * n - Volume(5, 1), 8 * n - 4, 3 * n - 2))
    else:
        raise KeyError(f"no segment table for {subroutine!r}")
    return SegmentTable(subroutine, tuple(rows))


def cas_cost(n) -> CostReport:
    return formula_cost("cas_adder", Sizes(n=n))


def segment_sum_cost(spec, params: CostParams = CostParams()) -> CostReport:
    return segment_table(spec.id, spec.n).total(params)


def sqrt_part_costs(n: int) -> dict[str, CostReport]:
    """Square-root cost split into its three parts, from the segment table."""
    table = segment_table("sqrt", n)
    first, *middle, last = table.segments
    mid = SegmentTable("sqrt part 2", tuple(middle)).total()
    return {
        "part 1": SegmentTable("sqrt part 1", (first,)).total(),
        "part 2": mid,
        "part 3": SegmentTable("sqrt part 3", (last,)).total(),
    }


# ---------------------------------------------------------- auxiliary results

def cshift_saving(n: int) -> int:
    """Blocks saved on the control rail: n Z spiders become 2*ceil((n-2)/4)+1."""
    if n <= 2:
        return 0
    return n - (2 * math.ceil((n - 2) / 4) + 1)


def cshift_optimized_volume(n: int, params: CostParams = CostParams()) -> tuple[int, int]:
    """(optimized volume, saving versus the unoptimized (20+C)n)."""
    base = (20 + params.c_ccz) * n
    saving = cshift_saving(n)
    return base - saving, saving


def cshift_printed_savings(n: int) -> dict[str, int]:
    """Saving implied by the printed optimized expression (the sign inside the
    bracket is distributed as +1) next to the spider-count saving."""
    return {"printed expression": n - 2 * math.ceil((n - 2) / 4) + 1, "spider count": cshift_saving(n)}


def label_cnot_bound(z: int) -> int:
    if z < 1:
        raise ValueError("z must be >= 1")
    return 2 ** (z + 1) - z - 2


def label_cnot_exact(M: int) -> int:
    """CNOTs to step a label register through 0..M-1.

    Digit process: peel the top set bit 2^b off the target and charge
    2^(b+1)-1 for it.  Even M runs the process on M-1; odd M runs it on M
    and drops the final CNOT.
    """
    if M < 2:
        raise ValueError("M must be >= 2")
    rest = M - 1 if M % 2 == 0 else M
    total = 0
    while rest:
        b = rest.bit_length() - 1
        total += 2 ** (b + 1) - 1
        rest -= 1 << b
    return total - (M % 2)


def label_cnot_simulated(M: int) -> int:
    """Oracle: count bit flips while incrementing a register from 0 to M-1."""
    return sum(bin((j - 1) ^ j).count("1") for j in range(1, M))


def baseline_tau_mult(n, p=None, cheap: bool = False):
    """Toffoli count of the baseline multiplier; ``cheap`` selects the
    truncated fixed-point variant."""
    if cheap:
        return Fraction(3, 2) * n**2 + Fraction(3, 2) * n + 3 * n * p + 3 * p - 3 * p**2
    return 3 * n**2 + 3 * n


def baseline_tau_invsqrt(n, p, m=3):
    return (n**2 * (Fraction(15, 2) * m + 3) + 15 * n * p * m + n * (Fraction(23, 2) * m + 5)
            - 15 * p**2 * m + 15 * p * m - 2 * m)


def baseline_tau_sqrt(n, p):
    """Printed baseline square-root Toffoli count (three Newton iterations)."""
    return 27 * n**2 + 41 * n + 48 * n * p + 48 * p - 48 * p**2 - 6


def baseline_sqrt_delta(n, p, m: int = 3) -> tuple:
    """(T reduction, depth reduction) from replacing the baseline square root."""
    if m != 3:
        raise ValueError("only m=3 Newton iterations are tabulated")
    t = 107 * n**2 + 154 * n + 192 * n * p + 192 * p - 192 * p**2 - 32
    d = Fraction(53, 2) * n**2 + 38 * n + 48 * n * p + 48 * p - 48 * p**2 - 2
    return _tidy(t), _tidy(d)


# Two gate-identical designs whose active volumes differ; a hand derivation
# recorded for documentation, not something this package can compute.
STRUCTURE_SENSITIVITY_EXAMPLE = {
    "operation": "controlled out-of-place three-qubit addition, no overflow",
    "design 1 blocks": 21,
    "design 2 blocks": 17,
}

# ---------------------------------------------------------------- tables

_n = sympy.Symbol("n")


def _poly_expr(x) -> sympy.Expr:
    return sympy.expand(_exact(x))


@dataclass
class TableLine:
    design: str
    column: str
    tabulated: sympy.Expr | None
    substituted: sympy.Expr | None = None

    @property
    def difference(self):
        if self.tabulated is None or self.substituted is None:
            return None
        return sympy.expand(self.substituted - self.tabulated)

    def at(self, n: int) -> dict:
        def ev(e):
            return None if e is None else _plain(_tidy(e.subs(_n, n)))

        return {"tabulated": ev(self.tabulated), "substituted": ev(self.substituted), "difference": ev(self.difference)}


def _expr(s: str) -> sympy.Expr:
    return sympy.expand(sympy.sympify(s, locals={"n": _n}))


def _table_lines(table_id: int) -> tuple[str, list[TableLine]]:
    n = _n
    half = n / 2
    if table_id == 1:
        mult = _multiply(Sizes(n=n))
        cog, tof = _cog(Sizes(n=n)), (Volume(12, 1), 4, 1)
        t_sub = (n - 1) * cog[1] + n * tof[1]
        d_sub = (n - 1) * cog[2] + n * tof[2]
        return "Multiplier baseline comparison", [
            TableLine("baseline", "T count", _expr("12*n**2 - 8")),
            TableLine("baseline", "reaction depth", _expr("3*n**2 - 2")),
            TableLine("baseline", "qubits", _expr("6*n + 2")),
            TableLine("Li et al.", "T count", _expr("8*n**2 + 7*n")),
            TableLine("Li et al.", "reaction depth", None),
            TableLine("Li et al.", "qubits", _expr("3*n + 1")),
            TableLine("optimized", "T count", _expr("8*n**2 + 4*n - 8"), _poly_expr(t_sub)),
            TableLine("optimized", "reaction depth", _expr("3*n**2 - 2*n"), _poly_expr(d_sub)),
            TableLine("optimized", "qubits", _expr("5*n"), _poly_expr(mult[3])),
        ]
    if table_id == 2:
        parts = _sqrt_parts_symbolic()
        t_sub, d_sub = parts["t"], parts["d"]
        return "Square-root baseline comparison", [
            TableLine("baseline", "T count", _expr("2*n**2 + 12*n - 16")),
            TableLine("baseline", "reaction depth", _expr("n**2/2 + 3*n")),
            TableLine("baseline", "qubits", _expr("2*n + 1")),
            TableLine("baseline", "circuit volume", _expr("4*n**3 + 26*n**2 - 20*n - 16")),
            TableLine("optimized", "T count", _expr("n**2 + 10*n + 8"), t_sub),
            TableLine("optimized", "reaction depth", _expr("n**2/2 + 3*n - 4"), d_sub),
            TableLine("optimized", "qubits", _expr("3*n"), _expr("3*n")),
            TableLine("optimized", "circuit volume", _expr("3*n**3 + 30*n**2 + 24*n"), sympy.expand(t_sub * 3 * n)),
        ]
    if table_id == 3:
        s = Sizes(n=n, p=half, q=6, M=16, s=0)
        _, t, d, peak = _ppe(s)
        th = 6 * (6 * n**2 + 12 * n * half + 12 * half - 12 * half**2) + (32 * 16 * 6 * (4 - 2) + 16 * 16 * n) + 14 * n * 6 - 4 * 6
        dh = (Fraction(3, 2) * 6 * n**2 + Fraction(7, 2) * 6 * n + 18 * n * half + 18 * half - 18 * half**2
              + 2 * 16 * 6 * (4 * 4 - 8) + 4 * 16 * n - 6)
        return "PPE baseline comparison (M=16, p=n/2, q=6)", [
            TableLine("baseline", "T count", _expr("48*n**2 + 376*n + 6120"), _poly_expr(th)),
            TableLine("baseline", "reaction depth", _expr("27*n**2/2 + 94*n + 1530"), _poly_expr(dh)),
            TableLine("baseline", "qubits", _expr("7*n + 5")),
            TableLine("optimized", "T count", _expr("36*n**2 + 182*n + 2304"), _poly_expr(t)),
            TableLine("optimized", "reaction depth", _expr("27*n**2/2 + 76*n + 500"), _poly_expr(d)),
            TableLine("optimized", "qubits", _expr("8*n + 4"), _poly_expr(peak)),
        ]
    if table_id == 4:
        s = Sizes(n=n, p=half, q=6)
        _, t, d, peak = _arcsine(s)
        q, p = 6, half
        th = q * (12 * n**2 + 28 * n + 24 * n * p + 24 * p - 24 * p**2 - 8) + 222 * n**2 + 406 * n + 396 * n * p + 396 * p - 396 * p**2 - 40
        dh = (q * (3 * n**2 + 7 * n + 6 * n * p + 6 * p - 6 * p**2 - 2) + Fraction(111, 2) * n**2 + Fraction(203, 2) * n
              + 99 * n * p + 99 * p - 99 * p**2 - 10)
        return "Arcsine baseline comparison (m=3, p=n/2, q=6)", [
            TableLine("baseline", "T count", _expr("429*n**2 + 844*n - 88"), _poly_expr(th)),
            TableLine("baseline", "reaction depth", _expr("429*n**2/2 + 211*n - 22"), _poly_expr(dh)),
            TableLine("baseline", "qubits", _expr("9*n + 7")),
            TableLine("optimized", "T count", _expr("74*n**2 + 168*n + 4"), _poly_expr(t)),
            TableLine("optimized", "reaction depth", _expr("28*n**2 + 43*n - 35"), _poly_expr(d)),
            TableLine("optimized", "qubits", _expr("11*n + 2"), _poly_expr(peak)),
        ]
    raise KeyError(f"no table {table_id}")


def _sqrt_parts_symbolic() -> dict:
    """Square-root part totals as polynomials in n (sums taken in closed form)."""
    n, i = _n, sympy.Symbol("i", integer=True)
    w = 2 * i + 2
    p2_v = sympy.summation((25 + C_SYMBOL) * w - 20 - C_SYMBOL + 13, (i, 2, n / 2 - 1))
    p2_t = sympy.summation(4 * w - 4, (i, 2, n / 2 - 1))
    p2_d = sympy.summation(2 * w - 2, (i, 2, n / 2 - 1))
    p1_v = (25 + C_SYMBOL) * 4 - 20 - C_SYMBOL + 10
    p3_v = (30 + 2 * C_SYMBOL) * n - 5 - C_SYMBOL
    return {
        "p2_v": sympy.expand(p2_v), "p2_t": sympy.expand(p2_t), "p2_d": sympy.expand(p2_d),
        "v": sympy.expand(p1_v + p2_v + p3_v),
        "t": sympy.expand(12 + p2_t + 8 * n - 4),
        "d": sympy.expand(6 + p2_d + 3 * n - 2),
    }


def table_row(table_id: int, n: int | None = None, params: CostParams = CostParams()) -> dict:
    """Tabulated baseline comparison next to the value obtained by
    substituting the table's settings into the underlying formulas."""
    title, lines = _table_lines(table_id)
    rows = []
    for line in lines:
        row = {
            "design": line.design,
            "column": line.column,
            "tabulated": None if line.tabulated is None else str(line.tabulated),
            "substituted": None if line.substituted is None else str(line.substituted),
            "difference": None if line.difference is None else str(line.difference),
        }
        if n is not None:
            row["at_n"] = line.at(n)
        rows.append(row)
    return {"table": table_id, "title": title, "n": n, "c_ccz": params.c_ccz, "rows": rows}


def table_lines(table_id: int) -> list[TableLine]:
    return _table_lines(table_id)[1]


# -------------------------------------------------------- discrepancy log

@dataclass(frozen=True)
class Discrepancy:
    subject: str
    quantity: str
    printed: object
    derived: object
    note: str
    kind: str = "formula"

    @property
    def subject_id(self) -> str:
        """Subroutine id the entry belongs to, for filtering by subroutine."""
        subject = self.subject.split(":")[0]
        return _SUBJECT_IDS.get(subject, subject)

    @property
    def difference(self):
        try:
            return sympy.expand(sympy.sympify(self.derived) - sympy.sympify(self.printed))
        except (TypeError, sympy.SympifyError):
            return None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "subject": self.subject,
            "quantity": self.quantity,
            "printed": str(self.printed),
            "derived": str(self.derived),
            "difference": str(self.difference),
            "note": self.note,
        }


_SUBJECT_IDS = {
    "controlled increment": "cincrement", "OG adder": "og_adder", "square root part 2": "sqrt",
    "square root": "sqrt", "baseline square root": "sqrt", "controlled shift": "cshift1", "PPE": "ppe",
    "log final multiply": "log", "table 1": "multiply", "table 2": "sqrt", "table 3": "ppe", "table 4": "arcsine",
}

# Explanations for table cells whose substitution differs from the tabulated value.
_TABLE_NOTES = {
    (2, "optimized", "T count"): "tabulated value repeats the printed square-root T count; the parts sum to n^2+8n-8",
    (2, "optimized", "circuit volume"): "3n times the T count, so it inherits the T-count difference",
    (3, "baseline", "T count"): "substituting M=16, p=n/2, q=6 into the baseline PPE T count gives 54n^2",
    (3, "optimized", "T count"): "substituting M=16, p=n/2, q=6, s=0 into the PPE T count gives 200n, not 182n",
    (4, "baseline", "reaction depth"): "the baseline depth equation (equal to the Toffoli count) gives 429/4 n^2; "
                                            "the tabulated 429/2 n^2 is half the tabulated T count",
    (4, "optimized", "T count"): "substituting p=n/2, q=6 into the arcsine T count gives 204n, not 168n",
}


def _vexpr(v: Volume) -> sympy.Expr:
    return sympy.expand(_exact(v.base) + _exact(v.c) * C_SYMBOL)


def _e(x) -> sympy.Expr:
    return sympy.expand(_exact(x))


def formula_discrepancies() -> list[Discrepancy]:
    """Every place where a printed expression disagrees with the expression
    obtained by composing its printed components (symbolic in n, p, q, ...)."""
    n, p, q, M, z, a, b = sympy.symbols("n p q M z alpha beta")
    out: list[Discrepancy] = []

    def cmp(subject, quantity, printed, derived, note):
        pe, de = _e(printed), _e(derived)
        if sympy.expand(pe - de) != 0:
            out.append(Discrepancy(subject, quantity, pe, de, note))

    s = Sizes(n=n, p=p, q=q, M=M, z=z, alpha=a, beta=b)
    F = {k: fn(s) for k, fn in FORMULAS.items()}

    cmp("controlled increment", "volume", _vexpr(F["cincrement_table"][0]), _vexpr(F["cincrement"][0]),
        "summary table omits the +3 end segment that the inline formula and the segment sum include")
    cmp("square", "reaction depth", F["square_table"][2], F["square"][2],
        "summary table prints 3n^2-2; the inline formula (equal to the multiplier depth) gives 3n^2-2n")
    cmp("OG adder", "reaction depth (printed arithmetic)", 1 + 2 * (n - 1) + 1, F["og_adder"][2],
        "the printed sum 1+2(n-1)+1 evaluates to 2n; first+repeat+last segments (1, n-2 repeats of 2, 1) give 2n-2")

    parts = _sqrt_parts_symbolic()
    nn = _n
    sub = {nn: n}
    cmp("square root part 2", "T count", n**2 + 2 * n - 8, parts["p2_t"].subs(sub),
        "sum of T_CAS(2i+2) for i=2..n/2-1 is n^2-16")
    cmp("square root", "volume", _vexpr(F["sqrt"][0]), parts["v"].subs(sub),
        "sum of parts 1-3 has constant -51-2C")
    cmp("square root", "T count", F["sqrt"][1], parts["t"].subs(sub), "sum of parts 1-3 is n^2+8n-8")
    cmp("square root", "peak qubits", F["sqrt"][3], 3 * n,
        "summary table prints 3n+1; the running text states a total qubit cost of 3n")

    # control-rail optimisation of the controlled shift
    cmp("controlled shift", "optimised-volume saving (n=32)", 17, cshift_saving(32),
        "both printed optimised expressions imply a saving of n-2ceil((n-2)/4)+1 = 17 at n=32; "
        "counting control-rail spiders (n -> 2ceil((n-2)/4)+1) gives the quoted 15")

    # PPE total = poly + q next + label
    comp_v = _vexpr(F["poly"][0]) + q * _vexpr(F["next"][0]) + _vexpr(F["label"][0])
    cmp("PPE", "volume", _vexpr(F["ppe"][0]), comp_v,
        "printed total uses q(15+C)(...) and +4z; composing poly + q*next + label gives q(30+2C)(...) and -4z")
    cmp("PPE", "T count", F["ppe"][1], F["poly"][1] + q * F["next"][1] + F["label"][1], "")
    cmp("PPE", "reaction depth", F["ppe"][2], F["poly"][2] + q * F["next"][2] + F["label"][2], "")

    # composed arcsine
    vand, vun = Volume(9, 1), Volume(5)
    comp = (2 * _vexpr(F["poly"][0]) + 2 * _vexpr(F["sqrt"][0]) + 2 * _vexpr(F["cas_adder"][0])
            + 2 * n * _vexpr(Volume(12, 1)) + (2 * n + 1) * (_vexpr(vand) + _vexpr(vun))
            + 2 * _vexpr(F["cshift1"][0]) + 3 * _vexpr(F["cincrement"][0]))
    cmp("arcsine", "volume", _vexpr(F["arcsine"][0]), comp,
        "composition 2poly+2sqrt+2CAS+2n Toff+(2n+1)(AND+unAND)+2cshift+3cinc")
    comp_t = (2 * F["poly"][1] + 2 * F["sqrt"][1] + 2 * F["cas_adder"][1] + 2 * n * 4
              + (2 * n + 1) * 4 + 2 * F["cshift1"][1] + 3 * F["cincrement"][1])
    cmp("arcsine", "T count", F["arcsine"][1], comp_t, "same composition, T count")
    comp_d = (2 * F["poly"][2] + 2 * F["sqrt"][2] + 2 * F["cas_adder"][2] + 2 * n
              + (2 * n + 1) * 2 + 2 * F["cshift1"][2] + 3 * F["cincrement"][2])
    cmp("arcsine", "reaction depth", F["arcsine"][2], comp_d, "same composition, reaction depth")

    # log multiply and log total
    comp_lm = (a - 1) * _vexpr(F["cog_adder"][0]) + n * _vexpr(Volume(12, 1))
    cmp("log final multiply", "volume", _vexpr(F["log_multiply"][0]), comp_lm,
        "(alpha-1) COG adders + n Toffolis")
    comp_v = (n - 1) * (b * _vexpr(F["cshift1"][0]) + 2 * _vexpr(F["square"][0]) + 4 * n + 4) \
        + _vexpr(F["log_multiply"][0]) + _vexpr(F["cas_adder"][0])
    cmp("log", "volume", _vexpr(F["log"][0]), comp_v,
        "(n-1)(beta cshift + 2 square + 4n+4) + final multiply + CAS")
    comp_t = (n - 1) * (b * F["cshift1"][1] + 2 * F["square"][1]) + F["log_multiply"][1] + F["cas_adder"][1]
    cmp("log", "T count", F["log"][1], comp_t, "same composition, T count")
    comp_d = (n - 1) * (b * F["cshift1"][2] + 2 * F["square"][2]) + F["log_multiply"][2] + F["cas_adder"][2]
    cmp("log", "reaction depth", F["log"][2], comp_d, "same composition, reaction depth")

    # baseline square-root Toffoli count
    cmp("baseline square root", "Toffoli count", baseline_tau_sqrt(n, p),
        baseline_tau_mult(n) + baseline_tau_invsqrt(n, p),
        "printed total matches tau_invsqrt plus the truncated fixed-point multiplier "
        "(3/2 n^2 + 3/2 n + 3np + 3p - 3p^2), not the stated tau_mult = 3n^2+3n")

    # table substitutions
    for tid in (1, 2, 3, 4):
        title, lines = _table_lines(tid)
        for line in lines:
            diff = line.difference
            if diff is not None and diff != 0:
                note = _TABLE_NOTES.get((tid, line.design, line.column), "tabulated vs substituted")
                out.append(Discrepancy(f"table {tid}: {line.design}", line.column, line.tabulated,
                                       line.substituted, f"{title}: {note}", kind="table"))
    return out


# Measured-vs-printed differences that are explained and accepted; the key is
# (subroutine id, quantity).  Each reason is mirrored in the decisions ledger.
KNOWN_DEVIATIONS = {
    ("comparator", "peak"): "result flag is a separate qubit from the adder carry (copy-then-uncompute), 3n+1",
    ("multiply", "peak"): "COG carry is written in place into the result register, so n-1 ancillas suffice, 5n-1",
    ("sqrt", "peak"): "summary table says 3n+1, running text says 3n; the circuit uses 3n",
    ("sqrt", "t_count"): "parts sum to n^2+8n-8; the built part-3 controlled adder adds 4 more (COG without carry)",
    ("label", "t_count"): "M-1 comparisons suffice for M subdomains; 8(M-1)n",
}


def census_discrepancies(ns: Iterable[int] = range(3, 9), ids: Iterable[str] | None = None) -> list[Discrepancy]:
    """Built-circuit T count and peak-qubit scan against the printed forms."""
    from .circuit import gate_census
    from .registry import SubroutineSpec, LOW_LEVEL, lookup

    out = []
    for sid in ids or LOW_LEVEL + ("sqrt",):
        sub = lookup(sid)
        for n in ns:
            spec = sub.default_spec(n)
            if spec is None:
                continue
            circuit = sub.build(spec)
            cf = closed_form_cost(spec)
            census = gate_census(circuit).t_count
            peak = peak_qubits(circuit)
            for quantity, got, want in (("t_count", census, cf.t_count), ("peak", peak, cf.peak_qubits)):
                if want is not None and got != want:
                    out.append(Discrepancy(sid, f"{quantity} (n={n})", want, got,
                                           KNOWN_DEVIATIONS.get((sid, quantity), "UNEXPLAINED"), kind=quantity))
    return out
