"""Subroutine catalogue: how to build each circuit, which inputs it accepts,
and what its registers must hold afterwards."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping

from . import arith, highlevel
from .circuit import Circuit
from .reference import (
    FUNCTIONS,
    PolySpec,
    arcsine_codes,
    arcsine_tolerance,
    cheap_error_bound,
    cheap_product,
    fit_error,
    fit_poly,
    horner_codes,
    isqrt_rem,
    log_format,
    log_output,
)

SUBROUTINE_IDS = (
    "increment", "cincrement", "cshift1", "toffoli_copy", "k_not", "og_adder", "cas_adder", "cog_adder",
    "comparator", "multiply", "square", "csquare", "cheap_multiply", "fused_multiply_add", "sqrt", "ppe",
    "arcsine", "log",
)
# Parts of the PPE circuit that can also be built and verified on their own.
COMPONENT_IDS = ("label", "next")

LOW_LEVEL = (
    "k_not", "increment", "cincrement", "cshift1", "og_adder", "cog_adder", "cas_adder",
    "multiply", "square", "csquare", "comparator",
)

POLY_IDS = ("label", "next", "ppe", "arcsine")

ALIASES = {
    "inc": "increment", "cinc": "cincrement", "shift": "cshift1", "cshift": "cshift1",
    "knot": "k_not", "og": "og_adder", "cas": "cas_adder", "cog": "cog_adder", "cmp": "comparator",
    "compare": "comparator", "mult": "multiply", "mul": "multiply", "cheap": "cheap_multiply",
    "fma": "fused_multiply_add", "arcsin": "arcsine", "asin": "arcsine",
}


def canonical_id(name: str) -> str:
    sid = ALIASES.get(name, name)
    if sid not in SUBROUTINE_IDS + COMPONENT_IDS:
        raise KeyError(f"unknown subroutine {name!r}")
    return sid


@dataclass(frozen=True)
class SubroutineSpec:
    """Subroutine id plus size parameters.  ``extras`` may hold k, q, M, p, s,
    h, v, direction, step, variant, function and a ``poly`` (PolySpec)."""

    id: str
    n: int
    extras: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "id", canonical_id(self.id))
        object.__setattr__(self, "extras", dict(self.extras))

    def get(self, key, default=None):
        value = self.extras.get(key)
        return default if value is None else value

    def describe(self) -> dict:
        d = {"n": self.n}
        for k, v in sorted(self.extras.items()):
            if v is None:
                continue
            if isinstance(v, PolySpec):
                d["M"], d["q"], d["function"] = v.segments, v.degree, v.function
            else:
                d[k] = v
        return d

    def with_extras(self, **kw) -> SubroutineSpec:
        return SubroutineSpec(self.id, self.n, {**self.extras, **kw})


@dataclass(frozen=True)
class Subroutine:
    id: str
    build: Callable[[SubroutineSpec], Circuit]
    domain: Callable[[SubroutineSpec], dict]
    oracle: Callable[[SubroutineSpec, dict], dict]
    accept: Callable[[SubroutineSpec, dict], bool] = lambda spec, inp: True
    check: Callable | None = None
    min_n: int = 1
    even_n: bool = False

    def default_spec(self, n: int) -> SubroutineSpec | None:
        if n < self.min_n or (self.even_n and n % 2):
            return None
        spec = SubroutineSpec(self.id, n)
        if self.id in POLY_IDS:
            spec = spec.with_extras(poly=default_poly(spec))
        return spec


def _bits(n: int) -> range:
    return range(1 << n)


BIT = range(2)


def _mask(n: int) -> int:
    return (1 << n) - 1


# ------------------------------------------------------------ polynomials

def default_poly(spec: SubroutineSpec) -> PolySpec:
    """Polynomial used when the request carries none: a non-negative fit of the
    requested function in the requested format."""
    poly = spec.get("poly")
    if poly is not None:
        return poly
    n = spec.n
    if spec.id == "arcsine":
        return _fit("arcsin", 0.0, 0.5, spec.get("M", 2), spec.get("q", 3), n, 2)
    p = spec.get("p", 1)
    lo, hi = spec.get("domain", (0.0, 1.0))
    return _fit(spec.get("function", "sin"), lo, hi, spec.get("M", 2 if spec.id != "label" else 4), spec.get("q", 2), n, p)


@lru_cache(maxsize=64)
def _fit(function, lo, hi, M, q, n, p) -> PolySpec:
    return fit_poly(function, lo, hi, M, q, n, p)


@lru_cache(maxsize=64)
def _poly_fit_error(poly: PolySpec, lo_code: int, hi_code: int) -> float:
    step = max(1, (hi_code - lo_code) // 4096)
    return fit_error(poly, range(lo_code, hi_code, step))


def _domain_codes(poly: PolySpec) -> tuple[int, int]:
    scale = 1 << (poly.n - poly.p)
    lo, hi = poly.domain
    return max(0, math.ceil(lo * scale)), min(1 << poly.n, math.ceil(hi * scale))


# ---------------------------------------------------------------- entries

def _entry_increment():
    return Subroutine(
        "increment",
        build=lambda s: arith.build_increment(s.n),
        domain=lambda s: {"x": _bits(s.n)},
        oracle=lambda s, i: {"x": (i["x"] + 1) & _mask(s.n)},
        min_n=2,
    )


def _entry_cincrement():
    return Subroutine(
        "cincrement",
        build=lambda s: arith.build_cincrement(s.n),
        domain=lambda s: {"ctrl": BIT, "x": _bits(s.n)},
        oracle=lambda s, i: {"ctrl": i["ctrl"], "x": (i["x"] + i["ctrl"]) & _mask(s.n)},
        min_n=2,
    )


def _shift_oracle(s, i):
    n, x, c = s.n, i["x"], i["ctrl"]
    if not c:
        return {"ctrl": 0, "x": x, "spill": 0}
    if s.get("direction", "left") == "left":
        return {"ctrl": 1, "x": (x << 1) & _mask(n), "spill": x >> (n - 1)}
    return {"ctrl": 1, "x": x >> 1, "spill": x & 1}


def _entry_cshift1():
    return Subroutine(
        "cshift1",
        build=lambda s: arith.build_cshift1(s.n, s.get("direction", "left")),
        domain=lambda s: {"ctrl": BIT, "x": _bits(s.n)},
        oracle=_shift_oracle,
    )


def _entry_toffoli_copy():
    return Subroutine(
        "toffoli_copy",
        build=lambda s: arith.build_toffoli_copy(s.n),
        domain=lambda s: {"ctrl": BIT, "a": _bits(s.n)},
        oracle=lambda s, i: {"ctrl": i["ctrl"], "a": i["a"], "target": i["a"] if i["ctrl"] else 0},
    )


def _entry_k_not():
    def k(s):
        return s.get("k", s.n)

    return Subroutine(
        "k_not",
        build=lambda s: arith.build_k_not(k(s)),
        domain=lambda s: {"controls": _bits(k(s)), "target": BIT},
        oracle=lambda s, i: {"controls": i["controls"], "target": i["target"] ^ int(i["controls"] == _mask(k(s)))},
        min_n=2,
    )


def _entry_og_adder():
    def oracle(s, i):
        total = i["a"] + i["b"]
        return {"a": i["a"], "b": total & _mask(s.n), "carry": total >> s.n}

    return Subroutine(
        "og_adder",
        build=lambda s: arith.build_og_adder(s.n),
        domain=lambda s: {"a": _bits(s.n), "b": _bits(s.n)},
        oracle=oracle,
        min_n=2,
    )


def _entry_cas_adder():
    def oracle(s, i):
        # both wirings compute b -/+ a; they differ only in where the complement sits
        a, b, c = i["a"], i["b"], i["ctrl"]
        out = b - a if c else b + a
        return {"ctrl": c, "a": a, "b": out & _mask(s.n)}

    return Subroutine(
        "cas_adder",
        build=lambda s: arith.build_cas_adder(s.n, flip_sum=s.get("variant") == "flip"),
        domain=lambda s: {"ctrl": BIT, "a": _bits(s.n), "b": _bits(s.n)},
        oracle=oracle,
        min_n=2,
    )


def _entry_cog_adder():
    def oracle(s, i):
        total = i["b"] + (i["a"] if i["ctrl"] else 0)
        return {"ctrl": i["ctrl"], "a": i["a"], "b": total & _mask(s.n), "carry": total >> s.n}

    return Subroutine(
        "cog_adder",
        build=lambda s: arith.build_cog_adder(s.n),
        domain=lambda s: {"ctrl": BIT, "a": _bits(s.n), "b": _bits(s.n)},
        oracle=oracle,
        min_n=2,
    )


def _entry_comparator():
    return Subroutine(
        "comparator",
        build=lambda s: arith.build_comparator(s.n),
        domain=lambda s: {"x": _bits(s.n), "y": _bits(s.n)},
        oracle=lambda s, i: {"x": i["x"], "y": i["y"], "flag": int(i["y"] > i["x"])},
        min_n=2,
    )


def _entry_multiply():
    return Subroutine(
        "multiply",
        build=lambda s: arith.build_multiply(s.n),
        domain=lambda s: {"a": _bits(s.n), "b": _bits(s.n)},
        oracle=lambda s, i: {"a": i["a"], "b": i["b"], "result": i["a"] * i["b"]},
        min_n=2,
    )


def _entry_square():
    return Subroutine(
        "square",
        build=lambda s: arith.build_square(s.n),
        domain=lambda s: {"a": _bits(s.n)},
        oracle=lambda s, i: {"a": i["a"], "result": i["a"] ** 2},
        min_n=2,
    )


def _entry_csquare():
    return Subroutine(
        "csquare",
        build=lambda s: arith.build_csquare(s.n),
        domain=lambda s: {"ctrl": BIT, "a": _bits(s.n)},
        oracle=lambda s, i: {"ctrl": i["ctrl"], "a": i["a"], "result": i["a"] ** 2 if i["ctrl"] else 0},
        min_n=2,
    )


def _p(s: SubroutineSpec) -> int:
    p = s.get("p", max(1, s.n // 2))
    if not 1 <= p <= s.n:
        raise ValueError("p must satisfy 1 <= p <= n")
    return p


def _cheap_check(s, inp, outs, metrics):
    """Truncation error against the exact product, for representable products."""
    n, p = s.n, _p(s)
    f = n - p
    exact = inp["a"] * inp["b"]
    if exact >= 1 << (n + f):
        return None
    err = abs(outs["result"] / 2**f - exact / 2 ** (2 * f))
    bound = cheap_error_bound(n, p)
    metrics["max_error"] = max(metrics.get("max_error", 0.0), err)
    metrics["error_bound"] = bound
    if err > bound:
        return f"truncation error {err} exceeds n/2^(n-p) = {bound}"
    return None


def _entry_cheap_multiply():
    def oracle(s, i):
        code, ovf = cheap_product(i["a"], i["b"], s.n, _p(s))
        return {"a": i["a"], "b": i["b"], "result": code, "overflow": ovf}

    return Subroutine(
        "cheap_multiply",
        build=lambda s: arith.build_cheap_multiply(s.n, _p(s)),
        domain=lambda s: {"a": _bits(s.n), "b": _bits(s.n)},
        oracle=oracle,
        check=_cheap_check,
    )


def _entry_fma():
    def oracle(s, i):
        n, p = s.n, _p(s)
        code, ovf = cheap_product(i["a"], i["b"], n, p)
        total = code + i["c"]
        return {"a": i["a"], "b": i["b"], "c": i["c"], "result": total & _mask(n), "overflow": ovf | (total >> n) << p}

    return Subroutine(
        "fused_multiply_add",
        build=lambda s: arith.build_fused_multiply_add(s.n, _p(s)),
        domain=lambda s: {"a": _bits(s.n), "b": _bits(s.n), "c": _bits(s.n)},
        oracle=oracle,
    )


def _entry_sqrt():
    def oracle(s, i):
        r, rem = isqrt_rem(i["a"])
        return {"root": r, "remainder": rem}

    def build(s):
        if s.n % 2 or s.n < 4:
            raise ValueError("square root needs an even n >= 4")
        return highlevel.build_sqrt(s.n)

    return Subroutine("sqrt", build=build, domain=lambda s: {"a": _bits(s.n)}, oracle=oracle, min_n=4, even_n=True)


def _entry_label():
    def oracle(s, i):
        return {"x": i["x"], "label": default_poly(s).label(i["x"])}

    return Subroutine(
        "label",
        build=lambda s: highlevel.build_label_circuit(s.n, default_poly(s)),
        domain=lambda s: {"x": _bits(s.n)},
        oracle=oracle,
        min_n=2,
    )


def _entry_next():
    def step(s):
        return s.get("step", 1)

    def oracle(s, i):
        poly = default_poly(s)
        new = highlevel.coefficient_words(poly, step(s))
        old = highlevel.coefficient_words(poly, step(s) - 1) if step(s) else [0] * poly.segments
        j = i.get("label", 0)
        return {"label": j, "coeff": i["coeff"] ^ old[j] ^ new[j]}

    def domain(s):
        poly = default_poly(s)
        d = {"coeff": _bits(s.n)}
        if poly.label_bits:
            d = {"label": range(poly.segments), **d}
        return d

    return Subroutine(
        "next",
        build=lambda s: highlevel.build_next(default_poly(s), step(s)),
        domain=domain,
        oracle=oracle,
        min_n=2,
    )


def _ppe_check(s, inp, outs, metrics):
    poly = default_poly(s)
    f = poly.n - poly.p
    x = inp["x"] / 2**f
    err = abs(outs["result"] / 2**f - FUNCTIONS[poly.function](x))
    bound = _poly_fit_error(poly, *_domain_codes(poly)) + poly.degree * cheap_error_bound(poly.n, poly.p)
    metrics["max_error"] = max(metrics.get("max_error", 0.0), err)
    metrics["error_bound"] = bound
    if err > bound:
        return f"error {err} exceeds fit + q*eps = {bound}"
    return None


def _entry_ppe():
    def oracle(s, i):
        poly = default_poly(s)
        result, accs = horner_codes(poly, i["x"])
        out = {"x": i["x"], "result": result}
        out.update({f"acc{k}": a for k, a in enumerate(accs, start=1)})
        if poly.label_bits:
            out["label"] = poly.label(i["x"])
        return out

    def accept(s, i):
        lo, hi = _domain_codes(default_poly(s))
        return lo <= i["x"] < hi

    def build(s):
        poly = default_poly(s)
        return highlevel.build_ppe(poly.n, poly.p, poly)

    return Subroutine("ppe", build=build, domain=lambda s: {"x": _bits(s.n)}, oracle=oracle,
                      accept=accept, check=_ppe_check, min_n=4)


def _signed(code: int, n: int) -> int:
    return code - (1 << n) if code >> (n - 1) & 1 else code


def arcsine_tolerances(spec: SubroutineSpec) -> tuple[float, float]:
    poly = default_poly(spec)
    fit = _poly_fit_error(poly, 0, (1 << (spec.n - 2)) // 2 + 1)
    return arcsine_tolerance(poly, spec.n, fit)


def _arcsine_check(s, inp, outs, metrics):
    n, f = s.n, s.n - 2
    x = _signed(inp["x"], n) / 2**f
    got = _signed(outs["result"], n) / 2**f
    err = abs(got - math.asin(x))
    declared, derived = arcsine_tolerances(s)
    metrics["max_error"] = max(metrics.get("max_error", 0.0), err)
    metrics["declared_tolerance"] = declared
    metrics["derived_tolerance"] = derived
    metrics["within_declared"] = metrics["max_error"] <= declared
    if err > derived:
        return f"error {err} exceeds derived bound {derived}"
    return None


def _entry_arcsine():
    def accept(s, i):
        return abs(_signed(i["x"], s.n)) <= 1 << (s.n - 2)

    return Subroutine(
        "arcsine",
        build=lambda s: highlevel.build_arcsine(s.n, default_poly(s)),
        domain=lambda s: {"x": _bits(s.n)},
        oracle=lambda s, i: {"x": i["x"], "result": arcsine_codes(default_poly(s), s.n, i["x"])},
        accept=accept,
        check=_arcsine_check,
        min_n=5,
    )


def log_spec(s: SubroutineSpec) -> highlevel.LogSpec:
    return highlevel.LogSpec(s.get("h", 1), s.get("v", 0), s.get("direction", 0))


def _log_check(s, inp, outs, metrics):
    ls = log_spec(s)
    _, f = log_format(s.n, ls.h)
    _, width, fb = log_output(s.n, ls.h, ls.v, ls.direction, inp["a"], s.get("iterations"))
    got = outs["result"]
    if ls.v:
        got = _signed(got, width)
    exact = math.log2(inp["a"] / 2**f) + (-ls.v if ls.direction else ls.v)
    err = abs(got / 2**fb - exact)
    metrics["max_error"] = max(metrics.get("max_error", 0.0), err)
    return None


def _entry_log():
    def oracle(s, i):
        ls = log_spec(s)
        code, _, _ = log_output(s.n, ls.h, ls.v, ls.direction, i["a"], s.get("iterations"))
        return {"a": i["a"], "result": code}

    def domain(s):
        _, f = log_format(s.n, log_spec(s).h)
        return {"a": range(1 << f, 1 << (f + 1))}

    return Subroutine(
        "log",
        build=lambda s: highlevel.build_log(s.n, log_spec(s), s.get("iterations")),
        domain=domain,
        oracle=oracle,
        check=_log_check,
        min_n=3,
    )


_REGISTRY: dict[str, Subroutine] = {
    e.id: e
    for e in (
        _entry_increment(), _entry_cincrement(), _entry_cshift1(), _entry_toffoli_copy(), _entry_k_not(),
        _entry_og_adder(), _entry_cas_adder(), _entry_cog_adder(), _entry_comparator(), _entry_multiply(),
        _entry_square(), _entry_csquare(), _entry_cheap_multiply(), _entry_fma(), _entry_sqrt(),
        _entry_label(), _entry_next(), _entry_ppe(), _entry_arcsine(), _entry_log(),
    )
}


def lookup(sid: str) -> Subroutine:
    return _REGISTRY[canonical_id(sid)]


def build(spec: SubroutineSpec) -> Circuit:
    return lookup(spec.id).build(spec)


def input_space(spec: SubroutineSpec) -> int:
    size = 1
    for vals in lookup(spec.id).domain(spec).values():
        size *= len(vals)
    return size
