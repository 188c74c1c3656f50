"""Classical bit-exact models of the high-level circuits.

These mirror the arithmetic each circuit performs (including every
truncation) so simulation results can be compared exactly; tolerance checks
against the real functions are layered on top in the registry.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import nnls

FUNCTIONS: dict[str, Callable[[float], float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "arcsin": math.asin,
    "sqrt": math.sqrt,
    "identity": lambda x: x,
}


def isqrt_rem(a: int) -> tuple[int, int]:
    r = math.isqrt(a)
    return r, a - r * r


def cheap_product(x: int, y: int, n: int, p: int) -> tuple[int, int]:
    """Truncated fixed-point product as the cheap multiplier computes it.

    Returns (result code, overflow bits packed LSB-first).
    """
    f = n - p
    mask = (1 << n) - 1
    acc, overflow = 0, 0
    for i in range(n):
        if not x >> i & 1:
            continue
        if i < f:
            acc += y >> (f - i)
        else:
            s = i - f
            w = n - s
            window = (acc >> s) + (y & ((1 << w) - 1))
            overflow |= (window >> w) << s
            acc = (acc & ((1 << s) - 1)) | ((window & ((1 << w) - 1)) << s)
    return acc & mask, overflow


def cheap_error_bound(n: int, p: int) -> float:
    return n / 2 ** (n - p)


@dataclass(frozen=True)
class PolySpec:
    """Piecewise polynomial: subdomain j covers [bounds[j-1], bounds[j]).

    ``coefficients[j][i]`` is the coefficient of x^i on subdomain j;
    ``words`` holds the same values rounded to the fixed-point grid.
    """

    degree: int
    boundaries: tuple[float, ...]
    coefficients: tuple[tuple[float, ...], ...]
    n: int
    p: int
    function: str = "custom"
    domain: tuple[float, float] = (0.0, 1.0)
    words: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        if len(self.coefficients) != len(self.boundaries) + 1:
            raise ValueError("need one coefficient table per subdomain (M = boundaries + 1)")
        if any(len(c) != self.degree + 1 for c in self.coefficients):
            raise ValueError("each subdomain needs exactly degree+1 coefficients")
        if any(b2 <= b1 for b1, b2 in zip(self.boundaries, self.boundaries[1:])):
            raise ValueError("boundaries must be strictly increasing")
        if not self.words:
            scale = 1 << (self.n - self.p)
            words = tuple(tuple(int(round(a * scale)) for a in row) for row in self.coefficients)
            object.__setattr__(self, "words", words)
        limit = 1 << self.n
        if any(not 0 <= w < limit for row in self.words for w in row):
            raise ValueError("coefficients must be non-negative and fit the (n, p) format")

    @property
    def segments(self) -> int:
        return len(self.coefficients)

    @property
    def label_bits(self) -> int:
        return math.ceil(math.log2(self.segments)) if self.segments > 1 else 0

    @property
    def boundary_codes(self) -> list[int]:
        scale = 1 << (self.n - self.p)
        return [math.ceil(b * scale - 1e-12) for b in self.boundaries]

    def label(self, code: int) -> int:
        return bisect_right(self.boundary_codes, code)

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "boundaries": list(self.boundaries),
            "coefficients": [list(r) for r in self.coefficients],
            "n": self.n,
            "p": self.p,
            "function": self.function,
            "domain": list(self.domain),
        }

    @classmethod
    def from_dict(cls, d: dict) -> PolySpec:
        return cls(
            d["degree"],
            tuple(d.get("boundaries", ())),
            tuple(tuple(r) for r in d["coefficients"]),
            d["n"],
            d["p"],
            d.get("function", "custom"),
            tuple(d.get("domain", (0.0, 1.0))),
        )


def fit_poly(function: str, lo: float, hi: float, segments: int, degree: int, n: int, p: int) -> PolySpec:
    """Non-negative least-squares fit per equal-width subdomain.

    Coefficients are constrained to be >= 0 so every Horner intermediate is
    a non-negative fixed-point value (the multiplier is unsigned).
    """
    f = FUNCTIONS[function]
    edges = np.linspace(lo, hi, segments + 1)
    coeffs = []
    for a, b in zip(edges, edges[1:]):
        xs = np.linspace(a, b, 64)
        design = np.vander(xs, degree + 1, increasing=True)
        sol, _ = nnls(design, np.array([f(v) for v in xs]))
        coeffs.append(tuple(float(c) for c in sol))
    return PolySpec(degree, tuple(float(e) for e in edges[1:-1]), tuple(coeffs), n, p, function, (lo, hi))


def horner_codes(poly: PolySpec, code: int) -> tuple[int, list[int]]:
    """Mirror of the PPE datapath: returns (result code, accumulator codes)."""
    n, p = poly.n, poly.p
    mask = (1 << n) - 1
    words = poly.words[poly.label(code)]
    q = poly.degree
    acc = words[q]
    accs = []
    for it in range(1, q + 1):
        prod, _ = cheap_product(code, acc, n, p)
        acc = (prod + words[q - it]) & mask
        accs.append(acc)
    return acc, accs


def poly_value(poly: PolySpec, x: float) -> float:
    j = bisect_right(list(poly.boundaries), x)
    scale = 1 << (poly.n - poly.p)
    return sum(w / scale * x**i for i, w in enumerate(poly.words[j]))


def fit_error(poly: PolySpec, codes: Sequence[int]) -> float:
    """Max |rounded-coefficient polynomial - function| over the given input codes."""
    f = FUNCTIONS[poly.function]
    scale = 1 << (poly.n - poly.p)
    return max(abs(poly_value(poly, c / scale) - f(c / scale)) for c in codes)


# ------------------------------------------------------------------ arcsine

def arcsine_codes(poly: PolySpec, n: int, x: int) -> int:
    """Bit-exact model of the arcsine circuit; x is an n-bit two's complement
    code with n-2 fractional bits.  Returns the n-bit output code."""
    f = n - 2
    mask = (1 << n) - 1
    neg = x >> (n - 1) & 1
    ax = ((x ^ mask) + 1) & mask if neg else x
    small = not (ax >> (n - 2) & 1) and not (ax >> (n - 3) & 1)
    if small:
        pin = ax
    else:
        d = (1 << f) - ax
        pin, _ = isqrt_rem(d << (f - 1))
    pout, _ = horner_codes(poly, pin)
    if small:
        r = pout
    else:
        half_pi = round(math.pi / 2 * (1 << f)) & mask
        r = (half_pi - ((pout << 1) & mask)) & mask
    if neg:
        r = ((r ^ mask) + 1) & mask
    return r


def arcsine_tolerance(poly: PolySpec, n: int, fit_err: float) -> tuple[float, float]:
    """(declared tolerance, derived bound) for the arcsine output.

    The declared form is fit + (2q+4) 2^-f.  The derived bound follows the
    datapath: case |x| >= 1/2 doubles the polynomial error, which is the fit
    error plus q cheap-multiply truncations of at most n 2^-f each, and adds
    the square-root floor (amplified by the polynomial slope), the pi/2
    rounding and the final shift.
    """
    f = n - 2
    q = poly.degree
    ulp = 2.0**-f
    declared = fit_err + (2 * q + 4) * ulp
    derived = 2 * (fit_err + q * cheap_error_bound(n, 2)) + 4 * ulp
    return declared, derived


# ---------------------------------------------------------------------- log

def log_format(n: int, h: int) -> tuple[int, int]:
    """(integer bits, fractional bits) of the log circuit's working registers,
    which hold normalized values in [1, 2^(h+1))."""
    ib = h + 1
    if n - ib < 1:
        raise ValueError(f"log with h={h} needs n >= {ib + 1}")
    return ib, n - ib


def log_digits(n: int, h: int, code: int, iterations: int | None = None) -> list[int]:
    """Digits d_1.. of log base B = 2^(h+1) as the circuit computes them.

    Digit d_{i+1} = [a_i^2 >= B] and a_{i+1} = a_i^2 / B^d.  When h+1 is even
    the digit is [a_i >= 2^k] (a test on the top k bits) and the division is a
    k-place right shift of a_i before squaring, which drops k low bits.  When
    h+1 is odd the digit is read from the square, which is then shifted by
    h+1 places.
    """
    ib, f = log_format(n, h)
    k = (h + 1) // 2
    a = code
    digits = []
    for _ in range(n - 1 if iterations is None else iterations):
        if (h + 1) % 2 == 0:
            d = int(a >> (n - k) != 0)
            sq = (a >> (k * d)) ** 2
        else:
            sq = a * a
            d = int(sq >> (2 * f + h + 1) != 0)
            sq >>= (h + 1) * d
        a = (sq >> f) & ((1 << n) - 1)
        digits.append(d)
    return digits


def log_output(n: int, h: int, v: int, direction: int, code: int, iterations: int | None = None) -> tuple[int, int, int]:
    """Output code of the log circuit: (code, width, fractional bits)."""
    digits = log_digits(n, h, code, iterations)
    m = len(digits)
    frac = sum(dg << (m - 1 - i) for i, dg in enumerate(digits))
    if h == 1:
        val, width, fb = frac, m, m - 1
    else:
        alpha = (h + 1).bit_length()
        val, width, fb = frac * (h + 1), m + alpha, m
    if v:
        width = width + v.bit_length() + 2
        val = (val + (-v if direction else v) * (1 << fb)) % (1 << width)
    return val, width, fb
