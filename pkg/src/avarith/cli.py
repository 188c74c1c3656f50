"""avarith command line: emit circuits, verify them, print cost tables."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from . import costs
from .circuit import gate_census, peak_qubits
from .reference import PolySpec
from .registry import SUBROUTINE_IDS, COMPONENT_IDS, SubroutineSpec, canonical_id, input_space, lookup
from .simulator import DEFAULT_BOUND, verify_exhaustive, verify_sampled

CONFIG_ENV = "AVARITH_CONFIG"


@dataclass
class CliConfig:
    c_ccz: float = 35
    bound: int = DEFAULT_BOUND
    samples: int = 500
    seed: int = 0
    format: str = "text"
    p_convention: str = "integer"

    def __post_init__(self):
        if self.bound < 1:
            raise ValueError("bound must be >= 1")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.c_ccz <= 0:
            raise ValueError("c_ccz must be > 0")

    @classmethod
    def load(cls, path: str | None) -> CliConfig:
        if not path:
            return cls()
        with open(path) as fh:
            data = json.load(fh)
        known = {k: data[k] for k in cls.__dataclass_fields__ if k in data}
        if "c" in data:
            known.setdefault("c_ccz", data["c"])
        return cls(**known)


def _config(args) -> CliConfig:
    base = CliConfig.load(os.environ.get(CONFIG_ENV))
    overrides = {
        "c_ccz": args.c, "bound": getattr(args, "bound", None), "samples": getattr(args, "samples", None),
        "seed": getattr(args, "seed", None), "format": args.format, "p_convention": args.p_convention,
    }
    merged = {**base.__dict__, **{k: v for k, v in overrides.items() if v is not None}}
    return CliConfig(**merged)


def _spec(args) -> SubroutineSpec:
    extras = {
        key: getattr(args, key)
        for key in ("p", "q", "M", "s", "h", "v", "k", "direction", "variant", "function", "step", "iterations")
        if getattr(args, key, None) is not None
    }
    if extras.get("p") is not None and args.p_convention == "fractional":
        extras["p"] = args.n - extras["p"]
    if getattr(args, "poly", None):
        with open(args.poly) as fh:
            extras["poly"] = PolySpec.from_dict(json.load(fh))
    if canonical_id(args.subroutine) == "log" and "direction" in extras:
        extras["direction"] = 1 if extras["direction"] in ("1", "down", "right") else 0
    return SubroutineSpec(args.subroutine, args.n, extras)


def _dump(obj, fmt: str):
    if fmt == "json":
        print(json.dumps(obj, indent=2, default=str))
    else:
        print(obj)


def _table(rows: list[list], header: list[str]) -> str:
    cells = [header] + [["" if c is None else str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


# ------------------------------------------------------------------ commands

def cmd_emit(args) -> int:
    cfg = _config(args)
    circuit = lookup(args.subroutine).build(_spec(args))
    text = circuit.to_json(indent=2) if cfg.format == "json" else circuit.to_text()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return 0


def cmd_verify(args) -> int:
    cfg = _config(args)
    spec = _spec(args)
    size = input_space(spec)
    # an explicit sample count or seed asks for sampling
    sampled = args.sampled or args.samples is not None or args.seed is not None
    if args.exhaustive or (size <= cfg.bound and not sampled):
        report = verify_exhaustive(spec, bound=max(cfg.bound, size) if args.exhaustive else cfg.bound)
    else:
        report = verify_sampled(spec, samples=cfg.samples, seed=cfg.seed)
    if cfg.format == "json":
        print(report.to_json(indent=2))
    else:
        print(report.summary())
        for inp, want, got in report.failures[:10]:
            print(f"  input {inp}: expected {want}, got {got}")
    return 0 if report.passed else 1


def _cost_record(spec: SubroutineSpec, cfg: CliConfig, census: bool) -> dict:
    params = costs.CostParams(cfg.c_ccz)
    rec: dict = {"subroutine": spec.id, "params": spec.describe(), "c_ccz": cfg.c_ccz}
    # _spec already converted p to integer bits
    cf = costs.closed_form_cost(spec, params, "integer")
    rec["closed_form"] = {**cf.to_dict(), "volume_symbolic": str(cf.volume.expr())}
    try:
        rec["segment_sum"] = costs.segment_sum_cost(spec, params).to_dict()
    except KeyError:
        rec["segment_sum"] = None
    if census:
        circuit = lookup(spec.id).build(spec)
        rec["gate_census"] = {
            "t_count": gate_census(circuit).t_count,
            "peak_qubits": peak_qubits(circuit),
            "naive_gate_sum": costs.naive_gate_sum(circuit, params).to_dict(),
        }
    rec["discrepancies"] = [d.to_dict() for d in costs.formula_discrepancies() if d.subject_id == spec.id]
    return rec


def cmd_cost(args) -> int:
    cfg = _config(args)
    spec = _spec(args)
    rec = _cost_record(spec, cfg, census=not args.no_census)
    if cfg.format == "json":
        _dump(rec, "json")
        return 0
    cf = rec["closed_form"]
    print(f"{spec.id} {rec['params']}  (C = {cfg.c_ccz})")
    rows = [["closed form", cf["active_volume"], cf["volume_symbolic"], cf["t_count"], cf["reaction_depth"], cf["peak_qubits"]]]
    if rec["segment_sum"]:
        s = rec["segment_sum"]
        rows.append(["segment sum", s["active_volume"], f"{s['volume_base']} + {s['volume_c_coeff']}*C",
                     s["t_count"], s["reaction_depth"], None])
    if "gate_census" in rec:
        g = rec["gate_census"]
        rows.append(["naive gate sum (upper-bound heuristic)", g["naive_gate_sum"]["active_volume"], None, None, None, None])
        rows.append(["gate census", None, None, g["t_count"], None, g["peak_qubits"]])
    print(_table(rows, ["source", "AV", "AV symbolic", "T", "depth", "peak"]))
    if rec["discrepancies"]:
        print("\ndiscrepancy log:")
        for d in rec["discrepancies"]:
            print(f"  {d['quantity']}: printed {d['printed']} | composed {d['derived']} | {d['note']}")
    return 0


def cmd_table(args) -> int:
    cfg = _config(args)
    rec = costs.table_row(args.table_id, args.n, costs.CostParams(cfg.c_ccz))
    if cfg.format == "json":
        _dump(rec, "json")
        return 0
    print(f"Table {rec['table']}: {rec['title']}" + (f"  at n={args.n}" if args.n else ""))
    rows = []
    for r in rec["rows"]:
        at = r.get("at_n") or {}
        rows.append([r["design"], r["column"], r["tabulated"], at.get("tabulated"), r["substituted"], at.get("substituted"), r["difference"]])
    print(_table(rows, ["design", "column", "tabulated", "value", "substituted", "value", "difference"]))
    return 0


def cmd_summary(args) -> int:
    cfg = _config(args)
    params = costs.CostParams(cfg.c_ccz)
    p = args.p
    if p is not None and cfg.p_convention == "fractional":
        p = args.n - p
    sizes = costs.Sizes(n=args.n, p=p, q=args.q or 1, M=args.M or 2, s=args.s, k=args.k or 2, h=args.h or 1)
    records = []
    for fid, label in costs.SUMMARY_ROWS:
        try:
            r = costs.formula_cost(fid, sizes, params)
        except ValueError as exc:
            records.append({"id": fid, "label": label, "error": str(exc)})
            continue
        records.append({"id": fid, "label": label, **r.to_dict(), "volume_symbolic": str(r.volume.expr())})
    if cfg.format == "json":
        _dump({"n": args.n, "c_ccz": cfg.c_ccz, "rows": records}, "json")
        return 0
    rows = [[r["label"], r.get("active_volume"), r.get("volume_symbolic", r.get("error")), r.get("t_count"),
             r.get("reaction_depth"), r.get("peak_qubits")] for r in records]
    print(f"Subroutine costs at n={args.n}, C={cfg.c_ccz}")
    print(_table(rows, ["subroutine", "AV", "AV symbolic", "T", "depth", "peak"]))
    return 0


def cmd_discrepancies(args) -> int:
    cfg = _config(args)
    found = costs.formula_discrepancies()
    census = costs.census_discrepancies(range(args.n_min, args.n_max + 1)) if args.census else []
    unexplained = [d for d in census if d.note == "UNEXPLAINED"]
    if cfg.format == "json":
        _dump({"formulas": [d.to_dict() for d in found], "census": [d.to_dict() for d in census]}, "json")
    else:
        print("Printed expression vs composition of its components")
        for d in found:
            print(f"- {d.subject} / {d.quantity}\n    printed:  {d.printed}\n    composed: {d.derived}\n    diff:     {d.difference}\n    {d.note}")
        if args.census:
            print(f"\nBuilt circuits vs printed T count / peak (n={args.n_min}..{args.n_max})")
            for d in census:
                print(f"- {d.subject} {d.quantity}: printed {d.printed}, built {d.derived}  [{d.note}]")
    return 1 if unexplained else 0


# -------------------------------------------------------------------- parser

def _number(text: str) -> int | float:
    value = float(text)
    return int(value) if value.is_integer() else value


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--c", type=_number, help="CCZ distillation cost in blocks (default 35)")
    p.add_argument("--format", choices=("text", "json"))
    p.add_argument("--p-convention", choices=("integer", "fractional"), default=None,
                   help="read --p as integer bits (default) or fractional bits")


def _add_spec(p: argparse.ArgumentParser):
    p.add_argument("subroutine", help=f"one of {', '.join(SUBROUTINE_IDS + COMPONENT_IDS)} (aliases such as cas, cmp, fma work)")
    p.add_argument("--n", type=int, required=True)
    for flag in ("p", "q", "M", "s", "h", "v", "k", "step", "iterations"):
        p.add_argument(f"--{flag}", type=int)
    p.add_argument("--direction", help="cshift1: left|right; log: 0|1 (subtract v when 1)")
    p.add_argument("--variant", help="cas_adder: flip; cincrement/square: table")
    p.add_argument("--function", help="function fitted for label/next/ppe (sin, cos, exp, sqrt, ...)")
    p.add_argument("--poly", help="JSON file with a piecewise polynomial")
    _add_common(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="avarith", description="Arithmetic circuits with active-volume cost model")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("emit", help="build a circuit and print it")
    _add_spec(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("verify", help="simulate a circuit against its classical oracle")
    _add_spec(p)
    p.add_argument("--exhaustive", action="store_true", help="force exhaustive simulation")
    p.add_argument("--sampled", action="store_true", help="force sampling")
    p.add_argument("--bound", type=int, help="largest input space simulated exhaustively")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("cost", help="closed form, segment sum and gate census")
    _add_spec(p)
    p.add_argument("--no-census", action="store_true", help="skip building the circuit")
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("table", help="baseline comparison table with equation substitution")
    p.add_argument("table_id", type=int, choices=(1, 2, 3, 4))
    p.add_argument("--n", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("summary", help="all closed forms at one size")
    p.add_argument("--n", type=int, required=True)
    for flag in ("p", "q", "M", "s", "h", "k"):
        p.add_argument(f"--{flag}", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_summary)

    p = sub.add_parser("discrepancies", help="printed formulas vs their compositions and the built circuits")
    p.add_argument("--census", action="store_true", help="also scan built circuits")
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=8)
    _add_common(p)
    p.set_defaults(func=cmd_discrepancies)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"avarith {args.command}: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
