"""Command line interface.

Subcommands wrap the library operations; all output is deterministic
for a fixed configuration (stable term ordering, fixed JSON key order,
repr floats).  Exit codes: 0 success, 2 invalid input, 3 internal
assertion failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import traceback
from dataclasses import dataclass, fields
from fractions import Fraction

from .exact import MultiPoly, format_rational, fresh_var, parse_rational
from .graphs import WeightVector, enumerate_star_graphs
from .kernels import DEFAULT_CONVENTION, ConventionFlags, aab_table, det_factor_forms, q_factor
from .polytopes import Block, CascadePolytope, integrate
from .recursion import (
    evaluate,
    has_integer_entry,
    riemann_diagnostic,
    scan,
    volume_normalization,
)
from .validate import run_validation

VISIBLE_SUBCOMMANDS = ("eval", "volhat", "scan", "graphs", "aab", "q", "riemann", "validate")


def _default_threads() -> int:
    raw = os.environ.get("FLATVOL_THREADS", "")
    try:
        val = int(raw)
    except ValueError:
        return 1
    return max(1, val)


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation, serializable and round-trippable."""

    subcommand: str
    g: int | None = None
    n: int | None = None
    alpha: tuple[str, ...] | None = None
    i0: int = 1
    s_exponent: str = DEFAULT_CONVENTION.s_exponent
    term_sign: str = DEFAULT_CONVENTION.term_sign
    fmt: str = "json"
    out: str | None = None
    threads: int = 1
    steps: int = 100
    base: tuple[str, ...] | None = None
    direction: tuple[str, ...] | None = None
    t_min: str | None = None
    t_max: str | None = None
    k: tuple[int, ...] = ()
    gmax: int = 3
    seed: int = 7
    count: int = 20

    def convention(self) -> ConventionFlags:
        return ConventionFlags(s_exponent=self.s_exponent, term_sign=self.term_sign)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            val = getattr(self, f.name)
            out[f.name] = list(val) if isinstance(val, tuple) else val
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        kwargs = {}
        for f in fields(cls):
            if f.name not in d:
                continue
            val = d[f.name]
            if isinstance(val, list):
                val = tuple(val)
            kwargs[f.name] = val
        return cls(**kwargs)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        kwargs = {"subcommand": args.subcommand}
        for f in fields(cls):
            if f.name == "subcommand":
                continue
            if hasattr(args, f.name):
                kwargs[f.name] = getattr(args, f.name)
        return cls(**kwargs)


def _comma_list(raw: str) -> tuple[str, ...]:
    toks = tuple(tok.strip() for tok in raw.split(",") if tok.strip())
    if not toks:
        raise argparse.ArgumentTypeError("expected a comma-separated list")
    return toks


def _comma_ints(raw: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in raw.split(",") if tok.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flatvol",
        description="Exact flat-surface volume polynomials via the star-graph recursion.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.metavar = "{" + ",".join(VISIBLE_SUBCOMMANDS) + "}"

    def add_common(sp, formats, default_fmt):
        sp.add_argument("--format", dest="fmt", choices=formats, default=default_fmt)
        sp.add_argument("--out", default=None, help="write output to this path instead of stdout")
        sp.add_argument("--threads", type=int, default=_default_threads(),
                        help="parallel tree-term evaluation (env FLATVOL_THREADS)")

    def add_convention(sp):
        sp.add_argument("--s-exponent", dest="s_exponent", choices=("shifted", "printed"),
                        default=DEFAULT_CONVENTION.s_exponent)
        sp.add_argument("--term-sign", dest="term_sign", choices=("prefactor", "printed"),
                        default=DEFAULT_CONVENTION.term_sign)

    def add_point(sp, alpha_required=True):
        sp.add_argument("--g", type=int, required=True, help="genus")
        sp.add_argument("--alpha", type=_comma_list, required=alpha_required,
                        help="weights as p/q,p/q,...")
        sp.add_argument("--i0", type=int, default=1, help="distinguished marking (1-based)")

    sp = sub.add_parser("eval", help="evaluate v at one weight vector")
    add_point(sp)
    add_convention(sp)
    add_common(sp, ("json", "text"), "json")

    sp = sub.add_parser("volhat", help="evaluate the normalized volume at one weight vector")
    add_point(sp)
    add_convention(sp)
    add_common(sp, ("json", "text"), "json")

    sp = sub.add_parser("scan", help="sample v along a line in weight space")
    sp.add_argument("--g", type=int, required=True)
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--steps", type=int, default=100)
    sp.add_argument("--base", type=_comma_list, default=None)
    sp.add_argument("--direction", type=_comma_list, default=None)
    sp.add_argument("--t-min", dest="t_min", default=None)
    sp.add_argument("--t-max", dest="t_max", default=None)
    sp.add_argument("--i0", type=int, default=1)
    add_convention(sp)
    add_common(sp, ("csv", "json"), "csv")

    sp = sub.add_parser("graphs", help="list the star graphs for (g, n)")
    sp.add_argument("--g", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--i0", type=int, default=1)
    sp.add_argument("--alpha", type=_comma_list, default=None,
                    help="optional weights, prints numeric twist levels")
    add_common(sp, ("text", "json"), "text")

    sp = sub.add_parser("aab", help="print the power-locus intersection table")
    sp.add_argument("--gmax", type=int, default=3)
    add_common(sp, ("text", "csv", "json"), "text")

    sp = sub.add_parser("q", help="print the trigonometric normalization factors")
    sp.add_argument("--g", type=int, required=True)
    sp.add_argument("--alpha", type=_comma_list, required=True)
    add_common(sp, ("json", "text"), "json")

    sp = sub.add_parser("riemann", help="compare twist lattice sums to exact integrals")
    sp.add_argument("--g", type=int, required=True)
    sp.add_argument("--alpha", type=_comma_list, required=True)
    sp.add_argument("--i0", type=int, default=1)
    sp.add_argument("--k", type=_comma_ints, default=(20, 40, 80),
                    help="lattice refinements, each k*alpha must be integral")
    add_common(sp, ("csv", "json"), "csv")

    sp = sub.add_parser("validate", help="run the convention matrix property suite")
    add_common(sp, ("text", "json"), "text")

    # maintenance hook, deliberately absent from the subcommand listing
    sp = sub.add_parser("integrate-test")
    add_common(sp, ("text",), "text")

    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_alpha(cfg: RunConfig) -> WeightVector:
    if cfg.g is None or cfg.alpha is None:
        raise ValueError("need --g and --alpha")
    entries = tuple(parse_rational(tok) for tok in cfg.alpha)
    if cfg.n is not None and cfg.n != len(entries):
        raise ValueError(f"--n {cfg.n} does not match {len(entries)} alpha entries")
    return WeightVector(cfg.g, entries)


def _value_doc(fv, vh: float | None) -> dict:
    conv = fv.convention
    return {
        "g": fv.alpha.genus,
        "n": fv.alpha.n,
        "alpha": [format_rational(e) for e in fv.alpha.entries],
        "i0": fv.i0,
        "convention": {"s_exponent": conv.s_exponent, "term_sign": conv.term_sign},
        "v": format_rational(fv.value),
        "volhat": vh,
        "terms": [{"tree": ident, "value": format_rational(val)} for ident, val in fv.terms],
    }


def _render_value(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    lines = [
        f"g = {doc['g']}, n = {doc['n']}",
        "alpha = " + ", ".join(doc["alpha"]),
        f"i0 = {doc['i0']}",
        f"convention = {doc['convention']['s_exponent']}/{doc['convention']['term_sign']}",
        f"v = {doc['v']}",
        f"volhat = {doc['volhat']}",
        "terms:",
    ]
    for term in doc["terms"]:
        lines.append(f"  {term['value']} : {term['tree']}")
    return "\n".join(lines) + "\n"


def cmd_eval(cfg: RunConfig) -> int:
    alpha = _parse_alpha(cfg)
    fv = evaluate(alpha, i0=cfg.i0, convention=cfg.convention(), threads=max(1, cfg.threads))
    vh = None
    if not has_integer_entry(alpha):
        vh = volume_normalization(alpha) * float(fv.value)
    _emit(_render_value(_value_doc(fv, vh), cfg.fmt), cfg.out)
    return 0


def cmd_volhat(cfg: RunConfig) -> int:
    alpha = _parse_alpha(cfg)
    if has_integer_entry(alpha):
        raise ValueError("wall point: some entry is a positive integer, volhat undefined")
    fv = evaluate(alpha, i0=cfg.i0, convention=cfg.convention(), threads=max(1, cfg.threads))
    vh = volume_normalization(alpha) * float(fv.value)
    _emit(_render_value(_value_doc(fv, vh), cfg.fmt), cfg.out)
    return 0


def _scan_rows(cfg: RunConfig):
    t_min = parse_rational(cfg.t_min) if cfg.t_min is not None else None
    t_max = parse_rational(cfg.t_max) if cfg.t_max is not None else None
    base = tuple(parse_rational(tok) for tok in cfg.base) if cfg.base else None
    direction = tuple(parse_rational(tok) for tok in cfg.direction) if cfg.direction else None
    if cfg.g is None:
        raise ValueError("need --g")
    return scan(
        cfg.g,
        n=cfg.n if cfg.n is not None else 2,
        steps=cfg.steps,
        base=base,
        direction=direction,
        t_min=t_min,
        t_max=t_max,
        i0=cfg.i0,
        convention=cfg.convention(),
        threads=max(1, cfg.threads),
    )


def cmd_scan(cfg: RunConfig) -> int:
    rows = _scan_rows(cfg)
    if cfg.fmt == "json":
        doc = {
            "g": cfg.g,
            "n": cfg.n if cfg.n is not None else 2,
            "rows": [
                {
                    "t": format_rational(r.t),
                    "alpha": [format_rational(e) for e in r.alpha],
                    "v": format_rational(r.value) if r.value is not None else None,
                    "volhat": r.volhat,
                    "flag": r.flag,
                }
                for r in rows
            ],
        }
        _emit(json.dumps(doc, indent=2, allow_nan=False) + "\n", cfg.out)
        return 0
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "alpha", "v_num", "v_den", "volhat", "flag"])
    for r in rows:
        alpha_col = ";".join(format_rational(e) for e in r.alpha)
        v_num = str(r.value.numerator) if r.value is not None else ""
        v_den = str(r.value.denominator) if r.value is not None else ""
        vh = repr(r.volhat) if r.volhat is not None else ""
        writer.writerow([repr(float(r.t)), alpha_col, v_num, v_den, vh, r.flag])
    _emit(buf.getvalue(), cfg.out)
    return 0


def cmd_graphs(cfg: RunConfig) -> int:
    if cfg.g is None or cfg.n is None:
        raise ValueError("need --g and --n")
    markings = tuple(range(1, cfg.n + 1))
    weights = None
    if cfg.alpha is not None:
        weights = _parse_alpha(cfg).weight_map()
    graphs = enumerate_star_graphs(cfg.g, markings, cfg.i0)
    lines = [gph.encode(weights) for gph in graphs]
    if cfg.fmt == "json":
        _emit(json.dumps(lines, indent=2) + "\n", cfg.out)
    else:
        _emit("\n".join(lines) + ("\n" if lines else ""), cfg.out)
    return 0


def cmd_aab(cfg: RunConfig) -> int:
    if cfg.gmax < 1:
        raise ValueError("--gmax must be >= 1")
    table = aab_table(cfg.gmax)
    if cfg.fmt == "json":
        doc = {"gmax": cfg.gmax, "a": [format_rational(table.a(g)) for g in range(1, cfg.gmax + 1)]}
        _emit(json.dumps(doc, indent=2) + "\n", cfg.out)
        return 0
    if cfg.fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["g", "num", "den"])
        for g in range(1, cfg.gmax + 1):
            val = table.a(g)
            writer.writerow([g, val.numerator, val.denominator])
        _emit(buf.getvalue(), cfg.out)
        return 0
    lines = [f"a_{g} = {format_rational(table.a(g))}" for g in range(1, cfg.gmax + 1)]
    _emit("\n".join(lines) + "\n", cfg.out)
    return 0


def cmd_q(cfg: RunConfig) -> int:
    alpha = _parse_alpha(cfg)
    q = q_factor(alpha.genus, alpha.entries)
    sym, closed = det_factor_forms(alpha.genus, alpha.entries)
    doc = {
        "g": alpha.genus,
        "n": alpha.n,
        "alpha": [format_rational(e) for e in alpha.entries],
        "q": q,
        "det_sym": sym,
        "det_closed": closed,
    }
    if cfg.fmt == "json":
        _emit(json.dumps(doc, indent=2, allow_nan=False) + "\n", cfg.out)
    else:
        lines = [f"q = {q}", f"det_sym = {sym}", f"det_closed = {closed}"]
        _emit("\n".join(lines) + "\n", cfg.out)
    return 0


def cmd_riemann(cfg: RunConfig) -> int:
    alpha = _parse_alpha(cfg)
    if not cfg.k:
        raise ValueError("need --k with at least one refinement")
    rows = riemann_diagnostic(alpha, cfg.k, i0=cfg.i0)
    if cfg.fmt == "json":
        doc = [
            {
                "graph": r.graph,
                "k": r.k,
                "lattice": format_rational(r.lattice),
                "exact": format_rational(r.exact),
                "rel_error": r.rel_error,
            }
            for r in rows
        ]
        _emit(json.dumps(doc, indent=2, allow_nan=False) + "\n", cfg.out)
        return 0
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["graph", "k", "lattice", "exact", "rel_error"])
    for r in rows:
        writer.writerow([r.graph, r.k, format_rational(r.lattice),
                         format_rational(r.exact), repr(r.rel_error)])
    _emit(buf.getvalue(), cfg.out)
    return 0


def cmd_validate(cfg: RunConfig) -> int:
    report = run_validation()
    if cfg.fmt == "json":
        _emit(json.dumps(report.to_dict(), indent=2) + "\n", cfg.out)
    else:
        _emit(report.render() + "\n", cfg.out)
    return 0 if report.ok else 3


def cmd_integrate_test(cfg: RunConfig) -> int:
    lines = []

    def check(desc, got, want):
        if got != want:
            raise AssertionError(f"{desc}: got {got}, want {want}")
        lines.append(f"ok: {desc} = {want}")

    v1, v2, v3 = fresh_var("p1"), fresh_var("p2"), fresh_var("p3")
    tri = CascadePolytope((Block((v1, v2, v3), MultiPoly.const(Fraction(1))),))
    check("2-simplex measure", integrate(MultiPoly.one(), tri), Fraction(1, 2))
    check("2-simplex first moment", integrate(MultiPoly.variable(v1), tri), Fraction(1, 6))

    b1, b2 = fresh_var("p4"), fresh_var("p5")
    seg = CascadePolytope((Block((b1, b2), MultiPoly.const(Fraction(1, 2))),))
    prod = MultiPoly.variable(b1) * MultiPoly.variable(b2)
    check("segment quadratic moment", integrate(prod, seg), Fraction(1, 48))

    x, y, z = fresh_var("p6"), fresh_var("p7"), fresh_var("p8")
    casc = CascadePolytope(
        (
            Block((x, y), MultiPoly.const(Fraction(1))),
            Block((z,), MultiPoly.variable(x)),
        )
    )
    check("cascade moment", integrate(MultiPoly.variable(x) * MultiPoly.variable(z), casc),
          Fraction(1, 3))

    u = fresh_var("p9")
    atom = CascadePolytope((Block((u,), MultiPoly.const(Fraction(1, 4))),))
    check("atom substitution", integrate(MultiPoly.variable(u), atom), Fraction(1, 4))

    w = fresh_var("p10")
    empty = CascadePolytope((Block((w,), MultiPoly.const(Fraction(-1, 3))),))
    check("empty atom", integrate(MultiPoly.one(), empty), Fraction(0))

    _emit("\n".join(lines) + "\n", cfg.out)
    return 0


_HANDLERS = {
    "eval": cmd_eval,
    "volhat": cmd_volhat,
    "scan": cmd_scan,
    "graphs": cmd_graphs,
    "aab": cmd_aab,
    "q": cmd_q,
    "riemann": cmd_riemann,
    "validate": cmd_validate,
    "integrate-test": cmd_integrate_test,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig.from_args(args)
    try:
        return _HANDLERS[cfg.subcommand](cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        return 0
    except OSError as exc:
        # bad --out path, permission, full disk: user environment, not a bug
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
