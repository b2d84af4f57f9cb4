"""Entry point of the ``linflow`` command.

Exit codes: 0 success, 2 unparsable input, 3 dimension problems,
4 numerical failure, 5 flows not equivalent (``conjugate`` only).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .. import __version__
from ..conjugacy import SamplingSpec, build_pipeline, round_trip_error, verify_relation
from ..equivalence import Level, canon2, canon_complex, decide
from ..errors import (
    DimensionMismatch,
    DomainError,
    LinflowError,
    NumericalFailure,
    OutOfScope,
    ParseError,
    RangeError,
    UnsupportedDimension,
)
from ..floweval import fixed_space, imaginary_spectrum, minimal_period
from ..flowstruct import real_jordan, scu_split
from ..numcore import ToleranceProfile, eigenvalues
from .documents import dumps, load_matrix, tolerance_block
from .portrait import parse_window, portrait_csv, portrait_orbits, portrait_svg
from .reports import classification_report, parse_levels, render_text

EXIT_OK, EXIT_PARSE, EXIT_DIM, EXIT_NUMERIC, EXIT_NOT_EQUIVALENT = 0, 2, 3, 4, 5


class NotEquivalent(LinflowError):
    """The requested conjugacy does not exist."""


def _tolerance(pairs: list[str] | None) -> ToleranceProfile:
    tol = ToleranceProfile.from_env()
    overrides = {}
    for item in pairs or []:
        if "=" not in item:
            raise ParseError(f"--tol expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        overrides[k.strip()] = v.strip()
    return tol.with_overrides(overrides)


def _emit(text: str, path: str | None) -> None:
    if path and path != "-":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _pair(args):
    doc_a, doc_b = load_matrix(args.a), load_matrix(args.b)
    if doc_a.field != doc_b.field:
        raise DimensionMismatch(f"{args.a} is {doc_a.field} but {args.b} is {doc_b.field}")
    if doc_a.dim != doc_b.dim:
        raise DimensionMismatch(f"{args.a} has dimension {doc_a.dim} but {args.b} has {doc_b.dim}")
    return doc_a, doc_b


def cmd_classify(args) -> int:
    tol = _tolerance(args.tol)
    doc_a, doc_b = _pair(args)
    report = classification_report(doc_a, doc_b, parse_levels(args.level), tol, args.seed)
    if args.json:
        _emit(dumps(report), args.json)
    if args.json != "-":
        sys.stdout.write(render_text(report))
    return EXIT_OK


def cmd_canon(args) -> int:
    tol = _tolerance(args.tol)
    doc = load_matrix(args.a)
    levels = [lv for lv in parse_levels(args.level)]
    fn = canon_complex if doc.is_complex else canon2
    arg = doc.entries if doc.is_complex else doc.generator()
    forms = {lv.value: fn(arg, lv, tol).to_dict() for lv in levels}
    doc_out = {"tool": {"name": "linflow", "version": __version__}, "tolerance": tolerance_block(tol),
               "input": doc.describe(), "canonical": forms}
    if args.json:
        _emit(dumps(doc_out), args.json)
    if args.json != "-":
        for lv, f in forms.items():
            params = ", ".join(f"{k}={v:.10g}" for k, v in sorted(f["params"].items()))
            sys.stdout.write(f"{lv}: {f['label']}" + (f" ({params})" if params else "")
                             + f" alpha={f['alpha']:.10g}\n")
    return EXIT_OK


def _spectrum_data(doc, tol) -> dict:
    g = doc.generator()
    spec = eigenvalues(g, tol)
    fd = scu_split(g, tol)
    jd = real_jordan(g, tol)
    return {
        "tool": {"name": "linflow", "version": __version__},
        "tolerance": tolerance_block(tol),
        "input": doc.describe(),
        "realified": doc.is_complex,
        "eigenvalues": [{"re": c.value.real, "im": c.value.imag, "multiplicity": c.multiplicity}
                        for c in spec.clusters],
        "jordan_blocks": [{"re": b.value.real, "im": b.value.imag, "size": b.size} for b in jd.blocks],
        "jordan_condition": jd.condition,
        "lyapunov": fd.lyapunov.tolist(),
        "dims": {"stable": fd.d_s, "central": fd.d_c, "unstable": fd.d_u},
        "imaginary_spectrum": [[z.real, z.imag] for z in imaginary_spectrum(g, tol)],
        "fixed_dim": int(fixed_space(g, tol).shape[1]),
    }


def cmd_spectrum(args) -> int:
    tol = _tolerance(args.tol)
    data = _spectrum_data(load_matrix(args.a), tol)
    if args.json:
        _emit(dumps(data), args.json)
    if args.json != "-":
        lines = []
        for e in data["eigenvalues"]:
            z = complex(e["re"], e["im"])
            txt = f"{z.real:.10g}" if z.imag == 0 else f"{z.real:.10g} +/- {z.imag:.10g}i"
            lines.append(f"eigenvalue {txt} multiplicity {e['multiplicity']}")
        blocks = ", ".join(f"J_{b['size']}({complex(b['re'], b['im'])})" for b in data["jordan_blocks"])
        lines.append(f"real Jordan blocks: {blocks}")
        d = data["dims"]
        lines.append(f"dims S/C/U = {d['stable']}/{d['central']}/{d['unstable']}")
        lines.append("Lyapunov exponents: " + ", ".join(f"{v:.10g}" for v in data["lyapunov"]))
        sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_conjugate(args) -> int:
    tol = _tolerance(args.tol)
    doc_a, doc_b = _pair(args)
    ga, gb = doc_a.generator(), doc_b.generator()
    level = Level.parse(args.level)
    verdict = decide(ga, gb, level, tol, args.seed)
    if not verdict.equivalent:
        raise NotEquivalent(f"{doc_a.name} and {doc_b.name} are not {level.value} equivalent"
                            f" (reason: {', '.join(verdict.reasons)})")
    h = build_pipeline(ga, gb, verdict, tol, args.seed)
    out = {"tool": {"name": "linflow", "version": __version__}, "tolerance": tolerance_block(tol),
           "inputs": [doc_a.describe(), doc_b.describe()], "level": level.value,
           "alpha": verdict.alpha, "seed": args.seed, "map": h.to_dict()}
    if args.verify:
        spec = SamplingSpec(seed=args.seed)
        res = verify_relation(h, ga, gb, verdict.alpha, spec, tol)
        out["verification"] = {"max_residual": res, "round_trip": round_trip_error(h, seed=args.seed),
                               "n_times": spec.n_times, "t_range": list(spec.t_range),
                               "n_points": spec.n_points, "radius": spec.radius,
                               "passed": res <= tol.residual_tol}
    _emit(dumps(out), args.out)
    if args.out and args.out != "-":
        sys.stdout.write(f"map: {h.kind} on R^{h.dim_in}, alpha={verdict.alpha:.10g}\n")
        if args.verify:
            v = out["verification"]
            sys.stdout.write(f"max residual {v['max_residual']:.3e}, round trip {v['round_trip']:.3e}\n")
    return EXIT_OK


def cmd_portrait(args) -> int:
    tol = _tolerance(args.tol)
    doc = load_matrix(args.a)
    window = parse_window(args.window)
    project = None
    if args.project:
        try:
            i, j = (int(v) - 1 for v in args.project.split(","))
        except ValueError:
            raise ParseError(f"--project expects two coordinates i,j, got {args.project!r}") from None
        project = (i, j)
    orbits = portrait_orbits(doc.generator(), window, args.orbits, args.t_max, args.steps,
                             args.seed, project, tol)
    fmt = args.format or ("csv" if args.out.lower().endswith(".csv") else "svg")
    text = portrait_csv(orbits) if fmt == "csv" else portrait_svg(orbits, window)
    _emit(text, args.out)
    return EXIT_OK


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")], dtype=float)
    except ValueError:
        raise ParseError(f"--x expects comma separated numbers, got {text!r}") from None


def cmd_period(args) -> int:
    tol = _tolerance(args.tol)
    doc = load_matrix(args.a)
    g = doc.generator()
    x = _parse_vector(args.x)
    if x.shape[0] != g.dim:
        raise DimensionMismatch(f"point has {x.shape[0]} coordinates but {args.a} acts on R^{g.dim}")
    res = minimal_period(g, x, tol)
    data = {"tool": {"name": "linflow", "version": __version__}, "tolerance": tolerance_block(tol),
            "input": doc.describe(), "x": x.tolist(), "period": res.to_dict()}
    if args.json:
        _emit(dumps(data), args.json)
    if args.json != "-":
        if res.kind == "finite":
            line = f"period {res.value:.15g} (2 pi / {2 * math.pi / res.value:.15g})"
        elif res.kind == "zero":
            line = "period 0 (fixed point)"
        else:
            line = "period infinite"
        if res.frequencies:
            line += "; frequencies " + ", ".join(f"{f:.10g}" for f in res.frequencies)
        sys.stdout.write(line + "\n")
    return EXIT_OK


def _batch_item(item, base, tol, seed):
    def path(p):
        return p if os.path.isabs(p) else os.path.join(base, p)

    levels = item.get("levels", "all")
    if isinstance(levels, list):
        levels = ",".join(levels)
    doc_a, doc_b = load_matrix(path(item["a"])), load_matrix(path(item["b"]))
    try:
        return classification_report(doc_a, doc_b, parse_levels(levels), tol, seed)
    except LinflowError as exc:
        return {"inputs": [doc_a.describe(), doc_b.describe()],
                "error": {"type": type(exc).__name__, "message": str(exc)}}


def cmd_batch(args) -> int:
    tol = _tolerance(args.tol)
    try:
        with open(args.manifest, encoding="utf-8") as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{args.manifest}: cannot read manifest ({exc})") from None
    pairs = manifest.get("pairs") if isinstance(manifest, dict) else None
    if not isinstance(pairs, list) or not all(isinstance(p, dict) and "a" in p and "b" in p for p in pairs):
        raise ParseError(f"{args.manifest}: expected {{\"pairs\": [{{\"a\": ..., \"b\": ...}}, ...]}}")
    base = os.path.dirname(os.path.abspath(args.manifest))
    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        reports = list(pool.map(lambda it: _batch_item(it, base, tol, args.seed), pairs))
    _emit(dumps({"tool": {"name": "linflow", "version": __version__}, "reports": reports}), args.json)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="linflow", description="Classify linear flows x' = Ax.")
    p.add_argument("--version", action="version", version=f"linflow {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--tol", action="append", metavar="KEY=VALUE",
                        help="override a tolerance (repeatable)")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("classify", help="decide equivalence of two flows")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--level", default="all",
                    help="topological, holder, lipschitz, smooth, or all (comma separated)")
    sp.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("canon", help="canonical representative in dimension at most two")
    sp.add_argument("a")
    sp.add_argument("--level", default="topological")
    sp.add_argument("--json", metavar="PATH")
    common(sp)
    sp.set_defaults(func=cmd_canon)

    sp = sub.add_parser("spectrum", help="eigenvalues, Jordan blocks and Lyapunov exponents")
    sp.add_argument("a")
    sp.add_argument("--json", metavar="PATH")
    common(sp)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("conjugate", help="build and export a conjugacy")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--out", required=True, help="path of the JSON map document ('-' for stdout)")
    sp.add_argument("--level", default="topological")
    sp.add_argument("--verify", action="store_true", help="check the flow relation on a sample grid")
    common(sp)
    sp.set_defaults(func=cmd_conjugate)

    sp = sub.add_parser("portrait", help="write a planar phase portrait")
    sp.add_argument("a")
    sp.add_argument("--out", required=True)
    sp.add_argument("--window", default="-1,1,-1,1", help="x0,x1,y0,y1")
    sp.add_argument("--orbits", type=int, default=16)
    sp.add_argument("--steps", type=int, default=200)
    sp.add_argument("--t-max", type=float, default=4.0)
    sp.add_argument("--project", help="coordinates i,j (1-based) for d > 2")
    sp.add_argument("--format", choices=["svg", "csv"])
    common(sp)
    sp.set_defaults(func=cmd_portrait)

    sp = sub.add_parser("period", help="minimal period of a point")
    sp.add_argument("a")
    sp.add_argument("--x", required=True, help="comma separated coordinates")
    sp.add_argument("--json", metavar="PATH")
    common(sp)
    sp.set_defaults(func=cmd_period)

    sp = sub.add_parser("batch", help="classify the pairs listed in a manifest")
    sp.add_argument("manifest")
    sp.add_argument("--json", metavar="PATH")
    sp.add_argument("--workers", type=int, default=4)
    common(sp)
    sp.set_defaults(func=cmd_batch)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with np.errstate(all="ignore"):
            return args.func(args)
    except NotEquivalent as exc:
        code, msg = EXIT_NOT_EQUIVALENT, str(exc)
    except (ParseError, DomainError, ValueError) as exc:
        code, msg = EXIT_PARSE, str(exc)
    except (DimensionMismatch, UnsupportedDimension, OutOfScope) as exc:
        code, msg = EXIT_DIM, str(exc)
    except (NumericalFailure, RangeError) as exc:
        code, msg = EXIT_NUMERIC, str(exc)
    sys.stderr.write(f"linflow: error: {msg}\n")
    return code
