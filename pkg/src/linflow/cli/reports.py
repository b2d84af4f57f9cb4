"""Classification reports in JSON and text form."""

from __future__ import annotations

import math

from .. import __version__
from ..equivalence import (
    Level,
    canon2,
    canon_complex,
    classify_complex,
    cross_ratio,
    decide,
)
from ..errors import DimensionMismatch, OutOfScope, UnsupportedDimension
from ..flowstruct import scu_split
from ..numcore import ToleranceProfile
from .documents import MatrixDocument, tolerance_block

ALL_LEVELS = (Level.TOPOLOGICAL, Level.ALL_HOLDER, Level.LIPSCHITZ, Level.SMOOTH)


def parse_levels(text: str) -> tuple[Level, ...]:
    """Comma separated level names, or ``all``."""
    names = [t.strip() for t in text.split(",") if t.strip()]
    if not names or "all" in names:
        return ALL_LEVELS
    out = []
    for n in names:
        lv = Level.parse(n)
        if lv not in out:
            out.append(lv)
    return tuple(out)


def _verdict(doc_a: MatrixDocument, doc_b: MatrixDocument, level: Level,
             tol: ToleranceProfile, seed: int) -> dict:
    try:
        if doc_a.is_complex:
            v = classify_complex(doc_a.entries, doc_b.entries, level, tol, seed)
        else:
            v = decide(doc_a.generator(), doc_b.generator(), level, tol, seed)
    except OutOfScope as exc:
        return {"level": level.value, "equivalent": None, "alpha": None, "time_reversed": False,
                "reasons": ["out-of-scope"], "beta": None, "implied": [],
                "details": {"message": str(exc)}}
    out = v.to_dict()
    out["details"].pop("witness", None)
    return out


def _canonical(doc: MatrixDocument, tol: ToleranceProfile, levels) -> dict | None:
    try:
        if doc.is_complex:
            return {lv.value: canon_complex(doc.entries, lv, tol).to_dict() for lv in levels}
        return {lv.value: canon2(doc.generator(), lv, tol).to_dict() for lv in levels}
    except UnsupportedDimension:
        return None


def classification_report(doc_a: MatrixDocument, doc_b: MatrixDocument, levels,
                          tol: ToleranceProfile, seed: int = 0) -> dict:
    """Verdicts, spectra and canonical forms for a pair of flows.

    Raises
    ------
    DimensionMismatch
        If the matrices differ in size or field.
    """
    if doc_a.field != doc_b.field:
        raise DimensionMismatch(f"{doc_a.name} is {doc_a.field} but {doc_b.name} is {doc_b.field}")
    if doc_a.dim != doc_b.dim:
        raise DimensionMismatch(f"{doc_a.name} has dimension {doc_a.dim} but {doc_b.name} has {doc_b.dim}")
    ga, gb = doc_a.generator(), doc_b.generator()
    fa, fb = scu_split(ga, tol), scu_split(gb, tol)
    report = {
        "tool": {"name": "linflow", "version": __version__},
        "tolerance": tolerance_block(tol),
        "seed": seed,
        "inputs": [doc_a.describe(), doc_b.describe()],
        "lyapunov": {"a": fa.lyapunov.tolist(), "b": fb.lyapunov.tolist()},
        "dims": {"a": {"stable": fa.d_s, "central": fa.d_c, "unstable": fa.d_u},
                 "b": {"stable": fb.d_s, "central": fb.d_c, "unstable": fb.d_u}},
        "verdicts": {lv.value: _verdict(doc_a, doc_b, lv, tol, seed) for lv in levels},
    }
    canon_levels = [lv for lv in levels if lv in ALL_LEVELS]
    ca = _canonical(doc_a, tol, canon_levels)
    cb = _canonical(doc_b, tol, canon_levels)
    report["canonical"] = {"a": ca, "b": cb} if ca is not None else None
    if fa.is_hyperbolic and fb.is_hyperbolic:
        cr = cross_ratio(fa, fb, tol)
        block = cr.to_dict()
        block["beta_star"] = math.sqrt(cr.rho) if cr.rho > 0 else None
        report["cross_ratio"] = block
    else:
        report["cross_ratio"] = None
    return report


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def _answer(eq) -> str:
    return {True: "yes", False: "no", None: "unknown"}[eq]


def render_text(report: dict) -> str:
    """Human-readable rendering of a classification report."""
    a, b = report["inputs"]
    lines = [f"A: {a['name']} ({a['field']}, d={a['dim']})",
             f"B: {b['name']} ({b['field']}, d={b['dim']})"]
    for key in ("a", "b"):
        dims = report["dims"][key]
        lyap = ", ".join(_fmt(v) for v in report["lyapunov"][key])
        lines.append(f"{key.upper()}: dims S/C/U = {dims['stable']}/{dims['central']}/{dims['unstable']};"
                     f" Lyapunov exponents ({lyap})")
    for name, v in report["verdicts"].items():
        extra = ""
        if v["equivalent"]:
            extra = f" alpha={_fmt(v['alpha'])}"
            if v["time_reversed"]:
                extra += " (time reversed)"
        lines.append(f"{name}: {_answer(v['equivalent'])}{extra} [{', '.join(v['reasons'])}]")
    if report.get("canonical"):
        for key in ("a", "b"):
            forms = report["canonical"][key]
            parts = []
            for lv, form in forms.items():
                params = ", ".join(f"{k}={_fmt(p)}" for k, p in sorted(form["params"].items()))
                parts.append(f"{lv}: {form['label']}" + (f" ({params})" if params else "")
                             + f" alpha={_fmt(form['alpha'])}")
            lines.append(f"canonical {key.upper()}: " + "; ".join(parts))
    cr = report.get("cross_ratio")
    if cr:
        lines.append(f"cross ratio: rho={_fmt(cr['rho'])} beta*={_fmt(cr['beta_star'])}")
    lines.append(f"tolerance fingerprint: {report['tolerance']['fingerprint']}")
    return "\n".join(lines) + "\n"
