"""Planar phase portraits written as SVG or CSV."""

from __future__ import annotations

import io

import numpy as np

from ..errors import DomainError, RangeError, UnsupportedDimension
from ..floweval import flow_matrix
from ..numcore import DEFAULT_TOL, ToleranceProfile, as_generator

SVG_SIZE = 480


def parse_window(text: str) -> tuple[float, float, float, float]:
    """``"x0,x1,y0,y1"`` with ``x0 < x1`` and ``y0 < y1``."""
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise DomainError(f"window {text!r} is not four numbers") from None
    if len(vals) != 4 or not (vals[0] < vals[1] and vals[2] < vals[3]):
        raise DomainError(f"window {text!r} must be x0,x1,y0,y1 with x0<x1 and y0<y1")
    return vals


def portrait_orbits(a, window=(-1.0, 1.0, -1.0, 1.0), n_orbits: int = 16, t_max: float = 4.0,
                    n_steps: int = 200, seed: int = 0, project: tuple[int, int] | None = None,
                    tol: ToleranceProfile = DEFAULT_TOL) -> list[np.ndarray]:
    """Orbits through seeded starting points, as ``(n, 3)`` arrays of ``(t, x, y)``.

    Starting points are uniform in the window. For ``d > 2`` a pair of
    coordinates ``project`` must be given; starting points then lie in that
    coordinate plane and orbits are projected back onto it. Samples that
    leave a tenfold enlargement of the window are dropped.

    Raises
    ------
    UnsupportedDimension
        If ``d != 2`` and no projection is given.
    """
    g = as_generator(a)
    d = g.dim
    if project is None:
        if d != 2:
            raise UnsupportedDimension(f"portraits need d = 2, got d = {d}; pass a projection")
        project = (0, 1)
    i, j = project
    if not (0 <= i < d and 0 <= j < d and i != j):
        raise DomainError(f"projection {project} is not a pair of distinct coordinates below {d}")
    x0, x1, y0, y1 = window
    rng = np.random.default_rng(seed)
    starts = np.zeros((n_orbits, d))
    starts[:, i] = rng.uniform(x0, x1, n_orbits)
    starts[:, j] = rng.uniform(y0, y1, n_orbits)
    times = np.linspace(-t_max, t_max, 2 * n_steps + 1)
    mats = []
    for t in times:
        try:
            mats.append(flow_matrix(g, t, tol))
        except RangeError:
            mats.append(None)
    span = 10.0 * max(x1 - x0, y1 - y0) + max(abs(x0), abs(x1), abs(y0), abs(y1))
    orbits = []
    for s in starts:
        rows = []
        for t, m in zip(times, mats):
            if m is None:
                continue
            p = m @ s
            if np.all(np.isfinite(p)) and np.abs(p[[i, j]]).max() <= span:
                rows.append((t, p[i], p[j]))
        orbits.append(np.array(rows).reshape(-1, 3))
    return orbits


def portrait_csv(orbits) -> str:
    """CSV with header ``orbit,t,x_1,x_2``."""
    buf = io.StringIO()
    buf.write("orbit,t,x_1,x_2\n")
    for k, orb in enumerate(orbits):
        for t, x, y in orb:
            buf.write(f"{k},{t:.6f},{x:.9g},{y:.9g}\n")
    return buf.getvalue()


def portrait_svg(orbits, window) -> str:
    """SVG drawing of the orbits clipped to the window.

    Orbits that do not move are drawn as dots.
    """
    x0, x1, y0, y1 = window
    sx = SVG_SIZE / (x1 - x0)
    sy = SVG_SIZE / (y1 - y0)

    def px(x, y):
        return (x - x0) * sx, (y1 - y) * sy

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" '
           f'viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
           f'<rect x="0" y="0" width="{SVG_SIZE}" height="{SVG_SIZE}" fill="white" stroke="black"/>']
    if x0 < 0 < x1:
        cx, _ = px(0.0, 0.0)
        out.append(f'<line x1="{cx:.2f}" y1="0" x2="{cx:.2f}" y2="{SVG_SIZE}" stroke="#cccccc"/>')
    if y0 < 0 < y1:
        _, cy = px(0.0, 0.0)
        out.append(f'<line x1="0" y1="{cy:.2f}" x2="{SVG_SIZE}" y2="{cy:.2f}" stroke="#cccccc"/>')
    for orb in orbits:
        if orb.shape[0] == 0:
            continue
        pts = orb[:, 1:]
        if np.ptp(pts, axis=0).max() <= 1e-12 * (1 + np.abs(pts).max()):
            cx, cy = px(*pts[0])
            out.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="2.5" fill="black"/>')
            continue
        inside = (pts[:, 0] >= x0) & (pts[:, 0] <= x1) & (pts[:, 1] >= y0) & (pts[:, 1] <= y1)
        run: list[str] = []
        for p, ok in zip(pts, inside):
            if ok:
                cx, cy = px(*p)
                run.append(f"{cx:.2f},{cy:.2f}")
            elif run:
                if len(run) > 1:
                    out.append(f'<polyline points="{" ".join(run)}" fill="none" stroke="steelblue"/>')
                run = []
        if len(run) > 1:
            out.append(f'<polyline points="{" ".join(run)}" fill="none" stroke="steelblue"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
