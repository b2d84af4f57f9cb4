"""Numerical checks of conjugacy maps: flow relation, round trips, Hölder slopes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from ..errors import DimensionMismatch, DomainError
from ..floweval import flow_matrix
from ..numcore import DEFAULT_TOL, ToleranceProfile, as_generator
from .maps import ConjugacyMap


@dataclass(frozen=True)
class SamplingSpec:
    """Seeded sample grid for verification.

    Attributes
    ----------
    n_times : int
        Number of equally spaced times in ``t_range``.
    t_range : tuple of float
    n_points : int
        Number of quasi-random points in the ball.
    radius : float
        Radius of the ball the points are drawn from.
    seed : int
    """

    n_times: int = 33
    t_range: tuple[float, float] = (-3.0, 3.0)
    n_points: int = 100
    radius: float = 1.0
    seed: int = 0

    def times(self) -> np.ndarray:
        return np.linspace(self.t_range[0], self.t_range[1], self.n_times)


def ball_points(d: int, n: int, radius: float = 1.0, seed: int = 0) -> np.ndarray:
    """Scrambled Halton points mapped into the closed ball of the given radius.

    The first ``d`` coordinates are turned into a direction through the
    normal quantile function and the last one sets the radius so that the
    points are spread evenly in volume.
    """
    u = qmc.Halton(d + 1, scramble=True, seed=seed).random(n)
    u = np.clip(u, 1e-12, 1 - 1e-12)
    g = ndtri(u[:, :d])
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * u[:, d] ** (1.0 / d)
    return g * r[:, None]


def verify_relation(h: ConjugacyMap, a, b, alpha: float, samples: SamplingSpec | None = None,
                    tol: ToleranceProfile = DEFAULT_TOL) -> float:
    """Largest relative defect of ``h(exp(tA) x) = exp(alpha t B) h(x)`` on a grid.

    The defect at a sample is ``||h(exp(tA) x) - exp(alpha t B) h(x)||``
    divided by ``1 + ||h(exp(tA) x)||``.

    Examples
    --------
    >>> from linflow.conjugacy import identity_map
    >>> verify_relation(identity_map(2), np.eye(2), np.eye(2), 1.0)
    0.0
    """
    samples = samples or SamplingSpec()
    ga, gb = as_generator(a), as_generator(b)
    if not (ga.dim == gb.dim == h.dim_in):
        raise DimensionMismatch("map and flows act on spaces of different dimension")
    x = ball_points(ga.dim, samples.n_points, samples.radius, samples.seed)
    hx = h(x)
    worst = 0.0
    for t in samples.times():
        lhs = h(x @ flow_matrix(ga, t, tol).T)
        rhs = hx @ flow_matrix(gb, alpha * t, tol).T
        err = np.linalg.norm(lhs - rhs, axis=1) / (1.0 + np.linalg.norm(lhs, axis=1))
        worst = max(worst, float(err.max()))
    return worst


def round_trip_error(h: ConjugacyMap, n: int = 1000, radius: float = 2.0, seed: int = 0) -> float:
    """Largest ``||h^{-1}(h(x)) - x|| / (1 + ||x||)`` over seeded samples in a ball."""
    x = ball_points(h.dim_in, n, radius, seed)
    back = h.apply_inverse(h(x))
    return float((np.linalg.norm(back - x, axis=1) / (1.0 + np.linalg.norm(x, axis=1))).max())


@dataclass(frozen=True)
class HolderEstimate:
    """Regression estimate of a Hölder exponent near the origin.

    Attributes
    ----------
    beta : float
        Smaller of the forward and inverse slopes.
    interval : tuple of float
        Approximate 95% confidence interval for ``beta``.
    constant : float
        Fitted constant ``C`` in ``||h(x) - h(y)|| ~ C ||x - y||^beta``.
    forward, inverse : float
        Slopes for ``h`` and ``h^{-1}``.
    n_pairs : int
    """

    beta: float
    interval: tuple[float, float]
    constant: float
    forward: float
    inverse: float
    n_pairs: int

    def to_dict(self) -> dict:
        return {"beta": self.beta, "interval": list(self.interval), "constant": self.constant,
                "forward": self.forward, "inverse": self.inverse, "n_pairs": self.n_pairs}


def _fit(f, x, y):
    dx = np.linalg.norm(x - y, axis=1)
    dh = np.linalg.norm(f(x) - f(y), axis=1)
    keep = (dx > 0) & (dh > 0) & np.isfinite(dh)
    if keep.sum() < 3:
        raise DomainError("too few usable pairs for a slope estimate")
    lx, lh = np.log(dx[keep]), np.log(dh[keep])
    if np.ptp(lx) == 0.0:
        raise DomainError("sample pairs do not spread over scales")
    design = np.vstack([lx, np.ones_like(lx)]).T
    coef, res, _, _ = np.linalg.lstsq(design, lh, rcond=None)
    slope, icpt = coef
    n = lx.size
    resid = lh - design @ coef
    s2 = float(resid @ resid) / max(n - 2, 1)
    se = np.sqrt(s2 / float(((lx - lx.mean()) ** 2).sum()))
    return float(slope), float(icpt), float(se), n


def estimate_holder_exponent(h: ConjugacyMap, radius: float = 1.0, n_pairs: int = 400,
                             seed: int = 0, decades: float = 6.0) -> HolderEstimate:
    """Estimate the Hölder exponent of ``h`` and ``h^{-1}`` at the origin.

    Pairs ``(x, y)`` are drawn independently in balls ``B_s(0)`` whose
    radii ``s`` are log-uniform in ``[radius 10^-decades, radius]``. The
    exponent is the least-squares slope of ``log||h(x) - h(y)||`` against
    ``log||x - y||``. The result is a sanity check, not a certificate.

    Raises
    ------
    DomainError
        If the pairs are degenerate.

    Examples
    --------
    >>> from linflow.conjugacy import identity_map
    >>> round(estimate_holder_exponent(identity_map(2)).beta, 6)
    1.0
    """
    if radius <= 0:
        raise DomainError("radius must be positive")
    d = h.dim_in
    rng = np.random.default_rng(seed)
    scales = radius * 10.0 ** (-decades * rng.random(n_pairs))
    x = ball_points(d, n_pairs, 1.0, seed) * scales[:, None]
    y = ball_points(d, n_pairs, 1.0, seed + 1)[rng.permutation(n_pairs)] * scales[:, None]
    fwd, c_f, se_f, n = _fit(h, x, y)
    inv, c_i, se_i, _ = _fit(h.apply_inverse, x, y)
    if fwd <= inv:
        beta, icpt, se = fwd, c_f, se_f
    else:
        beta, icpt, se = inv, c_i, se_i
    return HolderEstimate(beta, (beta - 1.96 * se, beta + 1.96 * se), float(np.exp(icpt)), fwd, inv, n)
