"""Evaluation of linear flows: exponentials, orbits, fixed and periodic points."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np

from .errors import DomainError, LinflowError, RangeError
from .flowstruct import RealJordanBlock, real_jordan, shift_matrix
from .numcore import (
    DEFAULT_TOL,
    ToleranceProfile,
    as_generator,
    eigenvalues,
    kernel_basis,
    orthonormalize,
    smallest_right_vectors,
)

# Above this condition number of the Jordan basis the closed form loses
# more accuracy than the series oracle, so the oracle is used instead.
FALLBACK_CONDITION = 1e6
DENOMINATOR_CAP = 10**6


def exp_oracle(a, t: float = 1.0) -> np.ndarray:
    """``exp(t A)`` by scaling and squaring of a truncated Taylor series.

    This routine shares no code with the Jordan-based ``flow_matrix`` and
    serves as an independent reference.

    Parameters
    ----------
    a : array_like of shape (d, d)
    t : float, optional

    Returns
    -------
    ndarray of shape (d, d)

    Raises
    ------
    RangeError
        If the result overflows.
    """
    m = float(t) * np.asarray(a, dtype=float)
    d = m.shape[0]
    norm = np.abs(m).sum(axis=0).max() if d else 0.0
    squarings = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    x = m / 2.0**squarings
    result = np.eye(d)
    term = np.eye(d)
    for k in range(1, 40):
        term = term @ x / k
        result = result + term
        if np.abs(term).max() <= 1e-18 * np.abs(result).max():
            break
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(squarings):
            result = result @ result
    if not np.all(np.isfinite(result)):
        raise RangeError(f"exp(tA) overflows at t={t}")
    return result


def block_exp(block: RealJordanBlock, t: float) -> np.ndarray:
    """Closed-form ``exp(t J)`` for one real Jordan block."""
    m = block.size
    a, b = block.value.real, block.value.imag
    n = shift_matrix(m)
    poly = np.eye(m)
    term = np.eye(m)
    for j in range(1, m):
        term = term @ n * (t / j)
        poly = poly + term
    with np.errstate(over="ignore"):
        growth = math.exp(a * t) if a * t < 709.0 else math.inf
    if block.is_real:
        return growth * poly
    c, s = math.cos(b * t), math.sin(b * t)
    return growth * np.block([[c * poly, -s * poly], [s * poly, c * poly]])


def flow_matrix(a, t: float, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """``exp(t A)`` from the real Jordan form, with an oracle fallback.

    Parameters
    ----------
    a : array_like or GeneratorMatrix
    t : float
    tol : ToleranceProfile, optional

    Returns
    -------
    ndarray of shape (d, d)

    Raises
    ------
    RangeError
        If the result is not representable.
    """
    g = as_generator(a)
    try:
        jd = real_jordan(g, tol)
    except LinflowError:
        jd = None
    if jd is None or jd.condition > FALLBACK_CONDITION:
        return exp_oracle(g.entries, t)
    d = g.dim
    inner = np.zeros((d, d))
    for blk, sl in zip(jd.blocks, jd.slices()):
        inner[sl, sl] = block_exp(blk, t)
    if not np.all(np.isfinite(inner)):
        raise RangeError(f"flow of {g.label()} overflows at t={t}")
    p = jd.basis
    with np.errstate(over="ignore", invalid="ignore"):
        out = p @ inner @ np.linalg.inv(p)
    if not np.all(np.isfinite(out)):
        raise RangeError(f"flow of {g.label()} overflows at t={t}")
    return out


def flow_map(a, t: float, x, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Point ``exp(t A) x`` on the orbit of ``x``.

    ``x`` may also be an ``(n, d)`` array of points.

    Examples
    --------
    >>> np.round(flow_map([[0.0, -1.0], [1.0, 0.0]], np.pi / 2, [1.0, 0.0]), 12)
    array([0., 1.])
    """
    x = np.asarray(x, dtype=float)
    e = flow_matrix(a, t, tol)
    return x @ e.T if x.ndim == 2 else e @ x


@dataclass(frozen=True)
class OrbitSample:
    """Sampled orbit ``t -> exp(t A) x0``.

    Attributes
    ----------
    times : ndarray of shape (n,)
    points : ndarray of shape (n, d)
    x0 : ndarray of shape (d,)
    """

    times: np.ndarray
    points: np.ndarray
    x0: np.ndarray

    def to_csv(self) -> str:
        """CSV text with header ``t,x_1,...,x_d``."""
        d = self.points.shape[1]
        buf = io.StringIO()
        buf.write(",".join(["t"] + [f"x_{i + 1}" for i in range(d)]) + "\n")
        for t, p in zip(self.times, self.points):
            buf.write(",".join(repr(float(v)) for v in (t, *p)) + "\n")
        return buf.getvalue()


def orbit(a, times, x0, tol: ToleranceProfile = DEFAULT_TOL) -> OrbitSample:
    """Sample the orbit of ``x0`` at the given times."""
    times = np.asarray(times, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    pts = np.array([flow_matrix(a, t, tol) @ x0 for t in times]).reshape(len(times), -1)
    return OrbitSample(times, pts, x0)


def fixed_space(a, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the equilibria, the kernel of ``A``."""
    return kernel_basis(np.asarray(as_generator(a)), tol)


def imaginary_spectrum(a, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Eigenvalues on the imaginary axis, with multiplicity.

    Examples
    --------
    >>> imaginary_spectrum(np.diag([0.0, 1.0]))
    array([0.+0.j])
    """
    vals = eigenvalues(a, tol).values
    return vals[vals.real == 0.0]


def _is_positive_integer(x: float, tol: ToleranceProfile) -> bool:
    k = round(x)
    return k >= 1 and abs(x - k) <= tol.alpha_match_tol * max(1.0, abs(x))


def periodic_subspace(a, period: float, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the points with ``exp(T A) x = x``.

    This is the kernel of ``A`` plus the eigenvector planes of the
    eigenvalues ``+-ib`` with ``b T`` a positive multiple of ``2 pi``.

    Parameters
    ----------
    a : array_like or GeneratorMatrix
    period : float
        The time ``T > 0``.
    tol : ToleranceProfile, optional

    Returns
    -------
    ndarray of shape (d, k)
    """
    if period <= 0:
        raise DomainError("period must be positive")
    g = as_generator(a)
    am = g.entries
    d = g.dim
    jd = real_jordan(g, tol)
    parts = []
    for c in eigenvalues(g, tol).clusters:
        if c.value.real != 0.0:
            continue
        geo = sum(1 for blk in jd.blocks if blk.value == c.value)
        if c.is_real:
            parts.append(smallest_right_vectors(am, geo))
        elif _is_positive_integer(c.value.imag * period / (2 * math.pi), tol):
            b = c.value.imag
            parts.append(smallest_right_vectors(am @ am + b * b * np.eye(d), 2 * geo))
    if not parts:
        return np.zeros((d, 0))
    return orthonormalize(np.hstack(parts))


@dataclass(frozen=True)
class PeriodResult:
    """Minimal period of an orbit.

    Attributes
    ----------
    kind : {"zero", "finite", "infinite"}
        ``zero`` for equilibria, ``infinite`` for orbits that never return.
    value : float
        The period (0.0, a positive number, or ``inf``).
    frequencies : tuple of float
        Distinct angular frequencies present in the orbit.
    witness : dict
        For finite periods, ``base`` frequency and integer ``multiples``
        with ``frequencies[j] = multiples[j] * base``.
    """

    kind: str
    value: float
    frequencies: tuple[float, ...] = ()
    witness: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "value": self.value if math.isfinite(self.value) else "inf",
                "frequencies": list(self.frequencies), "witness": self.witness}


def _rational(r: float, tol: ToleranceProfile) -> Fraction | None:
    """Convergent of ``r`` with the smallest denominator within tolerance."""
    h0, h1, k0, k1 = 0, 1, 1, 0
    rest = r
    while True:
        q = math.floor(rest)
        h0, h1 = h1, q * h1 + h0
        k0, k1 = k1, q * k1 + k0
        if k1 > DENOMINATOR_CAP:
            return None
        if abs(h1 / k1 - r) <= tol.alpha_match_tol * abs(r):
            return Fraction(h1, k1)
        frac = rest - q
        if frac == 0.0:
            return Fraction(h1, k1)
        rest = 1.0 / frac


def minimal_period(a, x, tol: ToleranceProfile = DEFAULT_TOL) -> PeriodResult:
    """Smallest ``T > 0`` with ``exp(T A) x = x``.

    The point is expanded in the real Jordan basis. Blocks whose component
    is above ``rank_tol * ||x||`` participate; each must be an eigenvector
    direction of a zero or purely imaginary eigenvalue, otherwise the orbit
    is not periodic. The frequencies are then tested for commensurability
    by rational reconstruction of their ratios.

    Parameters
    ----------
    a : array_like or GeneratorMatrix
    x : array_like of shape (d,)
    tol : ToleranceProfile, optional

    Returns
    -------
    PeriodResult
    """
    g = as_generator(a)
    x = np.asarray(x, dtype=float)
    if x.shape != (g.dim,):
        raise DomainError(f"point has shape {x.shape}, expected ({g.dim},)")
    xn = np.linalg.norm(x)
    if xn == 0.0:
        return PeriodResult("zero", 0.0)
    jd = real_jordan(g, tol)
    p = jd.basis
    y = np.linalg.solve(p, x)
    thresh = tol.rank_tol * xn
    freqs: list[float] = []
    for blk, sl in zip(jd.blocks, jd.slices()):
        part = p[:, sl] @ y[sl]
        if np.linalg.norm(part) <= thresh:
            continue
        if blk.value.real != 0.0:
            return PeriodResult("infinite", math.inf)
        m = blk.size
        keep = [0] if blk.is_real else [0, m]
        rest = [i for i in range(blk.real_size) if i not in keep]
        cols = np.arange(sl.start, sl.stop)
        if rest and np.linalg.norm(p[:, cols[rest]] @ y[cols[rest]]) > thresh:
            return PeriodResult("infinite", math.inf)
        if not blk.is_real:
            b = blk.value.imag
            if not any(abs(b - f) <= tol.alpha_match_tol * max(1.0, b) for f in freqs):
                freqs.append(b)
    if not freqs:
        return PeriodResult("zero", 0.0)
    freqs.sort()
    base = freqs[0]
    fracs = []
    for f in freqs:
        r = _rational(f / base, tol)
        if r is None:
            return PeriodResult("infinite", math.inf, tuple(freqs))
        fracs.append(r)
    lcm_den = reduce(lambda u, v: u * v // math.gcd(u, v), (r.denominator for r in fracs))
    ints = [int(r * lcm_den) for r in fracs]
    common = reduce(math.gcd, ints)
    unit = base / lcm_den * common
    multiples = [n // common for n in ints]
    return PeriodResult("finite", 2 * math.pi / unit, tuple(freqs),
                        {"base": unit, "multiples": multiples})
