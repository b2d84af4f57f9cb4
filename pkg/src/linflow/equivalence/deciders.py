"""Decision procedures for topological, Hölder and smooth equivalence."""

from __future__ import annotations

import math

import numpy as np

from ..errors import DimensionMismatch, DomainError
from ..flowstruct import FlowDecomposition, complex_structure, scu_split
from ..numcore import (
    DEFAULT_TOL,
    GeneratorMatrix,
    ToleranceProfile,
    as_generator,
    eigenvalues,
    find_similarity,
    spectra_match,
)
from .verdict import CrossRatio, EquivalenceVerdict, Level


def _pair(a, b) -> tuple[GeneratorMatrix, GeneratorMatrix]:
    ga, gb = as_generator(a), as_generator(b)
    if ga.dim != gb.dim:
        raise DimensionMismatch(
            f"{ga.label()} and {gb.label()} act on spaces of different dimension"
        )
    return ga, gb


def central_frequencies(a, tol: ToleranceProfile = DEFAULT_TOL) -> list[float]:
    """Positive imaginary parts of the eigenvalues on the imaginary axis."""
    return [c.value.imag for c in eigenvalues(a, tol).clusters
            if c.value.real == 0.0 and c.value.imag > 0.0]


def _dedupe(values, tol: ToleranceProfile) -> list[float]:
    out: list[float] = []
    for v in sorted(values, key=lambda x: (abs(x), x < 0)):
        if not any(abs(v - w) <= tol.alpha_match_tol * max(1.0, abs(w)) for w in out):
            out.append(float(v))
    return out


def _flow(x, tol: ToleranceProfile) -> FlowDecomposition:
    return x if isinstance(x, FlowDecomposition) else scu_split(as_generator(x), tol)


def _central_freqs(f: FlowDecomposition, tol: ToleranceProfile) -> list[float]:
    return central_frequencies(f.a_c, tol) if f.d_c else []


def alpha_candidates(a, b, tol: ToleranceProfile = DEFAULT_TOL) -> list[float]:
    """Finite set of time-rescaling factors worth testing.

    Contains the ratios of the sorted Lyapunov exponents in both pairings
    (the reversed pairing gives negative factors), plus and minus the
    ratios of central frequencies, and plus and minus one whenever some
    exponent is nonzero. When nothing constrains the factor the set is
    ``[1.0]``.

    Parameters
    ----------
    a, b : array_like, GeneratorMatrix or FlowDecomposition
    tol : ToleranceProfile, optional

    Examples
    --------
    >>> alpha_candidates(np.diag([-1.0, 1.0]), np.diag([-2.0, 3.0]))
    [1.0, -1.0, 0.3333333333333333, -0.3333333333333333, 0.5, -0.5]
    """
    fa, fb = _flow(a, tol), _flow(b, tol)
    if fa.dim != fb.dim:
        raise DimensionMismatch("flows act on spaces of different dimension")
    la, lb = fa.lyapunov, fb.lyapunov
    d = fa.dim
    cands: list[float] = []
    for j in range(d):
        if la[j] != 0.0 and lb[j] != 0.0:
            cands.append(la[j] / lb[j])
        if la[j] != 0.0 and lb[d - 1 - j] != 0.0:
            cands.append(la[j] / lb[d - 1 - j])
    for wa in _central_freqs(fa, tol):
        for wb in _central_freqs(fb, tol):
            cands += [wa / wb, -wa / wb]
    if np.any(la != 0.0) or np.any(lb != 0.0):
        cands += [1.0, -1.0]
    cands = _dedupe(cands, tol)
    return cands if cands else [1.0]


def _central_alpha(fa: FlowDecomposition, fb: FlowDecomposition, alpha: float,
                   tol: ToleranceProfile, seed: int) -> bool:
    if fa.d_c == 0:
        return True
    # the restrictions can be pure rounding noise, so judge them against the whole flow
    scale = sum(np.linalg.norm(m, 2) if m.size else 0.0
                for f, c in ((fa, 1.0), (fb, abs(alpha))) for m in (c * f.a_s, c * f.a_c, c * f.a_u))
    return find_similarity(fa.a_c, alpha * fb.a_c, tol, seed, scale=scale) is not None


def _orientation_ratios(la: np.ndarray, lb: np.ndarray, sign: int) -> np.ndarray:
    """Ratios of paired nonzero exponents after optionally reversing time in A."""
    ha = la[la != 0.0]
    hb = lb[lb != 0.0]
    if sign < 0:
        ha = -ha[::-1]
    return ha / hb


def _holder_exponent(ratios: np.ndarray, alpha: float) -> float:
    """Worst exponent of the power map pairing exponents with factor ``alpha``."""
    if ratios.size == 0:
        return 1.0
    e = alpha / ratios
    return float(min(e.min(), (1.0 / e).min()))


def decide_topological(a, b, tol: ToleranceProfile = DEFAULT_TOL, seed: int = 0
                       ) -> EquivalenceVerdict:
    """Decide topological (equivalently, some-Hölder) equivalence.

    The flows are equivalent exactly when the central dimensions agree,
    the stable and unstable dimensions agree as an unordered pair, and the
    central parts are similar after rescaling by some nonzero factor.

    When the factor is not pinned down by central frequencies, the one
    maximising the Hölder exponent of the resulting conjugacy is reported.

    Examples
    --------
    >>> v = decide_topological([[0.0, -1.0], [1.0, 0.0]], [[0.0, -2.0], [2.0, 0.0]])
    >>> v.equivalent, v.alpha
    (True, 0.5)
    """
    ga, gb = _pair(a, b)
    fa, fb = scu_split(ga, tol), scu_split(gb, tol)
    dims = {"a": [fa.d_s, fa.d_c, fa.d_u], "b": [fb.d_s, fb.d_c, fb.d_u]}
    lvl = Level.TOPOLOGICAL
    if fa.d_c != fb.d_c or sorted((fa.d_s, fa.d_u)) != sorted((fb.d_s, fb.d_u)):
        return EquivalenceVerdict(lvl, False, reasons=("dims-mismatch",), details={"dims": dims})
    signs = [s for s, ok in ((1, (fa.d_s, fa.d_u) == (fb.d_s, fb.d_u)),
                             (-1, (fa.d_s, fa.d_u) == (fb.d_u, fb.d_s))) if ok]
    pinned = None
    if fa.d_c:
        if _central_freqs(fa, tol) or _central_freqs(fb, tol):
            cands = [c for c in alpha_candidates(fa, fb, tol) if c > 0]
            for c in cands:
                if _central_alpha(fa, fb, c, tol, seed):
                    pinned = c
                    break
            if pinned is None:
                return EquivalenceVerdict(lvl, False, reasons=("central-not-similar",),
                                          details={"dims": dims})
        elif not _central_alpha(fa, fb, 1.0, tol, seed):
            return EquivalenceVerdict(lvl, False, reasons=("central-not-similar",),
                                      details={"dims": dims})
    best = None
    for s in signs:
        r = _orientation_ratios(fa.lyapunov, fb.lyapunov, s)
        if pinned is not None:
            alpha = pinned
        elif r.size:
            alpha = math.sqrt(r.min() * r.max())
        else:
            alpha = 1.0
        gamma = _holder_exponent(r, alpha)
        if best is None or gamma > best[2] + 1e-15:
            best = (s, alpha, gamma)
    s, alpha, gamma = best
    return EquivalenceVerdict(lvl, True, alpha=s * alpha, time_reversed=s < 0,
                              reasons=("dims-match", "central-similar"),
                              details={"dims": dims, "holder_exponent": gamma})


def _lyapunov_match(la: np.ndarray, lb: np.ndarray, alpha: float, tol: ToleranceProfile) -> bool:
    scaled = np.sort(alpha * lb)
    scale = 1.0 + max(np.abs(la).max(initial=0.0), np.abs(scaled).max(initial=0.0))
    return bool(np.all(np.abs(la - scaled) <= tol.alpha_match_tol * scale))


def decide_holder(a, b, tol: ToleranceProfile = DEFAULT_TOL, seed: int = 0
                  ) -> EquivalenceVerdict:
    """Decide all-Hölder equivalence.

    Equivalent exactly when, for some nonzero ``alpha``, the Lyapunov
    exponents of ``A`` equal those of ``alpha B`` with multiplicity and the
    central parts satisfy ``A_C ~ alpha B_C``.

    Examples
    --------
    >>> decide_holder(np.diag([-1.0, 1.0]), np.diag([-0.5, 1.0])).equivalent
    False
    """
    ga, gb = _pair(a, b)
    fa, fb = scu_split(ga, tol), scu_split(gb, tol)
    lvl = Level.ALL_HOLDER
    details = {"lyapunov_a": fa.lyapunov.tolist(), "lyapunov_b": fb.lyapunov.tolist()}
    cands = alpha_candidates(fa, fb, tol)
    cands = [c for c in cands if c > 0] + [c for c in cands if c < 0]
    lyap_ok = False
    for alpha in cands:
        if not _lyapunov_match(fa.lyapunov, fb.lyapunov, alpha, tol):
            continue
        lyap_ok = True
        if _central_alpha(fa, fb, alpha, tol, seed):
            return EquivalenceVerdict(lvl, True, alpha=alpha, time_reversed=bool(alpha < 0),
                                      reasons=("lyapunov-match", "central-similar"),
                                      details=details)
    reason = "central-not-similar" if lyap_ok else "lyapunov-mismatch"
    return EquivalenceVerdict(lvl, False, reasons=(reason,), details=details)


def decide_smooth(a, b, tol: ToleranceProfile = DEFAULT_TOL, seed: int = 0
                  ) -> EquivalenceVerdict:
    """Decide smooth equivalence, which for linear flows means ``A ~ alpha B``.

    When both inputs are realified complex matrices the witness must also
    commute with multiplication by ``i``, i.e. be complex linear.

    Examples
    --------
    >>> decide_smooth(np.diag([1.0, 2.0]), np.diag([2.0, 4.0])).alpha
    0.5
    """
    ga, gb = _pair(a, b)
    lvl = Level.SMOOTH
    extra = ()
    if ga.origin == gb.origin == "realified-complex":
        extra = (complex_structure(ga.dim // 2),)
    sa = eigenvalues(ga, tol)
    cands = alpha_candidates(ga, gb, tol)
    cands = [c for c in cands if c > 0] + [c for c in cands if c < 0]
    spectral = False
    for alpha in cands:
        gs = gb.scaled(alpha)
        sb = eigenvalues(gs, tol)
        atol = max(tol.eig_radius(ga.norm + gs.norm),
                   tol.alpha_match_tol * (1.0 + np.abs(sa.values).max(initial=0.0)))
        if not spectra_match(sa, sb, atol):
            continue
        spectral = True
        q = find_similarity(ga, gs, tol, seed, commute_with=extra)
        if q is not None:
            return EquivalenceVerdict(lvl, True, alpha=alpha, time_reversed=bool(alpha < 0),
                                      reasons=("similar",), details={"witness": q.tolist()})
    reason = "not-similar" if spectral else "spectrum-mismatch"
    return EquivalenceVerdict(lvl, False, reasons=(reason,))


def _hyperbolic_pair(a, b, tol):
    fa, fb = _flow(a, tol), _flow(b, tol)
    if fa.dim != fb.dim:
        raise DimensionMismatch("flows act on spaces of different dimension")
    if not (fa.is_hyperbolic and fb.is_hyperbolic):
        raise DomainError("cross ratio needs two hyperbolic flows (no central part)")
    return fa, fb


def _rho_plus(la: np.ndarray, lb: np.ndarray) -> float:
    r = la / lb
    top = abs(r.max())
    return float(r.min() / top) if top > 0 else -math.inf


def cross_ratio(a, b, tol: ToleranceProfile = DEFAULT_TOL) -> CrossRatio:
    """Cross ratio of the Lyapunov spectra of two hyperbolic flows.

    Examples
    --------
    >>> cross_ratio(np.diag([1.0, 1.0, 2.0, 2.0, 4.0]), np.eye(5)).rho
    0.25
    """
    fa, fb = _hyperbolic_pair(a, b, tol)
    la, lb = fa.lyapunov, fb.lyapunov
    fwd = _rho_plus(la, lb)
    rev = _rho_plus(-la[::-1], lb)
    return CrossRatio(fwd, rev, max(fwd, rev))


def decide_beta(a, b, beta: float, side: str = "minus", tol: ToleranceProfile = DEFAULT_TOL
                ) -> EquivalenceVerdict:
    """Decide equivalence by a conjugacy that is Hölder of exponent near ``beta``.

    ``side="minus"`` asks for every exponent below ``beta``; ``side="plus"``
    for some exponent above it. For pairs of stable or unstable flows the
    answer is exact: ``beta**2 <= rho`` (minus) or ``beta**2 < rho`` (plus).
    For other hyperbolic pairs only the sufficient direction is known and a
    failure is reported as unknown (``equivalent=None``).

    Raises
    ------
    DomainError
        If either flow has a central part, or ``beta`` is not in (0, 1].
    """
    if side not in ("minus", "plus"):
        raise DomainError("side must be 'minus' or 'plus'")
    if not 0 < beta <= 1:
        raise DomainError("beta must lie in (0, 1]")
    fa, fb = _hyperbolic_pair(a, b, tol)
    cr = cross_ratio(fa, fb, tol)
    lvl = Level.BETA_MINUS if side == "minus" else Level.BETA_PLUS
    details = {"cross_ratio": cr.to_dict()}
    if not cr.positive:
        return EquivalenceVerdict(lvl, False, beta=beta, reasons=("dims-mismatch",),
                                  details=details)
    sign = 1 if cr.rho_plus >= cr.rho_plus_reversed else -1
    r = _orientation_ratios(fa.lyapunov, fb.lyapunov, sign)
    alpha = sign * math.sqrt(r.min() * r.max())
    rho = cr.rho
    b2 = beta * beta
    definite = (fa.d_s == fa.dim or fa.d_u == fa.dim) and (fb.d_s == fb.dim or fb.d_u == fb.dim)
    boundary = abs(b2 - rho) <= tol.alpha_match_tol * rho
    if boundary:
        holds = side == "minus"
    else:
        holds = b2 < rho
    reasons = ["boundary"] if boundary else []
    if definite:
        reasons.append("exact-criterion")
        eq = holds
    elif holds:
        reasons.append("sufficient-condition-holds")
        eq = True
    else:
        reasons.append("unknown")
        eq = None
    return EquivalenceVerdict(lvl, eq, alpha=alpha if eq else None, time_reversed=sign < 0,
                              reasons=tuple(reasons), beta=beta, details=details)
