"""Canonical representatives in dimension at most two, and complex flows.

Each representative ``R`` comes with a factor ``alpha`` such that the
input flow is equivalent to the flow of ``R`` after rescaling time by
``alpha``: ``h(exp(tA) x) = exp(alpha t R) h(x)``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch, DomainError, OutOfScope, UnsupportedDimension
from ..flowstruct import jordan_block, real_jordan, realify
from ..numcore import DEFAULT_TOL, ToleranceProfile, as_generator, eigenvalues
from .deciders import decide_holder, decide_smooth, decide_topological
from .verdict import EquivalenceVerdict, Level

_LEVELS = (Level.TOPOLOGICAL, Level.ALL_HOLDER, Level.LIPSCHITZ, Level.SMOOTH)


def _level(level) -> Level:
    lv = level if isinstance(level, Level) else Level.parse(level)
    if lv == Level.SOME_HOLDER:
        return Level.TOPOLOGICAL
    if lv not in _LEVELS:
        raise DomainError(f"no catalog for level {lv.value!r}")
    return lv


@dataclass(frozen=True)
class CanonicalForm:
    """Listed representative of an equivalence class.

    Attributes
    ----------
    matrix : ndarray
        Real representative, or complex for complex inputs.
    label : str
        Family name, e.g. ``"diag[a,1]"``.
    params : dict
        Family parameters such as ``{"a": 0.5}``.
    alpha : float
        Time factor relating the input to the representative.
    level : Level
    is_complex : bool
    """

    matrix: np.ndarray
    label: str
    params: dict = field(default_factory=dict)
    alpha: float = 1.0
    level: Level = Level.TOPOLOGICAL
    is_complex: bool = False

    def same_class(self, other: "CanonicalForm", tol: ToleranceProfile = DEFAULT_TOL) -> bool:
        """Whether two forms name the same representative."""
        if (self.label, self.is_complex, self.level) != (other.label, other.is_complex, other.level):
            return False
        if self.params.keys() != other.params.keys():
            return False
        return all(abs(self.params[k] - other.params[k]) <= tol.alpha_match_tol * (1 + abs(self.params[k]))
                   for k in self.params)

    def to_dict(self) -> dict:
        m = np.asarray(self.matrix)
        if self.is_complex:
            entries = [[[float(z.real), float(z.imag)] for z in row] for row in m]
        else:
            entries = m.tolist()
        return {"label": self.label, "params": {k: float(v) for k, v in self.params.items()},
                "alpha": float(self.alpha), "level": self.level.value,
                "complex": self.is_complex, "matrix": entries}


def _diag(a: float, b: float = 1.0) -> np.ndarray:
    return np.diag([float(a), float(b)])


def _ratio_pair(x: float, y: float) -> tuple[float, float]:
    """Return ``(a, mu)`` with ``mu`` the entry of larger modulus and ``a = other / mu``.

    Opposite entries of equal modulus give ``a = -1`` with ``mu > 0``.
    """
    if abs(x) > abs(y) or (abs(x) == abs(y) and x > y):
        mu, other = x, y
    else:
        mu, other = y, x
    return other / mu + 0.0, mu


def _sign(x: float) -> float:
    return 1.0 if x > 0 else -1.0


def _canon1_real(lam: float, level: Level) -> CanonicalForm:
    if lam == 0.0:
        return CanonicalForm(np.zeros((1, 1)), "[0]", {}, 1.0, level)
    return CanonicalForm(np.ones((1, 1)), "[1]", {}, lam, level)


def _canon2_real(a, level: Level, tol: ToleranceProfile) -> CanonicalForm:
    g = as_generator(a)
    clusters = eigenvalues(g, tol).clusters
    jd = real_jordan(g, tol)
    defective = any(b.size > 1 for b in jd.blocks)
    if len(clusters) == 1 and clusters[0].is_real and clusters[0].value.real == 0.0:
        if defective:
            return CanonicalForm(jordan_block(0.0, 2), "J_2", {}, 1.0, level)
        return CanonicalForm(np.zeros((2, 2)), "O_2", {}, 1.0, level)
    if len(clusters) == 1 and not clusters[0].is_real:
        re, im = clusters[0].value.real, clusters[0].value.imag
        if re == 0.0:
            return CanonicalForm(jordan_block(1j, 1), "J_1(i)", {}, im, level)
        if level == Level.TOPOLOGICAL:
            return CanonicalForm(np.eye(2), "I_2", {}, _sign(re), level)
        if level == Level.SMOOTH:
            c = abs(im / re)
            return CanonicalForm(np.array([[1.0, -c], [c, 1.0]]), "[[1,-c],[c,1]]", {"c": c}, re, level)
        return CanonicalForm(_diag(1.0), "diag[a,1]", {"a": 1.0}, re, level)
    if len(clusters) == 1:
        lam = clusters[0].value.real
        if defective and level in (Level.LIPSCHITZ, Level.SMOOTH):
            return CanonicalForm(jordan_block(1.0, 2), "J_2(1)", {}, lam, level)
        x = y = lam
    else:
        x, y = clusters[0].value.real, clusters[1].value.real
    if level == Level.TOPOLOGICAL:
        if x == 0.0 or y == 0.0:
            return CanonicalForm(_diag(0.0), "diag[0,1]", {}, _sign(x + y), level)
        if x * y < 0:
            return CanonicalForm(_diag(-1.0), "diag[-1,1]", {}, 1.0, level)
        return CanonicalForm(np.eye(2), "I_2", {}, _sign(x), level)
    ratio, mu = _ratio_pair(x, y)
    return CanonicalForm(_diag(ratio), "diag[a,1]", {"a": ratio}, mu, level)


def canon2(a, level="topological", tol: ToleranceProfile = DEFAULT_TOL) -> CanonicalForm:
    """Listed representative of the class of a real flow in dimension one or two.

    Parameters
    ----------
    a : array_like of shape (d, d) with d <= 2
    level : str or Level
        One of topological, all-holder, lipschitz, smooth.
    tol : ToleranceProfile, optional

    Returns
    -------
    CanonicalForm

    Raises
    ------
    UnsupportedDimension
        If ``d > 2``.

    Examples
    --------
    >>> canon2(np.diag([-3.0, 5.0])).label
    'diag[-1,1]'
    >>> canon2(np.array([[1.0, 1.0], [0.0, 1.0]]), "all-holder").params
    {'a': 1.0}
    """
    lv = _level(level)
    g = as_generator(a)
    if g.dim > 2:
        raise UnsupportedDimension(f"catalogs exist for d <= 2, got d = {g.dim}")
    if g.dim == 0:
        raise DomainError("empty matrix")
    if g.dim == 1:
        return _canon1_real(float(g.entries[0, 0]), lv)
    return _canon2_real(g, lv, tol)


def _complex_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix has non-finite entries")
    return m


def _snap(z: complex, scale: float, tol: ToleranceProfile) -> complex:
    r = tol.eig_radius(scale)
    re = 0.0 if abs(z.real) <= r else z.real
    im = 0.0 if abs(z.imag) <= r else z.imag
    return complex(re, im)


def complex_eigenvalues_2(m, tol: ToleranceProfile = DEFAULT_TOL) -> tuple[complex, complex, bool]:
    """Eigenvalues of a complex 2x2 matrix and whether it is a nontrivial Jordan block.

    Returns
    -------
    (mu1, mu2, defective)
        Equal eigenvalues are merged to their mean; ``defective`` is set
        when they coincide but the matrix is not a multiple of the identity.
    """
    m = _complex_matrix(m)
    norm = float(np.linalg.norm(m, 2))
    half = 0.5 * (m[0, 0] + m[1, 1])
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    root = cmath.sqrt(half * half - det)
    mu1, mu2 = half + root, half - root
    rho = max(abs(mu1), abs(mu2))
    radius = tol.cluster_radius(norm, rho, 2)
    if abs(mu1 - mu2) <= radius:
        mu = _snap(half, norm, tol)
        defective = float(np.linalg.norm(m - half * np.eye(2), 2)) > radius
        return mu, mu, defective
    return _snap(mu1, norm, tol), _snap(mu2, norm, tol), False


def _cf(matrix, label, params, alpha, level) -> CanonicalForm:
    return CanonicalForm(np.asarray(matrix, dtype=complex), label, params, float(alpha), level, True)


def _canon1_complex(z: complex, level: Level) -> CanonicalForm:
    if z == 0:
        return _cf([[0]], "[0]", {}, 1.0, level)
    if z.real == 0.0:
        return _cf([[1j]], "[i]", {}, z.imag, level)
    if level == Level.SMOOTH:
        c = z.imag / z.real
        return _cf([[1 + 1j * c]], "[1+ic]", {"c": c}, z.real, level)
    return _cf([[1]], "[1]", {}, z.real, level)


def _lex_key(p: dict) -> tuple:
    return (p["a"], p["b"], p["c"])


def _canon2_complex_diag(m1: complex, m2: complex, level: Level) -> CanonicalForm:
    r1, r2 = m1.real, m2.real
    if r1 == 0.0 and r2 == 0.0:
        b_small, b_big = (m1.imag, m2.imag) if abs(m1.imag) < abs(m2.imag) else (m2.imag, m1.imag)
        if abs(m1.imag) == abs(m2.imag):
            b_small, b_big = min(m1.imag, m2.imag), max(m1.imag, m2.imag)
        a = b_small / b_big
        if level != Level.SMOOTH:
            a = abs(a)
        return _cf(np.diag([1j * a, 1j]), "diag[ia,i]", {"a": a}, b_big, level)
    if level == Level.SMOOTH:
        options = []
        for mk, mh in ((m1, m2), (m2, m1)):
            if abs(mk.real) < max(abs(r1), abs(r2)):
                continue
            alpha = mk.real
            w = mh / alpha
            p = {"a": w.real, "b": w.imag, "c": mk.imag / alpha}
            options.append((p, alpha))
        p, alpha = min(options, key=lambda o: _lex_key(o[0]))
        mat = np.diag([p["a"] + 1j * p["b"], 1 + 1j * p["c"]])
        return _cf(mat, "diag[a+ib,1+ic]", p, alpha, level)
    if r1 != 0.0 and r2 != 0.0:
        if level == Level.TOPOLOGICAL:
            if r1 * r2 > 0:
                return _cf(np.eye(2), "I", {}, _sign(r1), level)
            return _cf(np.diag([-1, 1]), "diag[-1,1]", {}, 1.0, level)
        ratio, mu = _ratio_pair(r1, r2)
        return _cf(np.diag([ratio, 1]), "diag[a,1]", {"a": ratio}, mu, level)
    hyp, cen = (m1, m2) if r1 != 0.0 else (m2, m1)
    if cen.imag == 0.0:
        alpha = _sign(hyp.real) if level == Level.TOPOLOGICAL else hyp.real
        return _cf(np.diag([0, 1]), "diag[0,1]", {}, alpha, level)
    if level == Level.TOPOLOGICAL:
        return _cf(np.diag([1j, 1]), "diag[i,1]", {}, _sign(hyp.real) * abs(cen.imag), level)
    b = abs(cen.imag / hyp.real)
    return _cf(np.diag([1j * b, 1]), "diag[ib,1]", {"b": b}, hyp.real, level)


def canon_complex(m, level="topological", tol: ToleranceProfile = DEFAULT_TOL) -> CanonicalForm:
    """Listed representative of the class of a complex flow in dimension one or two.

    Parameters
    ----------
    m : array_like of complex, shape (d, d) with d <= 2
    level : str or Level
    tol : ToleranceProfile, optional

    Returns
    -------
    CanonicalForm
        With a complex ``matrix``.

    Examples
    --------
    >>> canon_complex([[2j]]).label, canon_complex([[2j]]).alpha
    ('[i]', 2.0)
    """
    lv = _level(level)
    m = _complex_matrix(m)
    d = m.shape[0]
    if d > 2:
        raise UnsupportedDimension(f"complex catalogs exist for d <= 2, got d = {d}")
    if d == 0:
        raise DomainError("empty matrix")
    if d == 1:
        return _canon1_complex(_snap(complex(m[0, 0]), abs(m[0, 0]), tol), lv)
    mu1, mu2, defective = complex_eigenvalues_2(m, tol)
    if defective:
        if mu1 == 0:
            return _cf([[0, 1], [0, 0]], "[[0,1],[0,0]]", {}, 1.0, lv)
        if mu1.real == 0.0:
            return _cf([[1j, 1], [0, 1j]], "[[i,1],[0,i]]", {}, mu1.imag, lv)
        if lv in (Level.SMOOTH, Level.LIPSCHITZ):
            c = mu1.imag / mu1.real
            if lv == Level.LIPSCHITZ:
                c = abs(c)
            z = 1 + 1j * c
            return _cf([[z, 1], [0, z]], "[[1+ic,1],[0,1+ic]]", {"c": c}, mu1.real, lv)
        alpha = _sign(mu1.real) if lv == Level.TOPOLOGICAL else mu1.real
        return _cf(np.eye(2), "I", {}, alpha, lv)
    if mu1 == 0 and mu2 == 0:
        return _cf(np.zeros((2, 2)), "O", {}, 1.0, lv)
    return _canon2_complex_diag(mu1, mu2, lv)


def decide_lipschitz(a, b, tol: ToleranceProfile = DEFAULT_TOL) -> EquivalenceVerdict:
    """Decide Lipschitz equivalence by comparing catalog representatives.

    Raises
    ------
    OutOfScope
        In dimension above two, where no decision procedure is available.

    Examples
    --------
    >>> decide_lipschitz(np.array([[1.0, 1.0], [0.0, 1.0]]), np.eye(2)).equivalent
    False
    """
    ga, gb = as_generator(a), as_generator(b)
    if ga.dim != gb.dim:
        raise DimensionMismatch(f"{ga.label()} and {gb.label()} differ in dimension")
    if ga.dim > 2:
        raise OutOfScope("Lipschitz equivalence is only decided in dimension at most two")
    ca, cb = canon2(ga, Level.LIPSCHITZ, tol), canon2(gb, Level.LIPSCHITZ, tol)
    details = {"canon_a": ca.to_dict(), "canon_b": cb.to_dict()}
    if not ca.same_class(cb, tol):
        return EquivalenceVerdict(Level.LIPSCHITZ, False, reasons=("different-class",), details=details)
    alpha = ca.alpha / cb.alpha
    return EquivalenceVerdict(Level.LIPSCHITZ, True, alpha=alpha, time_reversed=alpha < 0,
                              reasons=("same-class",), details=details)


def decide(a, b, level="topological", tol: ToleranceProfile = DEFAULT_TOL, seed: int = 0,
           beta: float | None = None) -> EquivalenceVerdict:
    """Dispatch to the decider for ``level``.

    The exponent levels ``beta-minus`` and ``beta-plus`` need ``beta``.
    """
    from .deciders import decide_beta

    lv = level if isinstance(level, Level) else Level.parse(level)
    if lv in (Level.TOPOLOGICAL, Level.SOME_HOLDER):
        v = decide_topological(a, b, tol, seed)
        return v if lv == Level.TOPOLOGICAL else EquivalenceVerdict(
            lv, v.equivalent, v.alpha, v.time_reversed, v.reasons, None, v.details)
    if lv in (Level.BETA_MINUS, Level.BETA_PLUS):
        if beta is None:
            raise DomainError(f"level {lv.value} needs an exponent beta")
        return decide_beta(a, b, beta, "minus" if lv == Level.BETA_MINUS else "plus", tol)
    if lv == Level.ALL_HOLDER:
        return decide_holder(a, b, tol, seed)
    if lv == Level.LIPSCHITZ:
        return decide_lipschitz(a, b, tol)
    return decide_smooth(a, b, tol, seed)


def classify_complex(m, n, level="topological", tol: ToleranceProfile = DEFAULT_TOL,
                     seed: int = 0) -> EquivalenceVerdict:
    """Decide equivalence of two complex linear flows.

    Topological and Hölder questions are answered on the realifications.
    The smooth question asks for a complex linear similarity
    ``M ~ alpha N``. The Lipschitz question (dimension at most two)
    compares the complex catalog representatives.

    Examples
    --------
    >>> classify_complex([[1 + 1j]], [[1 - 1j]], "all-holder").equivalent
    True
    >>> classify_complex([[1 + 1j]], [[1 - 1j]], "smooth").equivalent
    False
    """
    lv = level if isinstance(level, Level) else Level.parse(level)
    mc, nc = _complex_matrix(m), _complex_matrix(n)
    if mc.shape != nc.shape:
        raise DimensionMismatch(f"complex dimensions {mc.shape[0]} and {nc.shape[0]} differ")
    ra, rb = realify(mc), realify(nc)
    if lv in (Level.TOPOLOGICAL, Level.SOME_HOLDER):
        return decide(ra, rb, lv, tol, seed)
    if lv == Level.ALL_HOLDER:
        return decide_holder(ra, rb, tol, seed)
    if lv == Level.SMOOTH:
        return decide_smooth(ra, rb, tol, seed)
    if lv == Level.LIPSCHITZ:
        if mc.shape[0] > 2:
            raise OutOfScope("Lipschitz equivalence is only decided in dimension at most two")
        ca, cb = canon_complex(mc, lv, tol), canon_complex(nc, lv, tol)
        details = {"canon_a": ca.to_dict(), "canon_b": cb.to_dict()}
        if not ca.same_class(cb, tol):
            return EquivalenceVerdict(lv, False, reasons=("different-class",), details=details)
        alpha = ca.alpha / cb.alpha
        return EquivalenceVerdict(lv, True, alpha=alpha, time_reversed=alpha < 0,
                                  reasons=("same-class",), details=details)
    raise DomainError(f"complex flows are not classified at level {lv.value}")
