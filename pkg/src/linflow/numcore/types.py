"""Value types shared by every numerical routine."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Mapping

import numpy as np

from ..errors import DomainError, ParseError

ORIGINS = ("real-input", "realified-complex")

# Clusters of nearly equal eigenvalues never get wider than this fraction of
# the spectral scale, whatever their size.
CLUSTER_CAP = 1e-2


@dataclass(frozen=True)
class ToleranceProfile:
    """Named thresholds used by every numerical decision.

    Attributes
    ----------
    eig_cluster_tol : float
        Relative radius for merging eigenvalues and snapping real or
        imaginary parts to zero. The absolute radius for a matrix ``A``
        is ``eig_cluster_tol * (1 + ||A||)``.
    rank_tol : float
        Singular values at most ``rank_tol * sigma_max`` count as zero.
    residual_tol : float
        Relative residual accepted when certifying a similarity or a
        Jordan basis.
    alpha_match_tol : float
        Relative tolerance for matching exponent ratios and cross ratios.
    """

    eig_cluster_tol: float = 1e-8
    rank_tol: float = 1e-10
    residual_tol: float = 1e-8
    alpha_match_tol: float = 1e-8

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float)) and np.isfinite(v) and v > 0):
                raise DomainError(f"tolerance {f.name} must be a positive number, got {v!r}")

    def eig_radius(self, norm: float) -> float:
        """Absolute eigenvalue radius for a matrix of the given norm."""
        return self.eig_cluster_tol * (1.0 + norm)

    def cluster_radius(self, norm: float, rho: float, size: int) -> float:
        """Largest diameter accepted for a cluster of ``size`` eigenvalues.

        A Jordan block of order ``m`` perturbed at relative level ``eps``
        splits into ``m`` eigenvalues at distance about ``eps**(1/m)`` times
        the spectral scale. The backward error is taken as
        ``rank_tol * ||A||`` and the spectral scale as ``1 + rho`` with
        ``rho`` the spectral radius.

        Parameters
        ----------
        norm : float
            Spectral norm of the matrix.
        rho : float
            Spectral radius of the matrix.
        size : int
            Number of eigenvalues in the candidate cluster.
        """
        scale = 1.0 + rho
        rel = (self.rank_tol * max(norm, 1.0) / scale) ** (1.0 / max(size, 1))
        rel = min(max(rel, self.eig_cluster_tol), CLUSTER_CAP)
        return max(rel * scale, self.eig_radius(norm))

    def to_dict(self) -> dict[str, float]:
        return asdict(self)

    def with_overrides(self, overrides: Mapping[str, Any]) -> "ToleranceProfile":
        """Return a copy with some thresholds replaced.

        Raises
        ------
        ParseError
            On unknown keys or non-numeric values.
        """
        known = {f.name for f in fields(self)}
        clean = {}
        for k, v in overrides.items():
            if k not in known:
                raise ParseError(f"unknown tolerance {k!r}; expected one of {sorted(known)}")
            try:
                clean[k] = float(v)
            except (TypeError, ValueError) as exc:
                raise ParseError(f"tolerance {k} is not a number: {v!r}") from exc
        try:
            return replace(self, **clean)
        except DomainError as exc:
            raise ParseError(str(exc)) from exc

    @classmethod
    def from_env(cls, var: str = "LINFLOW_TOL_PROFILE") -> "ToleranceProfile":
        """Defaults, overridden by the JSON file named in ``var`` if set."""
        path = os.environ.get(var)
        if not path:
            return cls()
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read tolerance profile {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ParseError("tolerance profile must be a JSON object")
        return cls().with_overrides(data)


DEFAULT_TOL = ToleranceProfile()


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """Real square matrix generating the linear flow ``x' = A x``.

    Parameters
    ----------
    entries : array_like of shape (d, d)
        Real finite entries.
    origin : {"real-input", "realified-complex"}
        Whether the matrix came from a complex matrix through realification.
    name : str, optional
        Label used in diagnostics.
    """

    entries: np.ndarray
    origin: str = "real-input"
    name: str | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError(f"generator must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise DomainError("generator has non-finite entries")
        if self.origin not in ORIGINS:
            raise DomainError(f"unknown origin {self.origin!r}")
        if self.origin == "realified-complex" and a.shape[0] % 2:
            raise DomainError("a realified complex matrix has even dimension")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def norm(self) -> float:
        """Spectral norm, cached."""
        if "norm" not in self._cache:
            self._cache["norm"] = float(np.linalg.norm(self.entries, 2)) if self.dim else 0.0
        return self._cache["norm"]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def label(self) -> str:
        return self.name or f"{self.dim}x{self.dim} matrix"

    def scaled(self, alpha: float) -> "GeneratorMatrix":
        """The generator ``alpha * A`` with the same origin."""
        return GeneratorMatrix(alpha * self.entries, self.origin, self.name)

    def cached(self, key, compute):
        """Memoise a derived quantity on this (immutable) matrix."""
        try:
            return self._cache[key]
        except KeyError:
            value = compute()
            self._cache[key] = value
            return value


def as_generator(a, origin: str | None = None) -> GeneratorMatrix:
    """Coerce an array-like or a ``GeneratorMatrix`` to a ``GeneratorMatrix``."""
    if isinstance(a, GeneratorMatrix):
        if origin is None or origin == a.origin:
            return a
        return GeneratorMatrix(a.entries, origin, a.name)
    return GeneratorMatrix(np.asarray(a, dtype=float), origin or "real-input")


@dataclass(frozen=True)
class EigenCluster:
    """One eigenvalue after clustering.

    Attributes
    ----------
    value : complex
        Representative with non-negative imaginary part.
    multiplicity : int
        Algebraic multiplicity of ``value`` (the conjugate has the same).
    """

    value: complex
    multiplicity: int

    @property
    def is_real(self) -> bool:
        return self.value.imag == 0.0

    @property
    def real_dim(self) -> int:
        """Dimension of the real generalized eigenspace."""
        return self.multiplicity if self.is_real else 2 * self.multiplicity


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a real matrix with multiplicity, after snapping.

    Attributes
    ----------
    values : ndarray of shape (d,), complex
        Eigenvalues sorted by real part then imaginary part.
    paired : ndarray of shape (d,), bool
        True where the eigenvalue is non-real, hence has its conjugate in
        ``values`` too.
    clusters : tuple of EigenCluster
        Distinct eigenvalues with non-negative imaginary part, sorted.
    """

    values: np.ndarray
    paired: np.ndarray
    clusters: tuple[EigenCluster, ...]

    @property
    def dim(self) -> int:
        return len(self.values)

    def real_parts(self) -> np.ndarray:
        """Real parts with multiplicity, ascending."""
        return np.sort(self.values.real)
