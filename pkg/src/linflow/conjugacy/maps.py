"""Explicit homeomorphisms of R^d that conjugate linear flows.

Every map fixes the origin and has an evaluable inverse. Maps act on a
single point of shape ``(d,)`` or on a batch of shape ``(n, d)``. They are
immutable; ``inverse()`` returns a new map with the ``inverted`` flag
toggled, and ``to_dict()`` gives a JSON-ready ``{kind, parameters,
children}`` document from which ``map_from_dict`` rebuilds the map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..errors import DomainError, ParseError

# Below this norm the convention 0 * (log 0)^k = 0 is applied outright.
TINY = 1e-300


@dataclass(frozen=True)
class HolderClass:
    """Declared regularity of a map and its inverse.

    ``kind`` is ``"lipschitz"``, ``"all-holder"`` (Hölder of every exponent
    below one) or ``"beta"`` with exponent ``gamma`` in (0, 1).
    """

    kind: str
    gamma: float = 1.0

    @classmethod
    def beta(cls, gamma: float) -> "HolderClass":
        if gamma >= 1.0 - 1e-12:
            return cls("lipschitz")
        return cls("beta", float(gamma))

    def _rank(self) -> tuple[float, int]:
        return (self.gamma, {"lipschitz": 2, "all-holder": 1, "beta": 0}[self.kind])

    def weakest(self, other: "HolderClass") -> "HolderClass":
        return self if self._rank() <= other._rank() else other

    def compose(self, other: "HolderClass") -> "HolderClass":
        if self.kind == "lipschitz":
            return other
        if other.kind == "lipschitz":
            return self
        if self.kind == "beta" and other.kind == "beta":
            return HolderClass.beta(self.gamma * other.gamma)
        return self.weakest(other)

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "beta":
            out["gamma"] = self.gamma
        return out

    def __str__(self) -> str:
        return f"beta({self.gamma:.6g})" if self.kind == "beta" else self.kind


LIPSCHITZ = HolderClass("lipschitz")
ALL_HOLDER = HolderClass("all-holder")


def _as_batch(x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return x[None, :], True
    if x.ndim != 2:
        raise DomainError(f"expected a point or a batch of points, got shape {x.shape}")
    return x, False


@dataclass(frozen=True)
class ConjugacyMap:
    """Base class for the explicit maps.

    Subclasses implement ``_forward`` and ``_backward`` on batches of
    shape ``(n, d)``.
    """

    inverted: bool

    kind = "abstract"

    @property
    def dim_in(self) -> int:
        raise NotImplementedError

    @property
    def dim_out(self) -> int:
        return self.dim_in

    @property
    def holder_class(self) -> HolderClass:
        return LIPSCHITZ

    @property
    def children(self) -> tuple["ConjugacyMap", ...]:
        return ()

    def _forward(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _backward(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _check(self, x: np.ndarray) -> None:
        if x.shape[1] != self.dim_in:
            raise DomainError(f"{self.kind} map acts on R^{self.dim_in}, got points in R^{x.shape[1]}")

    def __call__(self, x) -> np.ndarray:
        xb, single = _as_batch(x)
        self._check(xb)
        out = self._backward(xb) if self.inverted else self._forward(xb)
        return out[0] if single else out

    def apply_inverse(self, y) -> np.ndarray:
        yb, single = _as_batch(y)
        self._check(yb)
        out = self._forward(yb) if self.inverted else self._backward(yb)
        return out[0] if single else out

    def inverse(self) -> "ConjugacyMap":
        return replace(self, inverted=not self.inverted)

    def _parameters(self) -> dict:
        return {}

    def to_dict(self) -> dict:
        params = dict(self._parameters())
        params["inverted"] = self.inverted
        return {"kind": self.kind, "parameters": params,
                "holder_class": self.holder_class.to_dict(),
                "children": [c.to_dict() for c in self.children]}

    def describe(self, indent: int = 0) -> str:
        """Indented one-line-per-node summary of the map tree."""
        inv = " (inverse)" if self.inverted else ""
        head = " " * indent + f"{self.kind}{inv} on R^{self.dim_in} [{self.holder_class}]"
        return "\n".join([head] + [c.describe(indent + 2) for c in self.children])


def _safe_logs(mod: np.ndarray) -> np.ndarray:
    out = np.zeros_like(mod)
    big = mod >= TINY
    out[big] = np.log(mod[big])
    return out


def _log_series(z: np.ndarray, a: float) -> np.ndarray:
    """Apply the logarithmic triangular map to coordinates ``z`` (real or complex).

    Output coordinate ``j`` (0-based) is the sum over ``k`` of
    ``(log|z_i|)^k / (k! a^k) z_i`` with ``i = m - 1 - j - k``.
    """
    n, m = z.shape
    logs = _safe_logs(np.abs(z))
    zero = np.abs(z) < TINY
    out = np.zeros_like(z)
    for j in range(m):
        acc = z[:, m - 1 - j].copy()
        for k in range(1, m - j):
            i = m - 1 - j - k
            term = (logs[:, i] / a) ** k / math.factorial(k) * z[:, i]
            term[zero[:, i]] = 0.0
            acc = acc + term
        out[:, j] = acc
    return out


def _log_series_inverse(w: np.ndarray, a: float) -> np.ndarray:
    """Invert ``_log_series`` by solving for the input coordinates in turn."""
    n, m = w.shape
    z = np.zeros_like(w)
    logs = np.zeros((n, m))
    zero = np.zeros((n, m), dtype=bool)
    for r in range(m):
        acc = w[:, m - 1 - r].copy()
        for i in range(r):
            term = (logs[:, i] / a) ** (r - i) / math.factorial(r - i) * z[:, i]
            term[zero[:, i]] = 0.0
            acc = acc - term
        z[:, r] = acc
        mod = np.abs(acc)
        zero[:, r] = mod < TINY
        logs[:, r] = _safe_logs(mod)
    return z


@dataclass(frozen=True)
class BlockToDiag(ConjugacyMap):
    """Conjugates the flow of ``a I_m`` to the flow of the Jordan block ``J_m(a)``.

    ``h(x)_j = sum_k (log|x_i|)^k / (k! a^k) x_i`` with ``i = m + 1 - j - k``
    (one-based), using ``0 (log 0)^k = 0``.
    """

    m: int = 1
    a: float = 1.0

    kind = "block-to-diag"

    def __post_init__(self):
        if self.m < 1:
            raise DomainError("block size must be positive")
        if self.a == 0:
            raise DomainError("block-to-diag map needs a nonzero eigenvalue")

    @property
    def dim_in(self) -> int:
        return self.m

    @property
    def holder_class(self) -> HolderClass:
        return LIPSCHITZ if self.m == 1 else ALL_HOLDER

    def _forward(self, x):
        return _log_series(x, self.a)

    def _backward(self, y):
        return _log_series_inverse(y, self.a)

    def _parameters(self):
        return {"m": self.m, "a": self.a}


@dataclass(frozen=True)
class ComplexBlockToDiag(ConjugacyMap):
    """Conjugates ``diag[J_1(a+ib), ..., J_1(a+ib)]`` to the real block ``J_m(a+ib)``.

    The input is ``m`` consecutive planes ``(x_{2i-1}, x_{2i})``. The output
    uses the block layout of ``J_m(a+ib)``: real parts in the first ``m``
    coordinates, imaginary parts in the last ``m``. The logarithms are taken
    of the planar norms.
    """

    m: int = 1
    a: float = 1.0
    b: float = 1.0

    kind = "complex-block-to-diag"

    def __post_init__(self):
        if self.m < 1:
            raise DomainError("block size must be positive")
        if self.a == 0 or self.b == 0:
            raise DomainError("complex block map needs a nonzero real and imaginary part")

    @property
    def dim_in(self) -> int:
        return 2 * self.m

    @property
    def holder_class(self) -> HolderClass:
        return LIPSCHITZ if self.m == 1 else ALL_HOLDER

    def _forward(self, x):
        z = x[:, 0::2] + 1j * x[:, 1::2]
        w = _log_series(z, self.a)
        return np.hstack([w.real, w.imag])

    def _backward(self, y):
        m = self.m
        w = y[:, :m] + 1j * y[:, m:]
        z = _log_series_inverse(w, self.a)
        out = np.empty((y.shape[0], 2 * m))
        out[:, 0::2] = z.real
        out[:, 1::2] = z.imag
        return out

    def _parameters(self):
        return {"m": self.m, "a": self.a, "b": self.b}


def _rotate(x: np.ndarray, angle: np.ndarray) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.stack([c * x[:, 0] - s * x[:, 1], s * x[:, 0] + c * x[:, 1]], axis=1)


@dataclass(frozen=True)
class Unwind(ConjugacyMap):
    """Planar map ``x -> R(-b log|x| / a) x`` conjugating ``J_1(a+ib)`` to ``a I_2``."""

    a: float = 1.0
    b: float = 1.0

    kind = "unwind"

    def __post_init__(self):
        if self.a == 0 or self.b == 0:
            raise DomainError("unwind map needs a nonzero real and imaginary part")

    @property
    def dim_in(self) -> int:
        return 2

    def _turn(self, x, sign):
        r = np.linalg.norm(x, axis=1)
        angle = sign * self.b * _safe_logs(r) / self.a
        out = _rotate(x, angle)
        out[r < TINY] = 0.0
        return out

    def _forward(self, x):
        return self._turn(x, -1.0)

    def _backward(self, y):
        return self._turn(y, 1.0)

    def _parameters(self):
        return {"a": self.a, "b": self.b}


@dataclass(frozen=True)
class PowerMap(ConjugacyMap):
    """Signed coordinatewise powers ``h(x)_j = sign(x_j) |x_j|^(alpha b_j / a_j)``.

    Conjugates the flow of ``diag(a)`` to the flow of ``diag(b)`` run at
    speed ``alpha``.
    """

    a: tuple[float, ...] = ()
    b: tuple[float, ...] = ()
    alpha: float = 1.0

    kind = "power"

    def __post_init__(self):
        if len(self.a) != len(self.b) or not self.a:
            raise DomainError("power map needs two exponent vectors of equal positive length")
        if self.alpha <= 0:
            raise DomainError("power map needs alpha > 0")
        for x, y in zip(self.a, self.b):
            if x == 0 or y == 0 or (x > 0) != (y > 0):
                raise DomainError(f"exponents {x} and {y} must be nonzero and of the same sign")

    @property
    def dim_in(self) -> int:
        return len(self.a)

    @property
    def exponents(self) -> np.ndarray:
        return self.alpha * np.asarray(self.b) / np.asarray(self.a)

    @property
    def gamma(self) -> float:
        e = self.exponents
        return float(min(e.min(), (1.0 / e).min()))

    @property
    def holder_class(self) -> HolderClass:
        return HolderClass.beta(self.gamma)

    @staticmethod
    def _pow(x, e):
        with np.errstate(over="ignore"):
            return np.sign(x) * np.abs(x) ** e

    def _forward(self, x):
        return self._pow(x, self.exponents)

    def _backward(self, y):
        return self._pow(y, 1.0 / self.exponents)

    def _parameters(self):
        return {"a": list(self.a), "b": list(self.b), "alpha": self.alpha}


@dataclass(frozen=True, eq=False)
class LinearMap(ConjugacyMap):
    """``x -> Q x`` for an invertible matrix ``Q``."""

    matrix: np.ndarray = None

    kind = "linear"

    def __post_init__(self):
        q = np.array(self.matrix, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise DomainError("linear map needs a square matrix")
        q.setflags(write=False)
        object.__setattr__(self, "matrix", q)

    @property
    def dim_in(self) -> int:
        return self.matrix.shape[0]

    def _forward(self, x):
        return x @ self.matrix.T

    def _backward(self, y):
        return np.linalg.solve(self.matrix, y.T).T

    @property
    def effective_matrix(self) -> np.ndarray:
        return np.linalg.inv(self.matrix) if self.inverted else np.asarray(self.matrix)

    def _parameters(self):
        return {"matrix": self.matrix.tolist()}


@dataclass(frozen=True, eq=False)
class ProductMap(ConjugacyMap):
    """Blockwise map ``f_1 x ... x f_k`` over a splitting of R^d.

    Each part acts on the span of the columns of its basis matrix. A point
    is expanded in the concatenated basis, each part is applied to its own
    coefficients, and the images are recombined in the same bases.
    """

    parts: tuple[ConjugacyMap, ...] = ()
    bases: tuple[np.ndarray, ...] = ()

    kind = "product"

    def __post_init__(self):
        if len(self.parts) != len(self.bases) or not self.parts:
            raise DomainError("product map needs one basis per part")
        bases = []
        for f, v in zip(self.parts, self.bases):
            v = np.array(v, dtype=float)
            if v.ndim != 2 or v.shape[1] != f.dim_in:
                raise DomainError(f"basis of shape {v.shape} does not fit a map on R^{f.dim_in}")
            v.setflags(write=False)
            bases.append(v)
        full = np.hstack(bases)
        if full.shape[0] != full.shape[1]:
            raise DomainError("bases do not add up to the whole space")
        sv = np.linalg.svd(full, compute_uv=False)
        if sv[-1] <= 1e-12 * sv[0]:
            raise DomainError("bases are not complementary")
        object.__setattr__(self, "bases", tuple(bases))
        object.__setattr__(self, "_full", full)

    @property
    def dim_in(self) -> int:
        return self._full.shape[0]

    @property
    def children(self):
        return tuple(self.parts)

    @property
    def holder_class(self) -> HolderClass:
        out = LIPSCHITZ
        for p in self.parts:
            out = out.weakest(p.holder_class)
        return out

    def _apply(self, x, forward: bool):
        coeffs = np.linalg.solve(self._full, x.T).T
        out = np.zeros_like(x)
        start = 0
        for f, v in zip(self.parts, self.bases):
            k = v.shape[1]
            c = coeffs[:, start:start + k]
            img = f(c) if forward else f.apply_inverse(c)
            out += img @ v.T
            start += k
        return out

    def _forward(self, x):
        return self._apply(x, True)

    def _backward(self, y):
        return self._apply(y, False)

    def _parameters(self):
        return {"bases": [v.tolist() for v in self.bases]}


@dataclass(frozen=True, eq=False)
class Composition(ConjugacyMap):
    """Maps applied one after another, first child first."""

    steps: tuple[ConjugacyMap, ...] = ()

    kind = "composition"

    def __post_init__(self):
        if not self.steps:
            raise DomainError("composition needs at least one map")
        for f, g in zip(self.steps, self.steps[1:]):
            if f.dim_out != g.dim_in:
                raise DomainError("consecutive maps have incompatible dimensions")

    @property
    def dim_in(self) -> int:
        return self.steps[0].dim_in

    @property
    def children(self):
        return tuple(self.steps)

    @property
    def holder_class(self) -> HolderClass:
        out = LIPSCHITZ
        for f in self.steps:
            out = out.compose(f.holder_class)
        return out

    def _forward(self, x):
        for f in self.steps:
            x = f(x)
        return x

    def _backward(self, y):
        for f in reversed(self.steps):
            y = f.apply_inverse(y)
        return y


def identity_map(d: int) -> LinearMap:
    """The identity of R^d as a linear map."""
    return LinearMap(False, np.eye(d))


def map_from_dict(doc: dict) -> ConjugacyMap:
    """Rebuild a map from its ``to_dict`` document.

    Raises
    ------
    ParseError
        If the document is malformed.
    """
    try:
        kind = doc["kind"]
        params = dict(doc.get("parameters", {}))
        inv = bool(params.pop("inverted", False))
        kids = [map_from_dict(c) for c in doc.get("children", [])]
        if kind == "block-to-diag":
            return BlockToDiag(inv, int(params["m"]), float(params["a"]))
        if kind == "complex-block-to-diag":
            return ComplexBlockToDiag(inv, int(params["m"]), float(params["a"]), float(params["b"]))
        if kind == "unwind":
            return Unwind(inv, float(params["a"]), float(params["b"]))
        if kind == "power":
            return PowerMap(inv, tuple(map(float, params["a"])), tuple(map(float, params["b"])),
                            float(params["alpha"]))
        if kind == "linear":
            return LinearMap(inv, np.array(params["matrix"], dtype=float))
        if kind == "product":
            return ProductMap(inv, tuple(kids), tuple(np.array(v, dtype=float) for v in params["bases"]))
        if kind == "composition":
            return Composition(inv, tuple(kids))
    except (KeyError, TypeError, ValueError, DomainError) as exc:
        raise ParseError(f"malformed map document: {exc}") from None
    raise ParseError(f"unknown map kind {kind!r}")
