"""Structure of a linear flow: real Jordan form, invariant splittings, exponents.

Complex Jordan blocks use the layout in which the first ``m`` coordinates
carry the real parts of a chain and the last ``m`` coordinates carry the
imaginary parts::

    J_m(a + ib) = a I_2m + [[J_m, -b I_m],
                            [b I_m,  J_m]]

where ``J_m`` is the nilpotent shift with ones on the superdiagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure
from .numcore import (
    DEFAULT_TOL,
    EigenCluster,
    GeneratorMatrix,
    ToleranceProfile,
    as_generator,
    eigenvalues,
    orthonormalize,
    singular_values,
    smallest_right_vectors,
)


def shift_matrix(m: int) -> np.ndarray:
    """Nilpotent ``m x m`` matrix with ones on the superdiagonal."""
    return np.eye(m, k=1)


def jordan_block(value: complex, m: int) -> np.ndarray:
    """Real Jordan block of order ``m`` for the eigenvalue ``value``.

    A real value gives the ``m x m`` block ``a I + J_m``. A value with
    nonzero imaginary part ``b`` gives the ``2m x 2m`` block
    ``a I + [[J_m, -b I], [b I, J_m]]``.

    Examples
    --------
    >>> jordan_block(1j, 1)
    array([[ 0., -1.],
           [ 1.,  0.]])
    """
    value = complex(value)
    a, b = value.real, value.imag
    n = shift_matrix(m)
    if b == 0.0:
        return a * np.eye(m) + n
    eye = np.eye(m)
    return a * np.eye(2 * m) + np.block([[n, -b * eye], [b * eye, n]])


def block_diag(*blocks: np.ndarray) -> np.ndarray:
    """Block-diagonal matrix from square blocks."""
    blocks = [np.atleast_2d(np.asarray(b, dtype=float)) for b in blocks if np.size(b)]
    d = sum(b.shape[0] for b in blocks)
    out = np.zeros((d, d))
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


@dataclass(frozen=True)
class RealJordanBlock:
    """One block of a real Jordan form.

    Attributes
    ----------
    value : complex
        Eigenvalue with non-negative imaginary part.
    size : int
        Length ``m`` of the Jordan chain.
    """

    value: complex
    size: int

    @property
    def is_real(self) -> bool:
        return self.value.imag == 0.0

    @property
    def real_size(self) -> int:
        return self.size if self.is_real else 2 * self.size

    def matrix(self) -> np.ndarray:
        return jordan_block(self.value, self.size)


@dataclass(frozen=True)
class RealJordanDecomposition:
    """``A = P J P^{-1}`` with ``J`` block diagonal in canonical block order.

    Blocks are sorted by real part, then imaginary part, then decreasing
    size.

    Attributes
    ----------
    blocks : tuple of RealJordanBlock
    basis : ndarray of shape (d, d)
        The matrix ``P``; its columns are the real Jordan basis.
    residual : float
        ``||A P - P J|| / (||A|| ||P||)``.
    condition : float
        Condition number of ``P``.
    """

    blocks: tuple[RealJordanBlock, ...]
    basis: np.ndarray
    residual: float
    condition: float

    def jordan_matrix(self) -> np.ndarray:
        return block_diag(*[b.matrix() for b in self.blocks])

    def slices(self) -> list[slice]:
        """Column range of each block in ``basis``."""
        out, i = [], 0
        for b in self.blocks:
            out.append(slice(i, i + b.real_size))
            i += b.real_size
        return out

    def same_structure(self, other: "RealJordanDecomposition", atol: float) -> bool:
        if len(self.blocks) != len(other.blocks):
            return False
        return all(
            p.size == q.size and p.is_real == q.is_real and abs(p.value - q.value) <= atol
            for p, q in zip(self.blocks, other.blocks)
        )


def _char_power(a: np.ndarray, value: complex, power: int, complex_shift: bool) -> np.ndarray:
    d = a.shape[0]
    if complex_shift:
        base = a.astype(complex) - value * np.eye(d)
    elif value.imag == 0.0:
        base = a - value.real * np.eye(d)
    else:
        base = a @ a - 2.0 * value.real * a + abs(value) ** 2 * np.eye(d)
    return np.linalg.matrix_power(base, power)


def _cluster_gker(a: np.ndarray, c: EigenCluster) -> np.ndarray:
    """Real orthonormal basis of the generalized eigenspace of a cluster."""
    return smallest_right_vectors(_char_power(a, c.value, c.multiplicity, False), c.real_dim)


def _chain_counts(n_mat: np.ndarray, scale: float, tol: ToleranceProfile) -> list[int]:
    """Number of Jordan chains of each exact length for a nilpotent matrix.

    Returns a list ``c`` with ``c[j]`` the number of chains of length ``j``.
    """
    n = n_mat.shape[0]
    # rounding leaves singular values near eps * ||N|| * ||N^(j-1)|| in N^j
    theta = np.sqrt(tol.rank_tol) * scale
    nullity = [0]
    power = np.eye(n, dtype=n_mat.dtype)
    prev_norm = 1.0
    for j in range(1, n + 1):
        power = power @ n_mat
        s = singular_values(power)
        nu = int(np.sum(s <= theta * prev_norm)) if j < n else n
        prev_norm = s[0] if s.size else 0.0
        nu = max(nu, nullity[-1], 1)
        nullity.append(nu)
        if nu == n:
            nullity += [n] * (n - j)
            break
    # chains of length >= j; must be non-increasing in j
    at_least = [nullity[j] - nullity[j - 1] for j in range(1, n + 1)]
    for j in range(1, n):
        at_least[j] = min(at_least[j], at_least[j - 1])
    # any dimension lost by the clamp goes to chains of length one
    deficit = n - sum(at_least)
    at_least[0] += deficit
    if deficit:
        at_least = sorted(at_least, reverse=True)
    counts = [0] * (n + 2)
    for j in range(1, n + 1):
        nxt = at_least[j] if j < n else 0
        counts[j] = at_least[j - 1] - nxt
    return counts


def _nilpotent_chains(n_mat: np.ndarray, scale: float, tol: ToleranceProfile) -> list[np.ndarray]:
    """Jordan chains of a numerically nilpotent matrix.

    Each chain is returned as an ``n x m`` array ``[N^{m-1} v, ..., N v, v]``
    so that ``N`` acts on it as the shift ``J_m``.
    """
    n = n_mat.shape[0]
    counts = _chain_counts(n_mat, scale, tol)
    longest = max((j for j in range(1, n + 1) if counts[j]), default=0)
    powers = [np.eye(n, dtype=n_mat.dtype)]
    for _ in range(longest):
        powers.append(powers[-1] @ n_mat)
    # kernel dimensions implied by the chain counts
    nullity_at = {j: sum(min(j, length) * counts[length] for length in range(1, n + 1))
                  for j in range(longest + 1)}
    chains: list[np.ndarray] = []
    tops: list[tuple[int, np.ndarray]] = []
    for j in range(longest, 0, -1):
        c = counts[j]
        if c == 0:
            continue
        kj = smallest_right_vectors(powers[j], nullity_at[j])
        span = [smallest_right_vectors(powers[j - 1], nullity_at[j - 1])]
        for h, v in tops:
            span.append((powers[h - j] @ v)[:, None])
        e = np.hstack(span) if span else np.zeros((n, 0))
        if e.shape[1]:
            qe, _ = np.linalg.qr(e)
            m = kj - qe @ (qe.conj().T @ kj)
        else:
            m = kj
        _, _, wh = np.linalg.svd(m)
        for i in range(c):
            v = kj @ wh[i].conj()
            v = v / np.linalg.norm(v)
            tops.append((j, v))
            chains.append(np.column_stack([powers[j - 1 - k] @ v for k in range(j)]))
    return chains


def real_jordan(a, tol: ToleranceProfile = DEFAULT_TOL) -> RealJordanDecomposition:
    """Real Jordan decomposition ``A = P J P^{-1}``.

    For each eigenvalue cluster the generalized eigenspace is computed,
    the restriction of ``A - z`` to it is treated as nilpotent, and chain
    lengths follow from the ranks of its powers.

    Parameters
    ----------
    a : array_like or GeneratorMatrix
    tol : ToleranceProfile, optional

    Returns
    -------
    RealJordanDecomposition

    Raises
    ------
    NumericalFailure
        If the computed basis has condition number above ``1 / rank_tol``.

    Examples
    --------
    >>> jd = real_jordan([[3.0, 1.0], [-1.0, 1.0]])
    >>> jd.blocks
    (RealJordanBlock(value=(2+0j), size=2),)
    """
    g = as_generator(a)
    return g.cached(("jordan", tol), lambda: _real_jordan(g, tol))


def _real_jordan(g: GeneratorMatrix, tol: ToleranceProfile) -> RealJordanDecomposition:
    am = g.entries
    d = g.dim
    scale = 1.0 + g.norm
    blocks: list[RealJordanBlock] = []
    cols: list[np.ndarray] = []
    for c in eigenvalues(g, tol).clusters:
        k = c.multiplicity
        if c.is_real:
            v = _cluster_gker(am, c)
            nmat = v.T @ (am - c.value.real * np.eye(d)) @ v
            chains = _nilpotent_chains(nmat, scale, tol)
            found = []
            for ch in chains:
                found.append((ch.shape[1], v @ ch))
        else:
            v = smallest_right_vectors(_char_power(am, c.value, k, True), k)
            nmat = v.conj().T @ (am - c.value * np.eye(d)) @ v
            chains = _nilpotent_chains(nmat, scale, tol)
            found = []
            for ch in chains:
                w = v @ ch
                found.append((ch.shape[1], np.hstack([w.real, -w.imag])))
        found.sort(key=lambda t: -t[0])
        for m, colblock in found:
            blocks.append(RealJordanBlock(c.value, m))
            cols.append(colblock)
    p = np.hstack(cols) if cols else np.zeros((0, 0))
    if d == 0:
        return RealJordanDecomposition((), p, 0.0, 1.0)
    s = singular_values(p)
    cond = float(s[0] / s[-1]) if s[-1] > 0 else np.inf
    if cond > 1.0 / tol.rank_tol:
        raise NumericalFailure(
            f"Jordan basis for {g.label()} is ill-conditioned (condition {cond:.3g})"
        )
    jm = block_diag(*[b.matrix() for b in blocks])
    res = np.linalg.norm(am @ p - p @ jm, 2) / (max(g.norm, 1e-300) * s[0])
    return RealJordanDecomposition(tuple(blocks), p, float(res), cond)


def generalized_kernel(a, z: complex, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal real basis of the generalized kernel of ``A - z``.

    For non-real ``z`` this is the kernel of a power of
    ``A^2 - 2 Re(z) A + |z|^2 I``, which also contains the generalized
    eigenvectors for the conjugate of ``z``. Returns an empty ``d x 0``
    array when ``z`` is not an eigenvalue.

    Parameters
    ----------
    a : array_like or GeneratorMatrix
    z : complex
    tol : ToleranceProfile, optional

    Returns
    -------
    ndarray of shape (d, k)
    """
    g = as_generator(a)
    z = complex(z)
    z = complex(z.real, abs(z.imag))
    spec = eigenvalues(g, tol)
    rho = float(np.abs(spec.values).max()) if spec.dim else 0.0
    for c in spec.clusters:
        if abs(c.value - z) <= tol.cluster_radius(g.norm, rho, c.real_dim):
            return _cluster_gker(g.entries, c)
    return np.zeros((g.dim, 0))


@dataclass(frozen=True)
class FlowDecomposition:
    """Splitting ``R^d = X_S + X_C + X_U`` into invariant subspaces.

    Attributes
    ----------
    d_s, d_c, d_u : int
        Dimensions of the stable, central and unstable subspaces.
    basis_s, basis_c, basis_u : ndarray
        Orthonormal bases (columns) of each subspace.
    a_s, a_c, a_u : ndarray
        Restrictions of ``A`` in those bases, e.g. ``a_s = B_S^T A B_S``.
    lyapunov : ndarray of shape (d,)
        Real parts of the eigenvalues with multiplicity, ascending.
    """

    d_s: int
    d_c: int
    d_u: int
    basis_s: np.ndarray
    basis_c: np.ndarray
    basis_u: np.ndarray
    a_s: np.ndarray
    a_c: np.ndarray
    a_u: np.ndarray
    lyapunov: np.ndarray

    @property
    def dim(self) -> int:
        return self.d_s + self.d_c + self.d_u

    @property
    def is_hyperbolic(self) -> bool:
        return self.d_c == 0

    @property
    def hyperbolic_exponents(self) -> np.ndarray:
        return self.lyapunov[self.lyapunov != 0.0]


def scu_split(a, tol: ToleranceProfile = DEFAULT_TOL) -> FlowDecomposition:
    """Stable, central and unstable subspaces with restricted generators.

    Examples
    --------
    >>> f = scu_split(np.diag([-1.0, 0.0, 2.0]))
    >>> (f.d_s, f.d_c, f.d_u)
    (1, 1, 1)
    """
    g = as_generator(a)
    return g.cached(("scu", tol), lambda: _scu_split(g, tol))


def _scu_split(g: GeneratorMatrix, tol: ToleranceProfile) -> FlowDecomposition:
    am = g.entries
    d = g.dim
    groups = {-1: [], 0: [], 1: []}
    spec = eigenvalues(g, tol)
    for c in spec.clusters:
        groups[int(np.sign(c.value.real))].append(_cluster_gker(am, c))
    bases, restricted = {}, {}
    for key, parts in groups.items():
        b = orthonormalize(np.hstack(parts)) if parts else np.zeros((d, 0))
        bases[key] = b
        restricted[key] = b.T @ am @ b
    return FlowDecomposition(
        bases[-1].shape[1], bases[0].shape[1], bases[1].shape[1],
        bases[-1], bases[0], bases[1],
        restricted[-1], restricted[0], restricted[1],
        spec.real_parts(),
    )


def lyapunov_spectrum(a, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Lyapunov exponents (real parts of eigenvalues) with multiplicity, ascending.

    Examples
    --------
    >>> lyapunov_spectrum(np.diag([4.0, 1.0, -2.0]))
    array([-2.,  1.,  4.])
    """
    return eigenvalues(a, tol).real_parts()


def lyapunov_space(a, s: float, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the sum of generalized eigenspaces with ``Re z <= s``."""
    g = as_generator(a)
    eps = tol.eig_radius(g.norm)
    parts = [_cluster_gker(g.entries, c) for c in eigenvalues(g, tol).clusters
             if c.value.real <= s + eps]
    if not parts:
        return np.zeros((g.dim, 0))
    return orthonormalize(np.hstack(parts))


def realify(m) -> GeneratorMatrix:
    """Real ``2d x 2d`` matrix of a complex ``d x d`` matrix.

    Each entry ``a + ib`` becomes the block ``[[a, -b], [b, a]]``, so the
    coordinates of ``C^d`` are ordered as ``(Re z_1, Im z_1, Re z_2, ...)``.
    """
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    d = m.shape[0]
    out = np.zeros((2 * d, 2 * d))
    out[0::2, 0::2] = m.real
    out[1::2, 1::2] = m.real
    out[0::2, 1::2] = -m.imag
    out[1::2, 0::2] = m.imag
    return GeneratorMatrix(out, "realified-complex")


def complex_structure(d: int) -> np.ndarray:
    """Multiplication by ``i`` on realified ``C^d``."""
    return realify(1j * np.eye(d)).entries


def time_reverse(a) -> GeneratorMatrix:
    """Generator ``-A`` of the time-reversed flow."""
    g = as_generator(a)
    return GeneratorMatrix(-g.entries, g.origin, g.name)
