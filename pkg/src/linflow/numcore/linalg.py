"""Rank, kernels, commutants and similarity witnesses."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import DimensionMismatch, WitnessNotFound
from .spectrum import eigenvalues
from .types import DEFAULT_TOL, Spectrum, ToleranceProfile, as_generator

N_DRAWS = 32


def singular_values(a) -> np.ndarray:
    a = np.asarray(a)
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def numerical_rank(a, tol: ToleranceProfile = DEFAULT_TOL) -> int:
    """Number of singular values above ``rank_tol * sigma_max``.

    Examples
    --------
    >>> numerical_rank([[1.0, 2.0], [2.0, 4.0]])
    1
    """
    s = singular_values(a)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol.rank_tol * s[0]))


def _sign_fix(v: np.ndarray) -> np.ndarray:
    """Make the first clearly nonzero entry of each column positive."""
    v = v.copy()
    for j in range(v.shape[1]):
        col = v[:, j]
        big = np.flatnonzero(np.abs(col) > 1e-12 * max(np.abs(col).max(), 1e-300))
        if big.size:
            lead = col[big[0]]
            v[:, j] = col * (np.conj(lead) / abs(lead))
    return v


def kernel_basis(a, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the numerical kernel, as columns.

    Parameters
    ----------
    a : array_like of shape (m, n)

    Returns
    -------
    ndarray of shape (n, n - rank)
    """
    a = np.atleast_2d(np.asarray(a))
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n, dtype=a.dtype)
    _, s, vh = np.linalg.svd(a)
    rank = 0 if s[0] == 0.0 else int(np.sum(s > tol.rank_tol * s[0]))
    return _sign_fix(vh[rank:].conj().T)


def smallest_right_vectors(a, k: int) -> np.ndarray:
    """Right singular vectors of the ``k`` smallest singular values.

    Used when the kernel dimension is known in advance, which is more
    robust than thresholding.
    """
    a = np.atleast_2d(np.asarray(a))
    n = a.shape[1]
    if k == 0:
        return np.zeros((n, 0), dtype=a.dtype)
    _, _, vh = np.linalg.svd(a)
    return _sign_fix(vh[n - k:].conj().T)


def orthonormalize(v: np.ndarray) -> np.ndarray:
    """Orthonormal basis for the column span of a full-rank matrix."""
    if v.shape[1] == 0:
        return v
    u, _, _ = np.linalg.svd(v, full_matrices=False)
    return _sign_fix(u)


def commutant_basis(a, b, tol: ToleranceProfile = DEFAULT_TOL,
                    commute_with: Sequence[np.ndarray] = (),
                    scale: float | None = None) -> list[np.ndarray]:
    """Basis of the solutions ``Q`` of ``Q A = B Q``.

    The equation is vectorised (column-major) as
    ``(A^T (x) I - I (x) B) vec(Q) = 0`` and solved by SVD.

    Parameters
    ----------
    a : array_like of shape (q, q)
    b : array_like of shape (p, p)
    tol : ToleranceProfile, optional
    commute_with : sequence of ndarray, optional
        Extra square matrices ``J`` (requires ``p == q``) with the
        additional constraint ``Q J = J Q``.
    scale : float, optional
        Reference magnitude for the rank cutoff. Defaults to
        ``||A|| + ||B||``; pass the norm of an ambient matrix when ``A`` and
        ``B`` are restrictions whose entries may be pure rounding noise.

    Returns
    -------
    list of ndarray of shape (p, q)
        Orthonormal (in Frobenius inner product) basis.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    q, p = a.shape[0], b.shape[0]
    rows = [np.kron(a.T, np.eye(p)) - np.kron(np.eye(q), b)]
    for j in commute_with:
        j = np.asarray(j, dtype=float)
        if p != q or j.shape != (p, p):
            raise DimensionMismatch("commutation constraint needs square Q of matching size")
        rows.append(np.kron(j.T, np.eye(p)) - np.kron(np.eye(q), j))
    k = np.vstack(rows)
    if p * q == 0:
        return []
    _, s, vh = np.linalg.svd(k)
    # the cutoff follows the input scale so a K made only of rounding noise has rank 0
    if scale is None:
        scale = np.linalg.norm(a, 2) + np.linalg.norm(b, 2)
    scale = max(s[0], scale)
    rank = 0 if scale == 0.0 else int(np.sum(s > tol.rank_tol * scale))
    return [v.reshape((p, q), order="F") for v in vh[rank:]]


def spectra_match(sa: Spectrum, sb: Spectrum, atol: float) -> bool:
    """True if two spectra agree cluster by cluster with equal multiplicities."""
    if sa.dim != sb.dim or len(sa.clusters) != len(sb.clusters):
        return False
    for ca, cb in zip(sa.clusters, sb.clusters):
        if ca.multiplicity != cb.multiplicity or ca.is_real != cb.is_real:
            return False
        if abs(ca.value - cb.value) > atol:
            return False
    return True


def _residual_ok(qm, a, b, tol: ToleranceProfile, scale: float) -> bool:
    res = np.linalg.norm(qm @ a - b @ qm, 2)
    return res <= tol.residual_tol * max(scale, 1e-300) * np.linalg.norm(qm, 2) or res == 0.0


def _invertible(qm, tol: ToleranceProfile) -> bool:
    s = singular_values(qm)
    return s.size == 0 or (s[0] > 0 and s[-1] > tol.rank_tol * s[0])


def find_similarity(a, b, tol: ToleranceProfile = DEFAULT_TOL, seed: int = 0,
                    commute_with: Sequence[np.ndarray] = (),
                    scale: float | None = None) -> np.ndarray | None:
    """Invertible ``Q`` with ``Q A = B Q``, or None if the matrices are not similar.

    Spectra are compared first; then 32 seeded random combinations of a
    commutant basis are tried. If none is invertible, the real Jordan
    forms are compared and, when they agree, ``Q = P_B P_A^{-1}`` is
    checked as a witness.

    Parameters
    ----------
    a, b : array_like of shape (d, d)
    tol : ToleranceProfile, optional
    seed : int, optional
        Seed for the random combinations.
    commute_with : sequence of ndarray, optional
        Extra matrices the witness must commute with. The Jordan-form
        fallback is skipped when this is given.
    scale : float, optional
        Reference magnitude for rank, spectrum and residual decisions;
        defaults to ``||A|| + ||B||``. See :func:`commutant_basis`.

    Returns
    -------
    ndarray of shape (d, d) or None
        Witness scaled to unit spectral norm.

    Raises
    ------
    DimensionMismatch
        If ``a`` and ``b`` differ in size.
    WitnessNotFound
        If Jordan structures agree but no certified witness was found.
    """
    ga, gb = as_generator(a), as_generator(b)
    if ga.dim != gb.dim:
        raise DimensionMismatch(f"cannot compare {ga.dim}x{ga.dim} with {gb.dim}x{gb.dim}")
    if ga.dim == 0:
        return np.zeros((0, 0))
    if scale is None:
        scale = ga.norm + gb.norm
    scale = max(scale, ga.norm + gb.norm)
    sa, sb = eigenvalues(ga, tol), eigenvalues(gb, tol)
    atol = max(tol.eig_radius(scale),
               tol.alpha_match_tol * (1.0 + max(np.abs(sa.values).max(), np.abs(sb.values).max())))
    if not spectra_match(sa, sb, atol):
        return None
    am, bm = ga.entries, gb.entries
    basis = commutant_basis(am, bm, tol, commute_with, scale)
    if not basis:
        return None
    stack = np.array(basis)
    rng = np.random.default_rng(seed)
    for _ in range(N_DRAWS):
        coef = rng.standard_normal(len(basis))
        qm = np.tensordot(coef, stack, axes=1)
        qm = qm / np.linalg.norm(qm, 2)
        if _invertible(qm, tol) and _residual_ok(qm, am, bm, tol, scale):
            return qm
    if commute_with:
        raise WitnessNotFound("commutant is nontrivial but no invertible witness was found")
    from ..flowstruct import real_jordan

    ja, jb = real_jordan(ga, tol), real_jordan(gb, tol)
    if not ja.same_structure(jb, atol):
        return None
    qm = jb.basis @ np.linalg.inv(ja.basis)
    qm = qm / np.linalg.norm(qm, 2)
    if _invertible(qm, tol) and _residual_ok(qm, am, bm, tol, scale):
        return qm
    raise WitnessNotFound("Jordan structures agree but no certified similarity was found")
