"""Clustered, conjugate-consistent eigenvalues."""

from __future__ import annotations

import numpy as np

from .qr import raw_eigenvalues
from .types import DEFAULT_TOL, EigenCluster, Spectrum, ToleranceProfile, as_generator


def _cluster_indices(points: np.ndarray, norm: float, rho: float,
                     tol: ToleranceProfile) -> list[list[int]]:
    """Group points in the closed upper half plane into eigenvalue clusters.

    Each group is as large as possible subject to its diameter being at
    most ``tol.cluster_radius(norm, rho, size)``.
    """
    n = len(points)
    dist = np.abs(points[:, None] - points[None, :])
    order = sorted(range(n), key=lambda i: (points[i].real, points[i].imag))
    left = list(order)
    groups = []
    while left:
        p = left[0]
        near = sorted(left, key=lambda j: (dist[p, j], j))
        best = 1
        for k in range(len(near), 1, -1):
            radius = tol.cluster_radius(norm, rho, k)
            if dist[p, near[k - 1]] > radius:
                continue
            idx = near[:k]
            if dist[np.ix_(idx, idx)].max() <= radius:
                best = k
                break
        group = near[:best]
        groups.append(group)
        left = [j for j in left if j not in group]
    return groups


def eigenvalues(a, tol: ToleranceProfile = DEFAULT_TOL) -> Spectrum:
    """Eigenvalues of a real matrix with multiplicity and conjugate snapping.

    Raw eigenvalues come from the Hessenberg QR iteration. They are then
    clustered: nearly equal eigenvalues (including the split a defective
    block suffers under rounding) are replaced by their mean, near-real
    pairs become real, and real parts within the snapping radius of zero
    become exactly zero.

    Parameters
    ----------
    a : array_like or GeneratorMatrix
        Real square matrix.
    tol : ToleranceProfile, optional

    Returns
    -------
    Spectrum

    Raises
    ------
    NumericalFailure
        If the QR iteration does not converge.

    Examples
    --------
    >>> eigenvalues([[0.0, -1.0], [1.0, 0.0]]).values
    array([0.-1.j, 0.+1.j])
    """
    g = as_generator(a)
    return g.cached(("spectrum", tol), lambda: _compute(g, tol))


def _share_real_parts(clusters: list[EigenCluster], eps: float) -> list[EigenCluster]:
    """Give clusters whose real parts agree within ``eps`` one common real part.

    Without this, equal Lyapunov exponents of different clusters differ in
    the last bits and their order depends on rounding.
    """
    clusters = sorted(clusters, key=lambda c: c.value.real)
    out: list[EigenCluster] = []
    i = 0
    while i < len(clusters):
        k = i + 1
        while k < len(clusters) and clusters[k].value.real - clusters[k - 1].value.real <= eps:
            k += 1
        group = clusters[i:k]
        reals = [c.value.real for c in group]
        if 0.0 in reals:
            re = 0.0
        else:
            weights = [c.real_dim for c in group]
            re = float(np.average(reals, weights=weights))
        out += [EigenCluster(complex(re, c.value.imag), c.multiplicity) for c in group]
        i = k
    return out


def _compute(g, tol: ToleranceProfile) -> Spectrum:
    raw = raw_eigenvalues(g.entries)
    norm = g.norm
    rho = float(np.abs(raw).max()) if raw.size else 0.0
    upper = raw.real + 1j * np.abs(raw.imag)
    eps = tol.eig_radius(norm)
    clusters = []
    for group in _cluster_indices(upper, norm, rho, tol):
        count = len(group)
        centre = upper[group].mean()
        if count % 2 == 1 or centre.imag <= tol.cluster_radius(norm, rho, count):
            value = complex(raw[group].real.mean(), 0.0)
            mult = count
        else:
            value = complex(centre.real, centre.imag)
            mult = count // 2
        re = 0.0 if abs(value.real) <= eps else value.real
        im = value.imag
        clusters.append(EigenCluster(complex(re, im), mult))
    clusters = _share_real_parts(clusters, eps)
    clusters.sort(key=lambda c: (c.value.real, c.value.imag))
    vals, paired = [], []
    for c in clusters:
        if c.is_real:
            vals += [c.value] * c.multiplicity
            paired += [False] * c.multiplicity
        else:
            vals += [c.value.conjugate()] * c.multiplicity + [c.value] * c.multiplicity
            paired += [True] * (2 * c.multiplicity)
    vals = np.array(vals, dtype=complex)
    paired = np.array(paired, dtype=bool)
    order = np.lexsort((vals.imag, vals.real))
    return Spectrum(vals[order], paired[order], tuple(clusters))
