"""Eigenvalues of a real square matrix by the Hessenberg QR algorithm.

The routine follows the classical three stages: diagonal balancing with
powers of two, Householder reduction to upper Hessenberg form, and the
Francis implicit double-shift QR iteration with exceptional shifts.
Matrices of order at most two use closed-form roots instead.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import NumericalFailure

_RADIX = 2.0
_MAX_ITS = 60
_MAX_SWEEPS = 100


def balance(a: np.ndarray) -> np.ndarray:
    """Scale rows and columns by powers of two to equalise their norms.

    The transformation is a diagonal similarity, so eigenvalues are
    unchanged while rounding errors in the later stages shrink.

    Parameters
    ----------
    a : ndarray of shape (n, n)
        Real square matrix. Not modified.

    Returns
    -------
    ndarray of shape (n, n)
        Balanced copy of ``a``.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    sqrdx = _RADIX * _RADIX
    done = False
    sweeps = 0
    while not done and sweeps < _MAX_SWEEPS:
        done = True
        sweeps += 1
        for i in range(n):
            c = np.sum(np.abs(a[:, i])) - abs(a[i, i])
            r = np.sum(np.abs(a[i, :])) - abs(a[i, i])
            if c == 0.0 or r == 0.0:
                continue
            g = r / _RADIX
            f = 1.0
            s = c + r
            while c < g:
                f *= _RADIX
                c *= sqrdx
            g = r * _RADIX
            while c > g:
                f /= _RADIX
                c /= sqrdx
            if (c + r) / f < 0.95 * s:
                done = False
                a[i, :] /= f
                a[:, i] *= f
    return a


def hessenberg(a: np.ndarray) -> np.ndarray:
    """Reduce a real matrix to upper Hessenberg form by Householder reflections.

    Parameters
    ----------
    a : ndarray of shape (n, n)

    Returns
    -------
    ndarray of shape (n, n)
        Orthogonally similar matrix with zeros below the first subdiagonal.
    """
    h = np.array(a, dtype=float, copy=True)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        if x[0] > 0:
            alpha = -alpha
        v = x
        v[0] -= alpha
        vnorm = np.linalg.norm(v)
        if vnorm == 0.0:
            continue
        v /= vnorm
        h[k + 1:, k:] -= 2.0 * np.outer(v, v @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v)
        h[k + 2:, k] = 0.0
    return h


def _eig2(a11: float, a12: float, a21: float, a22: float) -> tuple[complex, complex]:
    half_tr = 0.5 * (a11 + a22)
    p = 0.5 * (a11 - a22)
    disc = p * p + a12 * a21
    if disc >= 0.0:
        root = math.sqrt(disc)
        big = half_tr + math.copysign(root, half_tr) if half_tr != 0.0 else root
        det = a11 * a22 - a12 * a21
        # det / big avoids cancellation in the smaller root, but only when big
        # itself is above rounding level; otherwise both roots are ~half_tr
        scale = max(abs(a11), abs(a12), abs(a21), abs(a22))
        if half_tr != 0.0 and abs(big) > 8.0 * np.finfo(float).eps * scale:
            return complex(big), complex(det / big)
        return complex(half_tr + root), complex(half_tr - root)
    root = math.sqrt(-disc)
    return complex(half_tr, root), complex(half_tr, -root)


def hqr(h: np.ndarray) -> np.ndarray:
    """Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.

    Parameters
    ----------
    h : ndarray of shape (n, n)
        Upper Hessenberg matrix. Not modified.

    Returns
    -------
    ndarray of shape (n,), complex
        Eigenvalues in the order they deflate.

    Raises
    ------
    NumericalFailure
        If some eigenvalue fails to deflate within the iteration budget.
    """
    n = h.shape[0]
    # one-based working copy keeps the index arithmetic of the textbook form
    a = np.zeros((n + 1, n + 1))
    a[1:, 1:] = h
    wr = np.zeros(n + 1)
    wi = np.zeros(n + 1)
    anorm = 0.0
    for i in range(1, n + 1):
        anorm += np.sum(np.abs(a[i, max(i - 1, 1):]))
    nn = n
    t = 0.0
    x = y = z = w = 0.0
    while nn >= 1:
        its = 0
        while True:
            l = 1
            for ll in range(nn, 1, -1):
                s = abs(a[ll - 1, ll - 1]) + abs(a[ll, ll])
                if s == 0.0:
                    s = anorm
                if abs(a[ll, ll - 1]) + s == s:
                    a[ll, ll - 1] = 0.0
                    l = ll
                    break
            x = a[nn, nn]
            if l == nn:
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                zz = math.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    zz = p + math.copysign(zz, p)
                    wr[nn - 1] = wr[nn] = x + zz
                    if zz != 0.0:
                        wr[nn] = x - w / zz
                    wi[nn - 1] = wi[nn] = 0.0
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn - 1] = -zz
                    wi[nn] = zz
                nn -= 2
                break
            if its == _MAX_ITS:
                raise NumericalFailure(
                    f"QR iteration did not converge for eigenvalue {nn} of {n}"
                )
            if its % 10 == 0 and its > 0:
                # exceptional shift
                t += x
                for i in range(1, nn + 1):
                    a[i, i] -= x
                s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                x = y = 0.75 * s
                w = -0.4375 * s * s
            its += 1
            m = nn - 2
            while m >= l:
                z = a[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
                q = a[m + 1, m + 1] - z - r - s
                r = a[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = abs(a[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
                if u + v == v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                a[i, i - 2] = 0.0
                if i != m + 2:
                    a[i, i - 3] = 0.0
            for k in range(m, nn):
                if k != m:
                    p = a[k, k - 1]
                    q = a[k + 1, k - 1]
                    r = a[k + 2, k - 1] if k != nn - 1 else 0.0
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
                if s == 0.0:
                    continue
                if k == m:
                    if l != m:
                        a[k, k - 1] = -a[k, k - 1]
                else:
                    a[k, k - 1] = -s * x
                p += s
                x = p / s
                y = q / s
                z = r / s
                q /= p
                r /= p
                # row transformation on columns k..nn
                if k != nn - 1:
                    pv = a[k, k:nn + 1] + q * a[k + 1, k:nn + 1] + r * a[k + 2, k:nn + 1]
                    a[k + 2, k:nn + 1] -= pv * z
                else:
                    pv = a[k, k:nn + 1] + q * a[k + 1, k:nn + 1]
                a[k + 1, k:nn + 1] -= pv * y
                a[k, k:nn + 1] -= pv * x
                # column transformation on rows l..min(nn, k+3)
                mmin = min(nn, k + 3)
                if k != nn - 1:
                    pc = x * a[l:mmin + 1, k] + y * a[l:mmin + 1, k + 1] + z * a[l:mmin + 1, k + 2]
                    a[l:mmin + 1, k + 2] -= pc * r
                else:
                    pc = x * a[l:mmin + 1, k] + y * a[l:mmin + 1, k + 1]
                a[l:mmin + 1, k + 1] -= pc * q
                a[l:mmin + 1, k] -= pc
            if l >= nn - 1:
                break
    return wr[1:] + 1j * wi[1:]


def raw_eigenvalues(a: np.ndarray) -> np.ndarray:
    """Unclustered eigenvalues of a real square matrix.

    Parameters
    ----------
    a : ndarray of shape (n, n)

    Returns
    -------
    ndarray of shape (n,), complex

    Raises
    ------
    NumericalFailure
        If the matrix has non-finite entries or the iteration stalls.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if not np.all(np.isfinite(a)):
        raise NumericalFailure("matrix has non-finite entries")
    if n == 0:
        return np.zeros(0, dtype=complex)
    if n == 1:
        return np.array([complex(a[0, 0])])
    if n == 2:
        return np.array(_eig2(a[0, 0], a[0, 1], a[1, 0], a[1, 1]))
    amax = float(np.abs(a).max())
    if amax == 0.0:
        return np.zeros(n, dtype=complex)
    # exact power-of-two scaling keeps the deflation test away from under- and overflow
    shift = -math.frexp(amax)[1]
    return np.ldexp(1.0, -shift) * hqr(hessenberg(balance(np.ldexp(a, shift))))
