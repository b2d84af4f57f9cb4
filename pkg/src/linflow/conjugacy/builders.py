"""Constructors for the explicit maps and the assembled conjugacy pipeline."""

from __future__ import annotations

import numpy as np

from ..errors import DimensionMismatch, DomainError, NumericalFailure
from ..flowstruct import RealJordanBlock, block_diag, real_jordan
from ..numcore import DEFAULT_TOL, GeneratorMatrix, ToleranceProfile, as_generator, find_similarity
from .maps import (
    BlockToDiag,
    ComplexBlockToDiag,
    Composition,
    ConjugacyMap,
    LinearMap,
    PowerMap,
    ProductMap,
    Unwind,
    identity_map,
)


def build_block_to_diag(m: int, a: float) -> BlockToDiag:
    """Map conjugating the flow of ``a I_m`` to the flow of ``J_m(a)``.

    Examples
    --------
    >>> build_block_to_diag(2, 1.0)([1.0, 0.0])
    array([0., 1.])
    """
    return BlockToDiag(False, int(m), float(a))


def build_complex_block_to_diag(m: int, a: float, b: float) -> ComplexBlockToDiag:
    """Map conjugating ``m`` copies of ``J_1(a+ib)`` to the block ``J_m(a+ib)``."""
    return ComplexBlockToDiag(False, int(m), float(a), float(b))


def build_unwind(a: float, b: float) -> Unwind:
    """Bi-Lipschitz planar map conjugating ``J_1(a+ib)`` to ``a I_2``.

    Examples
    --------
    >>> np.round(build_unwind(1.0, 1.0)([-np.exp(np.pi), 0.0]) / np.exp(np.pi), 12)
    array([ 1., -0.])
    """
    return Unwind(False, float(a), float(b))


def build_power_map(a, b, alpha: float = 1.0) -> PowerMap:
    """Signed power map conjugating ``diag(a)`` to ``diag(b)`` at speed ``alpha``.

    Raises
    ------
    DomainError
        If some ``a_j`` and ``b_j`` differ in sign or vanish, or ``alpha <= 0``.

    Examples
    --------
    >>> build_power_map([-1.0, -2.0], [-1.0, -4.0], 2 ** -0.5).exponents
    array([0.70710678, 1.41421356])
    """
    a = tuple(float(v) for v in np.atleast_1d(a))
    b = tuple(float(v) for v in np.atleast_1d(b))
    return PowerMap(False, a, b, float(alpha))


def product_map(parts) -> ConjugacyMap:
    """Blockwise map from ``(map, basis)`` pairs whose bases split the space.

    Raises
    ------
    DomainError
        If the bases are not complementary.
    """
    parts = list(parts)
    return ProductMap(False, tuple(p for p, _ in parts), tuple(np.asarray(v, dtype=float) for _, v in parts))


def _jordan_data(g: GeneratorMatrix, tol: ToleranceProfile):
    """Real Jordan blocks and basis, taking diagonal inputs as they stand."""
    e = g.entries
    if np.count_nonzero(e - np.diag(np.diag(e))) == 0:
        blocks = [RealJordanBlock(complex(v), 1) for v in np.diag(e)]
        return blocks, np.eye(g.dim)
    jd = real_jordan(g, tol)
    return list(jd.blocks), jd.basis


def _reduction(blocks):
    """Per-block maps taking a Jordan matrix to diagonal hyperbolic blocks.

    Returns the product map (or None when every block is already reduced),
    the reduced generator, the hyperbolic coordinates with their exponents,
    and the central coordinates.
    """
    parts, bases = [], []
    hyp_idx, hyp_exp, cen_idx = [], [], []
    reduced = []
    d = sum(b.real_size for b in blocks)
    start = 0
    nonlinear = False
    for blk in blocks:
        k = blk.real_size
        idx = list(range(start, start + k))
        basis = np.eye(d)[:, idx]
        a, b = blk.value.real, blk.value.imag
        if a == 0.0:
            cen_idx += idx
            reduced.append(blk.matrix())
            part = identity_map(k)
        elif blk.is_real:
            hyp_idx += idx
            hyp_exp += [a] * k
            reduced.append(a * np.eye(k))
            part = build_block_to_diag(blk.size, a).inverse() if blk.size > 1 else identity_map(k)
            nonlinear |= blk.size > 1
        else:
            hyp_idx += idx
            hyp_exp += [a] * k
            reduced.append(a * np.eye(k))
            unwinds = ProductMap(False, tuple(build_unwind(a, b) for _ in range(blk.size)),
                                 tuple(np.eye(k)[:, 2 * i:2 * i + 2] for i in range(blk.size)))
            if blk.size > 1:
                part = Composition(False, (build_complex_block_to_diag(blk.size, a, b).inverse(), unwinds))
            else:
                part = unwinds.parts[0]
            nonlinear = True
        parts.append(part)
        bases.append(basis)
        start += k
    prod = ProductMap(False, tuple(parts), tuple(bases)) if nonlinear else None
    return prod, block_diag(*reduced) if reduced else np.zeros((0, 0)), hyp_idx, hyp_exp, cen_idx


def _permutation(order: list[int]) -> np.ndarray:
    """Matrix sending coordinate ``order[k]`` to position ``k``."""
    p = np.zeros((len(order), len(order)))
    for k, i in enumerate(order):
        p[k, i] = 1.0
    return p


def _is_identity(m: np.ndarray) -> bool:
    return bool(np.array_equal(m, np.eye(m.shape[0])))


def _as_linear(f: ConjugacyMap) -> np.ndarray | None:
    """Matrix of ``f`` when it is linear, else None."""
    if isinstance(f, LinearMap):
        return f.effective_matrix
    if isinstance(f, PowerMap) and np.allclose(f.exponents, 1.0, rtol=0.0, atol=1e-13):
        return np.eye(f.dim_in)
    if isinstance(f, ProductMap):
        mats = [_as_linear(p) for p in f.parts]
        if any(m is None for m in mats):
            return None
        v = f._full
        inner = block_diag(*mats)
        out = v @ inner @ np.linalg.inv(v)
        return np.linalg.inv(out) if f.inverted else out
    return None


def _unwrap(f: ConjugacyMap) -> ConjugacyMap:
    if isinstance(f, ProductMap) and len(f.parts) == 1 and _is_identity(f._full):
        inner = f.parts[0]
        return inner.inverse() if f.inverted else inner
    return f


def _assemble(steps, g0: np.ndarray, d: int, tol: ToleranceProfile) -> ConjugacyMap:
    """Merge runs of linear steps; a run between equal generators is dropped.

    ``steps`` holds ``(map, generator after the map)`` pairs and ``g0`` is
    the generator before the first step.
    """
    out: list[ConjugacyMap] = []
    run: np.ndarray | None = None
    g_before = g0
    g_prev = g0

    def flush(g_after):
        if run is None:
            return
        scale = 1.0 + np.linalg.norm(g_after) + np.linalg.norm(g_before)
        same = g_before.shape == g_after.shape and np.linalg.norm(g_before - g_after) <= 1e-13 * scale
        if not (same or _is_identity(run)):
            out.append(LinearMap(False, run))

    for f, g_after in steps:
        mat = _as_linear(f)
        if mat is not None:
            if run is None:
                run = np.asarray(mat)
                g_before = g_prev
            else:
                run = mat @ run
        else:
            flush(g_prev)
            run = None
            out.append(_unwrap(f))
        g_prev = g_after
    flush(g_prev)
    if not out:
        return identity_map(d)
    return out[0] if len(out) == 1 else Composition(False, tuple(out))


def build_pipeline(a, b, verdict, tol: ToleranceProfile = DEFAULT_TOL, seed: int = 0) -> ConjugacyMap:
    """Assemble a conjugacy ``h`` with ``h(exp(tA) x) = exp(alpha t B) h(x)``.

    If ``A`` is similar to ``alpha B`` the result is linear. Otherwise both
    flows are brought to real Jordan form, each non-central block is
    reduced to a multiple of the identity by inverse log-maps and unwinds,
    the hyperbolic coordinates are matched by a signed power map and the
    central parts by a linear similarity, and the reductions for ``B`` are
    undone.

    Parameters
    ----------
    a, b : array_like or GeneratorMatrix
    verdict : EquivalenceVerdict
        Positive verdict at topological level or finer carrying ``alpha``.
    tol : ToleranceProfile, optional
    seed : int, optional
        Seed for the similarity search.

    Raises
    ------
    DomainError
        If the verdict is negative or has no time factor.
    NumericalFailure
        If a Jordan basis or central similarity cannot be computed.
    """
    if not verdict.equivalent or verdict.alpha is None:
        raise DomainError("a conjugacy needs a positive verdict with a time factor")
    ga, gb = as_generator(a), as_generator(b)
    if ga.dim != gb.dim:
        raise DimensionMismatch("flows act on spaces of different dimension")
    d = ga.dim
    alpha = float(verdict.alpha)
    am, bm = ga.entries, gb.entries
    if np.array_equal(am, alpha * bm):
        return identity_map(d)
    q = find_similarity(ga, gb.scaled(alpha), tol, seed)
    if q is not None:
        return LinearMap(False, q)

    blocks_a, p_a = _jordan_data(ga, tol)
    blocks_b, p_b = _jordan_data(gb, tol)
    red_a, d_a, hyp_a, exp_a, cen_a = _reduction(blocks_a)
    red_b, d_b, hyp_b, exp_b, cen_b = _reduction(blocks_b)
    if len(hyp_a) != len(hyp_b) or len(cen_a) != len(cen_b):
        raise DomainError("flows are not equivalent with the given time factor")

    # pair hyperbolic coordinates by rank of the exponent, keeping A's order
    scaled_b = [alpha * v for v in exp_b]
    rank_a = np.argsort(np.argsort(exp_a, kind="stable"), kind="stable")
    order_b = np.argsort(scaled_b, kind="stable")
    matched = [int(order_b[r]) for r in rank_a]
    ea = [exp_a[i] for i in range(len(hyp_a))]
    eb = [scaled_b[j] for j in matched]
    if any((x > 0) != (y > 0) for x, y in zip(ea, eb)):
        raise DomainError("stable and unstable dimensions do not match for this time factor")

    mid_parts, mid_bases = [], []
    k_h, k_c = len(hyp_a), len(cen_a)
    if k_h:
        mid_parts.append(build_power_map(ea, eb, 1.0))
        mid_bases.append(np.eye(d)[:, :k_h])
    if k_c:
        c_a = d_a[np.ix_(cen_a, cen_a)]
        c_b = d_b[np.ix_(cen_b, cen_b)]
        qc = find_similarity(c_a, alpha * c_b, tol, seed)
        if qc is None:
            raise NumericalFailure("central parts are not similar for this time factor")
        mid_parts.append(LinearMap(False, qc))
        mid_bases.append(np.eye(d)[:, k_h:])
    mid = ProductMap(False, tuple(mid_parts), tuple(mid_bases))
    pi_in = _permutation(hyp_a + cen_a)
    pi_out = _permutation([hyp_b[j] for j in matched] + cen_b).T

    d_a_perm = pi_in @ d_a @ pi_in.T
    d_b_scaled = alpha * d_b
    steps = [(LinearMap(False, p_a).inverse(), block_diag(*[blk.matrix() for blk in blocks_a]))]
    if red_a is not None:
        steps.append((red_a, d_a))
    steps += [(LinearMap(False, pi_in), d_a_perm),
              (mid, pi_out.T @ d_b_scaled @ pi_out),
              (LinearMap(False, pi_out), d_b_scaled)]
    if red_b is not None:
        steps.append((red_b.inverse(), alpha * block_diag(*[blk.matrix() for blk in blocks_b])))
    steps.append((LinearMap(False, p_b), alpha * bm))
    return _assemble(steps, am, d, tol)
