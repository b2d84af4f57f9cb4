import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_jordan_form, well_conditioned
from linflow.flowstruct import (
    block_diag,
    complex_structure,
    generalized_kernel,
    jordan_block,
    lyapunov_space,
    lyapunov_spectrum,
    real_jordan,
    realify,
    scu_split,
    time_reverse,
)


def _block_multiset(decomp):
    return sorted((round(b.value.real, 6), round(b.value.imag, 6), b.size) for b in decomp.blocks)


def _sympy_blocks(a_int):
    """Jordan block multiset from an exact computation, keeping Im z >= 0."""
    _, j = sympy.Matrix(a_int).jordan_form()
    out = []
    i, n = 0, j.shape[0]
    while i < n:
        k = i
        while k + 1 < n and j[k, k + 1] == 1:
            k += 1
        z = complex(j[i, i])
        if z.imag >= 0:
            out.append((round(z.real, 6), round(z.imag, 6), k - i + 1))
        i = k + 1
    return sorted(out)


def test_jordan_block_layout():
    assert np.array_equal(jordan_block(2.0, 3), [[2, 1, 0], [0, 2, 1], [0, 0, 2]])
    j = jordan_block(1 + 2j, 2)
    assert np.array_equal(j, [[1, 1, -2, 0], [0, 1, 0, -2], [2, 0, 1, 1], [0, 2, 0, 1]])


@pytest.mark.parametrize("a_int", [
    [[2, 1, 0], [0, 2, 0], [0, 0, 2]],
    [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
    [[1, -1, 1, 0], [1, 1, 0, 1], [0, 0, 1, -1], [0, 0, 1, 1]],
    [[3, 1, 0, 0, 0], [0, 3, 0, 0, 0], [0, 0, -1, 0, 0], [0, 0, 0, 0, -2], [0, 0, 0, 2, 0]],
])
def test_real_jordan_matches_exact_oracle(a_int):
    # conjugate by a unimodular integer matrix so the exact oracle still applies
    n = len(a_int)
    u = np.eye(n, dtype=int) + np.triu(np.ones((n, n), dtype=int), 1)
    a = u @ np.array(a_int) @ np.round(np.linalg.inv(u)).astype(int)
    decomp = real_jordan(a.astype(float))
    assert _block_multiset(decomp) == _sympy_blocks(a.tolist())
    p, jm = decomp.basis, decomp.jordan_matrix()
    assert np.linalg.norm(a @ p - p @ jm) <= 1e-8 * np.linalg.norm(a) * np.linalg.norm(p)


@given(st.integers(0, 10_000))
def test_real_jordan_recovers_random_structure(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 7))
    j = random_jordan_form(rng, d)
    q = well_conditioned(rng, d)
    a = q @ j @ np.linalg.inv(q)
    decomp = real_jordan(a)
    ref = real_jordan(j)
    assert decomp.same_structure(ref, 1e-6)
    assert decomp.residual <= 1e-7
    assert np.allclose(decomp.basis @ decomp.jordan_matrix() @ np.linalg.inv(decomp.basis), a,
                       atol=1e-6 * (1 + np.abs(a).max()))


def test_block_order_is_canonical():
    a = block_diag(jordan_block(1.0, 1), jordan_block(-1.0, 2), jordan_block(-1.0, 1), jordan_block(2j, 1))
    decomp = real_jordan(a)
    assert [(b.value, b.size) for b in decomp.blocks] == [(-1, 2), (-1, 1), (2j, 1), (1, 1)]


def test_scu_split_dimensions_and_invariance():
    a = block_diag(jordan_block(-1.0, 2), jordan_block(3j, 1), jordan_block(0.5, 1))
    q = well_conditioned(np.random.default_rng(1), 5)
    f = scu_split(q @ a @ np.linalg.inv(q))
    assert (f.d_s, f.d_c, f.d_u) == (2, 2, 1)
    assert not f.is_hyperbolic
    assert f.lyapunov.tolist() == pytest.approx([-1, -1, 0, 0, 0.5])
    assert f.hyperbolic_exponents.tolist() == pytest.approx([-1, -1, 0.5])
    am = q @ a @ np.linalg.inv(q)
    for b in (f.basis_s, f.basis_c, f.basis_u):
        # A maps each subspace into itself
        proj = b @ b.T
        assert np.linalg.norm(am @ b - proj @ am @ b) < 1e-8


@given(st.integers(0, 10_000))
def test_scu_dimensions_sum_to_d(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 7))
    j = random_jordan_form(rng, d)
    q = well_conditioned(rng, d)
    f = scu_split(q @ j @ np.linalg.inv(q))
    # the diagonal of a real Jordan matrix lists the real parts with multiplicity
    lam = np.diag(j)
    assert (f.d_s, f.d_c, f.d_u) == (np.sum(lam < 0), np.sum(lam == 0), np.sum(lam > 0))


def test_lyapunov_spectrum_and_space():
    a = np.diag([4.0, 1.0, -2.0])
    assert lyapunov_spectrum(a).tolist() == [-2.0, 1.0, 4.0]
    v = lyapunov_space(a, 1.0)
    assert v.shape == (3, 2)
    assert np.allclose(np.abs(v[0]), 0.0)


def test_generalized_kernel():
    a = block_diag(jordan_block(2.0, 2), jordan_block(1 + 1j, 1))
    assert generalized_kernel(a, 2.0).shape == (4, 2)
    assert generalized_kernel(a, 1 - 1j).shape == (4, 2)
    assert generalized_kernel(a, 5.0).shape == (4, 0)


def test_realify_and_complex_structure():
    m = np.array([[1 + 2j, 3j], [0, -1]])
    r = realify(m)
    assert r.origin == "realified-complex"
    z = np.array([1 - 1j, 2 + 0.5j])
    x = np.empty(4)
    x[0::2], x[1::2] = z.real, z.imag
    w = m @ z
    assert np.allclose(r.entries @ x, np.ravel(np.column_stack([w.real, w.imag])))
    j = complex_structure(2)
    assert np.allclose(j @ j, -np.eye(4))
    assert np.allclose(j @ r.entries, r.entries @ j)


def test_time_reverse_keeps_origin():
    r = realify(np.array([[1j]]))
    t = time_reverse(r)
    assert t.origin == "realified-complex"
    assert np.array_equal(t.entries, -r.entries)
