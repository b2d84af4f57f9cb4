import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import random_structured, well_conditioned
from linflow.errors import DimensionMismatch, DomainError, NumericalFailure, ParseError
from linflow.flowstruct import block_diag, jordan_block
from linflow.numcore import (
    DEFAULT_TOL,
    GeneratorMatrix,
    ToleranceProfile,
    as_generator,
    commutant_basis,
    eigenvalues,
    find_similarity,
    kernel_basis,
    numerical_rank,
    raw_eigenvalues,
)
from linflow.numcore.qr import balance, hessenberg

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def _sorted(z):
    z = np.asarray(z, dtype=complex)
    return z[np.lexsort((z.imag, z.real))]


def _match(ours, ref):
    """Greedy matching distance between two eigenvalue multisets."""
    ref = list(ref)
    worst = 0.0
    for z in ours:
        k = int(np.argmin([abs(z - w) for w in ref]))
        worst = max(worst, abs(z - ref.pop(k)))
    return worst


# ---- QR eigenvalue routine against LAPACK -------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 16, 40])
def test_raw_eigenvalues_match_lapack_on_gaussian(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        a = rng.standard_normal((n, n))
        ref = np.linalg.eigvals(a)
        assert _match(raw_eigenvalues(a), ref) <= 1e-10 * (1 + np.abs(ref).max())


@given(arrays(float, (4, 4), elements=finite))
def test_raw_eigenvalues_property(a):
    ref = np.linalg.eigvals(a)
    ours = raw_eigenvalues(a)
    # non-normal inputs lose accuracy like any backward-stable method
    scale = 1 + np.linalg.norm(a)
    assert _match(ours, ref) <= 1e-5 * scale


def test_raw_eigenvalues_closed_form_two_by_two():
    assert _sorted(raw_eigenvalues(np.array([[0.0, -1.0], [1.0, 0.0]]))) == pytest.approx(
        _sorted([-1j, 1j]))
    assert _sorted(raw_eigenvalues(np.diag([3.0, -2.0]))) == pytest.approx(_sorted([-2, 3]))


def test_raw_eigenvalues_near_nilpotent_two_by_two():
    # trace and discriminant both round to zero; both eigenvalues are tiny
    a = np.array([[-0.18755151064300363, 0.4094022736160484],
                  [-0.08591933023181392, 0.1875515106430036]])
    assert np.abs(raw_eigenvalues(a)).max() <= 1e-8


def test_raw_eigenvalues_rejects_nonfinite():
    with pytest.raises(NumericalFailure):
        raw_eigenvalues(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_balance_is_a_similarity():
    rng = np.random.default_rng(3)
    d = np.diag(10.0 ** rng.integers(-4, 5, 6))
    a = d @ rng.standard_normal((6, 6)) @ np.linalg.inv(d)
    b = balance(a)
    assert _match(np.linalg.eigvals(b), np.linalg.eigvals(a)) < 1e-8 * np.abs(np.linalg.eigvals(a)).max()
    assert np.linalg.norm(b) <= np.linalg.norm(a)


def test_hessenberg_shape_and_invariants():
    rng = np.random.default_rng(4)
    a = rng.standard_normal((7, 7))
    h = hessenberg(a)
    assert np.allclose(np.tril(h, -2), 0.0)
    assert np.trace(h) == pytest.approx(np.trace(a))
    assert np.linalg.norm(h) == pytest.approx(np.linalg.norm(a))


# ---- tolerance profile -------------------------------------------------------------


def test_tolerance_defaults_and_overrides():
    tol = ToleranceProfile()
    assert tol.to_dict() == {"eig_cluster_tol": 1e-8, "rank_tol": 1e-10,
                             "residual_tol": 1e-8, "alpha_match_tol": 1e-8}
    t2 = tol.with_overrides({"rank_tol": "1e-12"})
    assert t2.rank_tol == 1e-12 and t2.residual_tol == tol.residual_tol


@pytest.mark.parametrize("bad", [{"nope": 1}, {"rank_tol": "x"}, {"rank_tol": -1}])
def test_tolerance_override_errors(bad):
    with pytest.raises(ParseError):
        DEFAULT_TOL.with_overrides(bad)


def test_tolerance_rejects_nonpositive():
    with pytest.raises(DomainError):
        ToleranceProfile(rank_tol=0.0)


def test_tolerance_from_env(tmp_path, monkeypatch):
    p = tmp_path / "tol.json"
    p.write_text(json.dumps({"alpha_match_tol": 1e-6}))
    monkeypatch.setenv("LINFLOW_TOL_PROFILE", str(p))
    assert ToleranceProfile.from_env().alpha_match_tol == 1e-6
    monkeypatch.delenv("LINFLOW_TOL_PROFILE")
    assert ToleranceProfile.from_env() == DEFAULT_TOL


def test_generator_matrix_validation():
    with pytest.raises(DomainError):
        GeneratorMatrix(np.ones((2, 3)))
    with pytest.raises(DomainError):
        GeneratorMatrix(np.array([[np.inf]]))
    with pytest.raises(DomainError):
        GeneratorMatrix(np.eye(3), "realified-complex")
    g = as_generator([[1.0, 2.0], [0.0, 1.0]])
    assert g.dim == 2
    assert not g.entries.flags.writeable
    assert g.scaled(2.0).entries[0, 1] == 4.0
    assert as_generator(g) is g


# ---- clustered eigenvalues ---------------------------------------------------------


def test_eigenvalues_cluster_jordan_blocks():
    rng = np.random.default_rng(5)
    for m in (2, 3, 4):
        q = well_conditioned(rng, m)
        a = q @ jordan_block(1.5, m) @ np.linalg.inv(q)
        s = eigenvalues(a)
        assert len(s.clusters) == 1
        assert s.clusters[0].multiplicity == m
        assert s.clusters[0].value == pytest.approx(1.5, abs=1e-6)


def test_eigenvalues_keep_close_but_distinct_frequencies():
    a = block_diag(jordan_block(2j, 1), jordan_block(2j, 1), jordan_block(3j, 1))
    q = well_conditioned(np.random.default_rng(6), 6)
    s = eigenvalues(q @ a @ np.linalg.inv(q))
    assert [c.multiplicity for c in s.clusters] == [2, 1]
    assert [c.value for c in s.clusters] == pytest.approx([2j, 3j], abs=1e-9)


def test_eigenvalues_snap_real_parts_to_zero():
    s = eigenvalues(np.array([[1e-14, -1.0], [1.0, 1e-14]]))
    assert s.clusters[0].value.real == 0.0
    assert s.real_parts().tolist() == [0.0, 0.0]


@given(st.integers(0, 10_000))
def test_eigenvalues_agree_with_lapack_multiset(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 6))
    a = random_structured(rng, d)
    ref = np.linalg.eigvals(a)
    s = eigenvalues(a)
    # clustering moves defective eigenvalues at most by the cluster radius
    assert _match(s.values, ref) <= 1e-2 * (1 + np.abs(ref).max())
    assert s.dim == d
    assert sum(c.real_dim for c in s.clusters) == d


# ---- rank, kernel, commutant, similarity -------------------------------------------


def test_rank_and_kernel():
    a = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]])
    assert numerical_rank(a) == 2
    k = kernel_basis(a)
    assert k.shape == (3, 1)
    assert np.linalg.norm(a @ k) < 1e-12
    assert numerical_rank(np.zeros((2, 2))) == 0
    assert kernel_basis(np.zeros((2, 2))).shape == (2, 2)


def test_commutant_of_distinct_diagonal_is_diagonal():
    basis = commutant_basis(np.diag([1.0, 2.0, 3.0]), np.diag([1.0, 2.0, 3.0]))
    assert len(basis) == 3
    for q in basis:
        assert np.allclose(q, np.diag(np.diag(q)))


def test_commutant_with_extra_constraint():
    j = np.array([[0.0, -1.0], [1.0, 0.0]])
    assert len(commutant_basis(np.zeros((2, 2)), np.zeros((2, 2)))) == 4
    assert len(commutant_basis(np.zeros((2, 2)), np.zeros((2, 2)), commute_with=[j])) == 2


def test_find_similarity_swaps_diagonal():
    q = find_similarity(np.diag([2.0, 1.0]), np.diag([1.0, 2.0]))
    assert q is not None
    assert abs(q[0, 0]) < 1e-12 and abs(q[1, 1]) < 1e-12
    assert np.allclose(q @ np.diag([2.0, 1.0]), np.diag([1.0, 2.0]) @ q)


def test_find_similarity_negative_cases():
    assert find_similarity(jordan_block(0.0, 2), np.zeros((2, 2))) is None
    assert find_similarity(np.diag([1.0, 2.0]), np.diag([1.0, 3.0])) is None
    with pytest.raises(DimensionMismatch):
        find_similarity(np.eye(2), np.eye(3))


@given(st.integers(0, 10_000))
def test_find_similarity_recovers_conjugates(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 6))
    a = random_structured(rng, d)
    q0 = well_conditioned(rng, d)
    b = q0 @ a @ np.linalg.inv(q0)
    q = find_similarity(a, b, seed=seed)
    assert q is not None
    assert np.linalg.norm(q @ a - b @ q) <= 1e-7 * (np.linalg.norm(a) + np.linalg.norm(b))
    assert np.linalg.svd(q, compute_uv=False)[-1] > 1e-10
