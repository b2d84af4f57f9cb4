import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_structured
from linflow.errors import DomainError, RangeError
from linflow.floweval import (
    exp_oracle,
    fixed_space,
    flow_map,
    flow_matrix,
    imaginary_spectrum,
    minimal_period,
    orbit,
    periodic_subspace,
)
from linflow.flowstruct import block_diag, jordan_block
from linflow.numcore import ToleranceProfile

times = st.floats(-2.0, 2.0, allow_nan=False)


def _rel(x, y):
    return np.linalg.norm(x - y) / max(1.0, np.linalg.norm(y))


@given(st.integers(0, 10_000), times)
def test_flow_matrix_matches_scipy_expm(seed, t):
    rng = np.random.default_rng(seed)
    a = random_structured(rng, int(rng.integers(1, 7)))
    ref = scipy.linalg.expm(t * a)
    assert _rel(flow_matrix(a, t), ref) <= 1e-9
    assert _rel(exp_oracle(a, t), ref) <= 1e-11


@given(st.integers(0, 10_000), times, times)
def test_group_law(seed, s, t):
    rng = np.random.default_rng(seed)
    a = random_structured(rng, int(rng.integers(1, 6)))
    x = rng.standard_normal(a.shape[0])
    lhs = flow_map(a, s + t, x)
    rhs = flow_map(a, s, flow_map(a, t, x))
    assert _rel(lhs, rhs) <= 1e-9


def test_flow_routes_agree_on_gaussian_matrices():
    rng = np.random.default_rng(7)
    for _ in range(20):
        a = rng.standard_normal((5, 5))
        assert _rel(flow_matrix(a, 1.3), exp_oracle(a, 1.3)) <= 1e-9


def test_flow_of_rotation_and_jordan_block():
    r = jordan_block(1j, 1)
    assert np.allclose(flow_map(r, math.pi / 2, [1.0, 0.0]), [0.0, 1.0], atol=1e-14)
    assert np.allclose(flow_matrix(jordan_block(0.0, 3), 2.0), [[1, 2, 2], [0, 1, 2], [0, 0, 1]])
    assert np.allclose(flow_matrix(np.zeros((0, 0)), 1.0), np.zeros((0, 0)))


def test_flow_map_batches_points():
    a = np.array([[0.0, 1.0], [-2.0, -0.3]])
    pts = np.random.default_rng(0).standard_normal((10, 2))
    out = flow_map(a, 0.7, pts)
    assert out.shape == (10, 2)
    assert np.allclose(out[3], flow_map(a, 0.7, pts[3]))


def test_overflow_raises_range_error():
    with pytest.raises(RangeError):
        flow_matrix(np.diag([1.0, 2.0]), 1000.0)
    with pytest.raises(RangeError):
        exp_oracle(np.diag([1.0, 2.0]), 1000.0)


def test_orbit_sampling_and_csv():
    o = orbit(np.diag([-1.0, 1.0]), [0.0, 1.0], [1.0, 1.0])
    assert o.points.shape == (2, 2)
    assert np.allclose(o.points[1], [math.exp(-1), math.e])
    lines = o.to_csv().splitlines()
    assert lines[0] == "t,x_1,x_2"
    assert len(lines) == 3


def test_fixed_space():
    a = block_diag(np.zeros((2, 2)), jordan_block(0.0, 2), jordan_block(2j, 1))
    assert fixed_space(a).shape[1] == 3


def test_imaginary_spectrum_counts_multiplicity():
    a = block_diag(jordan_block(2j, 1), jordan_block(2j, 1), jordan_block(3j, 1), jordan_block(1.0, 1))
    z = imaginary_spectrum(a)
    assert len(z) == 6
    assert sorted(np.round(z.imag, 9)) == [-3, -2, -2, 2, 2, 3]


def test_imaginary_spectrum_separates_frequency_multisets():
    # (2,2,3) and (1,2,3) have the same frequency set size but different multiplicities
    a = block_diag(*[jordan_block(1j * f, 1) for f in (2, 2, 3)])
    b = block_diag(*[jordan_block(1j * f, 1) for f in (1, 2, 3)])
    za = sorted(np.round(imaginary_spectrum(a).imag, 9))
    zb = sorted(np.round(imaginary_spectrum(b).imag, 9))
    assert za != zb


def test_periodic_subspace():
    a = block_diag(jordan_block(1j, 1), jordan_block(2j, 1), jordan_block(3j, 1), jordan_block(0.0, 1))
    assert periodic_subspace(a, 2 * math.pi).shape[1] == 7
    assert periodic_subspace(a, math.pi).shape[1] == 3
    assert periodic_subspace(a, 1.0).shape[1] == 1
    with pytest.raises(DomainError):
        periodic_subspace(a, 0.0)


def test_periodic_subspace_points_return():
    a = block_diag(jordan_block(1j, 1), jordan_block(1.5j, 1), jordan_block(0.3, 1))
    v = periodic_subspace(a, 4 * math.pi)
    assert v.shape[1] == 4
    for col in v.T:
        assert np.allclose(flow_map(a, 4 * math.pi, col), col, atol=1e-10)


def test_minimal_period_cases():
    a = block_diag(jordan_block(2j, 1), jordan_block(3j, 1), jordan_block(0.0, 1), jordan_block(-1.0, 1))
    # frequencies 2 and 3 combine to period 2 pi
    assert minimal_period(a, [1, 0, 1, 0, 0, 0]).value == pytest.approx(2 * math.pi)
    assert minimal_period(a, [1, 0, 0, 0, 0, 0]).value == pytest.approx(math.pi)
    assert minimal_period(a, [0, 0, 0, 0, 1, 0]).kind == "zero"
    assert minimal_period(a, [0, 0, 0, 0, 0, 0]).kind == "zero"
    assert minimal_period(a, [1, 0, 0, 0, 0, 1]).kind == "infinite"


def test_minimal_period_incommensurate_and_nilpotent():
    a = block_diag(jordan_block(1j, 1), jordan_block(math.sqrt(2) * 1j, 1))
    # at the default tolerance sqrt(2) has a convergent with denominator ~1e4 inside
    # the band, so rejecting it needs a band tighter than the cap can resolve
    loose = minimal_period(a, [1.0, 0.0, 1.0, 0.0])
    assert loose.kind == "finite" and loose.value > 1e4
    r = minimal_period(a, [1.0, 0.0, 1.0, 0.0], ToleranceProfile(alpha_match_tol=1e-14))
    assert r.kind == "infinite" and r.value == math.inf
    assert r.to_dict()["value"] == "inf"
    n = jordan_block(0.0, 2)
    assert minimal_period(n, [1.0, 0.0]).kind == "zero"
    assert minimal_period(n, [0.0, 1.0]).kind == "infinite"
    j = jordan_block(1j, 2)
    assert minimal_period(j, [1.0, 0.0, 0.0, 0.0]).value == pytest.approx(2 * math.pi)
    assert minimal_period(j, [0.0, 1.0, 0.0, 0.0]).kind == "infinite"


def test_minimal_period_witness_and_shape_check():
    a = block_diag(jordan_block(2j, 1), jordan_block(3j, 1))
    r = minimal_period(a, np.ones(4))
    assert r.witness["multiples"] == [2, 3]
    assert r.witness["base"] == pytest.approx(1.0)
    with pytest.raises(DomainError):
        minimal_period(a, np.ones(3))


@given(st.integers(0, 10_000))
def test_period_is_a_return_time(seed):
    rng = np.random.default_rng(seed)
    freqs = rng.integers(1, 6, size=3) * 0.5
    a = block_diag(*[jordan_block(1j * f, 1) for f in freqs])
    q = np.eye(6) + 0.3 * rng.standard_normal((6, 6))
    am = q @ a @ np.linalg.inv(q)
    x = q @ rng.standard_normal(6)
    r = minimal_period(am, x)
    assert r.kind == "finite"
    assert np.allclose(flow_map(am, r.value, x), x, atol=1e-8 * np.linalg.norm(x))
    # no proper divisor of the period is a return time
    for k in (2, 3, 5):
        assert not np.allclose(flow_map(am, r.value / k, x), x, atol=1e-6 * np.linalg.norm(x))
