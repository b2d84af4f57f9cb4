import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_structured, well_conditioned
from linflow.conjugacy import (
    ALL_HOLDER,
    LIPSCHITZ,
    BlockToDiag,
    Composition,
    HolderClass,
    LinearMap,
    PowerMap,
    SamplingSpec,
    ball_points,
    build_block_to_diag,
    build_complex_block_to_diag,
    build_pipeline,
    build_power_map,
    build_unwind,
    estimate_holder_exponent,
    identity_map,
    map_from_dict,
    product_map,
    round_trip_error,
    verify_relation,
)
from linflow.equivalence import decide_topological
from linflow.errors import DomainError, ParseError
from linflow.flowstruct import block_diag, jordan_block

E = math.e


def _zoo():
    """One instance of every map family, including nested ones."""
    rng = np.random.default_rng(0)
    q = well_conditioned(rng, 4)
    maps = [
        build_block_to_diag(1, 2.0),
        build_block_to_diag(3, -1.0),
        build_block_to_diag(4, 0.5).inverse(),
        build_complex_block_to_diag(2, 1.0, 1.0),
        build_complex_block_to_diag(3, -2.0, 0.5),
        build_unwind(1.0, 1.0),
        build_unwind(-2.0, 1.0).inverse(),
        build_power_map([-1.0, -2.0], [-1.0, -4.0], 2 ** -0.5),
        build_power_map([1.0, -3.0], [2.0, -1.0]),
        LinearMap(False, q),
        LinearMap(True, q),
    ]
    maps.append(product_map([(build_unwind(1.0, 2.0), q[:, :2]), (build_block_to_diag(2, 1.0), q[:, 2:])]))
    maps.append(Composition(False, (LinearMap(False, q), build_block_to_diag(4, 1.0), LinearMap(True, q))))
    return maps


ZOO = _zoo()
IDS = [f"{i}-{m.kind}" for i, m in enumerate(ZOO)]


# ---- worked values -----------------------------------------------------------------


def test_block_to_diag_values():
    h = build_block_to_diag(2, 1.0)
    assert np.allclose(h([1.0, 0.0]), [0.0, 1.0])
    assert np.allclose(h([E, 0.0]), [E, E])
    x = np.random.default_rng(1).standard_normal(5)
    assert np.array_equal(build_block_to_diag(1, 3.0)(x[:1]), x[:1])
    assert h.holder_class == ALL_HOLDER
    assert build_block_to_diag(1, 3.0).holder_class == LIPSCHITZ


def test_complex_block_to_diag_values():
    h = build_complex_block_to_diag(1, 1.0, 1.0)
    x = np.array([0.3, -0.7])
    assert np.allclose(h(x), x)
    h2 = build_complex_block_to_diag(2, 1.0, 1.0)
    assert np.allclose(h2([1.0, 0.0, 0.0, 0.0]), [0.0, 1.0, 0.0, 0.0])


def test_unwind_values():
    g = build_unwind(1.0, 1.0)
    assert np.allclose(g([1.0, 0.0]), [1.0, 0.0])
    assert np.allclose(g([-math.exp(math.pi), 0.0]), [math.exp(math.pi), 0.0])
    assert g.holder_class == LIPSCHITZ


def test_power_map_values():
    p = build_power_map([-1.0], [-2.0], 0.5)
    assert p.exponents.tolist() == [1.0]
    assert p.gamma == 1.0 and p.holder_class == LIPSCHITZ
    p = build_power_map([-1.0, -2.0], [-1.0, -4.0], 2 ** -0.5)
    assert p.exponents == pytest.approx([2 ** -0.5, 2 ** 0.5])
    assert p.gamma == pytest.approx(2 ** -0.5)
    assert np.allclose(p([-0.25, 0.25]), [-0.25 ** (2 ** -0.5), 0.25 ** (2 ** 0.5)])
    with pytest.raises(DomainError):
        build_power_map([-1.0], [1.0])
    with pytest.raises(DomainError):
        build_power_map([-1.0], [-1.0], -1.0)


@pytest.mark.parametrize("h", ZOO, ids=IDS)
def test_origin_is_fixed(h):
    z = np.zeros(h.dim_in)
    assert np.array_equal(h(z), z)
    assert np.array_equal(h.apply_inverse(z), z)


@pytest.mark.parametrize("h", ZOO, ids=IDS)
def test_round_trip(h):
    assert round_trip_error(h, n=1000, radius=2.0, seed=3) <= 1e-8


@pytest.mark.parametrize("h", ZOO, ids=IDS)
def test_json_round_trip(h):
    doc = json.loads(json.dumps(h.to_dict()))
    h2 = map_from_dict(doc)
    x = ball_points(h.dim_in, 50, 2.0, seed=1)
    assert np.allclose(h2(x), h(x), rtol=1e-12, atol=1e-12)
    assert h2.holder_class == h.holder_class
    assert h2.kind == h.kind


def test_map_from_dict_rejects_garbage():
    with pytest.raises(ParseError):
        map_from_dict({"kind": "teleport", "parameters": {}})
    with pytest.raises(ParseError):
        map_from_dict({"kind": "power", "parameters": {"a": [1.0]}})


def test_batch_and_point_evaluation_agree():
    h = build_block_to_diag(3, -1.0)
    x = ball_points(3, 20, seed=2)
    batch = h(x)
    assert np.allclose(batch[7], h(x[7]))
    with pytest.raises(DomainError):
        h(np.zeros(4))


def test_describe_mentions_children():
    text = ZOO[-2].describe()
    assert "product" in text and "unwind" in text and "block-to-diag" in text


# ---- conjugacy relations of the building blocks ------------------------------------


@pytest.mark.parametrize("m", [1, 2, 3, 4])
@pytest.mark.parametrize("a", [-2.0, -1.0, 1.0, 3.0])
def test_block_to_diag_conjugates(m, a):
    h = build_block_to_diag(m, a)
    assert verify_relation(h, a * np.eye(m), jordan_block(a, m), 1.0) < 1e-8
    assert verify_relation(h.inverse(), jordan_block(a, m), a * np.eye(m), 1.0) < 1e-8


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("a,b", [(1.0, 1.0), (-1.0, 2.0), (0.5, -3.0)])
def test_complex_block_to_diag_conjugates(m, a, b):
    h = build_complex_block_to_diag(m, a, b)
    # the map reads pair layout (Re z_k, Im z_k) and writes the chain layout
    a_pair = np.kron(np.eye(m), jordan_block(complex(a, b), 1))
    assert verify_relation(h, a_pair, jordan_block(complex(a, b), m), 1.0) < 1e-8


@pytest.mark.parametrize("a", [-2.0, -1.0, 1.0, 2.0])
@pytest.mark.parametrize("b", [-2.0, -1.0, 1.0, 2.0])
def test_unwind_conjugates(a, b):
    g = build_unwind(a, b)
    assert verify_relation(g, jordan_block(complex(a, b), 1), a * np.eye(2), 1.0) < 1e-10
    assert round_trip_error(g, n=1000, radius=2.0) < 1e-12


def test_power_map_conjugates():
    p = build_power_map([-1.0, -2.0], [-1.0, -4.0], 2 ** -0.5)
    assert verify_relation(p, np.diag([-1.0, -2.0]), np.diag([-1.0, -4.0]), 2 ** -0.5) < 1e-10


# ---- products and compositions -----------------------------------------------------


def test_product_of_identities_is_identity():
    f = product_map([(identity_map(2), np.eye(4)[:, :2]), (identity_map(2), np.eye(4)[:, 2:])])
    x = ball_points(4, 30, seed=4)
    assert np.allclose(f(x), x)


def test_product_is_local_on_blocks():
    q = well_conditioned(np.random.default_rng(5), 4)
    f = product_map([(build_unwind(1.0, 1.0), q[:, :2]), (identity_map(2), q[:, 2:])])
    v = q[:, 2:] @ np.array([0.3, -1.2])
    assert np.allclose(f(v), v)


def test_product_of_power_maps_concatenates():
    p1 = build_power_map([-1.0], [-2.0])
    p2 = build_power_map([1.0, 3.0], [2.0, 1.0])
    f = product_map([(p1, np.eye(3)[:, :1]), (p2, np.eye(3)[:, 1:])])
    p = build_power_map([-1.0, 1.0, 3.0], [-2.0, 2.0, 1.0])
    x = ball_points(3, 40, seed=6)
    assert np.allclose(f(x), p(x))
    assert f.holder_class == p.holder_class


def test_product_rejects_dependent_bases():
    with pytest.raises(DomainError):
        product_map([(identity_map(1), np.array([[1.0], [0.0]])), (identity_map(1), np.array([[2.0], [0.0]]))])


def test_holder_class_algebra():
    b1, b2 = HolderClass.beta(0.5), HolderClass.beta(0.8)
    assert LIPSCHITZ.compose(b1) == b1
    assert b1.compose(LIPSCHITZ) == b1
    assert b1.compose(b2) == HolderClass.beta(0.4)
    assert b1.weakest(b2) == b1
    assert ALL_HOLDER.compose(b1) == b1
    assert HolderClass.beta(1.0) == LIPSCHITZ
    c = Composition(False, (build_power_map([-1.0], [-2.0], 0.25), build_power_map([-1.0], [-1.0], 0.6)))
    assert c.holder_class.gamma == pytest.approx(0.5 * 0.6)


def test_composition_order_and_inverse():
    f = Composition(False, (LinearMap(False, 2 * np.eye(2)), build_unwind(1.0, 1.0)))
    x = np.array([0.2, 0.1])
    assert np.allclose(f(x), build_unwind(1.0, 1.0)(2 * x))
    assert np.allclose(f.inverse()(f(x)), x)


# ---- pipelines ---------------------------------------------------------------------


def _pipeline(a, b):
    v = decide_topological(a, b)
    assert v.equivalent
    h = build_pipeline(a, b, v)
    return h, v


def test_pipeline_identity_for_equal_generators():
    a = random_structured(np.random.default_rng(8), 4)
    h, v = _pipeline(a, a)
    assert h.kind == "linear"
    assert verify_relation(h, a, a, v.alpha) == 0.0


def test_pipeline_block_to_diag():
    h, v = _pipeline(jordan_block(1.0, 2), np.eye(2))
    assert h.kind == "block-to-diag" and h.inverted
    assert verify_relation(h, jordan_block(1.0, 2), np.eye(2), v.alpha) < 1e-9
    assert verify_relation(h, jordan_block(1.0, 2), np.eye(2), 2.0) > 0.1


def test_pipeline_power_map():
    a, b = np.diag([-1.0, -2.0]), np.diag([-1.0, -4.0])
    h, v = _pipeline(a, b)
    assert h.kind == "power"
    assert v.alpha == pytest.approx(2 ** -0.5)
    assert h.exponents == pytest.approx([2 ** -0.5, 2 ** 0.5])
    assert verify_relation(h, a, b, v.alpha) < 1e-9


def test_pipeline_rejects_negative_verdict():
    v = decide_topological(np.diag([-1.0, 1.0]), np.eye(2))
    with pytest.raises(DomainError):
        build_pipeline(np.diag([-1.0, 1.0]), np.eye(2), v)


def _hyperbolic_partner(rng, d):
    """Random generator and a topologically equivalent but non-similar partner."""
    j = random_structured(rng, d)
    lam = np.linalg.eigvals(j).real
    while np.any(np.abs(lam) < 0.1):
        j = random_structured(rng, d)
        lam = np.linalg.eigvals(j).real
    blocks = []
    for s in np.sign(np.sort(lam)):
        blocks.append([[s * rng.uniform(0.5, 2.0)]])
    q = well_conditioned(rng, d)
    return j, q @ block_diag(*blocks) @ np.linalg.inv(q)


@given(st.integers(0, 10_000))
def test_pipeline_satisfies_conjugacy(seed):
    rng = np.random.default_rng(seed)
    a, b = _hyperbolic_partner(rng, int(rng.integers(1, 5)))
    h, v = _pipeline(a, b)
    spec = SamplingSpec(n_times=9, t_range=(-1.5, 1.5), n_points=30, seed=seed)
    assert verify_relation(h, a, b, v.alpha, spec) < 1e-8
    assert round_trip_error(h, n=200, seed=seed) < 1e-8


def test_pipeline_with_central_part():
    a = block_diag(jordan_block(-1.0, 2), jordan_block(2j, 1), [[3.0]])
    b = block_diag([[-2.0]], [[-1.0]], jordan_block(4j, 1), [[1.0]])
    q = well_conditioned(np.random.default_rng(9), 5)
    a = q @ a @ np.linalg.inv(q)
    h, v = _pipeline(a, b)
    assert v.alpha == pytest.approx(0.5)
    assert verify_relation(h, a, b, v.alpha) < 1e-8


def test_cocycle_consistency():
    a, b = jordan_block(1.0, 2), np.eye(2)
    h, v = _pipeline(a, b)
    t1, t2 = 0.7, -1.1
    r1 = verify_relation(h, a, b, v.alpha, SamplingSpec(n_times=1, t_range=(t1, t1)))
    r2 = verify_relation(h, a, b, v.alpha, SamplingSpec(n_times=1, t_range=(t2, t2)))
    r12 = verify_relation(h, a, b, v.alpha, SamplingSpec(n_times=1, t_range=(t1 + t2, t1 + t2)))
    slack = math.exp(2 * (abs(t1) + abs(t2)))
    assert r12 <= slack * (r1 + r2) + 1e-14


# ---- Hölder exponent estimates -----------------------------------------------------


def test_holder_estimates():
    est = estimate_holder_exponent(identity_map(2))
    assert est.beta == pytest.approx(1.0, abs=0.02)
    assert est.interval[0] <= est.beta <= est.interval[1]
    p = build_power_map([-1.0, -2.0], [-1.0, -4.0], 2 ** -0.5)
    assert estimate_holder_exponent(p).beta == pytest.approx(2 ** -0.5, abs=0.05)
    assert estimate_holder_exponent(build_block_to_diag(2, 1.0), radius=1e-3).beta >= 0.9
    d = est.to_dict()
    assert set(d) == {"beta", "interval", "constant", "forward", "inverse", "n_pairs"}


def test_estimate_is_reproducible():
    p = build_power_map([-1.0, -2.0], [-1.0, -4.0], 2 ** -0.5)
    assert estimate_holder_exponent(p, seed=4) == estimate_holder_exponent(p, seed=4)


def test_ball_points_lie_in_ball():
    x = ball_points(3, 500, 2.0, seed=1)
    assert x.shape == (500, 3)
    assert np.linalg.norm(x, axis=1).max() <= 2.0
    assert np.array_equal(x, ball_points(3, 500, 2.0, seed=1))


def test_block_to_diag_direct_construction():
    h = BlockToDiag(False, 2, 1.0)
    assert h.dim_in == 2
    assert isinstance(build_power_map([1.0], [1.0]), PowerMap)
