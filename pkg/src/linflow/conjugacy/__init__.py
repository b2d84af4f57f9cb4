"""Explicit conjugacies between linear flows and their numerical checks."""

from .builders import (
    build_block_to_diag,
    build_complex_block_to_diag,
    build_pipeline,
    build_power_map,
    build_unwind,
    product_map,
)
from .maps import (
    ALL_HOLDER,
    LIPSCHITZ,
    BlockToDiag,
    ComplexBlockToDiag,
    Composition,
    ConjugacyMap,
    HolderClass,
    LinearMap,
    PowerMap,
    ProductMap,
    Unwind,
    identity_map,
    map_from_dict,
)
from .verify import (
    HolderEstimate,
    SamplingSpec,
    ball_points,
    estimate_holder_exponent,
    round_trip_error,
    verify_relation,
)

__all__ = [
    "ALL_HOLDER",
    "LIPSCHITZ",
    "BlockToDiag",
    "ComplexBlockToDiag",
    "Composition",
    "ConjugacyMap",
    "HolderClass",
    "HolderEstimate",
    "LinearMap",
    "PowerMap",
    "ProductMap",
    "SamplingSpec",
    "Unwind",
    "ball_points",
    "build_block_to_diag",
    "build_complex_block_to_diag",
    "build_pipeline",
    "build_power_map",
    "build_unwind",
    "estimate_holder_exponent",
    "identity_map",
    "map_from_dict",
    "product_map",
    "round_trip_error",
    "verify_relation",
]
