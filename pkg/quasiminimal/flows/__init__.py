__all__ = [
    "CompositeField",
    "Direction",
    "OrbitDistinctnessReport",
    "OrbitRelation",
    "OrbitTrace",
    "PairVerdict",
    "PunctureSet",
    "SlopeParam",
    "Status",
    "build_punctured_field",
    "check_distinct_dense_orbits",
    "convergents",
    "eval_field",
    "exact_linear_flow_map",
    "flow_map",
    "iterate_map",
    "place_punctures",
    "slowing_factor",
    "smooth_step",
    "trace_orbit",
]

from ._field import (
    CompositeField,
    OrbitDistinctnessReport,
    OrbitRelation,
    PairVerdict,
    PunctureSet,
    SlopeParam,
    build_punctured_field,
    check_distinct_dense_orbits,
    convergents,
    eval_field,
    place_punctures,
    slowing_factor,
    smooth_step,
)

from ._integrate import (
    Direction,
    OrbitTrace,
    Status,
    exact_linear_flow_map,
    flow_map,
    iterate_map,
    trace_orbit,
)
