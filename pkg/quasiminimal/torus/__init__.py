__all__ = [
    "DIAMETER",
    "TangentVector",
    "TorusPoint",
    "displacement_array",
    "dist",
    "dist_array",
    "lift_displacement",
    "wrap",
    "wrap_array",
]

from ._core import (
    DIAMETER,
    TangentVector,
    TorusPoint,
    displacement_array,
    dist,
    dist_array,
    lift_displacement,
    wrap,
    wrap_array,
)
