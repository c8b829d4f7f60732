__all__ = [
    "Classification",
    "DensityGrid",
    "DensityReport",
    "ExceptionalEntry",
    "IndependenceVerdict",
    "TimeScanRow",
    "closest_approach",
    "closure_agreement",
    "double_density_test",
    "epsilon_density_test",
    "exceptional_set",
    "exceptional_set_scan",
    "generic_starts",
    "map_exceptional_set_scan",
    "passing_clearance",
    "rotation_return_bound",
    "time_t_scan",
    "translation_density_oracle",
]

from ._density import (
    Classification,
    DensityGrid,
    DensityReport,
    ExceptionalEntry,
    TimeScanRow,
    closure_agreement,
    double_density_test,
    epsilon_density_test,
    exceptional_set,
    exceptional_set_scan,
    map_exceptional_set_scan,
    time_t_scan,
)

from ._oracle import (
    IndependenceVerdict,
    rotation_return_bound,
    translation_density_oracle,
)

from ._starts import (
    closest_approach,
    generic_starts,
    passing_clearance,
)
