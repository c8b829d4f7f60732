__all__ = [
    "Axis",
    "BallPair",
    "CertificateResult",
    "ConjugacySpec",
    "ConjugatedMap",
    "RecurrenceReport",
    "Shear",
    "apply_shear",
    "ball_samples",
    "build_conjugated_map",
    "certificate_check",
    "grid_centres",
    "recurrence_scan",
]

from ._conjugacy import (
    Axis,
    ConjugacySpec,
    ConjugatedMap,
    Shear,
    apply_shear,
    build_conjugated_map,
)

from ._scan import (
    BallPair,
    CertificateResult,
    RecurrenceReport,
    ball_samples,
    certificate_check,
    grid_centres,
    recurrence_scan,
)
