__all__ = [
    "coverage_image",
    "density_table",
    "orbit_table",
    "recurrence_table",
    "scan_t_table",
    "summary",
]

from ._images import (
    coverage_image,
)

from ._tables import (
    density_table,
    orbit_table,
    recurrence_table,
    scan_t_table,
    summary,
)
