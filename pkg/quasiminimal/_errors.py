"""
Exceptions raised by the package.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .torus import TorusPoint


class QuasiMinimalError(Exception):
    """Quasi-Minimal Error

    Generic exception
    """


class InvalidInput(QuasiMinimalError, ValueError):
    """
    A precondition of an operation is violated.
    """


class ConstructionRejected(QuasiMinimalError):
    """Construction Rejected

    Two puncture points share an orbit of the linear flow.

    Parameters
    ----------
    pair : tuple of TorusPoint
        The offending pair of punctures.
    s : float or None
        Flow time carrying the first point onto the second, if known.

    """

    def __init__(
        self,
        msg: str,
        pair: tuple[TorusPoint, TorusPoint] | None = None,
        s: float | None = None,
    ) -> None:
        super().__init__(msg)
        self.pair = pair
        self.s = s
