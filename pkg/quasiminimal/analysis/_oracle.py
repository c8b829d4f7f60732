"""
Exact density oracle for torus translations.

Translation by ``(beta, gamma)`` is minimal iff ``1, beta, gamma`` are
rationally independent.  Independence is tested up to a coefficient bound
by an exhaustive integer-relation scan.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .._errors import InvalidInput
from ..flows import convergents

if TYPE_CHECKING:
    from typing import Any
    from numpy.typing import NDArray

logger = logging.getLogger(__name__)

TOL_RELATION = 1e-9
# rounding error of a + b beta + c gamma in doubles, per unit of height
TOL_ROUNDING = 8 * float(np.finfo(float).eps)
DEFAULT_BOUND = 10_000


@dataclass(frozen=True)
class IndependenceVerdict:
    """
    Outcome of the integer-relation scan for ``a + b beta + c gamma = 0``.
    """

    dependent: bool
    relation: tuple[int, int, int] | None
    bound: int
    residual: float | None = None

    @property
    def label(self) -> str:
        return "dependent" if self.dependent else "independent-within-bound"


def _shell(h: int) -> tuple[NDArray[Any], NDArray[Any]]:
    """
    Coefficient pairs ``(b, c)`` of height ``max(|b|, |c|) = h`` whose first
    nonzero entry is positive, in lexicographic order.
    """
    b_mid = np.repeat(np.arange(1, h), 2)
    c_mid = np.tile([-h, h], h - 1)
    b = np.concatenate(([0], b_mid, np.full(2 * h + 1, h)))
    c = np.concatenate(([h], c_mid, np.arange(-h, h + 1)))
    return b, c


def translation_density_oracle(
    beta: float,
    gamma: float,
    bound: int = DEFAULT_BOUND,
    *,
    tol: float = TOL_RELATION,
    rounding: float = TOL_ROUNDING,
) -> IndependenceVerdict:
    """Search an integer relation between ``1, beta, gamma``.

    Pairs ``(b, c)`` are scanned by increasing height ``max(|b|, |c|)``; in
    each height the pairs are taken in lexicographic order with the sign
    fixed so that the first nonzero coefficient is positive.  The constant
    term is ``a = -round(b beta + c gamma)``.  The first relation of height
    ``h`` with ``|a + b beta + c gamma| < min(tol, rounding * h)`` and
    ``|a| <= bound`` is returned.

    A true relation between doubles holds to a few ulp per unit of height;
    near misses of size about ``1 / h**2`` occur at every height.

    Parameters
    ----------
    beta, gamma : float
        Translation vector.
    bound : int, optional
        Largest coefficient searched.
    tol : float, optional
        Largest residual counted as a relation.
    rounding : float, optional
        Largest residual per unit of height counted as a relation.

    Returns
    -------
    IndependenceVerdict
        The relation found, or independence within the bound.

    Raises
    ------
    InvalidInput
        If *bound* is not positive.

    """
    if bound < 1:
        msg = f"coefficient bound must be positive, got {bound}"
        raise InvalidInput(msg)

    for h in range(1, bound + 1):
        b, c = _shell(h)
        v = b * beta + c * gamma
        a = -np.rint(v)
        res = np.abs(a + v)
        hit = (res < min(tol, rounding * h)) & (np.abs(a) <= bound)
        if hit.any():
            i = int(np.argmax(hit))
            relation = (int(a[i]), int(b[i]), int(c[i]))
            logger.debug("relation %s for (%r, %r)", relation, beta, gamma)
            return IndependenceVerdict(True, relation, bound, float(res[i]))

    return IndependenceVerdict(False, None, bound)


def rotation_return_bound(t: float, delta: float, depth: int = 40) -> int | None:
    """
    Least continued-fraction denominator ``q`` of *t* with
    ``|q t - p| < delta``.

    Every point of the circle rotation by *t* returns to within *delta* of
    itself after at most ``q`` steps.  Returns ``None`` if no convergent up
    to *depth* qualifies.
    """
    for p, q in convergents(t, depth):
        if q > 0 and abs(q * t - p) < delta:
            return q
    return None
