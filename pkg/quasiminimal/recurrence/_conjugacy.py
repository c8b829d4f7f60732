"""
Conjugated rotations ``g o R_t o g^-1`` of the torus.

``R_t(x, y) = (x + t, y)`` is the free circle action and ``g`` a finite
composition of sine shears.  Every shear has a closed-form inverse, so maps
and their iterates are evaluated without integration error.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .._errors import InvalidInput
from ..torus import TorusPoint, wrap, wrap_array

if TYPE_CHECKING:
    from collections.abc import Sequence
    from typing import Any
    from numpy.typing import ArrayLike, NDArray

MAX_AMPLITUDE = 0.5
MAX_FREQUENCY = 32
MAX_PRIMITIVES = 16

TWO_PI = 2.0 * math.pi


class Axis(enum.Enum):
    X = "x"
    Y = "y"


@dataclass(frozen=True)
class Shear:
    """
    Sine shear along one axis; ``Axis.X`` moves ``y`` by
    ``amplitude * sin(2 pi frequency x)``.
    """

    axis: Axis
    amplitude: float
    frequency: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "axis", Axis(self.axis))
        if not abs(self.amplitude) <= MAX_AMPLITUDE:
            msg = f"shear amplitude must lie in [-0.5, 0.5], got {self.amplitude!r}"
            raise InvalidInput(msg)
        if not 1 <= self.frequency <= MAX_FREQUENCY:
            msg = f"shear frequency must lie in 1..32, got {self.frequency!r}"
            raise InvalidInput(msg)

    @property
    def inverse(self) -> Shear:
        return Shear(self.axis, -self.amplitude, self.frequency)


def apply_shear(axis: Axis | str, a: float, k: int, p: TorusPoint) -> TorusPoint:
    """Apply a sine shear to a point.

    Parameters
    ----------
    axis : Axis or str
        ``x`` shears the ``y`` coordinate as a function of ``x``; ``y`` is
        the mirror image.
    a : float
        Amplitude.
    k : int
        Frequency.
    p : TorusPoint
        Point to move.

    Returns
    -------
    TorusPoint
        The sheared point.  The shear with amplitude ``-a`` is its inverse.

    """
    if Axis(axis) is Axis.X:
        return wrap(p.x, p.y + a * math.sin(TWO_PI * k * p.x))
    return wrap(p.x + a * math.sin(TWO_PI * k * p.y), p.y)


def _shear_array(s: Shear, a: float, r: NDArray[Any]) -> NDArray[Any]:
    out = r.copy()
    if s.axis is Axis.X:
        out[..., 1] += a * np.sin(TWO_PI * s.frequency * r[..., 0])
    else:
        out[..., 0] += a * np.sin(TWO_PI * s.frequency * r[..., 1])
    return wrap_array(out)


@dataclass(frozen=True)
class ConjugacySpec:
    """Ordered shear primitives composing the conjugacy ``g``.

    Parameters
    ----------
    primitives : sequence of Shear
        Applied in order: the first primitive acts first.
    seed : int or None
        Seed the primitives were drawn with, if any.

    """

    primitives: tuple[Shear, ...] = ()
    seed: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "primitives", tuple(self.primitives))
        if len(self.primitives) > MAX_PRIMITIVES:
            msg = f"at most {MAX_PRIMITIVES} primitives, got {len(self.primitives)}"
            raise InvalidInput(msg)

    def __len__(self) -> int:
        return len(self.primitives)

    @classmethod
    def random(
        cls,
        seed: int,
        length: int = 3,
        max_frequency: int = 4,
    ) -> ConjugacySpec:
        """
        Seeded shears with alternating axes, frequencies in
        ``1..max_frequency`` and ``|a| <= 1/(4 pi k)``, so that every shear
        moves its coordinate with slope at most 1/2.
        """
        if not 0 <= length <= MAX_PRIMITIVES:
            msg = f"length must lie in 0..{MAX_PRIMITIVES}, got {length}"
            raise InvalidInput(msg)
        if not 1 <= max_frequency <= MAX_FREQUENCY:
            msg = f"max_frequency must lie in 1..{MAX_FREQUENCY}, got {max_frequency}"
            raise InvalidInput(msg)
        rng = np.random.default_rng(seed)
        first = int(rng.integers(2))
        primitives = []
        for i in range(length):
            axis = (Axis.X, Axis.Y)[(first + i) % 2]
            k = int(rng.integers(1, max_frequency + 1))
            a = float(rng.uniform(-1.0, 1.0)) / (2 * TWO_PI * k)
            primitives.append(Shear(axis, a, k))
        return cls(tuple(primitives), seed)


@dataclass(frozen=True)
class ConjugatedMap:
    """
    The map ``g o R_t o g^-1``.
    """

    spec: ConjugacySpec
    t: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.t):
            msg = f"rotation time must be finite, got {self.t!r}"
            raise InvalidInput(msg)

    def g(self, p: TorusPoint) -> TorusPoint:
        for s in self.spec.primitives:
            p = apply_shear(s.axis, s.amplitude, s.frequency, p)
        return p

    def g_inverse(self, p: TorusPoint) -> TorusPoint:
        for s in reversed(self.spec.primitives):
            p = apply_shear(s.axis, -s.amplitude, s.frequency, p)
        return p

    def rotate(self, p: TorusPoint, n: int = 1) -> TorusPoint:
        """the circle action ``R_t`` applied *n* times"""
        return wrap(p.x + n * self.t, p.y)

    def __call__(self, p: TorusPoint) -> TorusPoint:
        return self.g(self.rotate(self.g_inverse(p)))

    def inverse(self, p: TorusPoint) -> TorusPoint:
        return self.g(self.rotate(self.g_inverse(p), -1))

    def iterate(self, p: TorusPoint, n: int) -> TorusPoint:
        """
        Apply the map *n* times (its inverse for negative *n*) by repeated
        evaluation.
        """
        step = self if n >= 0 else self.inverse
        for _ in range(abs(n)):
            p = step(p)
        return p

    def g_array(self, r: ArrayLike, *, inverse: bool = False) -> NDArray[Any]:
        """
        Vectorised ``g`` (or ``g^-1``) on points of shape ``(..., 2)``.
        """
        out = np.array(r, dtype=float)
        if inverse:
            for s in reversed(self.spec.primitives):
                out = _shear_array(s, -s.amplitude, out)
        else:
            for s in self.spec.primitives:
                out = _shear_array(s, s.amplitude, out)
        return out

    def apply_array(self, r: ArrayLike) -> NDArray[Any]:
        """
        Vectorised map on points of shape ``(..., 2)``.
        """
        z = self.g_array(r, inverse=True)
        z[..., 0] += self.t
        return self.g_array(wrap_array(z))


def build_conjugated_map(
    spec: ConjugacySpec | Sequence[Shear],
    t: float,
) -> ConjugatedMap:
    """
    The map ``x -> g(R_t(g^-1(x)))`` with ``g`` composed from the
    primitives of *spec* in order.
    """
    if not isinstance(spec, ConjugacySpec):
        spec = ConjugacySpec(tuple(spec))
    return ConjugatedMap(spec, t)
