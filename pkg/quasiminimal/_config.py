"""
Configuration schemas.

Every experiment is driven by one JSON document which is validated against
the models below before any computation starts.
"""

from __future__ import annotations

import math
from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator


class _Block(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class IntegratorConfig(_Block):
    """
    Tolerances and budgets of the orbit integrator.
    """

    rel_tol: float = Field(1e-10, gt=0, le=1e-6, description="relative tolerance")
    abs_tol: float = Field(1e-12, gt=0, le=1e-6, description="absolute tolerance")
    max_steps: int = Field(10_000_000, gt=0, description="step budget per run")
    max_step_len: float = Field(
        0.025, gt=0, le=0.25, description="largest displacement between samples"
    )
    stall_speed: float = Field(1e-8, gt=0, description="speed regarded as stalled")
    stall_horizon: float = Field(
        1.0, gt=0, description="remaining time above which a stall stops the run"
    )


class FieldBlock(_Block):
    """
    Slope and punctures of a composite field.

    ``punctures`` is either an explicit list of points or the number of
    points to place at random (seeded by the run seed).
    """

    alpha: float = Field(math.sqrt(2.0), gt=0)
    punctures: Union[
        List[Tuple[float, float]], Annotated[int, Field(ge=0, le=16)]
    ] = 1
    r0: float = Field(0.05, gt=0, lt=0.25)
    depth: int = Field(50, ge=1, description="orbit-distinctness scan depth")


class ConstructConfig(_Block):
    """Check a puncture placement and build the slowed field."""

    command: Literal["construct"] = "construct"
    field: FieldBlock = FieldBlock()
    special: List[Tuple[float, float]] = Field(default_factory=list)


class OrbitConfig(_Block):
    """Sample one orbit of the flow."""

    command: Literal["orbit"] = "orbit"
    field: FieldBlock = FieldBlock()
    integrator: IntegratorConfig = IntegratorConfig()
    start: Tuple[float, float] = (0.1, 0.2)
    T: float = Field(10.0, gt=0)
    direction: Literal["forward", "backward"] = "forward"


class DensityConfig(_Block):
    """Forward and backward grid coverage for a set of starts."""

    command: Literal["density"] = "density"
    field: FieldBlock = FieldBlock()
    integrator: IntegratorConfig = IntegratorConfig()
    starts: List[Tuple[float, float]] = Field(default_factory=list)
    random_starts: int = Field(0, ge=0)
    include_punctures: bool = True
    clearance: Optional[float] = Field(
        None, ge=0, description="in units of r0; derived from T when omitted"
    )
    s_max: float = Field(20.0, gt=0, description="clearance horizon along the line")
    T: float = Field(1e4, gt=0)
    m: int = Field(20, ge=1)

    @model_validator(mode="after")
    def _no_skip(self) -> "DensityConfig":
        if self.integrator.max_step_len > 1 / (2 * self.m):
            msg = "integrator.max_step_len must not exceed 1/(2 m)"
            raise ValueError(msg)
        return self


class ScanTConfig(_Block):
    """Grid coverage of time-t maps against the translation oracle."""

    command: Literal["scan-t"] = "scan-t"
    field: FieldBlock = FieldBlock()
    integrator: IntegratorConfig = IntegratorConfig()
    t_values: List[float] = Field(min_length=1)
    start: Tuple[float, float] = (0.525, 0.525)
    n: int = Field(10_000, ge=1)
    m: int = Field(20, ge=1)
    bound: int = Field(10_000, ge=1)


class ShearBlock(_Block):
    axis: Literal["x", "y"]
    amplitude: float = Field(ge=-0.5, le=0.5)
    frequency: int = Field(ge=1, le=32)


class BallPairBlock(_Block):
    u_center: Tuple[float, float]
    u_radius: float = Field(gt=0)
    v_center: Tuple[float, float]
    v_radius: float = Field(gt=0)


class RecurrenceConfig(_Block):
    """First returns and ball-pair certificates of a conjugated rotation."""

    command: Literal["recurrence"] = "recurrence"
    t: float = math.sqrt(2.0) - 1.0
    shears: Optional[Annotated[List[ShearBlock], Field(max_length=16)]] = None
    random_length: int = Field(3, ge=0, le=16)
    m: int = Field(20, ge=1)
    delta: float = Field(0.05, gt=0, lt=0.25)
    n_max: int = Field(50_000, ge=1)
    certificates: List[BallPairBlock] = Field(default_factory=list)
    samples_per_u: int = Field(9, ge=1)


class OracleConfig(_Block):
    """Integer-relation verdicts for translation vectors."""

    command: Literal["oracle"] = "oracle"
    pairs: List[Tuple[float, float]] = Field(min_length=1)
    bound: int = Field(10_000, ge=1)


#: schema for each subcommand
COMMANDS: dict[str, type[_Block]] = {
    "construct": ConstructConfig,
    "orbit": OrbitConfig,
    "density": DensityConfig,
    "scan-t": ScanTConfig,
    "recurrence": RecurrenceConfig,
    "oracle": OracleConfig,
}
