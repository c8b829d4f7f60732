"""
Experiment runner.

Every subcommand reads one JSON configuration document, validates it, writes
the resolved configuration to ``config.json`` in the output directory, and
then its results next to it.
"""

from __future__ import annotations

import argparse
import functools
import json
import logging
import sys
from pathlib import Path
from typing import TYPE_CHECKING

from pydantic import ValidationError

from ._config import COMMANDS
from ._errors import ConstructionRejected, InvalidInput, QuasiMinimalError
from ._util import parallel_map, resolve_workers
from .analysis import (
    exceptional_set,
    exceptional_set_scan,
    generic_starts,
    time_t_scan,
    translation_density_oracle,
)
from .flows import (
    CompositeField,
    Direction,
    PunctureSet,
    SlopeParam,
    build_punctured_field,
    check_distinct_dense_orbits,
    place_punctures,
    trace_orbit,
)
from .recurrence import (
    Axis,
    BallPair,
    ConjugacySpec,
    Shear,
    build_conjugated_map,
    certificate_check,
    recurrence_scan,
)
from .results import (
    coverage_image,
    density_table,
    orbit_table,
    recurrence_table,
    scan_t_table,
    summary,
)
from .torus import wrap

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence
    from typing import Any

    from pydantic import BaseModel

    from ._config import (
        ConstructConfig,
        DensityConfig,
        FieldBlock,
        OracleConfig,
        OrbitConfig,
        RecurrenceConfig,
        ScanTConfig,
    )
    from .analysis import IndependenceVerdict
    from .torus import TorusPoint

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_REJECTED = 2
EXIT_NUMERIC = 3


def _point(p: TorusPoint) -> list[float]:
    return [p.x, p.y]


def _slope_and_punctures(
    block: FieldBlock,
    seed: int,
) -> tuple[SlopeParam, PunctureSet | None]:
    slope = SlopeParam.from_alpha(block.alpha)
    if isinstance(block.punctures, int):
        if block.punctures == 0:
            return slope, None
        F = place_punctures(
            block.punctures, slope, block.r0, depth=block.depth, seed=seed
        )
        return slope, F
    if not block.punctures:
        return slope, None
    return slope, PunctureSet(tuple(wrap(x, y) for x, y in block.punctures), block.r0)


def build_field(block: FieldBlock, seed: int) -> CompositeField:
    """
    Field of a configuration block; a puncture count is placed at random
    with *seed*.
    """
    slope, F = _slope_and_punctures(block, seed)
    if F is None:
        return CompositeField(slope)
    return build_punctured_field(slope, F, block.depth)


def _field_summary(field: CompositeField) -> dict[str, Any]:
    return {
        "alpha": field.alpha,
        "r0": field.r0,
        "zeros": [_point(q) for q in field.zeros],
    }


def cmd_construct(
    cfg: ConstructConfig,
    out: Path,
    seed: int,
    workers: int,
) -> int:
    """
    Build the punctured field and report acceptance, or the pair of
    punctures found on one orbit.
    """
    slope, F = _slope_and_punctures(cfg.field, seed)
    if F is None:
        field = CompositeField(slope)
        summary.write(out / "summary.json", {"accepted": True, **_field_summary(field)})
        print("accepted: linear field without punctures")
        return EXIT_OK

    special = tuple(wrap(x, y) for x, y in cfg.special)
    report = check_distinct_dense_orbits(F, slope, cfg.field.depth, special=special)
    info: dict[str, Any] = {
        "alpha": slope.alpha,
        "r0": F.r0,
        "depth": report.depth,
        "punctures": [_point(q) for q in F.points],
        "pairs": [
            {
                "pair": [_point(p) for p in v.pair],
                "relation": v.relation.value,
                "s": v.s,
            }
            for v in report.pairs
        ],
        "on_special_orbit": list(report.on_special_orbit),
    }
    try:
        field = build_punctured_field(slope, F, cfg.field.depth)
    except ConstructionRejected as exc:
        info.update(accepted=False, witness=exc.s)
        summary.write(out / "summary.json", info)
        raise

    info.update(accepted=True, zeros=[_point(q) for q in field.zeros])
    summary.write(out / "summary.json", info)
    print(f"accepted: {len(field.zeros)} zeros")
    for q in field.zeros:
        print(f"  ({q.x!r}, {q.y!r})")
    return EXIT_OK


def cmd_orbit(cfg: OrbitConfig, out: Path, seed: int, workers: int) -> int:
    """
    Sample one orbit of the field.
    """
    field = build_field(cfg.field, seed)
    direction = Direction.FORWARD if cfg.direction == "forward" else Direction.BACKWARD
    trace = trace_orbit(field, wrap(*cfg.start), cfg.T, direction, cfg.integrator)
    orbit_table.write(out / "orbit.csv", trace.times, trace.points)
    summary.write(
        out / "summary.json",
        {
            "field": _field_summary(field),
            "samples": len(trace),
            "status": trace.status.value,
            "stationary": trace.stationary,
            "end": _point(trace.end),
        },
    )
    print(f"{len(trace)} samples, {trace.status.value}")
    return EXIT_OK


def cmd_density(cfg: DensityConfig, out: Path, seed: int, workers: int) -> int:
    """
    Double density test for every start; the punctures and seeded clear
    starts are added as configured.
    """
    field = build_field(cfg.field, seed)
    starts = [wrap(x, y) for x, y in cfg.starts]
    if cfg.include_punctures:
        starts.extend(field.zeros)
    starts.extend(
        generic_starts(
            field,
            cfg.random_starts,
            T=cfg.T,
            s_max=cfg.s_max,
            clearance=cfg.clearance,
            seed=seed,
        )
    )
    entries = exceptional_set_scan(
        field, starts, cfg.T, cfg.m, cfg.integrator, workers=workers
    )

    rows = []
    for k, entry in enumerate(entries):
        for report in (entry.forward, entry.backward):
            rows.append(
                (
                    entry.start.x,
                    entry.start.y,
                    report.direction,
                    report.covered_fraction,
                    report.first_cover_time,
                    report.classification,
                    report.status,
                )
            )
            name = f"coverage_{k}_{report.direction.value.lower()}.pgm"
            coverage_image.write(out / name, report.grid.visited)
    density_table.write(out / "density.csv", rows)

    exceptional = exceptional_set(entries)
    summary.write(
        out / "summary.json",
        {
            "field": _field_summary(field),
            "starts": len(entries),
            "exceptional": [_point(p) for p in exceptional],
            "exceptional_equals_zeros": set(exceptional) == set(field.zeros),
        },
    )
    print(f"{len(exceptional)} of {len(entries)} starts exceptional")
    return EXIT_OK


def cmd_scan_t(cfg: ScanTConfig, out: Path, seed: int, workers: int) -> int:
    """
    Density of the time-t maps, with oracle verdicts for the linear field.
    """
    field = build_field(cfg.field, seed)
    rows = time_t_scan(
        field,
        cfg.t_values,
        wrap(*cfg.start),
        cfg.n,
        cfg.m,
        cfg.integrator,
        bound=cfg.bound,
        workers=workers,
    )
    table = []
    for k, row in enumerate(rows):
        verdict = row.verdict
        table.append(
            (
                row.t,
                row.report.covered_fraction,
                row.report.classification,
                verdict.label if verdict else None,
                verdict.relation if verdict else None,
            )
        )
        coverage_image.write(out / f"coverage_t{k}.pgm", row.report.grid.visited)
    scan_t_table.write(out / "scan_t.csv", table)
    summary.write(
        out / "summary.json",
        {
            "field": _field_summary(field),
            "rows": len(rows),
            "agreements": sum(row.agrees for row in rows),
        },
    )
    print(f"{sum(row.agrees for row in rows)} of {len(rows)} times agree")
    return EXIT_OK


def cmd_recurrence(
    cfg: RecurrenceConfig,
    out: Path,
    seed: int,
    workers: int,
) -> int:
    """
    First-return scan and ball-pair certificates of a conjugated rotation.
    """
    if cfg.shears is None:
        spec = ConjugacySpec.random(seed, cfg.random_length)
    else:
        spec = ConjugacySpec(
            tuple(Shear(Axis(s.axis), s.amplitude, s.frequency) for s in cfg.shears)
        )
    pairs = [
        BallPair(wrap(*p.u_center), p.u_radius, wrap(*p.v_center), p.v_radius)
        for p in cfg.certificates
    ]
    f = build_conjugated_map(spec, cfg.t)
    report = recurrence_scan(f, cfg.m, cfg.delta, cfg.n_max)
    results = []
    if pairs:
        results = certificate_check(
            f, pairs, cfg.samples_per_u, cfg.n_max, workers=workers
        )

    recurrence_table.write(out / "recurrence.csv", report.points, report.first_return)
    summary.write(
        out / "summary.json",
        {
            "t": cfg.t,
            "shears": [
                {
                    "axis": s.axis.value,
                    "amplitude": s.amplitude,
                    "frequency": s.frequency,
                }
                for s in spec.primitives
            ],
            "failures": report.failures,
            "max_return": report.max_return,
            "certificates": [
                {"verdict": r.label, "witness": _point(r.witness), "n": r.n}
                for r in results
            ],
        },
    )
    print(f"{report.failures} failures, max return {report.max_return}")
    return EXIT_OK


def _oracle_pair(
    pair: tuple[float, float],
    *,
    bound: int,
) -> IndependenceVerdict:
    return translation_density_oracle(*pair, bound)


def cmd_oracle(cfg: OracleConfig, out: Path, seed: int, workers: int) -> int:
    """
    Integer-relation verdicts for translation vectors.
    """
    func = functools.partial(_oracle_pair, bound=cfg.bound)
    verdicts = parallel_map(func, cfg.pairs, workers)
    summary.write(
        out / "summary.json",
        {
            "bound": cfg.bound,
            "verdicts": [
                {
                    "beta": beta,
                    "gamma": gamma,
                    "verdict": v.label,
                    "relation": list(v.relation) if v.relation else None,
                    "residual": v.residual,
                }
                for (beta, gamma), v in zip(cfg.pairs, verdicts)
            ],
        },
    )
    for (beta, gamma), v in zip(cfg.pairs, verdicts):
        print(f"({beta!r}, {gamma!r}): {v.label} {v.relation or ''}".rstrip())
    return EXIT_OK


HANDLERS: dict[str, Callable[[Any, Path, int, int], int]] = {
    "construct": cmd_construct,
    "orbit": cmd_orbit,
    "density": cmd_density,
    "scan-t": cmd_scan_t,
    "recurrence": cmd_recurrence,
    "oracle": cmd_oracle,
}


def _seed(value: str) -> int:
    seed = int(value)
    if not 0 <= seed < 2**64:
        msg = f"seed must be an unsigned 64-bit integer, got {value}"
        raise argparse.ArgumentTypeError(msg)
    return seed


def _defaults(model: type[BaseModel]) -> str:
    lines = ["configuration fields (defaults):"]
    for name, info in model.model_fields.items():
        if info.is_required():
            default = "required"
        else:
            value = info.get_default(call_default_factory=True)
            if hasattr(value, "model_dump"):
                value = value.model_dump(mode="json")
            default = json.dumps(value)
        lines.append(f"  {name} = {default}")
    return "\n".join(lines)


def _parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON configuration document")
    common.add_argument(
        "--out", type=Path, default=Path("."), help="output directory (default: .)"
    )
    common.add_argument("--seed", type=_seed, default=0, help="run seed (default: 0)")
    common.add_argument(
        "--threads",
        type=int,
        help="worker processes (default: $QML_THREADS, else 1)",
    )
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(
        prog="quasiminimal",
        description="Experiments with quasi-minimal flows on the punctured torus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, model in COMMANDS.items():
        sub.add_parser(
            name,
            parents=[common],
            help=(model.__doc__ or name).strip().splitlines()[0],
            epilog=_defaults(model),
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
    return parser.parse_args(argv)


def _load(command: str, path: Path | None) -> Any:
    data = {}
    if path is not None:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
        if not isinstance(data, dict):
            msg = f"{path}: configuration must be a JSON object"
            raise InvalidInput(msg)
    data.setdefault("command", command)
    return COMMANDS[command].model_validate(data)


def main(argv: Sequence[str] | None = None) -> int:
    args = _parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        cfg = _load(args.command, args.config)
        workers = resolve_workers(args.threads)
    except ValidationError as exc:
        for err in exc.errors():
            loc = ".".join(map(str, err["loc"])) or "<root>"
            logger.error("config error at %s: %s", loc, err["msg"])
        return EXIT_CONFIG
    except (OSError, ValueError) as exc:
        # ValueError covers JSON syntax errors and a bad thread count
        logger.error("%s", exc)
        return EXIT_CONFIG

    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    summary.write(
        out / "config.json",
        {
            "command": args.command,
            "seed": args.seed,
            "config": cfg.model_dump(mode="json"),
        },
    )

    try:
        return HANDLERS[args.command](cfg, out, args.seed, workers)
    except ConstructionRejected as exc:
        logger.error("construction rejected: %s", exc)
        if exc.pair is not None:
            p, q = exc.pair
            print(f"rejected: {p} and {q} share an orbit, s = {exc.s!r}")
        return EXIT_REJECTED
    except InvalidInput as exc:
        logger.error("invalid input: %s", exc)
        return EXIT_CONFIG
    except (QuasiMinimalError, FloatingPointError) as exc:
        logger.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
