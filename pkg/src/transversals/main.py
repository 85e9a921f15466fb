"""Command-line entrypoint."""

import argparse
import json
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

import structlog

from transversals import __version__
from transversals.config import get_settings
from transversals.errors import (
    EXIT_HYPOTHESIS_FAILED,
    EXIT_INPUT_ERROR,
    EXIT_OK,
    InvalidInstanceError,
    InvariantError,
)
from transversals.middleware import CommandFailed, command_context
from transversals.models.instance import parse_instance, serialize_instance
from transversals.models.results import cells_to_dict, render
from transversals.services.audit import audit
from transversals.services.generators import (
    RandomParams,
    gen_hadwiger,
    gen_product,
    sample_filtered,
)
from transversals.services.geometry import parse_rational
from transversals.services.hypothesis import check_star, check_star_lifted
from transversals.services.lifting import Instance, lift_instance
from transversals.services.matroids import PartitionMatroid
from transversals.services.render import render_svg
from transversals.services.topology import (
    barycentric_skeleton,
    build_K,
    check_free_z2,
    euler_characteristic_cells,
    induced,
    reduced_betti_gf2,
)
from transversals.services.transversal import enumerate_covectors, subfamily_of_cell
from transversals.services.verifier import Witness, colorful_interpret, verify_theorem
from transversals.utils.logging import setup_logging
from transversals.utils.metrics import write_metrics

logger = structlog.get_logger()


@dataclass
class CommandOutput:
    """A JSON payload, or raw bytes for generated files and figures."""

    payload: dict[str, Any] | bytes
    exit_code: int = EXIT_OK


Handler = Callable[[argparse.Namespace], CommandOutput]


def _read_instance(path: str) -> Instance:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InvalidInstanceError(f"cannot read instance file: {exc.strerror}", path)
    return parse_instance(data)


def _parse_json(text: str | None, flag: str) -> dict[str, Any] | None:
    if text is None:
        return None
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInstanceError(f"invalid JSON ({exc.msg})", flag)
    if not isinstance(value, dict):
        raise InvalidInstanceError("expected a JSON object", flag)
    return value


def _parse_points(text: str) -> list[tuple[Any, ...]]:
    """``"0,1;2,3"`` -> [(0, 1), (2, 3)]. An empty coordinate list is the point of R^0."""
    points = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        try:
            points.append(tuple(parse_rational(c.strip()) for c in chunk.split(",")) if chunk else ())
        except ValueError as exc:
            raise InvalidInstanceError(str(exc), "--points")
    return points


def _parse_box(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise InvalidInstanceError(str(exc), "--box")


def cmd_check(args: argparse.Namespace) -> CommandOutput:
    inst = _read_instance(args.file)
    violation = check_star(inst, max_family=args.max_family, jobs=args.jobs)
    lifted_violation = check_star_lifted(
        lift_instance(inst), max_family=args.max_family, jobs=args.jobs
    )
    if (violation is None) != (lifted_violation is None):
        raise InvariantError("the hypothesis and its linearized form disagree")
    payload = {
        "status": "holds" if violation is None else "violated",
        "violation": violation.to_dict() if violation else None,
        "lifted_violation": lifted_violation.to_dict() if lifted_violation else None,
    }
    return CommandOutput(payload, EXIT_OK if violation is None else EXIT_HYPOTHESIS_FAILED)


def cmd_solve(args: argparse.Namespace) -> CommandOutput:
    inst = _read_instance(args.file)
    result = verify_theorem(inst, max_family=args.max_family, jobs=args.jobs)
    payload = result.to_dict()
    matroid = inst.matroid
    if (
        isinstance(result, Witness)
        and isinstance(matroid, PartitionMatroid)
        and len(matroid.class_members()) == inst.k + 2
    ):
        payload["color_class"] = colorful_interpret(inst, result)
    return CommandOutput(payload, result.exit_code)


def cmd_audit(args: argparse.Namespace) -> CommandOutput:
    inst = _read_instance(args.file)
    report = audit(lift_instance(inst), jobs=args.jobs, max_vertices=args.max_vertices)
    return CommandOutput(report.to_dict(), report.exit_code)


def cmd_cells(args: argparse.Namespace) -> CommandOutput:
    lifted = lift_instance(_read_instance(args.file))
    cells = enumerate_covectors(lifted.pool, lifted.n, max_vertices=args.max_vertices)
    subfamilies = {
        sigma: list(lifted.matroid.ordered(subfamily_of_cell(sigma, lifted, cells)))
        for sigma in cells.covectors
    }
    payload = cells_to_dict(cells, subfamilies)
    payload["euler_characteristic"] = euler_characteristic_cells(cells)
    return CommandOutput(payload)


def cmd_homology(args: argparse.Namespace) -> CommandOutput:
    lifted = lift_instance(_read_instance(args.file))
    k_complex = build_K(lifted)
    up_to = max(k_complex.dimension, 0) if args.full else lifted.k + 1
    payload: dict[str, Any] = {
        "up_to": up_to,
        "K": {
            "faces": len(k_complex.faces),
            "betti": list(reduced_betti_gf2(k_complex, up_to)),
            "free_z2": check_free_z2(k_complex),
        },
    }
    if args.subfamily:
        sub = induced(k_complex, args.subfamily)
        payload["subfamily"] = {
            "members": list(sub.vertices),
            "betti": list(reduced_betti_gf2(sub, up_to)),
        }
    elif lifted.family:
        cells = enumerate_covectors(lifted.pool, lifted.n, max_vertices=args.max_vertices)
        skeleton = barycentric_skeleton(cells, lifted.k + 1)
        payload["L"] = {
            "faces": len(skeleton.faces),
            "betti": list(reduced_betti_gf2(skeleton, up_to)),
            "free_z2": check_free_z2(skeleton),
        }
    payload["note"] = "proxy: necessary condition"
    return CommandOutput(payload)


def cmd_gen(args: argparse.Namespace) -> CommandOutput:
    if args.generator == "product":
        inst = gen_product(
            _parse_points(args.points),
            args.d,
            _parse_box(args.box),
            _parse_json(args.matroid, "--matroid"),
            args.seed,
            k=args.k,
        )
    elif args.generator == "random":
        params = RandomParams(
            d=args.d,
            k=args.k,
            members=args.members,
            max_vertices_per_set=args.max_vertices_per_set,
            coordinate_range=(args.range[0], args.range[1]),
            max_denominator=args.denominator,
            matroid=_parse_json(args.matroid, "--matroid"),
        )
        batch = sample_filtered(params, args.seed, attempts=args.attempts)
        if not batch.instances:
            return CommandOutput(
                {"error": "no sampled instance satisfied the hypothesis", **batch.stats()},
                EXIT_INPUT_ERROR,
            )
        inst = batch.instances[0]
    else:
        inst = gen_hadwiger(args.count, args.seed)
    logger.info("Instance generated", generator=args.generator, members=len(inst.family))
    return CommandOutput(serialize_instance(inst))


def cmd_render(args: argparse.Namespace) -> CommandOutput:
    inst = _read_instance(args.file)
    hyperplane = None
    if args.witness:
        result = verify_theorem(inst, max_family=args.max_family, jobs=args.jobs)
        if isinstance(result, Witness):
            hyperplane = result.hyperplane
        else:
            logger.warning("No witness to draw", status=result.status)
    return CommandOutput(render_svg(inst, hyperplane))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transversals",
        description="Exact verification of the colorful hyperplane-transversal theorem",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--max-family", type=int, default=None, help="Cap on the family size")
    parser.add_argument("--max-vertices", type=int, default=None, help="Cap on the vertex pool")
    parser.add_argument("--jobs", type=int, default=None, help="Worker processes")
    parser.add_argument("--format", choices=["json", "text"], default="json")
    parser.add_argument("--log-level", default=None, help="Log level (default from settings)")
    parser.add_argument("--metrics-file", default=None, help="Write prometheus metrics here")

    commands = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler: Handler, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.set_defaults(handler=handler)
        return sub

    add("check", cmd_check, "Check the hypothesis (∗)").add_argument("file")
    add("solve", cmd_solve, "Find the subfamily promised by the theorem").add_argument("file")
    add("audit", cmd_audit, "Audit the proof objects").add_argument("file")
    add("cells", cmd_cells, "List the covector cells of the lifted arrangement").add_argument("file")

    homology = add("homology", cmd_homology, "GF(2) Betti numbers of K, K[W] and L")
    homology.add_argument("file")
    homology.add_argument("--subfamily", nargs="+", default=None, metavar="ID")
    homology.add_argument("--full", action="store_true", help="All degrees, not just up to k+1")

    render_parser = add("render", cmd_render, "Draw a planar instance as SVG")
    render_parser.add_argument("file")
    render_parser.add_argument("--witness", action="store_true", help="Solve and draw the witness")
    render_parser.add_argument("--output", default=None)

    gen = add("gen", cmd_gen, "Generate instances satisfying the hypothesis")
    generators = gen.add_subparsers(dest="generator", required=True)

    product = generators.add_parser("product", help="Fibers over points of R^k")
    product.add_argument("--points", required=True, help='e.g. "0;2;5" or "0,1;2,3"')
    product.add_argument("--d", type=int, required=True)
    product.add_argument("--k", type=int, default=None)
    product.add_argument("--box", default="1")
    product.add_argument("--matroid", default=None, help="Matroid spec as JSON")
    product.add_argument("--seed", type=int, default=0)
    product.add_argument("--output", default=None)

    random_parser = generators.add_parser("random", help="Random instances filtered by (∗)")
    random_parser.add_argument("--d", type=int, required=True)
    random_parser.add_argument("--k", type=int, required=True)
    random_parser.add_argument("--members", type=int, required=True)
    random_parser.add_argument("--max-vertices-per-set", type=int, default=3)
    random_parser.add_argument("--range", type=int, nargs=2, default=[-3, 3], metavar=("LO", "HI"))
    random_parser.add_argument("--denominator", type=int, default=1)
    random_parser.add_argument("--matroid", default=None, help="Matroid spec as JSON")
    random_parser.add_argument("--attempts", type=int, default=100)
    random_parser.add_argument("--seed", type=int, default=0)
    random_parser.add_argument("--output", default=None)

    hadwiger = generators.add_parser("hadwiger", help="Disjoint triangles along a line, 3 colors")
    hadwiger.add_argument("--count", type=int, required=True)
    hadwiger.add_argument("--seed", type=int, default=0)
    hadwiger.add_argument("--output", default=None)

    return parser


def _write(output: CommandOutput, args: argparse.Namespace) -> None:
    if isinstance(output.payload, bytes):
        target = getattr(args, "output", None)
        if target:
            Path(target).write_bytes(output.payload)
        else:
            sys.stdout.write(output.payload.decode())
        return
    sys.stdout.write(render(output.payload, args.format))


def main(argv: Sequence[str] | None = None) -> int:
    """Run one command and return its exit code."""
    args = build_parser().parse_args(argv)
    settings = get_settings()
    setup_logging(log_level=args.log_level or settings.log_level, json_logs=not settings.debug)
    logger.info(
        "Starting command",
        app_name=settings.app_name,
        version=__version__,
        command=args.command,
        jobs=args.jobs or settings.jobs,
    )

    try:
        with command_context(args.command, getattr(args, "file", None)):
            output = args.handler(args)
    except CommandFailed as failed:
        output = CommandOutput(failed.payload, failed.exit_code)

    _write(output, args)
    if args.metrics_file:
        write_metrics(args.metrics_file)
    return output.exit_code


if __name__ == "__main__":
    sys.exit(main())
