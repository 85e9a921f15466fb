"""Instance file models: JSON with rationals carried as strings."""

import hashlib
from collections.abc import Mapping, Sequence
from typing import Annotated, Any, Literal, NoReturn

from pydantic import (
    AfterValidator,
    BaseModel,
    ConfigDict,
    Field,
    TypeAdapter,
    ValidationError,
)
from pydantic_core import PydanticCustomError

from transversals.errors import InvalidInstanceError, MatroidError
from transversals.services.geometry import Polytope, format_rational, parse_rational
from transversals.services.lifting import Instance
from transversals.services.matroids import (
    ExplicitBasesMatroid,
    LinearMatroid,
    PartitionMatroid,
    RankOracle,
    UniformMatroid,
    verify_rank_axioms,
)


def _check_rational(value: str) -> str:
    try:
        parse_rational(value)
    except ValueError as exc:
        raise PydanticCustomError("rational", "{reason}", {"reason": str(exc)})
    return value


Rational = Annotated[str, AfterValidator(_check_rational)]


class SetEntry(BaseModel):
    """One member of the family."""

    model_config = ConfigDict(extra="forbid")

    id: str = Field(min_length=1)
    vertices: list[list[Rational]] = Field(min_length=1)


class PartitionSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["partition"]
    classes: dict[str, int]


class UniformSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["uniform"]
    rank: int = Field(ge=0)


class LinearSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["linear"]
    columns: dict[str, list[Rational]]


class ExplicitBasesSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["explicit_bases"]
    bases: list[list[str]]


MatroidSpec = Annotated[
    PartitionSpec | UniformSpec | LinearSpec | ExplicitBasesSpec,
    Field(discriminator="type"),
]

_MATROID_ADAPTER: TypeAdapter[Any] = TypeAdapter(MatroidSpec)


class InstanceMeta(BaseModel):
    """Provenance of an instance; generators may add their own keys."""

    model_config = ConfigDict(extra="allow")

    seed: int | None = None
    generator: str | None = None
    description: str | None = None


class InstanceFile(BaseModel):
    """Wire form of a theorem instance."""

    model_config = ConfigDict(extra="forbid")

    d: int = Field(ge=1)
    k: int = Field(ge=0)
    sets: list[SetEntry]
    matroid: MatroidSpec
    phi: dict[str, list[Rational]]
    meta: InstanceMeta | None = None


def format_location(loc: Sequence[int | str]) -> str:
    """Render a pydantic error location as ``sets[0].vertices[0][1]``."""
    path = ""
    for part in loc:
        if isinstance(part, int):
            path += f"[{part}]"
        else:
            path += f".{part}" if path else part
    return path


def _raise_validation(exc: ValidationError, prefix: str = "") -> NoReturn:
    error = exc.errors()[0]
    loc = tuple(error["loc"])
    path = format_location(loc)
    if prefix:
        path = f"{prefix}.{path}" if path else prefix
    raise InvalidInstanceError(error["msg"], path or None)


def matroid_from_spec(spec: BaseModel, ids: Sequence[str]) -> RankOracle:
    """Build a rank oracle over ``ids`` from a validated matroid spec."""
    try:
        if isinstance(spec, PartitionSpec):
            ordered = [x for x in ids if x in spec.classes]
            ordered += [x for x in spec.classes if x not in ids]
            return PartitionMatroid({x: spec.classes[x] for x in ordered})
        if isinstance(spec, UniformSpec):
            return UniformMatroid(ids, spec.rank)
        if isinstance(spec, LinearSpec):
            ordered = [x for x in ids if x in spec.columns]
            ordered += [x for x in spec.columns if x not in ids]
            return LinearMatroid(
                {x: tuple(parse_rational(c) for c in spec.columns[x]) for x in ordered}
            )
        if isinstance(spec, ExplicitBasesSpec):
            oracle = ExplicitBasesMatroid(ids, spec.bases)
            report = verify_rank_axioms(oracle)
            if not report.passed:
                raise InvalidInstanceError(
                    f"explicit bases violate the {report.axiom} axiom: {report.detail}", "matroid"
                )
            return oracle
    except MatroidError as exc:
        raise InvalidInstanceError(str(exc), "matroid")
    raise InvalidInstanceError(f"unsupported matroid spec {type(spec).__name__}", "matroid")


def matroid_from_dict(payload: Mapping[str, Any], ids: Sequence[str]) -> RankOracle:
    """Validate a matroid spec given as plain data, e.g. from the command line."""
    try:
        spec = _MATROID_ADAPTER.validate_python(dict(payload))
    except ValidationError as exc:
        _raise_validation(exc, "matroid")
    return matroid_from_spec(spec, ids)


def instance_from_model(model: InstanceFile) -> Instance:
    family = []
    seen: set[str] = set()
    for i, entry in enumerate(model.sets):
        if entry.id in seen:
            raise InvalidInstanceError(f"duplicate id {entry.id!r}", f"sets[{i}].id")
        seen.add(entry.id)
        for j, vertex in enumerate(entry.vertices):
            if len(vertex) != model.d:
                raise InvalidInstanceError(
                    f"vertex has dimension {len(vertex)}, expected {model.d}",
                    f"sets[{i}].vertices[{j}]",
                )
        vertices = tuple(tuple(parse_rational(c) for c in v) for v in entry.vertices)
        family.append(Polytope(entry.id, vertices))

    ids = [entry.id for entry in model.sets]
    phi = {label: tuple(parse_rational(c) for c in image) for label, image in model.phi.items()}
    meta = model.meta.model_dump(exclude_none=True) if model.meta else {}
    return Instance(
        d=model.d,
        k=model.k,
        family=tuple(family),
        matroid=matroid_from_spec(model.matroid, ids),
        phi=phi,
        meta=meta,
    )


def parse_instance(data: str | bytes) -> Instance:
    """Validate an instance file, reporting the first problem with its location."""
    try:
        model = InstanceFile.model_validate_json(data)
    except ValidationError as exc:
        _raise_validation(exc)
    return instance_from_model(model)


def instance_to_model(inst: Instance) -> InstanceFile:
    payload = {
        "d": inst.d,
        "k": inst.k,
        "sets": [
            {"id": m.id, "vertices": [[format_rational(c) for c in v] for v in m.vertices]}
            for m in inst.family
        ],
        "matroid": inst.matroid.to_spec(),
        "phi": {label: [format_rational(c) for c in image] for label, image in inst.phi.items()},
        "meta": dict(inst.meta) or None,
    }
    return InstanceFile.model_validate(payload)


def serialize_instance(inst: Instance) -> bytes:
    """Canonical JSON bytes: stable key order, reduced rationals, trailing newline."""
    text = instance_to_model(inst).model_dump_json(indent=2, exclude_none=True)
    return (text + "\n").encode()


def instance_digest(inst: Instance) -> str:
    """SHA-256 of the canonical serialization."""
    return hashlib.sha256(serialize_instance(inst)).hexdigest()
