from typing import ClassVar, Dict, List, Optional, Tuple, Type

from pydantic import BaseModel, Field, ValidationError, validator

from ..channels import ChannelName
from ..chip import Branch, Orientation
from ..errors import UsageError
from ..measurement import Axis
from ..phase_space import BasisKind
from ..settings import Settings

BASIS_ALIASES = {"qbism": BasisKind.QBISM, "wootters": BasisKind.WOOTTERS}


class BaseRequest(BaseModel, frozen=True):
    command: ClassVar[str]
    default_format: ClassVar[str] = "csv"


class _BasisRequest(BaseRequest):
    basis: BasisKind = BasisKind.QBISM

    @validator("basis", pre=True)
    def _basis_alias(cls, value):
        return BASIS_ALIASES.get(str(value).lower(), value)


def _branch_alias(value):
    return str(value).capitalize()


class SurfaceRequest(_BasisRequest):
    command: ClassVar[str] = "surface"

    chip: int = Field(1, ge=1, le=3)
    grid: int = Field(101, ge=2)
    physical: bool = False

    def orientation(self) -> Orientation:
        return list(Orientation)[self.chip - 1]


class BoundaryRequest(_BasisRequest):
    command: ClassVar[str] = "boundary"

    branch: Branch = Branch.MINUS
    samples: int = Field(101, ge=2)

    _branch = validator("branch", pre=True, allow_reuse=True)(_branch_alias)


class PhiFieldRequest(BaseRequest):
    command: ClassVar[str] = "phi-field"

    grid: int = Field(101, ge=2)


class ReconstructRequest(BaseRequest):
    command: ClassVar[str] = "reconstruct"
    default_format: ClassVar[str] = "json"

    pz: float = Field(..., ge=0, le=1)
    px: float = Field(..., ge=0, le=1)
    axes: Tuple[Axis, Axis] = (Axis.Z, Axis.X)

    @validator("axes", pre=True)
    def _axis_pair(cls, value):
        if isinstance(value, str):
            value = tuple(value.upper())
        return value


class ChannelRequest(BaseRequest):
    command: ClassVar[str] = "channel"

    channel: ChannelName = ChannelName.BIT_FLIP
    xi: float = Field(1 / 3, ge=0, le=1)
    grid: int = Field(20, ge=2)


class EvolveRequest(BaseRequest):
    command: ClassVar[str] = "evolve"

    p0: float = Field(1e-3, gt=0, lt=1)
    p1: float = Field(1 - 1e-3, gt=0, lt=1)
    branch: Branch = Branch.MINUS
    steps: int = Field(1000, ge=1)

    _branch = validator("branch", pre=True, allow_reuse=True)(_branch_alias)


class CheckRequest(BaseRequest):
    command: ClassVar[str] = "check"

    suites: List[str] = Field(default_factory=lambda: ["all"])


REQUESTS: Dict[str, Type[BaseRequest]] = {
    request.command: request
    for request in (
        SurfaceRequest,
        BoundaryRequest,
        PhiFieldRequest,
        ReconstructRequest,
        ChannelRequest,
        EvolveRequest,
        CheckRequest,
    )
}


def parse_request(command: str, values: Dict, settings: Optional[Settings] = None) -> BaseRequest:
    """
    Build the request for a subcommand. Values left unset (None) fall back to the
    matching settings field, so config files supply defaults for every flag.
    """
    try:
        RequestType = REQUESTS[command]
    except KeyError:
        raise UsageError(f"Unknown command {command}")

    fields = {}
    for name in RequestType.__fields__:
        value = values.get(name)
        if value is None and settings is not None and name in Settings.__fields__:
            value = getattr(settings, name)
        if value is not None:
            fields[name] = value

    try:
        return RequestType.parse_obj(fields)
    except ValidationError as e:
        raise UsageError(f"Invalid {command} parameters: {e}") from e
