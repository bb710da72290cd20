"""
Subcommand bodies. `run` dispatches on the request type; each registration
turns library results into the fixed columns of its subcommand.
"""
from functools import singledispatch
from itertools import product

import numpy as np

from .. import channels
from ..checks import run_suites
from ..chip import (
    ChipPoint,
    boundary_bloch,
    boundary_q,
    chip_grid,
    chip_surface,
    phi_field,
    support_interval,
    surface_residual,
)
from ..errors import UsageError
from ..liouvillian import distribution_entropy, evolve_boundary
from ..log import logger
from ..measurement import reconstruct_from_projective
from ..qubit import von_neumann_entropy
from ..settings import Settings
from .events import (
    BaseRequest,
    BoundaryRequest,
    ChannelRequest,
    CheckRequest,
    EvolveRequest,
    PhiFieldRequest,
    ReconstructRequest,
    SurfaceRequest,
)
from .export import CommandResult, rows

SURFACE_COLUMNS = ["p", "q", "u", "v", "w"]
BOUNDARY_COLUMNS = ["p", "q", "x", "y", "z"]
PHI_COLUMNS = ["x", "y", "z", "phi"]
RECONSTRUCT_COLUMNS = [
    "p", "q", "p1", "p2", "p3", "p4", "x", "y", "z", "physical", "on_chip",
]
CHANNEL_COLUMNS = ["p", "q", "x", "y", "z", "surface_residual", "table_delta"]
EVOLVE_COLUMNS = ["p", "x", "y", "z", "p1", "p2", "p3", "p4", "shannon", "von_neumann"]
CHECK_COLUMNS = ["suite", "check"]


@singledispatch
def run(request: BaseRequest, settings: Settings) -> CommandResult:
    raise UsageError(f"No command registered for {type(request).__name__}")


@run.register
def _(request: SurfaceRequest, settings: Settings) -> CommandResult:
    if request.physical:
        points = chip_grid(request.grid, request.basis)
    else:
        axis = np.linspace(0, 1, request.grid)
        points = [(float(p), float(q)) for p, q in product(axis, axis)]

    orientation = request.orientation()
    values = []
    for p, q in points:
        t = chip_surface(ChipPoint(p=p, q=q, orientation=orientation, basis_kind=request.basis))
        values.append((p, q, t.u, t.v, t.w))
    return CommandResult(columns=SURFACE_COLUMNS, records=rows(SURFACE_COLUMNS, values))


@run.register
def _(request: BoundaryRequest, settings: Settings) -> CommandResult:
    values = []
    for p in np.linspace(*support_interval(request.basis), request.samples):
        p = float(p)
        q = boundary_q(p, request.branch, request.basis, settings.tol_alg)
        r = boundary_bloch(p, request.branch, request.basis, settings.tol_alg)
        values.append((p, q, r.x, r.y, r.z))
    return CommandResult(columns=BOUNDARY_COLUMNS, records=rows(BOUNDARY_COLUMNS, values))


@run.register
def _(request: PhiFieldRequest, settings: Settings) -> CommandResult:
    axis = np.linspace(-1, 1, request.grid)
    cube = np.array(list(product(axis, axis, axis)))
    ball = cube[np.linalg.norm(cube, axis=1) <= 1 + settings.tol_alg]
    phi = phi_field(ball)
    return CommandResult(
        columns=PHI_COLUMNS, records=rows(PHI_COLUMNS, np.column_stack([ball, phi]))
    )


@run.register
def _(request: ReconstructRequest, settings: Settings) -> CommandResult:
    result = reconstruct_from_projective(
        request.pz, request.px, axes=request.axes, tol=settings.tol_phys
    )
    if not result.physical:
        logger.warning(
            "Reconstructed state is not physical",
            extra={"pz": request.pz, "px": request.px, "axes": [a.value for a in request.axes]},
        )
    values = [
        (result.p, result.q, *result.prob.array(), *result.bloch.array(), result.physical, result.on_chip)
    ]
    return CommandResult(
        columns=RECONSTRUCT_COLUMNS,
        records=rows(RECONSTRUCT_COLUMNS, values),
        failed=not result.physical,
    )


@run.register
def _(request: ChannelRequest, settings: Settings) -> CommandResult:
    values = []
    for p, q in chip_grid(request.grid):
        image = channels.kraus_chip_image(request.channel, request.xi, p, q)
        tabulated = channels.chip_image(request.channel, request.xi, p, q)
        values.append(
            (
                p,
                q,
                *image.array(),
                surface_residual(image),
                float(np.linalg.norm(tabulated.array() - image.array())),
            )
        )
    return CommandResult(columns=CHANNEL_COLUMNS, records=rows(CHANNEL_COLUMNS, values))


@run.register
def _(request: EvolveRequest, settings: Settings) -> CommandResult:
    trajectory = evolve_boundary(
        request.p0,
        request.p1,
        request.branch,
        request.steps,
        rtol=settings.rtol,
        atol=settings.atol,
        max_step=settings.max_step,
        crossing_gap=settings.crossing_gap,
        eps=settings.eps_sing,
        tol_traj=settings.tol_traj,
    )
    values = [
        (
            sample.p,
            *sample.bloch().array(),
            *sample.distribution.array(),
            distribution_entropy(sample.distribution),
            von_neumann_entropy(sample.rho),
        )
        for sample in trajectory.samples
    ]
    return CommandResult(columns=EVOLVE_COLUMNS, records=rows(EVOLVE_COLUMNS, values))


@run.register
def _(request: CheckRequest, settings: Settings) -> CommandResult:
    passed = run_suites(request.suites, settings)
    values = [tuple(name.split(".", 1)) for name in passed]
    return CommandResult(columns=CHECK_COLUMNS, records=rows(CHECK_COLUMNS, values))
