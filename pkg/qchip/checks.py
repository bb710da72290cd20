"""
Executable invariant suites.

Every closed-form claim the library relies on is registered here under a
suite name and can be run from the command line. Randomized checks draw from
a numpy generator seeded from the settings; the seed is logged.
"""
from collections import defaultdict
from typing import Callable, Dict, Iterable, List

import numpy as np
from exceptiongroup import ExceptionGroup
from pydantic import BaseModel
from scipy.linalg import expm

from . import channels, chip, liouvillian, measurement, phase_space, qubit
from .chip import Branch, ChipPoint, Orientation, Permutation
from .errors import CheckFailure, UsageError
from .log import logger
from .measurement import Axis
from .phase_space import SQRT3, BasisKind, ProbVector4
from .qubit import BlochVector
from .settings import Settings

SUITES: Dict[str, List[Callable[["CheckContext"], None]]] = defaultdict(list)


class CheckContext(BaseModel, frozen=True, arbitrary_types_allowed=True):
    suite: str
    settings: Settings
    rng: np.random.Generator

    @property
    def samples(self) -> int:
        return self.settings.check_samples

    def expect(self, condition: bool, check: str, message: str) -> None:
        if not condition:
            raise CheckFailure(self.suite, check, message)

    def within(self, error: float, limit: float, check: str, what: str) -> None:
        self.expect(error <= limit, check, f"{what}: error {error:.3e} exceeds {limit:.0e}")


def check(suite: str):
    def register(func):
        SUITES[suite].append(func)
        return func

    return register


def suite_names() -> List[str]:
    return sorted(SUITES)


def random_bloch(rng: np.random.Generator, count: int, radius: float = 1.0) -> np.ndarray:
    """Points uniform in a ball."""
    directions = rng.normal(size=(count, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    return directions * radius * rng.uniform(size=(count, 1)) ** (1 / 3)


def run_suites(names: Iterable[str], settings: Settings) -> List[str]:
    """
    Run the named suites ("all" runs every suite) and return the names of the
    checks that passed. Failures are raised together as an ExceptionGroup.
    """
    names = list(names) or ["all"]
    selected = suite_names() if "all" in names else names
    unknown = sorted(set(selected) - set(SUITES))
    if unknown:
        raise UsageError(f"Unknown suites: {', '.join(unknown)}")

    logger.info("Running checks", extra={"suites": selected, "seed": settings.seed})
    passed, failures = [], []
    for suite in selected:
        for index, func in enumerate(SUITES[suite]):
            # one stream per check, independent of which suites were selected
            ctx = CheckContext(
                suite=suite,
                settings=settings,
                rng=np.random.default_rng([settings.seed, suite_names().index(suite), index]),
            )
            try:
                func(ctx)
            except CheckFailure as e:
                failures.append(e)
            except Exception as e:
                failures.append(CheckFailure(suite, func.__name__, f"{type(e).__name__}: {e}"))
            else:
                passed.append(f"{suite}.{func.__name__}")
    if failures:
        raise ExceptionGroup(f"{len(failures)} check(s) failed", failures)
    return passed


# qubit-core


@check("qubit-core")
def density_round_trip(ctx: CheckContext):
    worst = 0.0
    for r in random_bloch(ctx.rng, ctx.samples):
        recovered = qubit.density_to_bloch(qubit.bloch_to_density(BlochVector.from_array(r)))
        worst = max(worst, float(np.max(np.abs(recovered.array() - r))))
    ctx.within(worst, 1e-12, "density_round_trip", "Bloch -> density -> Bloch")


@check("qubit-core")
def closed_form_eigenvalues(ctx: CheckContext):
    sic = phase_space.basis(BasisKind.QBISM)
    worst = 0.0
    for weights in ctx.rng.dirichlet(np.ones(4), size=ctx.samples):
        prob = ProbVector4.from_array(weights)
        rho = phase_space.prob_to_density(prob, sic)
        generic = np.linalg.eigvalsh(rho.entries)[::-1]
        for pair in (qubit.eigenvalues_2x2(rho), phase_space.sic_eigenvalues(prob)):
            closed = np.array([pair.lambda_plus, pair.lambda_minus])
            worst = max(worst, float(np.max(np.abs(closed - generic))))
    ctx.within(worst, 1e-10, "closed_form_eigenvalues", "closed form vs eigvalsh")


@check("qubit-core")
def physicality_matches_norm(ctx: CheckContext):
    for radius in np.concatenate([np.linspace(0.5, 1 - 1e-6, 25), np.linspace(1 + 1e-6, 1.5, 25)]):
        for direction in np.eye(3).tolist() + [[1 / SQRT3] * 3]:
            rho = qubit.bloch_to_density(BlochVector.from_array(radius * np.array(direction)))
            ctx.expect(
                qubit.is_physical(rho) == (radius <= 1),
                "physicality_matches_norm",
                f"is_physical disagrees with |r| = {radius}",
            )


# phase-space


@check("phase-space")
def rotation_is_orthogonal(ctx: CheckContext):
    matrix = phase_space.rotation_matrix(np.pi / 3).matrix
    expected = np.array([[3, 3, 3, 3], [-3, 5, -1, -1], [-3, -1, 5, -1], [-3, -1, -1, 5]]) / 6
    ctx.within(float(np.max(np.abs(matrix - expected))), 1e-12, "rotation_is_orthogonal", "entries")
    ctx.within(float(np.max(np.abs(matrix.T @ matrix - np.eye(4)))), 1e-12, "rotation_is_orthogonal", "M^T M")
    ctx.within(abs(np.linalg.det(matrix) - 1), 1e-12, "rotation_is_orthogonal", "determinant")


@check("phase-space")
def first_coordinate_is_half(ctx: CheckContext):
    matrix = phase_space.rotation_matrix(np.pi / 3).matrix
    weights = ctx.rng.dirichlet(np.ones(4), size=ctx.samples)
    worst = float(np.max(np.abs((weights @ matrix.T)[:, 0] - 0.5)))
    ctx.within(worst, 1e-12, "first_coordinate_is_half", "first rotated coordinate")


@check("phase-space")
def basis_round_trip(ctx: CheckContext):
    for kind in BasisKind:
        b = phase_space.basis(kind)
        worst = 0.0
        for r in random_bloch(ctx.rng, ctx.samples):
            rho = qubit.bloch_to_density(BlochVector.from_array(r))
            back = phase_space.prob_to_density(phase_space.density_to_prob(rho, b), b)
            worst = max(worst, float(np.max(np.abs(back.entries - rho.entries))))
        ctx.within(worst, 1e-12, "basis_round_trip", f"{kind.value} density round trip")


@check("phase-space")
def replacement_rules_are_inverse(ctx: CheckContext):
    for corner in np.eye(4):
        prob = ProbVector4.from_array(corner)
        back = phase_space.bloch_to_prob(phase_space.prob_to_bloch(prob))
        ctx.within(
            float(np.max(np.abs(back.array() - corner))),
            1e-12,
            "replacement_rules_are_inverse",
            f"corner {corner.tolist()}",
        )


@check("phase-space")
def sic_probabilities_in_insphere(ctx: CheckContext):
    sic = phase_space.basis(BasisKind.QBISM)
    for r in random_bloch(ctx.rng, ctx.samples):
        weights = phase_space.density_to_prob(
            qubit.bloch_to_density(BlochVector.from_array(r)), sic
        ).array()
        ctx.expect(
            weights.min() >= -1e-12 and weights.max() <= 0.5 + 1e-12,
            "sic_probabilities_in_insphere",
            f"weights {weights.tolist()} of a physical state leave [0, 1/2]",
        )


# chip-geometry


@check("chip-geometry")
def surface_inside_tetrahedron(ctx: CheckContext):
    for orientation in Orientation:
        for p in np.linspace(0, 1, 21):
            for q in np.linspace(0, 1, 21):
                point = chip.chip_surface(ChipPoint(p=p, q=q, orientation=orientation))
                weights = phase_space.simplex_unproject(point).array()
                ctx.expect(
                    weights.min() >= -1e-12,
                    "surface_inside_tetrahedron",
                    f"{orientation.value} point ({p}, {q}) leaves the tetrahedron",
                )


@check("chip-geometry")
def boundary_is_pure(ctx: CheckContext):
    for kind in BasisKind:
        lo, hi = chip.support_interval(kind)
        ctx.within(
            abs(lo - (1 - 1 / SQRT3) / 2) if kind == BasisKind.QBISM else lo,
            1e-12,
            "boundary_is_pure",
            "support endpoint",
        )
        for p in ctx.rng.uniform(lo, hi, size=1000):
            for branch in Branch:
                r = chip.boundary_bloch(p, branch, kind)
                ctx.within(abs(r.norm() - 1), 1e-10, "boundary_is_pure", f"{kind.value} p={p}")


@check("chip-geometry")
def boundary_on_insphere(ctx: CheckContext):
    lo, hi = chip.support_interval(BasisKind.QBISM)
    for p in np.linspace(lo, hi, 101):
        for branch in Branch:
            q = chip.boundary_q(p, branch)
            radius = chip.chip_surface(ChipPoint(p=p, q=q)).norm()
            ctx.within(abs(radius - 1 / (2 * SQRT3)), 1e-10, "boundary_on_insphere", f"p={p}")


@check("chip-geometry")
def phi_vanishes_only_on_chip(ctx: CheckContext):
    for p, q in chip.chip_grid(50):
        if 0 < p < 1 and 0 < q < 1:
            phi = chip.matthews_phi(ProbVector4.outer(p, q))
            ctx.within(abs(phi), 1e-12, "phi_vanishes_only_on_chip", f"chip point ({p}, {q})")
    for sign in (1, -1):
        phi = chip.matthews_phi(BlochVector(x=0, y=sign, z=0))
        ctx.within(abs(phi - sign / SQRT3), 1e-12, "phi_vanishes_only_on_chip", "pole")
    axis = np.linspace(-1, 1, 40)
    x, y, z = (c.ravel() for c in np.meshgrid(axis, axis, axis, indexing="ij"))
    inside = x**2 + y**2 + z**2 <= 1
    x, y, z = x[inside], y[inside], z[inside]
    phi = (SQRT3 * y - x * z) / np.sqrt((3 - x**2) * (3 - z**2))
    zero = np.abs(phi) < 1e-9
    worst = float(np.max(np.abs(SQRT3 * y[zero] - x[zero] * z[zero]), initial=0.0))
    ctx.within(worst, 1e-6, "phi_vanishes_only_on_chip", "phi-zero set vs surface")


@check("chip-geometry")
def factorize_recovers_parameters(ctx: CheckContext):
    for p, q in ctx.rng.uniform(size=(ctx.samples, 2)):
        found = chip.factorize(ProbVector4.outer(p, q))
        ctx.expect(found is not None, "factorize_recovers_parameters", f"({p}, {q}) not factorized")
        ctx.within(
            max(abs(found[0] - p), abs(found[1] - q)),
            1e-10,
            "factorize_recovers_parameters",
            f"({p}, {q})",
        )


@check("chip-geometry")
def permutations_connect_chips(ctx: CheckContext):
    targets = {
        Permutation.SIGMA1: Orientation.O2,
        Permutation.SIGMA2: Orientation.O2,
        Permutation.SIGMA3: Orientation.O3,
    }
    for p, q in ctx.rng.uniform(size=(100, 2)):
        product = ProbVector4.outer(p, q)
        for which, orientation in targets.items():
            r = phase_space.prob_to_bloch(chip.permute_orientation(product, which))
            ctx.within(
                abs(chip.surface_residual(r, orientation)),
                1e-12,
                "permutations_connect_chips",
                f"{which.value} image off {orientation.value}",
            )


# measurement


@check("measurement")
def povms_are_complete(ctx: CheckContext):
    for povm in [measurement.qbism_povm()] + [measurement.coarse_povm(a) for a in Axis]:
        ctx.within(povm.completeness_error(), 1e-12, "povms_are_complete", "sum of elements")
        ctx.expect(povm.is_positive(), "povms_are_complete", "element not positive")


@check("measurement")
def coarse_povm_rescales_pauli(ctx: CheckContext):
    worst = 0.0
    for r in random_bloch(ctx.rng, ctx.samples):
        rho = qubit.bloch_to_density(BlochVector.from_array(r))
        for axis in Axis:
            coarse = measurement.coarse_povm(axis).probabilities(rho)
            pauli = measurement.pauli_probabilities(rho, axis).probs
            # the Y pair lists the +y outcome first
            pauli = pauli[::-1] if axis == Axis.Y else pauli
            expected = [phase_space.rescale_projective(prob) for prob in pauli]
            worst = max(worst, float(np.max(np.abs(coarse - expected))))
    ctx.within(worst, 1e-12, "coarse_povm_rescales_pauli", "P(M) vs rescaled P(sigma)")


@check("measurement")
def worked_example(ctx: CheckContext):
    prob = ProbVector4.outer(1 / 3, 2 / 5)
    expected = np.array([2 / 15, 1 / 5, 4 / 15, 2 / 5])
    ctx.within(float(np.max(np.abs(prob.array() - expected))), 1e-12, "worked_example", "SIC weights")
    rho = phase_space.prob_to_density(prob, phase_space.basis(BasisKind.QBISM))
    pz = measurement.pauli_probabilities(rho, Axis.Z).probs
    px = measurement.pauli_probabilities(rho, Axis.X).probs
    ctx.within(abs(pz[0] - (3 - SQRT3) / 6), 1e-12, "worked_example", "Pauli Z")
    ctx.within(abs(px[0] - (5 - SQRT3) / 10), 1e-12, "worked_example", "Pauli X")
    rebuilt = measurement.reconstruct_from_projective(pz[0], px[0])
    ctx.within(
        float(np.max(np.abs(rebuilt.prob.array() - expected))), 1e-12, "worked_example", "reconstruction"
    )


@check("measurement")
def reconstruction_round_trip(ctx: CheckContext):
    points = chip.chip_grid(32)
    for index in ctx.rng.choice(len(points), size=1000):
        p, q = points[index]
        r = chip.chip_bloch(ChipPoint(p=p, q=q))
        rho = qubit.bloch_to_density(r)
        pz = measurement.pauli_probabilities(rho, Axis.Z).probs[0]
        px = measurement.pauli_probabilities(rho, Axis.X).probs[0]
        rebuilt = measurement.reconstruct_from_projective(pz, px)
        ctx.within(
            qubit.bloch_distance(rebuilt.bloch, r), 1e-10, "reconstruction_round_trip", f"({p}, {q})"
        )
    off_chip = qubit.bloch_to_density(BlochVector(x=0, y=1, z=0))
    rebuilt = measurement.reconstruct_from_projective(
        measurement.pauli_probabilities(off_chip, Axis.Z).probs[0],
        measurement.pauli_probabilities(off_chip, Axis.X).probs[0],
    )
    ctx.expect(
        qubit.bloch_distance(rebuilt.bloch, BlochVector(x=0, y=1, z=0)) > 0.1,
        "reconstruction_round_trip",
        "an off-chip state was reconstructed",
    )


# channels

AGREEING_CHANNELS = (
    channels.ChannelName.BIT_FLIP,
    channels.ChannelName.PHASE_FLIP,
    channels.ChannelName.DEPOLARIZING,
    channels.ChannelName.PHASE_DAMPING,
)


@check("channels")
def kraus_completeness(ctx: CheckContext):
    for name in channels.ChannelName:
        for xi in (0, 0.25, 0.5, 0.75, 1):
            ctx.within(
                channels.make_channel(name, xi).completeness_error(),
                1e-12,
                "kraus_completeness",
                f"{name.value} xi={xi}",
            )


@check("channels")
def preserving_channels_reparametrize(ctx: CheckContext):
    for name, reparametrize in channels.REPARAMETRIZATIONS.items():
        for xi in (0.1, 1 / 3, 0.7):
            for p, q in chip.chip_grid(20):
                image = channels.kraus_chip_image(name, xi, p, q)
                p2, q2 = reparametrize(p, q, xi)
                expected = chip.chip_bloch(ChipPoint(p=p2, q=q2))
                ctx.within(
                    qubit.bloch_distance(image, expected),
                    1e-12,
                    "preserving_channels_reparametrize",
                    f"{name.value} xi={xi} ({p}, {q})",
                )


@check("channels")
def other_channels_leave_chip(ctx: CheckContext):
    for name in channels.ChannelName:
        verdict = channels.preserves_chip(name, xi=ctx.settings.xi)
        if name in channels.REPARAMETRIZATIONS:
            ctx.expect(verdict.preserved, "other_channels_leave_chip", f"{name.value} not preserved")
        else:
            ctx.expect(
                not verdict.preserved and abs(verdict.witness.residual) > 1e-2,
                "other_channels_leave_chip",
                f"{name.value} has no witness above 1e-2",
            )


@check("channels")
def channel_outputs_physical(ctx: CheckContext):
    for name in channels.ChannelName:
        for xi in (0.25, 0.5, 1):
            ch = channels.make_channel(name, xi)
            for r in random_bloch(ctx.rng, 200):
                out = channels.apply_channel(ch, qubit.bloch_to_density(BlochVector.from_array(r)))
                ctx.expect(
                    qubit.density_to_bloch(out).norm() <= 1 + 1e-9,
                    "channel_outputs_physical",
                    f"{name.value} xi={xi} produced an unphysical state",
                )


@check("channels")
def closed_forms_match_kraus(ctx: CheckContext):
    for name in AGREEING_CHANNELS:
        residual = channels.table_residual(name, ctx.settings.xi)
        ctx.within(residual, 1e-12, "closed_forms_match_kraus", name.value)


# liouvillian


@check("liouvillian")
def generator_forms_agree(ctx: CheckContext):
    for p in np.concatenate([np.linspace(0.05, 0.375, 10), np.linspace(0.625, 0.95, 10)]):
        generator = liouvillian.combined_generator(p)
        ctx.within(
            float(np.max(np.abs(generator - liouvillian.combined_generator_closed_form(p)))),
            1e-9,
            "generator_forms_agree",
            f"closed form p={p}",
        )
        ctx.within(
            float(np.max(np.abs(generator - liouvillian.combined_generator_from_log(p)))),
            1e-9,
            "generator_forms_agree",
            f"matrix log p={p}",
        )
        ctx.within(
            float(np.max(np.abs(generator.sum(axis=0)))), 1e-12, "generator_forms_agree", "column sums"
        )


@check("liouvillian")
def generators_follow_border(ctx: CheckContext):
    step = 1e-6
    for p in (0.1, 0.25, 0.4, 0.6, 0.75, 0.9):
        first, second = liouvillian.marginal_generators(p)
        q = chip.boundary_q(p, Branch.MINUS, BasisKind.WOOTTERS)
        dq = (
            chip.boundary_q(p + step, Branch.MINUS, BasisKind.WOOTTERS)
            - chip.boundary_q(p - step, Branch.MINUS, BasisKind.WOOTTERS)
        ) / (2 * step)
        ctx.within(
            float(np.max(np.abs(first.matrix @ [p, 1 - p] - [1, -1]))), 1e-9, "generators_follow_border", f"P' p={p}"
        )
        ctx.within(
            float(np.max(np.abs(second.matrix @ [q, 1 - q] - [dq, -dq]))), 1e-6, "generators_follow_border", f"Q' p={p}"
        )


@check("liouvillian")
def stochastic_directions(ctx: CheckContext):
    for p in (0.1, 0.3, 0.7, 0.9):
        first, second = (expm(g.matrix) for g in liouvillian.marginal_generators(p))
        forward, backward = (first, second) if p < 0.5 else (second, first)
        ctx.expect(liouvillian.is_stochastic(forward), "stochastic_directions", f"p={p} forward")
        ctx.expect(
            liouvillian.is_backward_stochastic(backward), "stochastic_directions", f"p={p} backward"
        )


@check("liouvillian")
def trajectories_track_border(ctx: CheckContext):
    s = ctx.settings
    for branch in Branch:
        trajectory = liouvillian.evolve_boundary(
            s.p0,
            s.p1,
            branch,
            s.steps,
            rtol=s.rtol,
            atol=s.atol,
            max_step=s.max_step,
            crossing_gap=s.crossing_gap,
            eps=s.eps_sing,
            tol_traj=s.tol_traj,
        )
        for sample in trajectory.samples:
            ctx.within(
                qubit.von_neumann_entropy(sample.rho), 1e-6, "trajectories_track_border", f"entropy p={sample.p}"
            )
            ctx.within(
                abs(sample.distribution.array().sum() - 1), 1e-9, "trajectories_track_border", "normalization"
            )
            shannon = liouvillian.distribution_entropy(sample.distribution)
            ctx.expect(
                1 - 1e-6 <= shannon <= 1.35226 + 1e-3,
                "trajectories_track_border",
                f"entropy {shannon} out of bounds at p={sample.p}",
            )


@check("liouvillian")
def entropy_bounds(ctx: CheckContext):
    ctx.within(abs(liouvillian.chip_entropy(0.5) - 1), 1e-9, "entropy_bounds", "minimum at p=1/2")
    _, peak = liouvillian.max_chip_entropy()
    ctx.within(abs(peak - 1.35226), 1e-4, "entropy_bounds", "maximum")
