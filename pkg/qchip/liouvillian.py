"""
Boundary-confined evolution on the Wootters potato chip.

The chip coordinate p plays the role of time. Two 2x2 transition generators
move the marginals P = {p, 1-p} and Q = {q, 1-q} along the chip border; their
Kronecker sum drives the 4-vector, and a pair of Lindblad jump operators
with opposite, sign-swapping rates drives the density matrix.
"""
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, validator
from scipy.integrate import solve_ivp
from scipy.linalg import expm, logm
from scipy.optimize import minimize_scalar
from scipy.stats import entropy

from .chip import Branch, ChipPoint, boundary_q, chip_bloch
from .errors import IntegrationFailure, OutOfRange, SingularParameter
from .log import logger
from .phase_space import BasisKind, ProbVector4
from .qubit import (
    IDENTITY,
    SIGMA_X,
    SIGMA_Z,
    BlochVector,
    DensityMatrix,
    bloch_distance,
    bloch_to_density,
    density_to_bloch,
    frozen_array,
)
from .settings import EPS_SING, TOL_ALG, TOL_TRAJ

_FLIP = np.array([[-1.0, 1.0], [1.0, -1.0]])
# P -> 1 - P across the crossing, Q unchanged
_CROSSING_ORDER = [2, 3, 0, 1]


class TransitionGenerator2(BaseModel, frozen=True, arbitrary_types_allowed=True):
    rate: float
    matrix: np.ndarray

    @validator("matrix", pre=True)
    def _real_2x2(cls, value):
        return frozen_array(value, dtype=float, shape=(2, 2))

    @classmethod
    def from_rate(cls, rate: float) -> "TransitionGenerator2":
        return cls(rate=rate, matrix=rate * _FLIP)


class JumpOperator(BaseModel, frozen=True, arbitrary_types_allowed=True):
    matrix: np.ndarray
    rate: float

    @validator("matrix", pre=True)
    def _complex_2x2(cls, value):
        return frozen_array(value, shape=(2, 2))


class TrajectorySample(BaseModel, frozen=True):
    p: float
    rho: DensityMatrix
    distribution: ProbVector4

    def bloch(self) -> BlochVector:
        return density_to_bloch(self.rho, tol=1e-9)


class Trajectory(BaseModel, frozen=True):
    samples: List[TrajectorySample]
    branch: Branch

    @validator("samples")
    def _monotonic(cls, value):
        ps = [sample.p for sample in value]
        if any(b <= a for a, b in zip(ps, ps[1:])):
            raise ValueError("sample parameters must increase strictly")
        return value


def _require_regular(p: float, eps: float) -> None:
    if not 0 < p < 1:
        raise OutOfRange(f"p={p} outside (0, 1)")
    if abs(p - 0.5) <= eps:
        raise SingularParameter(f"p={p} within {eps} of the singular point 1/2")


def _rate(p: float) -> float:
    return 1.0 if p <= 0.5 else -1.0


def marginal_generators(
    p: float, eps: float = EPS_SING
) -> Tuple[TransitionGenerator2, TransitionGenerator2]:
    """Generators with P' = L1 P and Q' = L2 Q along the chip border."""
    _require_regular(p, eps)
    x = 1 / (1 - 2 * p)
    y = -(1 - 2 * p) / (4 * p * (1 - p) * ((1 - p) ** 2 + p**2))
    return TransitionGenerator2.from_rate(x), TransitionGenerator2.from_rate(y)


def combined_generator(p: float, eps: float = EPS_SING) -> np.ndarray:
    """
    Generator of the 4-vector P x Q. log(e^L1 kron e^L2) reduces to the
    Kronecker sum because L1 kron I and I kron L2 commute.
    """
    first, second = marginal_generators(p, eps)
    return np.kron(first.matrix, IDENTITY.real) + np.kron(IDENTITY.real, second.matrix)


def combined_generator_closed_form(p: float, eps: float = EPS_SING) -> np.ndarray:
    _require_regular(p, eps)
    pp = (p - 1) * p
    diagonal = (8 * pp * (pp + 1) + 1) / (4 * pp * (2 * p - 1) * (2 * pp + 1))
    inner = (1 - 2 * p) / (4 * pp * (2 * pp + 1))
    outer = 1 / (1 - 2 * p)
    return np.array(
        [
            [diagonal, inner, outer, 0],
            [inner, diagonal, 0, outer],
            [outer, 0, diagonal, inner],
            [0, outer, inner, diagonal],
        ]
    )


def combined_generator_from_log(p: float, eps: float = EPS_SING) -> np.ndarray:
    first, second = marginal_generators(p, eps)
    return np.real(logm(np.kron(expm(first.matrix), expm(second.matrix))))


def is_stochastic(matrix: np.ndarray, tol: float = TOL_ALG) -> bool:
    """Non-negative entries and unit column sums."""
    matrix = np.asarray(matrix)
    return bool(matrix.min() >= -tol and np.allclose(matrix.sum(axis=0), 1, atol=tol))


def is_backward_stochastic(matrix: np.ndarray, tol: float = TOL_ALG) -> bool:
    """exp(-A) for a stochastic exp(A)."""
    return is_stochastic(np.linalg.inv(matrix), tol)


def jump_operators(
    p: float, eps: float = EPS_SING
) -> Tuple[JumpOperator, JumpOperator]:
    """
    Jump operators and their rates. gamma_1 = -gamma_2 is +1 up to p = 1/2 and -1
    beyond, and |1 - 2p| replaces 1 - 2p so both operators stay real.
    """
    _require_regular(p, eps)
    gap = abs(1 - 2 * p)
    gamma = _rate(p)
    first = (IDENTITY + SIGMA_Z) / np.sqrt(gap)
    second = 0.5 * np.sqrt(gap / (p * (1 - p) * (1 - 2 * p * (1 - p)))) * SIGMA_X
    return JumpOperator(matrix=first, rate=gamma), JumpOperator(matrix=second, rate=-gamma)


def _dissipator(jump: np.ndarray, rho: np.ndarray) -> np.ndarray:
    dagger = jump.conj().T
    decay = dagger @ jump
    return jump @ rho @ dagger - 0.5 * (decay @ rho + rho @ decay)


def _rhs(p: float, rho: np.ndarray, eps: float) -> np.ndarray:
    return sum(
        op.rate * _dissipator(op.matrix, rho) for op in jump_operators(p, eps)
    )


def lindblad_rhs(p: float, rho: DensityMatrix, eps: float = EPS_SING) -> np.ndarray:
    """d rho / dp as the rate-weighted sum of the two dissipators."""
    return _rhs(p, rho.entries, eps)


def boundary_state(p: float, branch: Branch) -> DensityMatrix:
    q = boundary_q(p, branch, BasisKind.WOOTTERS)
    return bloch_to_density(chip_bloch(ChipPoint(p=p, q=q, basis_kind=BasisKind.WOOTTERS)))


def boundary_distribution(p: float, branch: Branch) -> ProbVector4:
    return ProbVector4.outer(p, boundary_q(p, branch, BasisKind.WOOTTERS))


def chip_entropy(p: float, branch: Branch = Branch.MINUS) -> float:
    """Shannon entropy in bits of P x Q on the Wootters chip border."""
    if not 0 < p < 1:
        raise OutOfRange(f"p={p} outside (0, 1)")
    return float(entropy(boundary_distribution(p, branch).array(), base=2))


def max_chip_entropy(branch: Branch = Branch.MINUS) -> Tuple[float, float]:
    """(p, H) of the entropy maximum on the left lobe; the right lobe mirrors it."""
    result = minimize_scalar(
        lambda p: -chip_entropy(p, branch),
        bounds=(1e-9, 0.5),
        method="bounded",
        options={"xatol": 1e-10},
    )
    return float(result.x), float(-result.fun)


def _pack(rho: np.ndarray, distribution: np.ndarray) -> np.ndarray:
    return np.concatenate([rho.reshape(4), distribution.astype(complex)])


def _unpack(state: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    return state[:4].reshape(2, 2), np.real(state[4:])


def _reflect(state: np.ndarray) -> np.ndarray:
    rho, distribution = _unpack(state)
    return _pack(SIGMA_Z @ rho @ SIGMA_Z, distribution[_CROSSING_ORDER])


def _integrate(start: float, stop: float, state: np.ndarray, points: np.ndarray, eps, rtol, atol, max_step):
    def fun(p, y):
        rho, distribution = y[:4].reshape(2, 2), y[4:]
        return np.concatenate(
            [_rhs(p, rho, eps).reshape(4), combined_generator(p, eps) @ distribution]
        )

    t_eval = np.unique(np.concatenate([points, [start, stop]]))
    solution = solve_ivp(
        fun,
        (start, stop),
        state,
        method="RK45",
        t_eval=t_eval,
        rtol=rtol,
        atol=atol,
        max_step=max_step,
    )
    if not solution.success:
        raise IntegrationFailure(f"Integration over [{start}, {stop}] failed: {solution.message}")
    logger.debug(
        "Integrated boundary segment",
        extra={"start": start, "stop": stop, "evaluations": int(solution.nfev)},
    )
    return dict(zip(solution.t, solution.y.T))


def evolve_boundary(
    p0: float,
    p1: float,
    branch: Branch = Branch.MINUS,
    steps: int = 1000,
    *,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    max_step: float = 1e-2,
    crossing_gap: float = 5e-5,
    eps: float = EPS_SING,
    tol_traj: float = TOL_TRAJ,
) -> Trajectory:
    """
    Integrate the master equation along the chip border from p0 to p1.

    The generators diverge at p = 1/2. A run that crosses it stops at
    1/2 - crossing_gap, continues from the reflected state at 1/2 + crossing_gap
    (sigma_z conjugation, P -> 1 - P), and fills grid points inside the gap by
    linear interpolation between the two sides.
    """
    if not 0 < p0 <= p1 < 1:
        raise OutOfRange(f"Need 0 < p0 <= p1 < 1, got p0={p0}, p1={p1}")
    if steps < 1:
        raise OutOfRange(f"steps={steps} must be positive")

    branch = Branch(branch)
    initial = _pack(boundary_state(p0, branch).entries, boundary_distribution(p0, branch).array())
    if p0 == p1:
        return Trajectory(samples=[_sample(p0, initial)], branch=branch)
    for end in (p0, p1):
        if abs(end - 0.5) <= crossing_gap:
            raise SingularParameter(
                f"Endpoint {end} within the crossing gap {crossing_gap} around 1/2"
            )

    grid = np.linspace(p0, p1, steps + 1)
    if np.any(np.diff(grid) <= 0):
        raise OutOfRange(
            f"{steps} steps over [{p0}, {p1}] are finer than float resolution"
        )
    lo, hi = 0.5 - crossing_gap, 0.5 + crossing_gap
    options = dict(eps=eps, rtol=rtol, atol=atol, max_step=max_step)

    if p1 < lo or p0 > hi:
        states = _integrate(p0, p1, initial, grid, **options)
    else:
        left = _integrate(p0, lo, initial, grid[grid < lo], **options)
        crossed = _reflect(left[lo])
        right = _integrate(hi, p1, crossed, grid[grid > hi], **options)
        states = {**left, **right}
        for p in grid[(grid >= lo) & (grid <= hi)]:
            weight = (p - lo) / (hi - lo)
            states[p] = (1 - weight) * left[lo] + weight * crossed
        logger.debug("Crossed singular point", extra={"gap": crossing_gap})

    samples = [_sample(p, states[p]) for p in grid]
    _verify(samples, branch, tol_traj)
    return Trajectory(samples=samples, branch=branch)


def _sample(p: float, state: np.ndarray) -> TrajectorySample:
    rho, distribution = _unpack(state)
    return TrajectorySample(
        p=float(p),
        rho=DensityMatrix(entries=rho),
        distribution=ProbVector4.from_array(distribution),
    )


def _verify(samples: List[TrajectorySample], branch: Branch, tol: float) -> None:
    for sample in samples:
        expected = chip_bloch(
            ChipPoint(
                p=sample.p,
                q=boundary_q(sample.p, branch, BasisKind.WOOTTERS),
                basis_kind=BasisKind.WOOTTERS,
            )
        )
        deviation = bloch_distance(sample.bloch(), expected)
        if deviation > tol:
            raise IntegrationFailure(
                f"Sample at p={sample.p} is {deviation} from the chip border (tolerance {tol})"
            )


def distribution_entropy(distribution: ProbVector4) -> float:
    return float(entropy(np.clip(distribution.array(), 0.0, None), base=2))
