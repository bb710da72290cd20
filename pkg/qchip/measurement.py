"""
SIC-POVM, coarse-grained two-outcome POVMs and reconstruction of chip states
from two Pauli projective measurements.
"""
from enum import Enum
from functools import lru_cache
from typing import Tuple

import numpy as np
from pydantic import BaseModel, validator

from .chip import Membership, Orientation, chip_membership
from .errors import OutOfRange, Unphysical
from .phase_space import (
    SQRT3,
    BasisKind,
    ProbVector4,
    basis,
    bloch_to_prob,
    prob_to_bloch,
    prob_to_density,
    rescale_projective,
)
from .qubit import (
    IDENTITY,
    PAULI,
    BlochVector,
    DensityMatrix,
    density_to_bloch,
    frozen_array,
    is_physical,
)
from .settings import TOL_ALG, TOL_PHYS


class Axis(str, Enum):
    X = "X"
    Y = "Y"
    Z = "Z"

    @property
    def index(self) -> int:
        return "XYZ".index(self.value)


# SIC elements whose sum forms the first outcome of each coarse POVM
COARSE_PAIRS = {Axis.X: (0, 2), Axis.Y: (0, 3), Axis.Z: (0, 1)}

# chip orientation fixed by which Bloch component is the product of the other two
AXES_ORIENTATION = {
    frozenset((Axis.Z, Axis.X)): Orientation.O1,
    frozenset((Axis.Y, Axis.Z)): Orientation.O2,
    frozenset((Axis.X, Axis.Y)): Orientation.O3,
}


class Povm(BaseModel, frozen=True, arbitrary_types_allowed=True):
    elements: np.ndarray

    @validator("elements", pre=True)
    def _stack_2x2(cls, value):
        array = frozen_array(value)
        if array.ndim != 3 or array.shape[1:] != (2, 2):
            raise ValueError(f"expected a stack of 2x2 matrices, got {array.shape}")
        return array

    def probabilities(self, rho: DensityMatrix) -> np.ndarray:
        return np.real(np.einsum("iab,ba->i", self.elements, rho.entries))

    def completeness_error(self) -> float:
        return float(np.max(np.abs(self.elements.sum(axis=0) - IDENTITY)))

    def is_positive(self, tol: float = TOL_PHYS) -> bool:
        return all(np.linalg.eigvalsh(element).min() >= -tol for element in self.elements)


class MeasurementRecord(BaseModel, frozen=True):
    axis: Axis
    probs: Tuple[float, float]

    @validator("probs")
    def _distribution(cls, value):
        if any(not -TOL_ALG <= prob <= 1 + TOL_ALG for prob in value):
            raise ValueError(f"probabilities {value} outside [0, 1]")
        if abs(sum(value) - 1) > TOL_ALG:
            raise ValueError(f"probabilities {value} do not sum to 1")
        return value


class Reconstruction(BaseModel, frozen=True):
    p: float
    q: float
    axes: Tuple[Axis, Axis]
    prob: ProbVector4
    rho: DensityMatrix
    bloch: BlochVector
    physical: bool
    on_chip: bool


@lru_cache(maxsize=None)
def _qbism_elements() -> np.ndarray:
    c = np.sqrt(6)
    lo, hi = 3 - SQRT3, 3 + SQRT3
    phases = (-3 * np.pi / 4, np.pi / 4, 3 * np.pi / 4, -np.pi / 4)
    diagonals = ((lo, hi), (lo, hi), (hi, lo), (hi, lo))
    return np.array(
        [
            [[a, c * np.exp(1j * phase)], [c * np.exp(-1j * phase), b]]
            for (a, b), phase in zip(diagonals, phases)
        ]
    ) / 12


def qbism_povm() -> Povm:
    return Povm(elements=_qbism_elements())


def coarse_povm(axis: Axis) -> Povm:
    i, j = COARSE_PAIRS[axis]
    first = _qbism_elements()[i] + _qbism_elements()[j]
    return Povm(elements=[first, IDENTITY - first])


def pauli_probabilities(rho: DensityMatrix, axis: Axis, tol: float = TOL_PHYS) -> MeasurementRecord:
    """Projective Pauli outcomes ordered as ((1 - c)/2, (1 + c)/2)."""
    if not is_physical(rho, tol):
        raise Unphysical("Pauli probabilities need a physical state")
    # is_physical allows |r| up to 1 + tol
    component = float(np.clip(density_to_bloch(rho).array()[axis.index], -1.0, 1.0))
    return MeasurementRecord(axis=axis, probs=((1 - component) / 2, (1 + component) / 2))


def marginals(prob: ProbVector4, tol: float = TOL_ALG) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """Row sums (p1+p2, p3+p4) and column sums (p1+p3, p2+p4) of the 2x2 table."""
    table = prob.checked(tol).table()
    rows, cols = table.sum(axis=1), table.sum(axis=0)
    return (float(rows[0]), float(rows[1])), (float(cols[0]), float(cols[1]))


def reconstruct_from_projective(
    pz: float,
    px: float,
    axes: Tuple[Axis, Axis] = (Axis.Z, Axis.X),
    strict: bool = False,
    tol: float = TOL_PHYS,
) -> Reconstruction:
    """
    Rebuild a chip state from two Pauli first-outcome probabilities.

    ``pz`` and ``px`` are the first-outcome probabilities along ``axes[0]`` and
    ``axes[1]``; with the default (Z, X) pair they rescale to the chip
    coordinates p and q. Other pairs land on the chip whose surface equation
    makes the third Bloch component the product of the two measured ones.
    """
    for name, value in (("pz", pz), ("px", px)):
        if not 0 <= value <= 1:
            raise OutOfRange(f"{name}={value} outside [0, 1]")
    orientation = AXES_ORIENTATION.get(frozenset(axes))
    if orientation is None:
        raise OutOfRange(f"Axis pair {axes} must name two different axes")

    p, q = rescale_projective(pz), rescale_projective(px)
    if orientation == Orientation.O1:
        if axes[0] == Axis.X:
            p, q = q, p
        prob = ProbVector4.outer(p, q)
        bloch = prob_to_bloch(prob)
    else:
        components = np.zeros(3)
        for axis, first in zip(axes, (pz, px)):
            components[axis.index] = 1 - 2 * first
        (missing,) = set(range(3)) - {axis.index for axis in axes}
        known = [components[axis.index] for axis in axes]
        components[missing] = known[0] * known[1] / SQRT3
        bloch = BlochVector.from_array(components)
        prob = bloch_to_prob(bloch)

    rho = prob_to_density(prob, basis(BasisKind.QBISM), tol=1e-9)
    physical = is_physical(rho, tol)
    if strict and not physical:
        raise Unphysical(
            f"No chip state has Pauli probabilities {axes[0].value}={pz}, {axes[1].value}={px}"
        )
    on_chip = chip_membership(bloch, orientation, tol) != Membership.OUTSIDE
    return Reconstruction(
        p=p,
        q=q,
        axes=axes,
        prob=prob,
        rho=rho,
        bloch=bloch,
        physical=physical,
        on_chip=on_chip,
    )
