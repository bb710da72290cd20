"""
Single-qubit noise channels in Kraus form and their action on the SIC potato chip.
"""
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, validator

from .chip import ChipPoint, chip_bloch, chip_grid, surface_residual
from .errors import OutOfRange
from .log import logger
from .phase_space import SQRT3
from .qubit import (
    IDENTITY,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    BlochVector,
    DensityMatrix,
    bloch_to_density,
    density_to_bloch,
    frozen_array,
)
from .settings import TOL_ALG

Reparametrization = Callable[[float, float, float], Tuple[float, float]]


class ChannelName(str, Enum):
    BIT_FLIP = "BitFlip"
    PHASE_FLIP = "PhaseFlip"
    BIT_PHASE_FLIP = "BitPhaseFlip"
    DEPOLARIZING = "Depolarizing"
    AMPLITUDE_DAMPING = "AmplitudeDamping"
    PHASE_DAMPING = "PhaseDamping"


class KrausChannel(BaseModel, frozen=True, arbitrary_types_allowed=True):
    name: ChannelName
    xi: float
    kraus: np.ndarray

    @validator("kraus", pre=True)
    def _stack_2x2(cls, value):
        array = frozen_array(value)
        if array.ndim != 3 or array.shape[1:] != (2, 2):
            raise ValueError(f"expected a stack of 2x2 matrices, got {array.shape}")
        return array

    def completeness_error(self) -> float:
        total = np.einsum("kba,kbc->ac", self.kraus.conj(), self.kraus)
        return float(np.max(np.abs(total - IDENTITY)))


class Witness(BaseModel, frozen=True):
    p: float
    q: float
    xi: float
    residual: float


class ChipPreservation(BaseModel, frozen=True, arbitrary_types_allowed=True):
    name: ChannelName
    preserved: bool
    reparametrize: Optional[Reparametrization] = None
    witness: Optional[Witness] = None


def _check_xi(xi: float) -> None:
    if not 0 <= xi <= 1:
        raise OutOfRange(f"Error rate xi={xi} outside [0, 1]")


def make_channel(name: ChannelName, xi: float) -> KrausChannel:
    _check_xi(xi)
    name = ChannelName(name)
    keep = np.sqrt(1 - xi)
    if name == ChannelName.BIT_FLIP:
        kraus = [np.sqrt(xi) * SIGMA_X, keep * IDENTITY]
    elif name == ChannelName.PHASE_FLIP:
        kraus = [np.sqrt(xi) * SIGMA_Z, keep * IDENTITY]
    elif name == ChannelName.BIT_PHASE_FLIP:
        kraus = [np.sqrt(xi) * SIGMA_Y, keep * IDENTITY]
    elif name == ChannelName.DEPOLARIZING:
        kraus = [np.sqrt(xi / 4) * sigma for sigma in (SIGMA_X, SIGMA_Y, SIGMA_Z)]
        kraus.append(np.sqrt(1 - 3 * xi / 4) * IDENTITY)
    else:
        damped = (1 - keep) / 2 * SIGMA_Z + (1 + keep) / 2 * IDENTITY
        if name == ChannelName.AMPLITUDE_DAMPING:
            jump = np.sqrt(xi) / 2 * (SIGMA_X + 1j * SIGMA_Y)
        else:
            jump = np.sqrt(xi) / 2 * (IDENTITY - SIGMA_Z)
        kraus = [damped, jump]
    return KrausChannel(name=name, xi=xi, kraus=kraus)


def apply_channel(ch: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    """sum_k K rho K^dagger"""
    entries = np.einsum("kab,bc,kdc->ad", ch.kraus, rho.entries, ch.kraus.conj())
    return DensityMatrix(entries=entries)


def bloch_action(name: ChannelName, xi: float) -> Tuple[np.ndarray, np.ndarray]:
    """Affine Bloch-ball map r -> M r + c of a channel."""
    _check_xi(xi)
    name = ChannelName(name)
    shrink, keep = 1 - 2 * xi, np.sqrt(1 - xi)
    shift = np.zeros(3)
    if name == ChannelName.BIT_FLIP:
        scale = [1, shrink, shrink]
    elif name == ChannelName.PHASE_FLIP:
        scale = [shrink, shrink, 1]
    elif name == ChannelName.BIT_PHASE_FLIP:
        scale = [shrink, 1, shrink]
    elif name == ChannelName.DEPOLARIZING:
        scale = [1 - xi] * 3
    elif name == ChannelName.AMPLITUDE_DAMPING:
        scale = [keep, keep, 1 - xi]
        shift[2] = xi
    else:
        scale = [keep, keep, 1]
    return np.diag(scale).astype(float), shift


def chip_image(name: ChannelName, xi: float, p: float, q: float) -> BlochVector:
    """
    Channel image of a chip point in the closed form tabulated for each channel,
    with f_p = 2p - 1, f_q = 2q - 1 and f_xi = 2 xi - 1.
    """
    _check_xi(xi)
    name = ChannelName(name)
    for label, value in (("p", p), ("q", q)):
        if not 0 <= value <= 1:
            raise OutOfRange(f"{label}={value} outside [0, 1]")
    fp, fq, fxi = 2 * p - 1, 2 * q - 1, 2 * xi - 1
    keep = np.sqrt(1 - xi)
    table = {
        ChannelName.BIT_FLIP: (-fq, -fp * fq * fxi, fp * fxi),
        ChannelName.PHASE_FLIP: (fq * fxi, -fp * fq * fxi, -fp),
        ChannelName.BIT_PHASE_FLIP: (-fq * fxi, fp * fq, fp * fxi),
        ChannelName.DEPOLARIZING: (-fq * (1 - xi), fp * fq * (1 - xi), -fp * (1 - xi)),
        ChannelName.AMPLITUDE_DAMPING: (
            -fq * (1 - xi),
            fp * fq * keep,
            xi / SQRT3 - fp * (1 - xi),
        ),
        ChannelName.PHASE_DAMPING: (-fq * keep, fp * fq * keep, -fp),
    }
    return BlochVector.from_array(SQRT3 * np.array(table[name]))


def kraus_chip_image(name: ChannelName, xi: float, p: float, q: float) -> BlochVector:
    """Channel image of a chip point through the Kraus operators."""
    rho = bloch_to_density(chip_bloch(ChipPoint(p=p, q=q)))
    return density_to_bloch(apply_channel(make_channel(name, xi), rho))


def table_residual(name: ChannelName, xi: float, grid: int = 20) -> float:
    """Largest distance between the tabulated closed form and the Kraus path over a chip grid."""
    worst = 0.0
    for p, q in chip_grid(grid):
        delta = chip_image(name, xi, p, q).array() - kraus_chip_image(name, xi, p, q).array()
        worst = max(worst, float(np.linalg.norm(delta)))
    logger.debug(
        "Closed form vs Kraus path",
        extra={"channel": ChannelName(name).value, "xi": xi, "residual": worst},
    )
    return worst


REPARAMETRIZATIONS: Dict[ChannelName, Reparametrization] = {
    ChannelName.BIT_FLIP: lambda p, q, xi: (p + xi * (1 - 2 * p), q),
    ChannelName.PHASE_FLIP: lambda p, q, xi: (p, q + xi * (1 - 2 * q)),
    ChannelName.PHASE_DAMPING: lambda p, q, xi: (
        p,
        (1 - np.sqrt(1 - xi) + 2 * q * np.sqrt(1 - xi)) / 2,
    ),
}


def find_witness(name: ChannelName, xi: float, grid: int = 20) -> Witness:
    """Chip grid point whose channel image is farthest from the chip surface."""
    best = None
    for p, q in chip_grid(grid):
        residual = surface_residual(kraus_chip_image(name, xi, p, q))
        if best is None or abs(residual) > abs(best.residual):
            best = Witness(p=p, q=q, xi=xi, residual=residual)
    return best


def preserves_chip(
    name: ChannelName, xi: float = 1 / 3, grid: int = 20, tol: float = TOL_ALG
) -> ChipPreservation:
    """
    Whether the channel maps the chip into itself.

    Preserving channels carry the (p, q, xi) -> (p', q') map that relabels the
    image as a chip point; the others carry the grid point that leaves the
    chip surface by the largest residual at this xi.
    """
    name = ChannelName(name)
    if name in REPARAMETRIZATIONS:
        return ChipPreservation(
            name=name, preserved=True, reparametrize=REPARAMETRIZATIONS[name]
        )
    witness = find_witness(name, xi, grid)
    return ChipPreservation(
        name=name, preserved=abs(witness.residual) <= tol, witness=witness
    )
