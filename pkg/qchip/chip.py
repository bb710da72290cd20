"""
Potato chips: the factorizable probability 4-vectors inside the physical insphere.

A chip point (p, q) is the outer product of two binary distributions {p, 1-p}
and {q, 1-q}. Three orientations exist, related by permutations of the
4-vector entries. In Bloch coordinates of the SIC chart they are the surfaces

    O1: sqrt(3) y = x z
    O2: sqrt(3) x = y z
    O3: sqrt(3) z = x y

In the Wootters chart the same products land on y = x z, z = x y and x = y z.
"""
from enum import Enum
from functools import lru_cache, singledispatch
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from .errors import DegenerateMarginal, OutOfRange, OutsideSupport, QchipError
from .log import logger
from .phase_space import (
    SQRT3,
    BasisKind,
    Mode,
    ProbVector4,
    Tetra3Point,
    basis,
    bloch_to_prob,
    prob_to_bloch,
    prob_to_density,
    simplex_project,
)
from .qubit import BlochVector, density_to_bloch
from .settings import TOL_ALG, TOL_PHYS


class Orientation(str, Enum):
    O1 = "O1"
    O2 = "O2"
    O3 = "O3"


class Branch(str, Enum):
    PLUS = "Plus"
    MINUS = "Minus"

    @property
    def sign(self) -> int:
        return 1 if self == Branch.PLUS else -1


class Permutation(str, Enum):
    SIGMA1 = "Sigma1"
    SIGMA2 = "Sigma2"
    SIGMA3 = "Sigma3"


class Membership(str, Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    OUTSIDE = "Outside"


class ChipPoint(BaseModel, frozen=True):
    p: float
    q: float
    orientation: Orientation = Orientation.O1
    basis_kind: BasisKind = BasisKind.QBISM


# new position of each outer-product entry, zero based
ORIENTATION_ORDER: Dict[Orientation, Tuple[int, ...]] = {
    Orientation.O1: (0, 1, 2, 3),
    Orientation.O2: (0, 3, 1, 2),
    Orientation.O3: (2, 0, 1, 3),
}

PERMUTATION_SWAPS: Dict[Permutation, Tuple[int, int]] = {
    Permutation.SIGMA1: (0, 1),
    Permutation.SIGMA2: (2, 3),
    Permutation.SIGMA3: (1, 3),
}


def _check_unit(name: str, value: float) -> None:
    if not 0 <= value <= 1:
        raise OutOfRange(f"{name}={value} outside [0, 1]")


def _closed_form_surface(orientation: Orientation, p: float, q: float) -> np.ndarray:
    if orientation == Orientation.O1:
        return np.array(
            [
                -1 / 6 + p - 4 * p * q / 3,
                -1 / 6 + q - 4 * p * q / 3,
                5 / 6 - p - q + 2 * p * q / 3,
            ]
        )
    if orientation == Orientation.O2:
        return np.array(
            [
                -1 / 6 + q - 4 * p * q / 3,
                5 / 6 - p - q + 2 * p * q / 3,
                -1 / 6 + p - 4 * p * q / 3,
            ]
        )
    return np.array(
        [
            -1 / 6 - p / 3 + q - 2 * p * q / 3,
            -1 / 6 - p / 3 + 4 * p * q / 3,
            5 / 6 - 4 * p / 3 - q + 4 * p * q / 3,
        ]
    )


def orient(product: np.ndarray, orientation: Orientation) -> np.ndarray:
    oriented = np.empty(4)
    oriented[list(ORIENTATION_ORDER[orientation])] = product
    return oriented


@lru_cache(maxsize=None)
def verify_orientations() -> bool:
    """
    Check once that each entry permutation reproduces its closed-form surface
    and satisfies its rank-1 condition.
    """
    for orientation in Orientation:
        for p, q in ((1 / 3, 2 / 5), (0.2, 0.9), (0.75, 0.1)):
            oriented = orient(np.kron([p, 1 - p], [q, 1 - q]), orientation)
            projected = simplex_project(ProbVector4.from_array(oriented)).array()
            if not np.allclose(projected, _closed_form_surface(orientation, p, q), atol=1e-12):
                raise QchipError(f"Entry order for {orientation.value} does not match its surface")
            r = prob_to_bloch(ProbVector4.from_array(oriented))
            if abs(surface_residual(r, orientation)) > 1e-12:
                raise QchipError(f"Entry order for {orientation.value} leaves its chip")
    logger.debug("Verified chip orientations")
    return True


def oriented_product(point: ChipPoint) -> ProbVector4:
    _check_unit("p", point.p)
    _check_unit("q", point.q)
    verify_orientations()
    return ProbVector4.from_array(
        orient(np.kron([point.p, 1 - point.p], [point.q, 1 - point.q]), point.orientation)
    )


def chip_surface(point: ChipPoint) -> Tetra3Point:
    return simplex_project(oriented_product(point))


def support_interval(basis_kind: BasisKind) -> Tuple[float, float]:
    if basis_kind == BasisKind.QBISM:
        return (1 - 1 / SQRT3) / 2, (1 + 1 / SQRT3) / 2
    return 0.0, 1.0


def _radicand(p: float, basis_kind: BasisKind) -> float:
    denominator = 1 - 2 * p + 2 * p**2
    if basis_kind == BasisKind.QBISM:
        return (-1 + 6 * p - 6 * p**2) / (3 * denominator)
    return 2 * p * (1 - p) / denominator


def boundary_q(
    p: float, branch: Branch, basis_kind: BasisKind = BasisKind.QBISM, tol: float = TOL_ALG
) -> float:
    """q on the pure-state border of the chip at p."""
    _check_unit("p", p)
    radicand = _radicand(p, basis_kind)
    if radicand < -tol:
        raise OutsideSupport(
            f"p={p} outside the {basis_kind.value} chip support {support_interval(basis_kind)}"
        )
    return 0.5 * (1 + branch.sign * np.sqrt(max(radicand, 0.0)))


def chip_bloch(point: ChipPoint) -> BlochVector:
    _check_unit("p", point.p)
    _check_unit("q", point.q)
    a, b = 2 * point.p - 1, 2 * point.q - 1
    if point.orientation == Orientation.O1:
        if point.basis_kind == BasisKind.WOOTTERS:
            return BlochVector(x=a, y=a * b, z=b)
        return BlochVector(x=-SQRT3 * b, y=SQRT3 * a * b, z=-SQRT3 * a)
    if point.basis_kind == BasisKind.WOOTTERS:
        return density_to_bloch(prob_to_density(oriented_product(point), basis(BasisKind.WOOTTERS)))
    return prob_to_bloch(oriented_product(point))


def boundary_bloch(
    p: float, branch: Branch, basis_kind: BasisKind = BasisKind.QBISM, tol: float = TOL_ALG
) -> BlochVector:
    """
    Pure border state of the O1 chip at p.

    SIC chart with R = sqrt(2 / (1 + 2p(p-1)) - 3) and a = 2p - 1:
        Plus  -> (-R,  a R, -sqrt(3) a)
        Minus -> ( R, -a R, -sqrt(3) a)
    """
    q = boundary_q(p, branch, basis_kind, tol)
    return chip_bloch(ChipPoint(p=p, q=q, basis_kind=basis_kind))


def chip_grid(n: int, basis_kind: BasisKind = BasisKind.QBISM) -> List[Tuple[float, float]]:
    """n x n (p, q) points covering the physical chip, q spanning the two border branches."""
    if n < 2:
        raise OutOfRange(f"Grid size {n} must be at least 2")
    points = []
    for p in np.linspace(*support_interval(basis_kind), n):
        p = float(p)
        lo = boundary_q(p, Branch.MINUS, basis_kind)
        hi = boundary_q(p, Branch.PLUS, basis_kind)
        points.extend((p, float(q)) for q in np.linspace(lo, hi, n))
    return points


def factorize(prob: ProbVector4, tol: float = TOL_ALG) -> Optional[Tuple[float, float]]:
    """(p, q) such that prob is their outer product, or None when the table is correlated."""
    prob.checked(tol)
    if abs(prob.p1 * prob.p4 - prob.p2 * prob.p3) > tol:
        return None
    p, q = prob.p1 + prob.p2, prob.p1 + prob.p3
    if np.max(np.abs(ProbVector4.outer(p, q).array() - prob.array())) > max(tol, 1e-10):
        return None
    return p, q


def surface_residual(r: BlochVector, orientation: Orientation = Orientation.O1) -> float:
    if orientation == Orientation.O1:
        return SQRT3 * r.y - r.x * r.z
    if orientation == Orientation.O2:
        return SQRT3 * r.x - r.y * r.z
    return SQRT3 * r.z - r.x * r.y


def wootters_surface_residual(r: BlochVector, orientation: Orientation = Orientation.O1) -> float:
    """Wootters chips: y = xz (O1), z = xy (O2), x = yz (O3)."""
    if orientation == Orientation.O1:
        return r.y - r.x * r.z
    if orientation == Orientation.O2:
        return r.z - r.x * r.y
    return r.x - r.y * r.z


def chip_membership(
    r: BlochVector,
    orientation: Orientation = Orientation.O1,
    tol: float = TOL_PHYS,
    basis_kind: BasisKind = BasisKind.QBISM,
) -> Membership:
    if basis_kind == BasisKind.WOOTTERS:
        residual = wootters_surface_residual(r, orientation)
    else:
        residual = surface_residual(r, orientation)
    if abs(residual) > tol:
        return Membership.OUTSIDE
    norm = r.norm()
    if abs(norm - 1) <= tol:
        return Membership.BOUNDARY
    if norm < 1 - tol:
        return Membership.INTERIOR
    return Membership.OUTSIDE


def permute_orientation(prob: ProbVector4, which: Permutation) -> ProbVector4:
    """
    Swap two entries of the 4-vector.

    Sigma1 and Sigma2 each exchange the O1 and O2 chips and fix O3;
    Sigma3 exchanges O1 and O3 and fixes O2.
    """
    prob.checked()
    i, j = PERMUTATION_SWAPS[which]
    weights = prob.array()
    weights[[i, j]] = weights[[j, i]]
    return ProbVector4.from_array(weights, mode=prob.mode)


@singledispatch
def matthews_phi(arg, tol: float = TOL_ALG) -> float:
    """Matthews correlation of the two binary variables behind a 4-vector."""
    raise TypeError(f"Unsupported argument type {type(arg).__name__}")


@matthews_phi.register
def _(arg: ProbVector4, tol: float = TOL_ALG) -> float:
    table = arg.checked(tol).table()
    marginals = np.concatenate([table.sum(axis=1), table.sum(axis=0)])
    if marginals.min() <= tol:
        raise DegenerateMarginal(f"Marginal {marginals.min()} of {arg.array().tolist()} vanishes")
    return float((table[0, 0] * table[1, 1] - table[0, 1] * table[1, 0]) / np.sqrt(np.prod(marginals)))


@matthews_phi.register
def _(arg: BlochVector, tol: float = TOL_ALG) -> float:
    spread = (3 - arg.x**2) * (3 - arg.z**2)
    if spread <= tol:
        raise DegenerateMarginal(f"Bloch vector {arg.array().tolist()} has a degenerate marginal")
    return float((SQRT3 * arg.y - arg.x * arg.z) / np.sqrt(spread))


def matthews_phi_rescaled(r: BlochVector, tol: float = TOL_ALG) -> float:
    """Correlation on a Bloch ball of radius 1/sqrt(3); equals matthews_phi(sqrt(3) r)."""
    spread = (1 - r.x**2) * (1 - r.z**2)
    if spread <= tol:
        raise DegenerateMarginal(f"Bloch vector {r.array().tolist()} has a degenerate marginal")
    return float((r.y - r.x * r.z) / np.sqrt(spread))


def bloch_to_chip(r: BlochVector, tol: float = TOL_ALG) -> Optional[ChipPoint]:
    """Chart coordinates of an O1 SIC chip point, or None off the chip."""
    prob = bloch_to_prob(r)
    if prob.mode == Mode.SIGNED:
        return None
    factors = factorize(prob, tol)
    if factors is None:
        return None
    p, q = factors
    return ChipPoint(p=p, q=q)


def phi_field(points: np.ndarray) -> np.ndarray:
    """matthews_phi over an (n, 3) array of Bloch vectors in the unit ball."""
    points = np.asarray(points, dtype=float)
    x, y, z = points.T
    spread = (3 - x**2) * (3 - z**2)
    if spread.min(initial=np.inf) <= TOL_ALG:
        raise DegenerateMarginal("Bloch vectors with a degenerate marginal in the field")
    return (SQRT3 * y - x * z) / np.sqrt(spread)
