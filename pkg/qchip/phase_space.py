"""
Probability and quasi-probability charts of a qubit.

A state is a 4-vector of weights on a phase-space basis. Two bases are built
in: the QBism SIC-POVM basis (weights are measurable probabilities) and the
Wootters basis (weights may be negative). The simplex of probability
4-vectors is mapped to 3-space by a fixed 4D rotation followed by dropping
the constant first coordinate.
"""
from enum import Enum
from functools import lru_cache
from typing import Tuple

import numpy as np
from pydantic import BaseModel, validator

from .errors import NotNormalized, NumericalFailure, OutOfRange, SingularBasis
from .log import logger
from .qubit import (
    PAULI,
    BlochVector,
    DensityMatrix,
    EigenPair,
    frozen_array,
    validate_density,
)
from .settings import TOL_ALG

SQRT3 = np.sqrt(3.0)


class Mode(str, Enum):
    NON_NEGATIVE = "NonNegative"
    SIGNED = "Signed"


class BasisKind(str, Enum):
    QBISM = "QBismSIC"
    WOOTTERS = "Wootters"


class ProbVector4(BaseModel, frozen=True):
    """
    Weights (p1, p2, p3, p4) on a phase-space basis.

    The order matches the outer product (pq, p(1-q), (1-p)q, (1-p)(1-q)), so
    the row-major 2x2 table has the P marginal on rows and Q on columns.
    """

    p1: float
    p2: float
    p3: float
    p4: float
    mode: Mode = Mode.NON_NEGATIVE

    @classmethod
    def from_array(cls, values, mode: Mode = Mode.NON_NEGATIVE) -> "ProbVector4":
        p1, p2, p3, p4 = (float(v) for v in values)
        return cls(p1=p1, p2=p2, p3=p3, p4=p4, mode=mode)

    @classmethod
    def outer(cls, p: float, q: float) -> "ProbVector4":
        return cls.from_array(np.kron([p, 1 - p], [q, 1 - q]))

    def array(self) -> np.ndarray:
        return np.array([self.p1, self.p2, self.p3, self.p4])

    def table(self) -> np.ndarray:
        return self.array().reshape(2, 2)

    def checked(self, tol: float = TOL_ALG) -> "ProbVector4":
        total = self.p1 + self.p2 + self.p3 + self.p4
        if abs(total - 1) > tol:
            raise NotNormalized(f"Weights sum to {total}, expected 1")
        if self.mode == Mode.NON_NEGATIVE and min(self.array()) < -tol:
            raise OutOfRange(
                f"Negative weight in NonNegative mode: {self.array().tolist()}"
            )
        return self


class PhaseSpaceBasis(BaseModel, frozen=True, arbitrary_types_allowed=True):
    kind: BasisKind
    elements: np.ndarray

    @validator("elements", pre=True)
    def _four_2x2(cls, value):
        return frozen_array(value, shape=(4, 2, 2))

    def matrix(self) -> np.ndarray:
        """4x4 matrix whose columns are the vectorized elements."""
        return self.elements.reshape(4, 4).T


class Rotation4(BaseModel, frozen=True, arbitrary_types_allowed=True):
    theta: float
    matrix: np.ndarray

    @validator("matrix", pre=True)
    def _real_4x4(cls, value):
        return frozen_array(value, dtype=float, shape=(4, 4))


class Tetra3Point(BaseModel, frozen=True):
    u: float
    v: float
    w: float

    @classmethod
    def from_array(cls, values) -> "Tetra3Point":
        u, v, w = (float(c) for c in values)
        return cls(u=u, v=v, w=w)

    def array(self) -> np.ndarray:
        return np.array([self.u, self.v, self.w])

    def norm(self) -> float:
        return float(np.linalg.norm(self.array()))


def rotation_matrix(theta: float) -> Rotation4:
    """Rotation by theta in the plane spanned by (1,1,1,1) and (1,0,0,0)."""
    c, s = np.cos(theta), np.sin(theta) / SQRT3
    d, o = (c + 2) / 3, (c - 1) / 3
    return Rotation4(
        theta=theta,
        matrix=[
            [c, s, s, s],
            [-s, d, o, o],
            [-s, o, d, o],
            [-s, o, o, d],
        ],
    )


@lru_cache(maxsize=None)
def _simplex_rotation() -> np.ndarray:
    return rotation_matrix(np.pi / 3).matrix


def simplex_project(p: ProbVector4, tol: float = TOL_ALG) -> Tetra3Point:
    p.checked(tol)
    rotated = _simplex_rotation() @ p.array()
    # sum-to-one inputs land on the hyperplane whose first coordinate is 1/2
    if abs(rotated[0] - 0.5) > tol:
        raise NumericalFailure(f"Rotated first coordinate {rotated[0]} is not 1/2")
    return Tetra3Point.from_array(rotated[1:])


def simplex_unproject(t: Tetra3Point) -> ProbVector4:
    """Inverse of simplex_project. Points outside the tetrahedron give signed weights."""
    p1 = 0.25 - (t.u + t.v + t.w) / 2
    offset = p1 / 3 + 1 / 6
    weights = np.array([p1, t.u + offset, t.v + offset, t.w + offset])
    mode = Mode.NON_NEGATIVE if weights.min() >= -TOL_ALG else Mode.SIGNED
    return ProbVector4.from_array(weights, mode=mode)


def tetrahedron_vertices() -> np.ndarray:
    return np.array([simplex_project(ProbVector4.from_array(e)).array() for e in np.eye(4)])


def tetra_to_bloch(t: Tetra3Point) -> BlochVector:
    """
    Bloch vector of a projected simplex point read in the SIC chart.

    A similarity with |r| = 2 sqrt(3) |t|; the insphere of radius 1/(2 sqrt(3))
    maps onto the Bloch sphere.
    """
    return prob_to_bloch(simplex_unproject(t))


@lru_cache(maxsize=None)
def _elements(kind: BasisKind) -> Tuple[np.ndarray, ...]:
    if kind == BasisKind.QBISM:
        diag_lo, diag_hi = (1 - SQRT3) / 2, (1 + SQRT3) / 2
        amp = np.sqrt(1.5)
        phases = (-3 * np.pi / 4, np.pi / 4, 3 * np.pi / 4, -np.pi / 4)
        diagonals = ((diag_lo, diag_hi),) * 2 + ((diag_hi, diag_lo),) * 2
        columns = [
            (a, amp * np.exp(1j * phase), amp * np.exp(-1j * phase), b)
            for (a, b), phase in zip(diagonals, phases)
        ]
    else:
        amp = 1 / np.sqrt(2)
        e_minus, e_plus = np.exp(-1j * np.pi / 4), np.exp(1j * np.pi / 4)
        columns = [
            (1, amp * e_minus, amp * e_plus, 0),
            (0, amp * e_plus, amp * e_minus, 1),
            (1, -amp * e_minus, -amp * e_plus, 0),
            # Hermitian form; the off-diagonals must be conjugate
            (0, -amp * e_plus, -amp * e_minus, 1),
        ]
    return tuple(np.array(column, dtype=complex).reshape(2, 2) for column in columns)


def basis(kind: BasisKind) -> PhaseSpaceBasis:
    return PhaseSpaceBasis(kind=kind, elements=np.stack(_elements(kind)))


@lru_cache(maxsize=None)
def _inverse(kind: BasisKind) -> np.ndarray:
    return basis_inverse(basis(kind))


def basis_inverse(b: PhaseSpaceBasis, tol: float = TOL_ALG) -> np.ndarray:
    matrix = b.matrix()
    condition = np.linalg.cond(matrix)
    if not np.isfinite(condition) or condition * tol > 1e-3:
        raise SingularBasis(f"{b.kind.value} basis is not invertible (cond={condition})")
    logger.debug("Inverted phase-space basis", extra={"basis": b.kind.value})
    return np.linalg.inv(matrix)


def dual_basis(b: PhaseSpaceBasis) -> np.ndarray:
    """
    Gram-inverse dual frame D_i = sum_j (G^-1)_ij B_j with G_ij = Tr(B_i B_j).

    Tr(D_i rho) recovers the i-th weight; for the SIC basis D_i is the POVM element Q_i.
    """
    gram = np.real(np.einsum("iab,jba->ij", b.elements, b.elements))
    return np.einsum("ij,jab->iab", np.linalg.inv(gram), b.elements)


def basis_bloch_vectors(b: PhaseSpaceBasis) -> np.ndarray:
    return np.array(
        [[np.real(np.trace(sigma @ element)) for sigma in PAULI] for element in b.elements]
    )


def prob_to_density(p: ProbVector4, b: PhaseSpaceBasis, tol: float = TOL_ALG) -> DensityMatrix:
    """Vectorized density = basis matrix . weights."""
    p.checked(tol)
    return DensityMatrix(entries=(b.matrix() @ p.array()).reshape(2, 2))


def density_to_prob(rho: DensityMatrix, b: PhaseSpaceBasis, tol: float = TOL_ALG) -> ProbVector4:
    validate_density(rho, tol)
    inverse = _inverse(b.kind) if _is_builtin(b) else basis_inverse(b, tol)
    weights = np.real(inverse @ rho.vectorized())
    mode = Mode.SIGNED if b.kind == BasisKind.WOOTTERS else Mode.NON_NEGATIVE
    if mode == Mode.NON_NEGATIVE and weights.min() < -tol:
        mode = Mode.SIGNED
    return ProbVector4.from_array(weights, mode=mode)


def _is_builtin(b: PhaseSpaceBasis) -> bool:
    return np.array_equal(b.elements, np.stack(_elements(b.kind)))


def prob_to_bloch(p: ProbVector4, tol: float = TOL_ALG) -> BlochVector:
    """SIC weights to Bloch vector, exact affine map."""
    p.checked(tol)
    return BlochVector(
        x=SQRT3 * (1 - 2 * p.p1 - 2 * p.p3),
        y=SQRT3 * (1 - 2 * p.p2 - 2 * p.p3),
        z=SQRT3 * (1 - 2 * p.p1 - 2 * p.p2),
    )


def bloch_to_prob(r: BlochVector) -> ProbVector4:
    x, y, z = r.x / SQRT3, r.y / SQRT3, r.z / SQRT3
    weights = [
        (1 - (x - y + z)) / 4,
        (1 + (x - y - z)) / 4,
        (1 - (x + y - z)) / 4,
        (1 + (x + y + z)) / 4,
    ]
    mode = Mode.NON_NEGATIVE if min(weights) >= -TOL_ALG else Mode.SIGNED
    return ProbVector4.from_array(weights, mode=mode)


def sic_eigenvalues(p: ProbVector4, tol: float = TOL_ALG) -> EigenPair:
    """Eigenvalues of the density matrix written directly in SIC weights."""
    p.checked(tol)
    p1, p2, p3 = p.p1, p.p2, p.p3
    radicand = (
        8 * (p1**2 + p1 * (p2 + p3 - 1) + p2**2 + p2 * p3 + p3**2)
        - 8 * p2
        - 8 * p3
        + 3
    )
    spread = SQRT3 * np.sqrt(max(radicand, 0.0))
    return EigenPair(lambda_plus=(1 + spread) / 2, lambda_minus=(1 - spread) / 2)


def scaling_matrix() -> np.ndarray:
    """Doubly-stochastic map from Pauli outcome probabilities to coarse SIC outcomes."""
    return np.eye(2) / SQRT3 + (1 - 1 / SQRT3) / 2


def rescale_projective(prob: float) -> float:
    if not 0 <= prob <= 1:
        raise OutOfRange(f"Probability {prob} outside [0, 1]")
    return (prob - 0.5) / SQRT3 + 0.5


def unscale_projective(prob: float) -> float:
    """Inverse of rescale_projective."""
    return (prob - 0.5) * SQRT3 + 0.5
