"""
Single-qubit states: density matrices, Bloch vectors and their physicality.

All models are frozen. Unphysical Bloch vectors are representable; physicality
is always an explicit query.
"""
from typing import Iterable

import numpy as np
from pydantic import BaseModel, validator
from scipy.stats import entropy

from .errors import NonHermitian, TraceNotOne
from .settings import TOL_ALG, TOL_PHYS

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def frozen_array(value, dtype=complex, shape=None) -> np.ndarray:
    array = np.array(value, dtype=dtype)
    if shape is not None and array.shape != shape:
        raise ValueError(f"expected shape {shape}, got {array.shape}")
    array.setflags(write=False)
    return array


class BlochVector(BaseModel, frozen=True):
    x: float
    y: float
    z: float

    @classmethod
    def from_array(cls, values: Iterable[float]) -> "BlochVector":
        x, y, z = (float(v) for v in values)
        return cls(x=x, y=y, z=z)

    def array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def norm(self) -> float:
        return float(np.linalg.norm(self.array()))

    def is_physical(self, tol: float = TOL_PHYS) -> bool:
        return self.norm() ** 2 <= 1 + tol

    def is_pure(self, tol: float = TOL_PHYS) -> bool:
        return abs(self.norm() - 1) <= tol


class DensityMatrix(BaseModel, frozen=True, arbitrary_types_allowed=True):
    entries: np.ndarray

    @validator("entries", pre=True)
    def _complex_2x2(cls, value):
        return frozen_array(value, shape=(2, 2))

    def vectorized(self) -> np.ndarray:
        """Row-major vectorization, the layout of the phase-space basis columns."""
        return self.entries.reshape(4)


class EigenPair(BaseModel, frozen=True):
    lambda_plus: float
    lambda_minus: float

    @validator("lambda_minus")
    def _ordered(cls, value, values):
        if "lambda_plus" in values and value > values["lambda_plus"]:
            raise ValueError("lambda_minus must not exceed lambda_plus")
        return value


def validate_density(rho: DensityMatrix, tol: float = TOL_ALG) -> None:
    entries = rho.entries
    if np.max(np.abs(entries - entries.conj().T)) > tol:
        raise NonHermitian(f"Density matrix is not Hermitian: {entries.tolist()}")
    trace = np.trace(entries)
    if abs(trace - 1) > tol:
        raise TraceNotOne(f"Density matrix trace is {trace}, expected 1")


def bloch_to_density(r: BlochVector) -> DensityMatrix:
    """rho = (I + r . sigma) / 2"""
    return DensityMatrix(
        entries=0.5 * (IDENTITY + r.x * SIGMA_X + r.y * SIGMA_Y + r.z * SIGMA_Z)
    )


def density_to_bloch(rho: DensityMatrix, tol: float = TOL_ALG) -> BlochVector:
    validate_density(rho, tol)
    return BlochVector.from_array(
        np.real(np.trace(sigma @ rho.entries)) for sigma in PAULI
    )


def eigenvalues_2x2(rho: DensityMatrix, tol: float = TOL_ALG) -> EigenPair:
    """
    Closed-form eigenvalues from trace and determinant.

    The trace is not forced to one, so the closed form can be compared with a
    generic solver on any Hermitian input.
    """
    entries = rho.entries
    if np.max(np.abs(entries - entries.conj().T)) > tol:
        raise NonHermitian(f"Density matrix is not Hermitian: {entries.tolist()}")
    half_trace = np.real(np.trace(entries)) / 2
    determinant = np.real(np.linalg.det(entries))
    spread = np.sqrt(max(half_trace**2 - determinant, 0.0))
    return EigenPair(lambda_plus=half_trace + spread, lambda_minus=half_trace - spread)


def is_physical(rho: DensityMatrix, tol: float = TOL_PHYS) -> bool:
    return eigenvalues_2x2(rho).lambda_minus >= -tol


def purity(rho: DensityMatrix) -> float:
    return float(np.real(np.trace(rho.entries @ rho.entries)))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy in bits. Eigenvalues within rounding of zero are clipped."""
    pair = eigenvalues_2x2(rho)
    spectrum = np.clip([pair.lambda_plus, pair.lambda_minus], 0.0, None)
    return float(entropy(spectrum, base=2))


def bloch_distance(a: BlochVector, b: BlochVector) -> float:
    return float(np.linalg.norm(a.array() - b.array()))
