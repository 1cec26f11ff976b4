"""Scalar and vector fields on the periodic grid, in physical or spectral form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid

# Relative size of the imaginary residue tolerated when a spectral field is
# brought back to physical space; anything larger means broken Hermitian
# symmetry in the coefficients.
HERMITIAN_TOL = 1e-10


@dataclass
class ScalarField:
    grid: Grid
    data: np.ndarray
    spectral: bool = False

    def __post_init__(self):
        expected = (self.grid.n,) * 3
        if self.data.shape != expected:
            raise ValueError(f"field shape {self.data.shape} != grid shape {expected}")

    @property
    def values(self) -> np.ndarray:
        return self.data

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.data.copy(), self.spectral)

    def to_spectral(self) -> "ScalarField":
        if self.spectral:
            return self
        return ScalarField(self.grid, self.grid.forward(self.data), spectral=True)

    def to_physical(self) -> "ScalarField":
        if not self.spectral:
            return self
        return ScalarField(self.grid, _real_inverse(self.grid, self.data), spectral=False)


@dataclass
class VectorField:
    """Three scalar components sharing one grid, stored as one (3,n,n,n) array."""

    grid: Grid
    data: np.ndarray
    spectral: bool = False

    def __post_init__(self):
        expected = (3,) + (self.grid.n,) * 3
        if self.data.shape != expected:
            raise ValueError(f"field shape {self.data.shape} != expected {expected}")

    @classmethod
    def from_components(cls, cx: ScalarField, cy: ScalarField, cz: ScalarField) -> "VectorField":
        if not (cx.grid == cy.grid == cz.grid):
            raise ValueError("components must share one grid")
        if not (cx.spectral == cy.spectral == cz.spectral):
            raise ValueError("components must share one representation")
        return cls(cx.grid, np.stack([cx.data, cy.data, cz.data]), cx.spectral)

    @property
    def values(self) -> np.ndarray:
        return self.data

    @property
    def x(self) -> ScalarField:
        return ScalarField(self.grid, self.data[0], self.spectral)

    @property
    def y(self) -> ScalarField:
        return ScalarField(self.grid, self.data[1], self.spectral)

    @property
    def z(self) -> ScalarField:
        return ScalarField(self.grid, self.data[2], self.spectral)

    @property
    def components(self):
        return (self.x, self.y, self.z)

    def copy(self) -> "VectorField":
        return VectorField(self.grid, self.data.copy(), self.spectral)

    def to_spectral(self) -> "VectorField":
        if self.spectral:
            return self
        return VectorField(self.grid, self.grid.forward(self.data), spectral=True)

    def to_physical(self) -> "VectorField":
        if not self.spectral:
            return self
        return VectorField(self.grid, _real_inverse(self.grid, self.data), spectral=False)

    def magnitude(self) -> np.ndarray:
        """Pointwise Euclidean magnitude (physical representation)."""
        phys = self.to_physical()
        return np.sqrt(np.sum(phys.data**2, axis=0))


Field = ScalarField | VectorField


def _real_inverse(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    work = grid.inverse(coeffs)
    residue = float(np.max(np.abs(work.imag))) if work.size else 0.0
    scale = float(np.max(np.abs(work.real)))
    if residue > HERMITIAN_TOL * max(scale, 1e-30):
        raise ValueError(
            f"Hermitian symmetry violated: imaginary residue {residue:.3e} "
            f"vs field scale {scale:.3e}"
        )
    return np.ascontiguousarray(work.real)


def to_spectral(field: Field) -> Field:
    """Forward transform; a no-op on spectral input."""
    return field.to_spectral()


def to_physical(field: Field) -> Field:
    """Inverse transform with Hermitian-symmetry check; a no-op on physical input."""
    return field.to_physical()
