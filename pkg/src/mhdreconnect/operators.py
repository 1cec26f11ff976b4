"""Spectral calculus on the periodic box: derivatives, projections, heat flow.

Everything here is a Fourier-multiplier operation.  Operators accept fields in
either representation (converting internally) and return spectral fields,
except ``heat_evolve`` which preserves the input representation so callers can
chain it with physical-space norms cheaply.
"""

from __future__ import annotations

import numpy as np

from .fields import ScalarField, VectorField
from .grid import Grid

#: Default cap on the backward-heat multiplier; modes amplified beyond this
#: are zeroed rather than allowed to swamp the field with noise.
DEFAULT_AMPLIFICATION_CAP = 1e12


def curl(field: VectorField) -> VectorField:
    """Spectral curl, i k x fhat.  The result is divergence-free."""
    f = field.to_spectral()
    kx, ky, kz = f.grid.k_deriv_views()
    fx, fy, fz = f.data
    out = np.empty_like(f.data)
    out[0] = 1j * (ky * fz - kz * fy)
    out[1] = 1j * (kz * fx - kx * fz)
    out[2] = 1j * (kx * fy - ky * fx)
    return VectorField(f.grid, out, spectral=True)


def divergence(field: VectorField) -> ScalarField:
    f = field.to_spectral()
    kx, ky, kz = f.grid.k_deriv_views()
    out = 1j * (kx * f.data[0] + ky * f.data[1] + kz * f.data[2])
    return ScalarField(f.grid, out, spectral=True)


def gradient(field: ScalarField) -> VectorField:
    f = field.to_spectral()
    kx, ky, kz = f.grid.k_deriv_views()
    out = np.empty((3,) + f.data.shape, dtype=complex)
    out[0] = 1j * kx * f.data
    out[1] = 1j * ky * f.data
    out[2] = 1j * kz * f.data
    return VectorField(f.grid, out, spectral=True)


def jacobian_field(field: VectorField):
    """All nine partial derivatives; entry [i][j] is d(F_i)/d(x_j), spectral."""
    f = field.to_spectral()
    kviews = f.grid.k_deriv_views()
    return tuple(
        tuple(
            ScalarField(f.grid, 1j * kviews[j] * f.data[i], spectral=True)
            for j in range(3)
        )
        for i in range(3)
    )


def leray_project(field: VectorField) -> VectorField:
    """Project onto divergence-free fields, (I - k k^T / |k|^2) per mode.

    The zero mode is passed through unchanged: constants are divergence-free
    and the continuum projector is undefined there.
    """
    f = field.to_spectral()
    grid = f.grid
    kx, ky, kz = grid.k_deriv_views()
    kdotf = kx * f.data[0] + ky * f.data[1] + kz * f.data[2]
    kdotf *= grid.inv_k2_deriv
    out = np.empty_like(f.data)
    out[0] = f.data[0] - kx * kdotf
    out[1] = f.data[1] - ky * kdotf
    out[2] = f.data[2] - kz * kdotf
    return VectorField(grid, out, spectral=True)


def heat_evolve(field, tau: float, eta: float = 1.0, amplification_cap: float | None = None):
    """Apply the diffusion semigroup, multiplier exp(-eta*tau*|k|^2).

    Backward evolution (eta*tau < 0) is ill-posed; it is only allowed with an
    amplification cap, and modes whose multiplier would exceed the cap are
    zeroed.  Preserves the representation of the input.
    """
    spectral_in = field.spectral
    f = field.to_spectral()
    grid = f.grid
    exponent = -eta * tau
    if exponent > 0:
        if amplification_cap is None:
            raise ValueError(
                "backward heat evolution requires an amplification cap "
                f"(e.g. {DEFAULT_AMPLIFICATION_CAP:.0e})"
            )
        mult = np.exp(np.minimum(exponent * grid.k2, np.log(amplification_cap) + 1.0))
        mult[mult > amplification_cap] = 0.0
    else:
        mult = np.exp(exponent * grid.k2)
    out = type(field)(grid, f.data * mult, spectral=True)
    return out if spectral_in else out.to_physical()


def smooth_cutoff(s: np.ndarray) -> np.ndarray:
    """Radial C^inf bump: 1 for s <= 1/2, 0 for s >= 1, monotone between.

    Built from g(t) = exp(-1/t) via chi = g(2-2s) / (g(2-2s) + g(2s-1)).
    """
    s = np.asarray(s, dtype=float)
    out = np.ones_like(s)
    out[s >= 1.0] = 0.0
    mid = (s > 0.5) & (s < 1.0)
    if np.any(mid):
        sm = s[mid]
        ga = np.exp(-1.0 / (2.0 - 2.0 * sm))
        gb = np.exp(-1.0 / (2.0 * sm - 1.0))
        out[mid] = ga / (ga + gb)
    return out


def _low_pass_multiplier(grid: Grid, radius: float) -> np.ndarray:
    return smooth_cutoff(np.sqrt(grid.k2) / radius)


def freq_project_low(field, radius: float):
    """Smooth low-frequency projection: multiplier chi(|k|/radius)."""
    if not radius > 0:
        raise ValueError("cutoff radius must be positive")
    f = field.to_spectral()
    mult = _low_pass_multiplier(f.grid, radius)
    return type(field)(f.grid, f.data * mult, spectral=True)


def freq_project_high(field, radius: float):
    """Complement of freq_project_low; the two sum to the input exactly."""
    f = field.to_spectral()
    low = freq_project_low(f, radius)
    return type(field)(f.grid, f.data - low.data, spectral=True)


def dealias(field):
    """Zero all modes with max_j |m_j| > n/3 (includes the Nyquist planes)."""
    f = field.to_spectral()
    return type(field)(f.grid, f.data * f.grid.dealias_mask, spectral=True)
