"""Periodic-box grid with wavenumber bookkeeping for spectral calculus.

The box is [-L/2, L/2)^3 sampled at n points per axis.  Arrays are indexed
``values[i, j, l]`` for the node ``(x_i, y_j, z_l)``; serialization flattens
them x-fastest (Fortran order).  Spectral coefficients follow the continuum
convention

    fhat(k) = sum_x f(x) exp(-i k.x) (L/n)^3,

so a constant field c has ``fhat(0) = c * L^3`` and single harmonics land on
single modes.  Because nodes start at -L/2 rather than 0, the map between the
raw DFT and this convention is a per-mode sign ``(-1)^(m1+m2+m3)`` which the
transform helpers fold in.
"""

from __future__ import annotations

import os

import numpy as np
import scipy.fft


def fft_workers() -> int:
    """Worker count for FFT calls; capped by the MHD_THREADS env var."""
    env = os.environ.get("MHD_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


class Grid:
    """Uniform periodic grid on [-L/2, L/2)^3 with n samples per axis.

    Wavenumbers are k = (2*pi/L) * m with integer m in [-n/2, n/2), stored in
    FFT order.  The Nyquist mode m = -n/2 is tracked explicitly; dealiasing
    removes it together with everything above |m| = n/3.
    """

    def __init__(self, L: float, n: int):
        if n % 2 != 0 or n < 8:
            raise ValueError(f"grid resolution must be even and >= 8, got {n}")
        if not L > 0:
            raise ValueError(f"box side must be positive, got {L}")
        self.L = float(L)
        self.n = int(n)
        self.h = self.L / self.n

        self.modes1 = np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)  # 0,1,..,-n/2,..,-1
        self.k1 = (2.0 * np.pi / self.L) * self.modes1
        # Odd-order derivatives use a zeroed Nyquist wavenumber: the mode is
        # one-sided, so multiplying it by ik has an ambiguous sign and breaks
        # Hermitian symmetry of real fields.
        self.k1_deriv = self.k1.copy()
        self.k1_deriv[n // 2] = 0.0
        self.x1 = -self.L / 2.0 + self.h * np.arange(n)

        kx, ky, kz = self.k_views()
        self.k2 = kx**2 + ky**2 + kz**2
        kdx, kdy, kdz = self.k_deriv_views()
        self.k2_deriv = kdx**2 + kdy**2 + kdz**2
        self.inv_k2_deriv = np.zeros_like(self.k2_deriv)
        nonzero = self.k2_deriv > 0
        self.inv_k2_deriv[nonzero] = 1.0 / self.k2_deriv[nonzero]

        sign1 = np.where(self.modes1 % 2 == 0, 1.0, -1.0)
        self.parity = (
            sign1[:, None, None] * sign1[None, :, None] * sign1[None, None, :]
        )

        keep1 = np.abs(self.modes1) <= n / 3.0
        self.dealias_mask = (
            keep1[:, None, None] & keep1[None, :, None] & keep1[None, None, :]
        )

    @property
    def nyquist_wavenumber(self) -> float:
        return (2.0 * np.pi / self.L) * (self.n // 2)

    def k_views(self):
        """Broadcastable (kx, ky, kz) views shaped (n,1,1), (1,n,1), (1,1,n)."""
        n = self.n
        return (
            self.k1.reshape(n, 1, 1),
            self.k1.reshape(1, n, 1),
            self.k1.reshape(1, 1, n),
        )

    def k_deriv_views(self):
        """Like k_views but with the Nyquist wavenumber zeroed (for odd derivatives)."""
        n = self.n
        return (
            self.k1_deriv.reshape(n, 1, 1),
            self.k1_deriv.reshape(1, n, 1),
            self.k1_deriv.reshape(1, 1, n),
        )

    def coord_views(self):
        """Broadcastable (X, Y, Z) node-coordinate views."""
        n = self.n
        return (
            self.x1.reshape(n, 1, 1),
            self.x1.reshape(1, n, 1),
            self.x1.reshape(1, 1, n),
        )

    def radius2(self) -> np.ndarray:
        """|x|^2 at every node, shape (n, n, n)."""
        X, Y, Z = self.coord_views()
        return X**2 + Y**2 + Z**2

    def forward(self, values: np.ndarray) -> np.ndarray:
        """Physical samples -> spectral coefficients (continuum convention)."""
        out = scipy.fft.fftn(values, axes=(-3, -2, -1), workers=fft_workers())
        out *= self.h**3
        out *= self.parity
        return out

    def inverse(self, coeffs: np.ndarray) -> np.ndarray:
        """Spectral coefficients -> complex physical samples (imag ~ 0 for real fields)."""
        scaled = coeffs * (self.parity / self.h**3)
        return scipy.fft.ifftn(scaled, axes=(-3, -2, -1), workers=fft_workers())

    def index_coords(self, points: np.ndarray) -> np.ndarray:
        """Map box coordinates (..., 3) to fractional grid indices (3, ...)."""
        pts = np.asarray(points, dtype=float)
        return np.moveaxis((pts + self.L / 2.0) / self.h, -1, 0)

    def min_image(self, delta: np.ndarray) -> np.ndarray:
        """Wrap coordinate differences into [-L/2, L/2)."""
        return (np.asarray(delta) + self.L / 2.0) % self.L - self.L / 2.0

    def __eq__(self, other) -> bool:
        return isinstance(other, Grid) and other.n == self.n and other.L == self.L

    def __repr__(self) -> str:
        return f"Grid(L={self.L!r}, n={self.n})"
